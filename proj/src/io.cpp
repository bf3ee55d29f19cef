#include "qtm/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace qtm {
namespace io {

std::string format_double(double x) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc()) throw Error("format_double failed");
    return std::string(buf, p);
}

double parse_double(const std::string& s) {
    double x = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc()) throw Error("parse_double failed on '" + s + "'");
    return x;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

std::string symbol_to_csv(const Symbol& a) {
    std::string out;
    for (long k = a.min_index(); k <= a.max_index(); ++k) {
        const cplx c = a.coeff(k);
        out += std::to_string(k) + "," + format_double(c.real()) + "," + format_double(c.imag()) +
               "\n";
    }
    return out;
}

Symbol symbol_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::pair<long, cplx>> entries;
    long lo = 0, hi = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split(line, ',');
        if (f.size() != 3) throw Error("symbol csv: expected k,re,im");
        const long k = std::stol(f[0]);
        entries.emplace_back(k, cplx(parse_double(f[1]), parse_double(f[2])));
        if (entries.size() == 1) {
            lo = hi = k;
        } else {
            lo = std::min(lo, k);
            hi = std::max(hi, k);
        }
    }
    if (entries.empty()) return Symbol();
    std::vector<cplx> c(static_cast<std::size_t>(hi - lo + 1), cplx(0.0));
    for (const auto& [k, v] : entries) c[static_cast<std::size_t>(k - lo)] = v;
    return Symbol(std::move(c), lo, 0.0);
}

json symbol_to_json(const Symbol& a) {
    json coeffs = json::array();
    for (const cplx& c : a.coeffs()) coeffs.push_back({c.real(), c.imag()});
    return json{{"offset", a.offset()}, {"coeffs", std::move(coeffs)}};
}

Symbol symbol_from_json(const json& j) {
    std::vector<cplx> c;
    for (const auto& e : j.at("coeffs")) c.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
    return Symbol(std::move(c), j.at("offset").get<long>(), 0.0);
}

std::string dense_to_csv(const DenseMatrix& m) {
    std::string out;
    for (long i = 0; i < m.rows(); ++i) {
        for (long j = 0; j < m.cols(); ++j) {
            if (j) out += ",";
            out += format_double(m(i, j).real()) + "," + format_double(m(i, j).imag());
        }
        out += "\n";
    }
    return out;
}

DenseMatrix dense_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<cplx>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split(line, ',');
        if (f.size() % 2 != 0) throw Error("dense csv: expected re,im pairs");
        std::vector<cplx> row;
        for (std::size_t i = 0; i < f.size(); i += 2)
            row.emplace_back(parse_double(f[i]), parse_double(f[i + 1]));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) return DenseMatrix(0, 0);
    DenseMatrix m(rows.size(), rows[0].size());
    for (long i = 0; i < m.rows(); ++i) {
        if (rows[static_cast<std::size_t>(i)].size() != static_cast<std::size_t>(m.cols()))
            throw Error("dense csv: ragged rows");
        for (long j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return m;
}

json correction_to_json(const LowRankCorrection& e) {
    return json{{"rows_u", e.rows_u()},
                {"rows_v", e.rows_v()},
                {"rank", e.rank()},
                {"u", dense_to_csv(e.u())},
                {"v", dense_to_csv(e.v())}};
}

LowRankCorrection correction_from_json(const json& j) {
    if (j.at("rank").get<long>() == 0) return LowRankCorrection::zero();
    DenseMatrix u = dense_from_csv(j.at("u").get<std::string>());
    DenseMatrix v = dense_from_csv(j.at("v").get<std::string>());
    if (u.rows() != j.at("rows_u").get<long>() || v.rows() != j.at("rows_v").get<long>() ||
        u.cols() != j.at("rank").get<long>())
        throw Error("correction json: header does not match factors");
    return LowRankCorrection(std::move(u), std::move(v));
}

json qt_to_json(const QTMatrix& a) {
    return json{{"symbol", symbol_to_json(a.symbol())},
                {"correction", correction_to_json(a.correction())},
                {"flags",
                 {{"self_adjoint", a.self_adjoint()}, {"positive_definite", a.positive_definite()}}}};
}

QTMatrix qt_from_json(const json& j) {
    const auto& flags = j.at("flags");
    return QTMatrix(symbol_from_json(j.at("symbol")), correction_from_json(j.at("correction")),
                    flags.at("self_adjoint").get<bool>(),
                    flags.at("positive_definite").get<bool>());
}

json finite_to_json(const FiniteQT& a) {
    json j{{"m", a.size()},
           {"flags",
            {{"self_adjoint", a.self_adjoint()}, {"positive_definite", a.positive_definite()}}}};
    if (a.dense_mode()) {
        j["dense"] = dense_to_csv(a.dense_payload());
    } else {
        j["symbol"] = symbol_to_json(a.symbol());
        j["correction"] = correction_to_json(a.nw());
        j["e_se"] = correction_to_json(a.se());
    }
    return j;
}

FiniteQT finite_from_json(const json& j) {
    const long m = j.at("m").get<long>();
    const auto& flags = j.at("flags");
    const bool sa = flags.at("self_adjoint").get<bool>();
    const bool pd = flags.at("positive_definite").get<bool>();
    if (j.contains("dense"))
        return FiniteQT::dense(dense_from_csv(j.at("dense").get<std::string>()), sa, pd);
    return FiniteQT(m, symbol_from_json(j.at("symbol")), correction_from_json(j.at("correction")),
                    correction_from_json(j.at("e_se")), sa, pd);
}

std::string trace_to_csv(const IterationTrace& t) {
    std::string out = "iter,residual\n";
    for (std::size_t i = 0; i < t.residual_history.size(); ++i)
        out += std::to_string(i + 1) + "," + format_double(t.residual_history[i]) + "\n";
    return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void save_json(const std::filesystem::path& path, const json& j) {
    write_file_atomic(path, j.dump(2) + "\n");
}

json load_json(const std::filesystem::path& path) {
    return json::parse(read_file(path));
}

} // namespace io
} // namespace qtm
