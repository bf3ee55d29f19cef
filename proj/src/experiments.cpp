#include "qtm/experiments.hpp"

#include <Eigen/Core>

#include <chrono>
#include <cmath>

namespace qtm {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string kind_list_to_string(const std::vector<MeanKind>& kinds) {
    std::string out;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        if (i) out += ",";
        out += to_string(kinds[i]);
    }
    return out;
}

} // namespace

Symbol family_symbol(const FamilyCoeffs& f, double theta) {
    std::vector<cplx> c = {cplx(f.f2), cplx(f.f1), cplx(f.f0 + theta), cplx(f.f1), cplx(f.f2)};
    return Symbol(std::move(c), -2);
}

void ExperimentConfig::validate() const {
    if (family.empty()) throw Error("config: empty symbol family");
    for (double t : thetas)
        if (!(t > 0.0)) throw Error("config: theta must be positive");
    if (!(eps > 0.0 && eps < 1.0)) throw Error("config: eps must be in (0,1)");
    if (!(tol > 0.0 && tol < 1.0)) throw Error("config: tol must be in (0,1)");
    if (max_iter < 1) throw Error("config: max_iter must be positive");
    if (kinds.empty()) throw Error("config: no mean kinds selected");
}

io::json ExperimentConfig::to_json() const {
    io::json fam = io::json::array();
    for (const FamilyCoeffs& f : family) fam.push_back({f.f0, f.f1, f.f2});
    std::vector<std::string> kind_names;
    for (MeanKind k : kinds) kind_names.emplace_back(to_string(k));
    return io::json{{"family", fam},     {"thetas", thetas},          {"eps", eps},
                    {"tol", tol},        {"max_iter", max_iter},      {"kinds", kind_names},
                    {"out", out_dir.string()}};
}

ExperimentConfig ExperimentConfig::from_json(const io::json& j) {
    ExperimentConfig cfg;
    if (j.contains("family")) {
        cfg.family.clear();
        for (const auto& f : j.at("family"))
            cfg.family.push_back({f.at(0).get<double>(), f.at(1).get<double>(), f.at(2).get<double>()});
    }
    if (j.contains("thetas")) cfg.thetas = j.at("thetas").get<std::vector<double>>();
    if (j.contains("eps")) cfg.eps = j.at("eps").get<double>();
    if (j.contains("tol")) cfg.tol = j.at("tol").get<double>();
    if (j.contains("max_iter")) cfg.max_iter = j.at("max_iter").get<int>();
    if (j.contains("kinds")) {
        cfg.kinds.clear();
        for (const auto& k : j.at("kinds")) cfg.kinds.push_back(mean_kind_from_string(k.get<std::string>()));
    }
    if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
    cfg.validate();
    return cfg;
}

ToleranceConfig ExperimentConfig::tolerances() const {
    ToleranceConfig t;
    t.trunc_eps = eps / 10.0;
    t.tol = tol;
    t.max_iter = max_iter;
    return t;
}

std::vector<QTMatrix> ExperimentConfig::matrices(double theta) const {
    std::vector<QTMatrix> out;
    out.reserve(family.size());
    for (const FamilyCoeffs& f : family) out.push_back(QTMatrix::toeplitz(family_symbol(f, theta)));
    return out;
}

namespace {

MeanResult run_one_mean(const ExperimentConfig& cfg, double theta, MeanKind kind) {
    MeanRequest req;
    req.matrices = cfg.matrices(theta);
    req.kind = kind;
    req.tol = cfg.tol;
    req.max_iter = cfg.max_iter;
    req.cfg = cfg.tolerances();
    if (kind == MeanKind::Weighted)
        req.weights.assign(req.matrices.size(), 1.0 / static_cast<double>(req.matrices.size()));
    return compute_mean(req);
}

} // namespace

std::vector<Table1Row> run_table1(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<Table1Row> rows;
    for (double theta : cfg.thetas) {
        std::vector<Symbol> syms;
        for (const FamilyCoeffs& f : cfg.family) syms.push_back(family_symbol(f, theta));
        const auto t0 = clock_type::now();
        InterpolationInfo info;
        Symbol g = sym_geomean(syms, cfg.eps, &info);
        Table1Row row;
        row.theta = theta;
        row.length = info.length;
        row.points = info.points;
        row.seconds = seconds_since(t0);
        rows.push_back(row);
    }
    std::string csv = "theta,length,n,seconds\n";
    for (const Table1Row& r : rows)
        csv += io::format_double(r.theta) + "," + std::to_string(r.length) + "," +
               std::to_string(r.points) + "," + io::format_double(r.seconds) + "\n";
    io::write_file_atomic(cfg.out_dir / "table1.csv", csv);
    return rows;
}

std::vector<Table2Row> run_table2(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<Table2Row> rows;
    for (double theta : cfg.thetas) {
        for (MeanKind kind : cfg.kinds) {
            const auto t0 = clock_type::now();
            MeanResult res = run_one_mean(cfg, theta, kind);
            Table2Row row;
            row.theta = theta;
            row.kind = kind;
            row.iterations = res.trace.iterations;
            row.seconds = seconds_since(t0);
            row.size = res.mean.correction().support();
            row.rank = res.mean.correction().rank();
            rows.push_back(row);

            io::write_file_atomic(cfg.out_dir / ("trace_" + std::string(to_string(kind)) + "_theta" +
                                                 io::format_double(theta) + ".csv"),
                                  io::trace_to_csv(res.trace));
        }
    }
    std::string csv = "theta,kind,iterations,seconds,size,rank\n";
    for (const Table2Row& r : rows)
        csv += io::format_double(r.theta) + "," + to_string(r.kind) + "," +
               std::to_string(r.iterations) + "," + io::format_double(r.seconds) + "," +
               std::to_string(r.size) + "," + std::to_string(r.rank) + "\n";
    io::write_file_atomic(cfg.out_dir / "table2.csv", csv);
    return rows;
}

std::vector<Table3Row> run_table3(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<Table3Row> rows;
    for (double theta : cfg.thetas) {
        for (MeanKind kind : cfg.kinds) {
            Table3Row row;
            row.theta = theta;
            row.kind = kind;

            auto t0 = clock_type::now();
            MeanResult inf = run_one_mean(cfg, theta, kind);
            row.infinite_seconds = seconds_since(t0);

            row.m = 3 * std::max<long>(inf.mean.correction().support(), 4);
            std::vector<FiniteQT> fin;
            for (const FamilyCoeffs& f : cfg.family)
                fin.push_back(FiniteQT::toeplitz(row.m, family_symbol(f, theta)));
            std::vector<double> weights;
            if (kind == MeanKind::Weighted)
                weights.assign(fin.size(), 1.0 / static_cast<double>(fin.size()));
            t0 = clock_type::now();
            FinMeanResult finres = fin_mean(kind, fin, cfg.tol, cfg.max_iter, cfg.tolerances(), weights);
            row.finite_seconds = seconds_since(t0);
            rows.push_back(row);
        }
    }
    std::string csv = "theta,kind,m,finite_seconds,infinite_seconds\n";
    for (const Table3Row& r : rows)
        csv += io::format_double(r.theta) + "," + to_string(r.kind) + "," + std::to_string(r.m) +
               "," + io::format_double(r.finite_seconds) + "," +
               io::format_double(r.infinite_seconds) + "\n";
    io::write_file_atomic(cfg.out_dir / "table3.csv", csv);
    return rows;
}

namespace {

std::string symbol_decay_csv(const Symbol& g) {
    std::string csv = "j,log10_abs\n";
    for (long j = 0; j <= g.max_index(); ++j) {
        const double a = std::abs(g.coeff(j));
        if (a == 0.0) continue;
        csv += std::to_string(j) + "," + io::format_double(std::log10(a)) + "\n";
    }
    return csv;
}

std::string correction_grid_csv(const Eigen::MatrixXcd& e) {
    std::string csv = "i,j,log10_abs\n";
    for (long i = 0; i < e.rows(); ++i) {
        for (long j = 0; j < e.cols(); ++j) {
            const double a = std::abs(e(i, j));
            if (a == 0.0) continue;
            csv += std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
                   io::format_double(std::log10(a)) + "\n";
        }
    }
    return csv;
}

} // namespace

void run_figures(const ExperimentConfig& cfg) {
    cfg.validate();
    const double theta = cfg.thetas.front();

    MeanResult alm = run_one_mean(cfg, theta, MeanKind::ALM);
    MeanResult nbmp = run_one_mean(cfg, theta, MeanKind::NBMP);

    io::write_file_atomic(cfg.out_dir / "figure_symbol.csv", symbol_decay_csv(alm.mean.symbol()));

    const LowRankCorrection& ea = alm.mean.correction();
    const LowRankCorrection& eb = nbmp.mean.correction();
    io::write_file_atomic(cfg.out_dir / "figure_correction_alm.csv",
                          correction_grid_csv(ea.to_dense(ea.rows_u(), ea.rows_v())));
    io::write_file_atomic(cfg.out_dir / "figure_correction_nbmp.csv",
                          correction_grid_csv(eb.to_dense(eb.rows_u(), eb.rows_v())));

    const long m = 200;
    Eigen::MatrixXcd diff = qt_truncate(alm.mean, m) - qt_truncate(nbmp.mean, m);
    io::write_file_atomic(cfg.out_dir / "figure_diff_alm_nbmp.csv", correction_grid_csv(diff));
}

void write_manifest(const ExperimentConfig& cfg) {
    io::json manifest{{"tool", "qtmeans"},
                      {"version", "0.1.0"},
                      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                    std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                    std::to_string(EIGEN_MINOR_VERSION)},
                      {"kinds", kind_list_to_string(cfg.kinds)},
                      {"config", cfg.to_json()}};
    io::save_json(cfg.out_dir / "manifest.json", manifest);
}

} // namespace qtm
