#include "qtm/means.hpp"

#include "qtm/detail/means_impl.hpp"

#include <algorithm>
#include <cmath>

namespace qtm {

const char* to_string(MeanKind kind) {
    switch (kind) {
        case MeanKind::ALM: return "ALM";
        case MeanKind::NBMP: return "NBMP";
        case MeanKind::Weighted: return "WEIGHTED";
        case MeanKind::Karcher: return "KARCHER";
    }
    return "?";
}

MeanKind mean_kind_from_string(const std::string& name) {
    std::string up;
    for (char c : name) up.push_back(static_cast<char>(std::toupper(c)));
    if (up == "ALM") return MeanKind::ALM;
    if (up == "NBMP") return MeanKind::NBMP;
    if (up == "WEIGHTED") return MeanKind::Weighted;
    if (up == "KARCHER") return MeanKind::Karcher;
    throw Error("unknown mean kind: " + name);
}

void MeanRequest::validate() const {
    if (matrices.size() < 2) throw Error("mean request needs p >= 2 matrices");
    for (const QTMatrix& a : matrices) require_spd(a, "mean request");
    if (kind == MeanKind::Weighted) {
        if (weights.size() != matrices.size())
            throw Error("weighted mean needs one weight per matrix");
        double sum = 0.0;
        for (double w : weights) {
            if (!(w > 0.0)) throw Error("weights must be positive");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-15) throw Error("weights must sum to 1");
    }
}

namespace {

// Final truncation at 10x the internal threshold, the reporting convention of
// the experiments.
QTMatrix finalize_mean(const QTMatrix& g, const ToleranceConfig& cfg) {
    const double eps = 10.0 * cfg.trunc_eps;
    return QTMatrix(g.symbol().real_valued_part().truncated(eps),
                    lr_compress(g.correction(), eps, 0.0, eps), true, true);
}

// Max-grid deviation of the mean's symbol from the predicted symbol law.
void fill_symbol_check(MeanResult& out, const MeanRequest& req) {
    const std::size_t grid = 2048;
    auto angles = uniform_angles(grid);
    auto got = sym_eval_real(out.mean.symbol(), angles);
    std::vector<std::vector<double>> in;
    in.reserve(req.matrices.size());
    for (const QTMatrix& a : req.matrices) in.push_back(sym_eval_real(a.symbol(), angles));
    double worst = 0.0, scale = 0.0;
    const double p = static_cast<double>(req.matrices.size());
    for (std::size_t l = 0; l < grid; ++l) {
        double pred;
        if (req.kind == MeanKind::Weighted) {
            pred = 1.0;
            for (std::size_t i = 0; i < in.size(); ++i) pred *= std::pow(in[i][l], req.weights[i]);
        } else {
            double prod = 1.0;
            for (const auto& v : in) prod *= v[l];
            pred = std::pow(prod, 1.0 / p);
        }
        worst = std::max(worst, std::abs(got[l] - pred));
        scale = std::max(scale, std::abs(pred));
    }
    out.symbol_check = worst;
    out.symbol_check_rel = worst / std::max(scale, 1e-300);
}

MeanResult run_iterative(const MeanRequest& req, std::vector<Rational> exponents) {
    req.validate();
    MeanResult out;
    QTMatrix g = detail::iterative_mean_core(std::span<const QTMatrix>(req.matrices),
                                             std::span<const Rational>(exponents), req.tol,
                                             req.max_iter, req.cfg, &out.trace, true);
    out.mean = finalize_mean(g, req.cfg);
    fill_symbol_check(out, req);
    return out;
}

} // namespace

MeanResult alm_mean(const MeanRequest& req) {
    return run_iterative(req, detail::alm_exponents_list(req.matrices.size()));
}

MeanResult nbmp_mean(const MeanRequest& req) {
    return run_iterative(req, detail::nbmp_exponents_list(req.matrices.size()));
}

MeanResult weighted_mean(const MeanRequest& req) {
    req.validate();
    std::vector<double> w = req.weights;
    double sum = 0.0;
    for (double x : w) sum += x;
    for (double& x : w) x /= sum;
    MeanResult out;
    QTMatrix g = detail::weighted_mean_core(std::span<const QTMatrix>(req.matrices),
                                            std::span<const double>(w), req.tol, req.max_iter,
                                            req.cfg, &out.trace, true);
    out.mean = finalize_mean(g, req.cfg);
    fill_symbol_check(out, req);
    return out;
}

MeanResult karcher_mean(const MeanRequest& req) {
    req.validate();
    MeanRequest warm = req;
    warm.kind = MeanKind::NBMP;
    MeanResult nbmp = nbmp_mean(warm);
    MeanResult out;
    QTMatrix g = detail::karcher_core(std::span<const QTMatrix>(req.matrices), nbmp.mean, req.tol,
                                      req.max_iter, req.cfg, &out.trace, true);
    out.mean = finalize_mean(g, req.cfg);
    fill_symbol_check(out, req);
    return out;
}

MeanResult compute_mean(const MeanRequest& req) {
    switch (req.kind) {
        case MeanKind::ALM: return alm_mean(req);
        case MeanKind::NBMP: return nbmp_mean(req);
        case MeanKind::Weighted: return weighted_mean(req);
        case MeanKind::Karcher: return karcher_mean(req);
    }
    throw Error("unknown mean kind");
}

double karcher_residual(std::span<const QTMatrix> matrices, const QTMatrix& x, double tol,
                        const ToleranceConfig& cfg) {
    const QTMatrix s = qt_sqrt(x, tol, cfg);
    const QTMatrix si = qt_inv(s, tol, cfg);
    return detail::karcher_eval(matrices, si, tol, cfg, true).residual;
}

double alm_exponent(int p, int k) {
    if (p < 3) throw Error("alm_exponent: p must be at least 3");
    if (k < 0) return k == -1 ? 1.0 : throw Error("alm_exponent: k must be >= -1");
    return (1.0 - std::pow(-1.0 / (p - 1), k)) / static_cast<double>(p);
}

ScalarAlmExponents scalar_alm_exponents(int p, int k, std::span<const double> a) {
    static const double defaults[] = {2.0, 5.0, 0.8, 1.7, 3.1, 0.45, 2.6, 1.05};
    std::vector<double> vals(a.begin(), a.end());
    while (static_cast<int>(vals.size()) < p)
        vals.push_back(defaults[vals.size() % std::size(defaults)]);
    vals.resize(p);

    ScalarAlmExponents out;
    out.n_k = alm_exponent(p, k);
    out.n_km1 = alm_exponent(p, k - 1);

    std::vector<double> cur = vals, next(p);
    double worst = 0.0;
    for (int step = 1; step <= k; ++step) {
        for (int i = 0; i < p; ++i) {
            double prod = 1.0;
            for (int j = 0; j < p; ++j)
                if (j != i) prod *= cur[j];
            next[i] = std::pow(prod, 1.0 / (p - 1));
        }
        cur = next;
        const double nk = alm_exponent(p, step);
        const double nkm1 = alm_exponent(p, step - 1);
        for (int i = 0; i < p; ++i) {
            double closed = std::pow(vals[i], nkm1);
            for (int j = 0; j < p; ++j)
                if (j != i) closed *= std::pow(vals[j], nk);
            worst = std::max(worst, std::abs(cur[i] - closed) / closed);
        }
    }
    out.check_rel_err = worst;
    return out;
}

double thompson_distance(const QTMatrix& a, const QTMatrix& b, long m) {
    require_spd(a, "thompson_distance");
    require_spd(b, "thompson_distance");
    Eigen::MatrixXcd am = qt_truncate(a, m), bm = qt_truncate(b, m);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(am, bm, Eigen::EigenvaluesOnly);
    if (ges.info() != Eigen::Success)
        throw NotPositiveDefinite("thompson_distance: truncation pencil is not definite");
    const double lmax = ges.eigenvalues().maxCoeff();
    const double lmin = ges.eigenvalues().minCoeff();
    if (!(lmin > 0.0)) throw NotPositiveDefinite("thompson_distance: non-positive pencil eigenvalue");
    return std::log(std::max(lmax, 1.0 / lmin));
}

} // namespace qtm
