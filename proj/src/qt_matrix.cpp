#include "qtm/qt_matrix.hpp"

#include "qtm/fft.hpp"

#include <algorithm>
#include <cmath>

namespace qtm {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

QTMatrix QTMatrix::toeplitz(Symbol a) {
    const bool sa = a.is_real_valued();
    const bool pd = sa && !a.empty() && min_on_grid(a) > 0.0;
    return QTMatrix(std::move(a), {}, sa, pd);
}

MatrixXcd toeplitz_times_block(const Symbol& a, const MatrixXcd& x) {
    if (a.empty() || x.rows() == 0 || x.cols() == 0) return MatrixXcd(0, x.cols());
    const long lo = a.min_index(), hi = a.max_index();
    const long rows_in = x.rows();
    const long rows_out = rows_in + std::max(0L, -lo);
    // kernel for convolution: reversed coefficients, indices -hi .. -lo
    std::vector<cplx> kernel(a.coeffs().rbegin(), a.coeffs().rend());
    MatrixXcd out(rows_out, x.cols());
    std::vector<cplx> col(static_cast<std::size_t>(rows_in));
    for (long c = 0; c < x.cols(); ++c) {
        for (long i = 0; i < rows_in; ++i) col[static_cast<std::size_t>(i)] = x(i, c);
        auto conv = fft::convolve(kernel, col);
        // conv index n corresponds to output row n - hi
        for (long i = 0; i < rows_out; ++i) {
            const long n = i + hi;
            out(i, c) = (n >= 0 && n < static_cast<long>(conv.size())) ? conv[static_cast<std::size_t>(n)]
                                                                       : cplx(0.0);
        }
    }
    return out;
}

QTMatrix qt_mul(const QTMatrix& a, const QTMatrix& b, const ToleranceConfig& cfg) {
    const double eps = cfg.trunc_eps;
    Symbol s = sym_mul(a.symbol(), b.symbol(), eps);

    const LowRankCorrection& ea = a.correction();
    const LowRankCorrection& eb = b.correction();

    // Term scales for the compression floor.
    double floor = 0.0;
    const double wa = wiener_norm(a.symbol());
    const double wb = wiener_norm(b.symbol());
    const double na = ea.empty() ? 0.0 : ea.sigma_max();
    const double nb = eb.empty() ? 0.0 : eb.sigma_max();

    std::vector<MatrixXcd> us, vs;
    auto push = [&](MatrixXcd u, MatrixXcd v) {
        if (u.rows() > 0 && v.rows() > 0 && u.cols() > 0) {
            us.push_back(std::move(u));
            vs.push_back(std::move(v));
        }
    };

    LowRankCorrection hk = hankel_correction(a.symbol(), b.symbol(), eps);
    if (!hk.empty()) {
        push(-hk.u(), hk.v());
        floor += hk.sigma_max();
    }
    if (!eb.empty()) {
        push(toeplitz_times_block(a.symbol(), eb.u()), eb.v());
        floor += wa * nb;
    }
    if (!ea.empty()) {
        push(ea.u(), toeplitz_times_block(b.symbol().conj_transpose(), ea.v()));
        floor += na * wb;
    }
    if (!ea.empty() && !eb.empty()) {
        const long inner = std::min(ea.rows_v(), eb.rows_u());
        if (inner > 0) {
            MatrixXcd core = ea.v().topRows(inner).adjoint() * eb.u().topRows(inner);
            push(ea.u() * core, eb.v());
            floor += na * nb;
        }
    }

    LowRankCorrection corr;
    if (!us.empty()) {
        long ru = 0, rv = 0, k = 0;
        for (std::size_t i = 0; i < us.size(); ++i) {
            ru = std::max<long>(ru, us[i].rows());
            rv = std::max<long>(rv, vs[i].rows());
            k += us[i].cols();
        }
        MatrixXcd u = MatrixXcd::Zero(ru, k), v = MatrixXcd::Zero(rv, k);
        long at = 0;
        for (std::size_t i = 0; i < us.size(); ++i) {
            u.block(0, at, us[i].rows(), us[i].cols()) = us[i];
            v.block(0, at, vs[i].rows(), vs[i].cols()) = vs[i];
            at += us[i].cols();
        }
        corr = lr_compress(LowRankCorrection(std::move(u), std::move(v)), eps, floor);
    }
    return QTMatrix(std::move(s), std::move(corr));
}

QTMatrix qt_add(const QTMatrix& a, const QTMatrix& b, const ToleranceConfig& cfg) {
    Symbol s = sym_add(a.symbol(), b.symbol()).truncated(cfg.trunc_eps);
    LowRankCorrection c = lr_add(a.correction(), b.correction(), cfg.trunc_eps);
    const bool sa = a.self_adjoint() && b.self_adjoint();
    const bool pd = a.positive_definite() && b.positive_definite();
    return QTMatrix(std::move(s), std::move(c), sa, pd);
}

QTMatrix qt_sub(const QTMatrix& a, const QTMatrix& b, const ToleranceConfig& cfg) {
    return qt_add(a, qt_scale(b, -1.0), cfg);
}

QTMatrix qt_scale(const QTMatrix& a, double alpha) {
    if (alpha == 0.0) return QTMatrix();
    return QTMatrix(sym_scale(a.symbol(), alpha), a.correction().scaled(alpha),
                    a.self_adjoint(), a.positive_definite() && alpha > 0.0);
}

QTMatrix qt_adjoint(const QTMatrix& a) {
    return QTMatrix(a.symbol().conj_transpose(), a.correction().adjoint(),
                    a.self_adjoint(), a.positive_definite());
}

QTMatrix qt_hermitian_part(const QTMatrix& a, const ToleranceConfig& cfg) {
    QTMatrix h = qt_scale(qt_add(a, qt_adjoint(a), cfg), 0.5);
    return QTMatrix(h.symbol().real_valued_part(), h.correction(), true, a.positive_definite());
}

double qt_norm(const QTMatrix& a) {
    return wiener_norm(a.symbol()) + lr_norm2(a.correction());
}

double qt_diff_norm(const QTMatrix& a, const QTMatrix& b) {
    const double ds = wiener_norm(sym_add(a.symbol(), sym_scale(b.symbol(), -1.0)));
    return ds + lr_diff_norm2(a.correction(), b.correction());
}

MatrixXcd qt_truncate(const QTMatrix& a, long m) {
    MatrixXcd out = MatrixXcd::Zero(m, m);
    const Symbol& s = a.symbol();
    for (long d = std::max(-(m - 1), s.min_index()); d <= std::min(m - 1, s.max_index()); ++d)
        out.diagonal(d).setConstant(s.coeff(d));
    const LowRankCorrection& e = a.correction();
    if (!e.empty()) {
        const long r = std::min<long>(m, e.rows_u());
        const long c = std::min<long>(m, e.rows_v());
        out.topLeftCorner(r, c) += e.u().topRows(r) * e.v().topRows(c).adjoint();
    }
    return out;
}

namespace {

// Lanczos estimate of the largest-magnitude eigenvalue of a Hermitian dense
// matrix, with full reorthogonalization.
double lanczos_extreme(const MatrixXcd& m, int steps, bool want_min = false) {
    const long n = m.rows();
    if (n == 0) return 0.0;
    steps = std::min<long>(steps, n);
    MatrixXcd basis(n, steps);
    Eigen::VectorXd alpha(steps), beta(steps);
    VectorXcd v = VectorXcd::Ones(n);
    for (long i = 0; i < n; ++i) v(i) += cplx(0.3 * std::cos(1.7 * double(i)), 0.0);
    v.normalize();
    long k = 0;
    for (; k < steps; ++k) {
        basis.col(k) = v;
        VectorXcd w = m * v;
        alpha(k) = w.dot(v).real();
        w -= alpha(k) * v;
        if (k > 0) w -= beta(k - 1) * basis.col(k - 1);
        // full reorthogonalization
        w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).adjoint() * w);
        const double nb = w.norm();
        beta(k) = nb;
        if (nb < 1e-14) { ++k; break; }
        v = w / nb;
    }
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    for (long i = 0; i < k; ++i) {
        t(i, i) = alpha(i);
        if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta(i);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t, Eigen::EigenvaluesOnly);
    if (want_min) return es.eigenvalues().minCoeff();
    return std::max(std::abs(es.eigenvalues().minCoeff()), std::abs(es.eigenvalues().maxCoeff()));
}

} // namespace

Norm2Estimate qt_norm2_estimate(const QTMatrix& a, long m, int steps) {
    Norm2Estimate out;
    out.upper = qt_norm(a);
    out.grid_max = max_abs_on_grid(a.symbol());
    MatrixXcd t = qt_truncate(a, m);
    if (a.self_adjoint()) {
        out.lanczos = lanczos_extreme(t, steps);
    } else {
        // Lanczos on A^H A
        MatrixXcd g = t.adjoint() * t;
        out.lanczos = std::sqrt(std::max(0.0, lanczos_extreme(g, steps)));
    }
    return out;
}

SpectralBounds spectral_bounds(const QTMatrix& a, bool refine) {
    SpectralBounds b;
    b.beta = qt_norm(a);
    const double grid_min = a.symbol().empty() ? 0.0 : min_on_grid(a.symbol());
    b.alpha = std::max(0.0, grid_min - lr_norm2(a.correction()));
    if (refine) {
        // The truncation's smallest eigenvalue over-estimates the operator's
        // lower spectral edge (compressions raise it); keep a margin.
        const long size = std::min<long>(a.correction().support() + 2 * a.symbol().bandwidth() + 32, 1200);
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(qt_truncate(a, size), Eigen::EigenvaluesOnly);
        const double est = 0.95 * es.eigenvalues().minCoeff();
        b.alpha = std::max(b.alpha, std::min(est, b.beta));
    }
    return b;
}

bool check_positive_definite(const QTMatrix& a) {
    if (a.is_zero()) return false;
    if (!a.symbol().is_real_valued()) return false;
    if (!a.correction().empty() && !a.correction().is_self_adjoint()) return false;
    if (min_on_grid(a.symbol()) <= 0.0) return false;
    const long size = std::min<long>(a.correction().support() + a.symbol().bandwidth() + 32, 1024);
    Eigen::LLT<MatrixXcd> llt(qt_truncate(a, size));
    return llt.info() == Eigen::Success;
}

void require_spd(const QTMatrix& a, const char* who) {
    if (a.self_adjoint() && a.positive_definite()) return;
    if (!check_positive_definite(a))
        throw NotPositiveDefinite(std::string(who) + ": matrix is not self-adjoint positive definite");
}

} // namespace qtm
