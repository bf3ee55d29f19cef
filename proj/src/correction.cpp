#include "qtm/correction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace qtm {

using Eigen::MatrixXcd;
using Eigen::VectorXd;

LowRankCorrection::LowRankCorrection(MatrixXcd u, MatrixXcd v) : u_(std::move(u)), v_(std::move(v)) {
    if (u_.cols() != v_.cols()) throw Error("factor rank mismatch");
    if (u_.rows() == 0 || v_.rows() == 0 || u_.cols() == 0) {
        u_.resize(0, 0);
        v_.resize(0, 0);
    }
}

cplx LowRankCorrection::entry(long i, long j) const {
    if (empty() || i < 0 || j < 0 || i >= rows_u() || j >= rows_v()) return cplx(0.0);
    return v_.row(j).dot(u_.row(i)); // sum_c U(i,c) conj(V(j,c))
}

MatrixXcd LowRankCorrection::to_dense(long rows, long cols) const {
    MatrixXcd out = MatrixXcd::Zero(rows, cols);
    if (empty()) return out;
    const long r = std::min(rows, rows_u());
    const long c = std::min(cols, rows_v());
    out.topLeftCorner(r, c) = u_.topRows(r) * v_.topRows(c).adjoint();
    return out;
}

LowRankCorrection LowRankCorrection::adjoint() const {
    LowRankCorrection out(v_, u_);
    out.sigma_max_ = sigma_max_;
    return out;
}

LowRankCorrection LowRankCorrection::scaled(cplx alpha) const {
    if (empty() || alpha == cplx(0.0)) return {};
    LowRankCorrection out(u_ * alpha, v_);
    out.sigma_max_ = sigma_max_ >= 0.0 ? sigma_max_ * std::abs(alpha) : -1.0;
    return out;
}

namespace {

// Spectral norm of a factored product U V^H via thin QR of both factors and an
// SVD of the small core.
double factored_norm2(const MatrixXcd& u, const MatrixXcd& v) {
    if (u.cols() == 0 || u.rows() == 0 || v.rows() == 0) return 0.0;
    const auto qr_u = Eigen::HouseholderQR<MatrixXcd>(u);
    const auto qr_v = Eigen::HouseholderQR<MatrixXcd>(v);
    const long k = u.cols();
    const long ru = std::min<long>(u.rows(), k);
    const long rv = std::min<long>(v.rows(), k);
    MatrixXcd Ru = qr_u.matrixQR().topRows(ru).triangularView<Eigen::Upper>();
    MatrixXcd Rv = qr_v.matrixQR().topRows(rv).triangularView<Eigen::Upper>();
    MatrixXcd core = Ru * Rv.adjoint();
    return core.jacobiSvd().singularValues()(0);
}

// Truncated column-pivoted Householder QR: A ~= Q * M with Q (m x r)
// orthonormal. Stops once the largest remaining column norm drops to tol_abs.
struct Tcpqr {
    MatrixXcd q; // m x r
    MatrixXcd m; // r x n, columns in the original order
};

Tcpqr tcpqr(const MatrixXcd& a, double tol_abs) {
    const long rows = a.rows(), cols = a.cols();
    MatrixXcd work = a;
    std::vector<long> perm(cols);
    std::iota(perm.begin(), perm.end(), 0);
    VectorXd norms2(cols), norms2_orig(cols);
    for (long j = 0; j < cols; ++j) norms2(j) = work.col(j).squaredNorm();
    norms2_orig = norms2;

    std::vector<Eigen::VectorXcd> hh;
    std::vector<double> beta;
    const long max_r = std::min(rows, cols);
    long r = 0;
    for (; r < max_r; ++r) {
        long piv = r;
        double best = norms2(r);
        for (long j = r + 1; j < cols; ++j)
            if (norms2(j) > best) { best = norms2(j); piv = j; }
        if (best <= tol_abs * tol_abs) break;
        if (piv != r) {
            work.col(piv).swap(work.col(r));
            std::swap(norms2(piv), norms2(r));
            std::swap(norms2_orig(piv), norms2_orig(r));
            std::swap(perm[piv], perm[r]);
        }
        // Householder for column r below the diagonal
        Eigen::VectorXcd x = work.col(r).tail(rows - r);
        const double xnorm = x.norm();
        Eigen::VectorXcd v = x;
        const cplx x0 = x(0);
        const double ax0 = std::abs(x0);
        const cplx phase = ax0 > 0.0 ? x0 / ax0 : cplx(1.0);
        v(0) += phase * xnorm;
        const double vnorm2 = v.squaredNorm();
        const double b = vnorm2 > 0.0 ? 2.0 / vnorm2 : 0.0;
        if (b > 0.0 && cols > r + 1) {
            auto tail = work.bottomRightCorner(rows - r, cols - r - 1);
            Eigen::RowVectorXcd w = v.adjoint() * tail;
            tail.noalias() -= b * v * w;
        }
        work.col(r).tail(rows - r).setZero();
        work(r, r) = -phase * xnorm;
        hh.push_back(std::move(v));
        beta.push_back(b);
        // downdate remaining column norms, recomputing on cancellation
        for (long j = r + 1; j < cols; ++j) {
            norms2(j) -= std::norm(work(r, j));
            if (norms2(j) < 1e-8 * norms2_orig(j)) {
                norms2(j) = work.col(j).tail(rows - r - 1).squaredNorm();
                norms2_orig(j) = norms2(j);
            }
        }
    }

    Tcpqr out;
    out.q = MatrixXcd::Identity(rows, r);
    for (long k = r; k-- > 0;) {
        if (beta[k] == 0.0) continue;
        auto block = out.q.bottomRows(rows - k);
        Eigen::RowVectorXcd w = hh[k].adjoint() * block;
        block.noalias() -= beta[k] * hh[k] * w;
    }
    out.m.resize(r, cols);
    for (long j = 0; j < cols; ++j) out.m.col(perm[j]) = work.col(j).head(r);
    return out;
}

// Lower bound for sigma_max(U V^H) from exact matrix columns.
double sigma_lower_bound(const MatrixXcd& u, const MatrixXcd& v) {
    long best = 0, second = -1;
    double bn = -1.0, sn = -1.0;
    for (long j = 0; j < v.rows(); ++j) {
        const double n = v.row(j).squaredNorm();
        if (n > bn) { second = best; sn = bn; best = j; bn = n; }
        else if (n > sn) { second = j; sn = n; }
    }
    double lb = (u * v.row(best).adjoint()).norm();
    if (second >= 0) lb = std::max(lb, (u * v.row(second).adjoint()).norm());
    return lb;
}

// Per-row max moduli accumulated column-wise (column-major friendly).
Eigen::VectorXd row_maxabs(const MatrixXcd& f) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(f.rows());
    for (long c = 0; c < f.cols(); ++c) out = out.cwiseMax(f.col(c).cwiseAbs());
    return out;
}

long trailing_support(const MatrixXcd& f, double thr) {
    const Eigen::VectorXd m = row_maxabs(f);
    long rows = f.rows();
    while (rows > 0 && m(rows - 1) < thr) --rows;
    return rows;
}

// Exact L2 norms of the rows of U V^H via the Gram matrix of the other factor.
Eigen::VectorXd product_row_norms(const MatrixXcd& rows_factor, const MatrixXcd& other) {
    const Eigen::MatrixXcd gram = other.adjoint() * other;
    Eigen::VectorXd out(rows_factor.rows());
    for (long i = 0; i < rows_factor.rows(); ++i) {
        const Eigen::RowVectorXcd r = rows_factor.row(i);
        out(i) = std::sqrt(std::max(0.0, (r * gram).dot(r).real()));
    }
    return out;
}

long trailing_support_values(const Eigen::VectorXd& norms, double thr) {
    long rows = norms.size();
    while (rows > 0 && norms(rows - 1) < thr) --rows;
    return rows;
}

} // namespace

double LowRankCorrection::sigma_max() const {
    if (sigma_max_ < 0.0) sigma_max_ = factored_norm2(u_, v_);
    return sigma_max_;
}

bool LowRankCorrection::is_self_adjoint(double tol) const {
    if (empty()) return true;
    // D = E - E^H in factored form [U, V] * [V, -U]^H
    const long k = rank();
    const long n = support();
    MatrixXcd du = MatrixXcd::Zero(n, 2 * k), dv = MatrixXcd::Zero(n, 2 * k);
    du.topLeftCorner(rows_u(), k) = u_;
    du.topRightCorner(rows_v(), k) = v_;
    dv.topLeftCorner(rows_v(), k) = v_;
    dv.topRightCorner(rows_u(), k) = -u_;
    return factored_norm2(du, dv) <= tol * std::max(sigma_max(), 1e-300);
}

double lr_norm2(const LowRankCorrection& e) {
    return e.empty() ? 0.0 : e.sigma_max();
}

double lr_diff_norm2(const LowRankCorrection& e, const LowRankCorrection& f) {
    if (e.empty()) return lr_norm2(f);
    if (f.empty()) return lr_norm2(e);
    const long ru = std::max(e.rows_u(), f.rows_u());
    const long rv = std::max(e.rows_v(), f.rows_v());
    MatrixXcd u = MatrixXcd::Zero(ru, e.rank() + f.rank());
    MatrixXcd v = MatrixXcd::Zero(rv, e.rank() + f.rank());
    u.topLeftCorner(e.rows_u(), e.rank()) = e.u();
    u.topRightCorner(f.rows_u(), f.rank()) = -f.u();
    v.topLeftCorner(e.rows_v(), e.rank()) = e.v();
    v.topRightCorner(f.rows_v(), f.rank()) = f.v();
    return factored_norm2(u, v);
}

LowRankCorrection hankel_correction(const Symbol& a, const Symbol& b, double eps) {
    if (eps < 0.0) eps = std::min(a.trunc_eps(), b.trunc_eps());
    const long ma = std::max(0L, -a.min_index());
    const long nb = std::max(0L, b.max_index());
    if (ma == 0 || nb == 0) return {};
    const long s = std::min(ma, nb);
    MatrixXcd u(ma, s), v(nb, s);
    for (long i = 0; i < ma; ++i)
        for (long c = 0; c < s; ++c) u(i, c) = a.coeff(-i - c - 1);
    for (long j = 0; j < nb; ++j)
        for (long c = 0; c < s; ++c) v(j, c) = std::conj(b.coeff(j + c + 1));
    return lr_compress(LowRankCorrection(std::move(u), std::move(v)), eps);
}

LowRankCorrection lr_add(const LowRankCorrection& e, const LowRankCorrection& f, double eps) {
    if (e.empty()) return lr_compress(f, eps);
    if (f.empty()) return lr_compress(e, eps);
    const double floor = e.sigma_max() + f.sigma_max();
    const long ru = std::max(e.rows_u(), f.rows_u());
    const long rv = std::max(e.rows_v(), f.rows_v());
    const long ke = e.rank(), kf = f.rank();
    MatrixXcd u = MatrixXcd::Zero(ru, ke + kf), v = MatrixXcd::Zero(rv, ke + kf);
    u.topLeftCorner(e.rows_u(), ke) = e.u();
    u.topRightCorner(f.rows_u(), kf) = f.u();
    v.topLeftCorner(e.rows_v(), ke) = e.v();
    v.topRightCorner(f.rows_v(), kf) = f.v();
    return lr_compress(LowRankCorrection(std::move(u), std::move(v)), eps, floor);
}

LowRankCorrection lr_compress(const LowRankCorrection& e, double eps, double scale_floor,
                              double row_eps) {
    if (e.empty()) return {};
    MatrixXcd u = e.u(), v = e.v();
    if (row_eps < 0.0) row_eps = 10.0 * eps;

    // Pre-trim trailing factor rows below the value-truncation threshold.
    {
        const double mu = u.cwiseAbs().maxCoeff();
        const double mv = v.cwiseAbs().maxCoeff();
        if (mu == 0.0 || mv == 0.0) return {};
        const long su = trailing_support(u, row_eps * mu);
        const long sv0 = trailing_support(v, row_eps * mv);
        if (su == 0 || sv0 == 0) return {};
        if (su < u.rows()) u = u.topRows(su).eval();
        if (sv0 < v.rows()) v = v.topRows(sv0).eval();
    }

    const double sigma_lb = std::max(sigma_lower_bound(u, v), scale_floor);
    if (sigma_lb == 0.0) return {};

    // Pre-screen: drop trailing column pairs whose norm products sum below a
    // small slice of the compression budget.
    const long k = u.cols();
    if (k > 8) {
        std::vector<double> prod(k);
        std::vector<long> idx(k);
        std::iota(idx.begin(), idx.end(), 0);
        for (long c = 0; c < k; ++c) prod[c] = u.col(c).norm() * v.col(c).norm();
        std::sort(idx.begin(), idx.end(), [&](long a_, long b_) { return prod[a_] < prod[b_]; });
        double budget = 0.02 * eps * sigma_lb;
        std::vector<bool> keep(k, true);
        long kept = k;
        for (long c : idx) {
            if (prod[c] > budget) break;
            budget -= prod[c];
            keep[c] = false;
            --kept;
        }
        if (kept < k) {
            MatrixXcd u2(u.rows(), kept), v2(v.rows(), kept);
            long w = 0;
            for (long c = 0; c < k; ++c)
                if (keep[c]) { u2.col(w) = u.col(c); v2.col(w) = v.col(c); ++w; }
            u = std::move(u2);
            v = std::move(v2);
            if (u.cols() == 0) return {};
        }
    }

    // Rank-revealing orthogonal factorization of both factors.
    const double tol_u = 0.02 * eps * sigma_lb /
                         std::max(1e-300, v.norm() * std::sqrt(static_cast<double>(u.cols())));
    const double tol_v = 0.02 * eps * sigma_lb /
                         std::max(1e-300, u.norm() * std::sqrt(static_cast<double>(v.cols())));
    Tcpqr fu = tcpqr(u, tol_u);
    Tcpqr fv = tcpqr(v, tol_v);
    if (fu.q.cols() == 0 || fv.q.cols() == 0) return {};

    // Small dense SVD of the core, truncated at eps * sigma_max.
    MatrixXcd core = fu.m * fv.m.adjoint();
    Eigen::JacobiSVD<MatrixXcd> svd(core, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double s1 = sv.size() > 0 ? sv(0) : 0.0;
    if (s1 <= 0.0) return {};
    const double cut = eps * std::max(s1, scale_floor);
    long rank = 0;
    while (rank < sv.size() && sv(rank) > cut) ++rank;
    if (rank == 0) return {};

    // Split the singular values across both factors so that row norms measure
    // the rows' true contribution to E (a row living only in small-sigma
    // directions is weighted down accordingly).
    Eigen::VectorXd sqrt_sv = sv.head(rank).cwiseSqrt();
    MatrixXcd nu = fu.q * (svd.matrixU().leftCols(rank) * sqrt_sv.asDiagonal());
    MatrixXcd nv = fv.q * (svd.matrixV().leftCols(rank) * sqrt_sv.asDiagonal());

    // Trailing row-support trim against the exact row/column norms of E,
    // at the value-truncation threshold row_eps * sigma_max.
    const double thr = row_eps * s1;
    const long su = trailing_support_values(product_row_norms(nu, nv), thr);
    const long sv_rows = trailing_support_values(product_row_norms(nv, nu), thr);
    if (su == 0 || sv_rows == 0) return {};

    LowRankCorrection out(nu.topRows(su), nv.topRows(sv_rows));
    out.sigma_max_ = s1;
    return out;
}

} // namespace qtm
