#include "qtm/dense_oracle.hpp"

#include <cmath>
#include <vector>

namespace qtm {

using Eigen::MatrixXcd;

DenseMatrix dense_func(const DenseMatrix& a, const std::function<double(double)>& f) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(a);
    if (es.info() != Eigen::Success) throw Error("dense_func: eigendecomposition failed");
    Eigen::VectorXd w = es.eigenvalues();
    for (long i = 0; i < w.size(); ++i) w(i) = f(w(i));
    return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

DenseMatrix dense_sqrt(const DenseMatrix& a) {
    return dense_func(a, [](double x) { return std::sqrt(x); });
}

DenseMatrix dense_power(const DenseMatrix& a, double t) {
    return dense_func(a, [t](double x) { return std::pow(x, t); });
}

DenseMatrix dense_log(const DenseMatrix& a) {
    return dense_func(a, [](double x) { return std::log(x); });
}

DenseMatrix dense_exp(const DenseMatrix& a) {
    return dense_func(a, [](double x) { return std::exp(x); });
}

DenseMatrix dense_sharp(const DenseMatrix& a, const DenseMatrix& b, double t) {
    if (t == 0.0) return a;
    if (t == 1.0) return b;
    const DenseMatrix s = dense_sqrt(a);
    const DenseMatrix si = dense_power(a, -0.5);
    const DenseMatrix mid = dense_power(0.5 * (si * b * si + (si * b * si).adjoint().eval()), t);
    DenseMatrix g = s * mid * s;
    return 0.5 * (g + g.adjoint().eval());
}

namespace {

void check_spd(std::span<const DenseMatrix> mats) {
    for (const DenseMatrix& m : mats) {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
            throw NotPositiveDefinite("dense_oracle_mean: input is not positive definite");
    }
}

double rel_diff(const DenseMatrix& a, const DenseMatrix& b) {
    return (a - b).norm() / std::max(b.norm(), 1e-300);
}

DenseMatrix recursive_mean(std::span<const DenseMatrix> mats, std::span<const double> s,
                           double tol, int max_iter);

DenseMatrix sweep_mean(std::span<const DenseMatrix> mats, std::span<const double> s, double tol,
                       int max_iter) {
    const std::size_t p = mats.size();
    std::vector<DenseMatrix> cur(mats.begin(), mats.end());
    for (int k = 0; k < max_iter; ++k) {
        std::vector<DenseMatrix> next(p);
        for (std::size_t i = 0; i < p; ++i) {
            std::vector<DenseMatrix> rest;
            rest.reserve(p - 1);
            for (std::size_t j = 0; j < p; ++j)
                if (j != i) rest.push_back(cur[j]);
            const DenseMatrix inner = recursive_mean(rest, s.subspan(1), tol, max_iter);
            next[i] = s[0] == 1.0 ? inner : dense_sharp(cur[i], inner, s[0]);
        }
        double res = 0.0;
        for (std::size_t i = 0; i < p; ++i) res = std::max(res, rel_diff(next[i], cur[i]));
        cur = std::move(next);
        if (res <= tol) return cur[0];
    }
    throw NoConvergence("dense_oracle_mean: iteration did not reach tolerance");
}

DenseMatrix recursive_mean(std::span<const DenseMatrix> mats, std::span<const double> s,
                           double tol, int max_iter) {
    if (mats.size() == 2) return dense_sharp(mats[0], mats[1], s.back());
    return sweep_mean(mats, s, tol, max_iter);
}

DenseMatrix recursive_weighted(std::span<const DenseMatrix> mats, std::span<const double> w,
                               double tol, int max_iter) {
    const std::size_t p = mats.size();
    if (p == 2) return dense_sharp(mats[0], mats[1], w[1]);
    std::vector<DenseMatrix> cur(mats.begin(), mats.end());
    for (int k = 0; k < max_iter; ++k) {
        std::vector<DenseMatrix> next(p);
        for (std::size_t i = 0; i < p; ++i) {
            std::vector<DenseMatrix> rest;
            std::vector<double> wh;
            for (std::size_t j = 0; j < p; ++j)
                if (j != i) {
                    rest.push_back(cur[j]);
                    wh.push_back(w[j] / (1.0 - w[i]));
                }
            next[i] = dense_sharp(cur[i], recursive_weighted(rest, wh, tol, max_iter), 1.0 - w[i]);
        }
        double res = 0.0;
        for (std::size_t i = 0; i < p; ++i) res = std::max(res, rel_diff(next[i], cur[i]));
        cur = std::move(next);
        if (res <= tol) return cur[0];
    }
    throw NoConvergence("dense_oracle_mean: weighted iteration did not reach tolerance");
}

DenseMatrix karcher_dense(std::span<const DenseMatrix> mats, double tol, int max_iter) {
    const std::size_t p = mats.size();
    std::vector<double> s(p > 1 ? p - 1 : 1);
    for (std::size_t j = 1; j < p; ++j)
        s[j - 1] = static_cast<double>(p - j) / static_cast<double>(p - j + 1);
    DenseMatrix x = recursive_mean(mats, s, tol, max_iter); // NBMP warm start
    for (int k = 0; k < max_iter; ++k) {
        const DenseMatrix sq = dense_sqrt(x);
        const DenseMatrix si = dense_power(x, -0.5);
        DenseMatrix z = DenseMatrix::Zero(x.rows(), x.cols());
        for (const DenseMatrix& a : mats) {
            DenseMatrix mid = si * a * si;
            z += dense_log(0.5 * (mid + mid.adjoint().eval()));
        }
        if (z.norm() <= tol * static_cast<double>(p)) return x;
        DenseMatrix e = dense_exp(z / static_cast<double>(p));
        x = sq * e * sq;
        x = 0.5 * (x + x.adjoint().eval());
    }
    throw NoConvergence("dense_oracle_mean: Karcher iteration did not reach tolerance");
}

} // namespace

DenseMatrix dense_oracle_mean(MeanKind kind, std::span<const DenseMatrix> matrices, double tol,
                              int max_iter, std::span<const double> weights) {
    if (matrices.size() < 2) throw Error("dense_oracle_mean: need p >= 2 matrices");
    check_spd(matrices);
    const std::size_t p = matrices.size();
    switch (kind) {
        case MeanKind::ALM: {
            std::vector<double> s(p - 1, 1.0);
            s.back() = 0.5;
            return recursive_mean(matrices, s, tol, max_iter);
        }
        case MeanKind::NBMP: {
            std::vector<double> s(p - 1);
            for (std::size_t j = 1; j < p; ++j)
                s[j - 1] = static_cast<double>(p - j) / static_cast<double>(p - j + 1);
            return recursive_mean(matrices, s, tol, max_iter);
        }
        case MeanKind::Weighted: {
            if (weights.size() != p) throw Error("dense_oracle_mean: weights size mismatch");
            return recursive_weighted(matrices, weights, tol, max_iter);
        }
        case MeanKind::Karcher:
            return karcher_dense(matrices, tol, max_iter);
    }
    throw Error("dense_oracle_mean: unknown kind");
}

} // namespace qtm
