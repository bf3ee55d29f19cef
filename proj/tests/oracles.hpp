// Brute-force reference constructions shared by the test suites. Everything
// here is deliberately naive (direct sums, dense assembly, full SVDs) and
// independent of the library's computational paths.
#ifndef QTM_TESTS_ORACLES_HPP
#define QTM_TESTS_ORACLES_HPP

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <random>
#include <vector>

#include "qtm/qt_matrix.hpp"
#include "qtm/symbol.hpp"

namespace oracles {

using qtm::cplx;
using qtm::Symbol;

// Trigonometric test family f0 + 2*f1*cos(t) + 2*f2*cos(2t) + theta.
inline Symbol family_symbol(double f0, double f1, double f2, double theta = 0.0) {
    std::vector<cplx> c = {cplx(f2), cplx(f1), cplx(f0 + theta), cplx(f1), cplx(f2)};
    return Symbol(std::move(c), -2);
}

// Naive coefficient convolution on sparse maps.
inline std::map<long, cplx> convolve_naive(const std::map<long, cplx>& a,
                                           const std::map<long, cplx>& b) {
    std::map<long, cplx> out;
    for (const auto& [i, x] : a)
        for (const auto& [j, y] : b) out[i + j] += x * y;
    return out;
}

inline std::map<long, cplx> to_map(const Symbol& a) {
    std::map<long, cplx> out;
    for (long k = a.min_index(); k <= a.max_index(); ++k) out[k] = a.coeff(k);
    return out;
}

// Random real-valued symbol with unit-scale coefficients and bandwidth bw.
inline Symbol random_real_valued_symbol(std::mt19937& rng, int bw) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> c(2 * bw + 1);
    c[bw] = cplx(u(rng), 0.0);
    for (int k = 1; k <= bw; ++k) {
        const cplx v(u(rng), u(rng));
        c[bw + k] = v;
        c[bw - k] = std::conj(v);
    }
    return Symbol(std::move(c), -bw);
}

// Random symbol with complex coefficients (no symmetry).
inline Symbol random_symbol(std::mt19937& rng, int lo, int hi) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> c(static_cast<std::size_t>(hi - lo + 1));
    for (auto& v : c) v = cplx(u(rng), u(rng));
    return Symbol(std::move(c), lo);
}

// Dense m x m leading block of T(a).
inline Eigen::MatrixXcd toeplitz_dense(const Symbol& a, int m) {
    Eigen::MatrixXcd t(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) t(i, j) = a.coeff(j - i);
    return t;
}

// Dense m x m leading block of H(a^-): entries a_{-i-j+1}, 1-based.
inline Eigen::MatrixXcd hankel_minus_dense(const Symbol& a, int m) {
    Eigen::MatrixXcd h(m, m);
    for (int i = 1; i <= m; ++i)
        for (int j = 1; j <= m; ++j) h(i - 1, j - 1) = a.coeff(-i - j + 1);
    return h;
}

// Dense m x m leading block of H(a^+): entries a_{i+j-1}, 1-based.
inline Eigen::MatrixXcd hankel_plus_dense(const Symbol& a, int m) {
    Eigen::MatrixXcd h(m, m);
    for (int i = 1; i <= m; ++i)
        for (int j = 1; j <= m; ++j) h(i - 1, j - 1) = a.coeff(i + j - 1);
    return h;
}

// Dense assembly of T(a) + E at size m, independent of qt_truncate.
inline Eigen::MatrixXcd qt_dense(const qtm::QTMatrix& a, int m) {
    Eigen::MatrixXcd out = toeplitz_dense(a.symbol(), m);
    out += a.correction().to_dense(m, m);
    return out;
}

// SPD family matrix, optionally with a positive semidefinite rank-1 correction.
inline qtm::QTMatrix family_matrix(double f0, double f1, double f2, double theta,
                                   bool with_corr = false) {
    qtm::QTMatrix t = qtm::QTMatrix::toeplitz(family_symbol(f0, f1, f2, theta));
    if (!with_corr) return t;
    Eigen::MatrixXcd v(6, 1);
    v << 0.8, -0.5, 0.3, -0.2, 0.1, 0.05;
    return qtm::qt_add(t, qtm::QTMatrix(Symbol(), qtm::LowRankCorrection(v, v), true, true))
        .with_flags(true, true);
}

} // namespace oracles

#endif
