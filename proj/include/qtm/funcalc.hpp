#ifndef QTM_FUNCALC_HPP
#define QTM_FUNCALC_HPP

#include <vector>

#include "qtm/qt_matrix.hpp"

namespace qtm {

struct IterationTrace {
    int iterations = 0;
    std::vector<double> residual_history;
    bool converged = false;
};

struct Rational {
    long num = 0;
    long den = 1;
};

// Best rational approximation with denominator at most max_den (continued
// fractions); exact for exactly representable fractions.
Rational approx_rational(double t, long max_den = 64);

// Newton-Schulz inverse X_{k+1} = X_k (2I - A X_k), X_0 = 2/(alpha+beta) I.
QTMatrix qt_inv(const QTMatrix& a, double tol, const ToleranceConfig& cfg = {},
                IterationTrace* trace = nullptr);

// Cyclic-reduction square root:
//   Y_{k+1} = -Y_k W_k^{-1} Y_k,  W_{k+1} = W_k + 2 Y_{k+1},
//   Y_0 = I - A, W_0 = 2(I + A),  W_k/4 -> A^{1/2},
// applied to A/beta and rescaled by sqrt(beta).
QTMatrix qt_sqrt(const QTMatrix& a, double tol, const ToleranceConfig& cfg = {},
                 IterationTrace* trace = nullptr);

// Coupled Newton p-th root:
//   Y_{k+1} = Y_k ((p-1)I + M_k)/p,  M_{k+1} = (((p-1)I + M_k)/p)^{-p} M_k,
//   Y_0 = I, M_0 = A,  Y_k -> A^{1/p},
// applied to A/beta and rescaled by beta^{1/p}.
QTMatrix qt_proot(const QTMatrix& a, int p, double tol, const ToleranceConfig& cfg = {},
                  IterationTrace* trace = nullptr);

// (qt_proot(A, den))^{num} by repeated squaring; 0 <= num/den <= 1.
QTMatrix qt_pow_rational(const QTMatrix& a, long num, long den, double tol,
                         const ToleranceConfig& cfg = {}, IterationTrace* trace = nullptr);

// Inverse scaling-and-squaring log and scaling-and-squaring exp with a
// degree-16 truncated series.
QTMatrix qt_log(const QTMatrix& a, double tol, const ToleranceConfig& cfg = {},
                IterationTrace* trace = nullptr);
QTMatrix qt_exp(const QTMatrix& a, double tol, const ToleranceConfig& cfg = {},
                IterationTrace* trace = nullptr);

// Weighted geometric mean A #_t B = A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2};
// t is approximated by a rational with denominator <= 64.
QTMatrix qt_sharp(const QTMatrix& a, const QTMatrix& b, double t, double tol,
                  const ToleranceConfig& cfg = {});

} // namespace qtm

#endif
