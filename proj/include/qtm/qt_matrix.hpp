#ifndef QTM_QT_MATRIX_HPP
#define QTM_QT_MATRIX_HPP

#include <Eigen/Dense>

#include "qtm/correction.hpp"
#include "qtm/symbol.hpp"
#include "qtm/tolerance.hpp"

namespace qtm {

///
/// Semi-infinite quasi-Toeplitz matrix A = T(a) + E with continuous symbol a
/// and a compact, numerically low-rank correction E.
///
/// The decomposition is treated as unique: equality is symbol equality plus
/// correction equality. The self_adjoint / positive_definite flags are
/// advisory; check_positive_definite() validates them on demand.
///
class QTMatrix {
public:
    QTMatrix() = default; // zero matrix

    explicit QTMatrix(Symbol symbol, LowRankCorrection correction = {},
                      bool self_adjoint = false, bool positive_definite = false)
        : symbol_(std::move(symbol)), corr_(std::move(correction)),
          self_adjoint_(self_adjoint), positive_definite_(positive_definite) {}

    static QTMatrix identity() {
        return QTMatrix(Symbol::constant(1.0), {}, true, true);
    }
    static QTMatrix scalar(double c) {
        return QTMatrix(Symbol::constant(c), {}, true, c > 0.0);
    }
    // T(a) with flags inferred from the symbol.
    static QTMatrix toeplitz(Symbol a);

    const Symbol& symbol() const { return symbol_; }
    const LowRankCorrection& correction() const { return corr_; }
    bool self_adjoint() const { return self_adjoint_; }
    bool positive_definite() const { return positive_definite_; }

    QTMatrix with_flags(bool self_adjoint, bool positive_definite) const {
        QTMatrix out = *this;
        out.self_adjoint_ = self_adjoint;
        out.positive_definite_ = positive_definite;
        return out;
    }

    bool is_zero() const { return symbol_.empty() && corr_.empty(); }

private:
    Symbol symbol_;
    LowRankCorrection corr_;
    bool self_adjoint_ = false;
    bool positive_definite_ = false;
};

// --- ring operations --------------------------------------------------------

// Widom product: symbol ab, correction
//   -H(a^-)H(b^+) + T(a) E_b + E_a T(b) + E_a E_b, compressed.
QTMatrix qt_mul(const QTMatrix& a, const QTMatrix& b, const ToleranceConfig& cfg = {});

QTMatrix qt_add(const QTMatrix& a, const QTMatrix& b, const ToleranceConfig& cfg = {});
QTMatrix qt_sub(const QTMatrix& a, const QTMatrix& b, const ToleranceConfig& cfg = {});
QTMatrix qt_scale(const QTMatrix& a, double alpha);
QTMatrix qt_adjoint(const QTMatrix& a);
// (A + A^*)/2 with the self-adjoint flag set.
QTMatrix qt_hermitian_part(const QTMatrix& a, const ToleranceConfig& cfg = {});

// Rows of the semi-infinite product T(a) * [X; 0; ...] for a dense block X
// (block columns convolved with the symbol's coefficients).
Eigen::MatrixXcd toeplitz_times_block(const Symbol& a, const Eigen::MatrixXcd& x);

// --- norms and bounds --------------------------------------------------------

// Computable upper bound ||A||_QT = wiener_norm(a) + ||E||_2 (dominates ||A||_2).
double qt_norm(const QTMatrix& a);

// ||A - B||_QT without forming a compressed difference.
double qt_diff_norm(const QTMatrix& a, const QTMatrix& b);

struct Norm2Estimate {
    double upper = 0.0;     // the QT-norm bound
    double grid_max = 0.0;  // max over grid of |a(t)|, a lower bound for T(a) alone
    double lanczos = 0.0;   // Krylov 2-norm estimate on the dense truncation
};
Norm2Estimate qt_norm2_estimate(const QTMatrix& a, long m = 2000, int steps = 400);

struct SpectralBounds {
    double alpha = 0.0; // lower bound for the spectrum (floored at 0)
    double beta = 0.0;  // upper bound (the QT-norm)
};
// refine = true additionally floors alpha with the smallest eigenvalue of a
// dense truncation of size support + 2*bandwidth + 32 (capped); off hot paths.
SpectralBounds spectral_bounds(const QTMatrix& a, bool refine = false);

// --- truncation and checks ----------------------------------------------------

// Dense m x m leading principal submatrix: entries a_{j-i} + E_{ij}.
Eigen::MatrixXcd qt_truncate(const QTMatrix& a, long m);

// Grid positivity of the symbol plus an LLT factorization of a dense leading
// block of size support + bandwidth + 32 (capped). Advisory, not a proof.
bool check_positive_definite(const QTMatrix& a);

// Throws NotPositiveDefinite unless the flag is set or the check passes.
void require_spd(const QTMatrix& a, const char* who);

} // namespace qtm

#endif
