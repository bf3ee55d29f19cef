#ifndef QTM_DETAIL_ALGEBRA_HPP
#define QTM_DETAIL_ALGEBRA_HPP

#include "qtm/qt_matrix.hpp"

namespace qtm {
namespace detail {

// Arithmetic surface the iterative solvers run on. Specialized for QTMatrix
// and for the finite-size variant.
template <class M>
struct algebra;

template <>
struct algebra<QTMatrix> {
    using matrix = QTMatrix;

    static QTMatrix mul(const QTMatrix& a, const QTMatrix& b, const ToleranceConfig& cfg) {
        return qt_mul(a, b, cfg);
    }
    static QTMatrix add(const QTMatrix& a, const QTMatrix& b, const ToleranceConfig& cfg) {
        return qt_add(a, b, cfg);
    }
    static QTMatrix sub(const QTMatrix& a, const QTMatrix& b, const ToleranceConfig& cfg) {
        return qt_sub(a, b, cfg);
    }
    static QTMatrix scale(const QTMatrix& a, double alpha) { return qt_scale(a, alpha); }
    static QTMatrix identity_like(const QTMatrix&) { return QTMatrix::identity(); }
    static QTMatrix hermitian(const QTMatrix& a, const ToleranceConfig& cfg) {
        return qt_hermitian_part(a, cfg);
    }
    static double norm(const QTMatrix& a) { return qt_norm(a); }
    static double diff_norm(const QTMatrix& a, const QTMatrix& b) { return qt_diff_norm(a, b); }
    static SpectralBounds bounds(const QTMatrix& a) { return spectral_bounds(a); }
    static void require_spd(const QTMatrix& a, const char* who) { qtm::require_spd(a, who); }
    static QTMatrix as_spd(const QTMatrix& a) { return a.with_flags(true, true); }
    static QTMatrix as_sa(const QTMatrix& a) { return a.with_flags(true, a.positive_definite()); }
    // Toeplitz part of the inverse as a Newton-Schulz starting guess. Low
    // accuracy is fine; the caller checks the residual before adopting it.
    static QTMatrix inverse_guess(const QTMatrix& a, const ToleranceConfig&) {
        if (a.symbol().empty() || min_on_grid(a.symbol()) <= 0.0) return QTMatrix();
        try {
            return QTMatrix(sym_apply(ScalarFunc::reciprocal(), a.symbol(), 1e-10, nullptr, 1 << 14),
                            {}, true, true);
        } catch (const Error&) {
            return QTMatrix();
        }
    }
};

} // namespace detail
} // namespace qtm

#endif
