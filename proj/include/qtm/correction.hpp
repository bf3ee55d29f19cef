#ifndef QTM_CORRECTION_HPP
#define QTM_CORRECTION_HPP

#include <Eigen/Dense>

#include "qtm/symbol.hpp"

namespace qtm {

///
/// Factored compact correction E = U * V^H with finite row support:
/// E_{ij} = (U V^H)_{ij} for i < rows_u, j < rows_v, and 0 elsewhere.
///
class LowRankCorrection {
public:
    LowRankCorrection() = default; // zero correction

    LowRankCorrection(Eigen::MatrixXcd u, Eigen::MatrixXcd v);

    static LowRankCorrection zero() { return {}; }

    bool empty() const { return u_.cols() == 0; }
    long rank() const { return u_.cols(); }
    long rows_u() const { return u_.rows(); }
    long rows_v() const { return v_.rows(); }
    // max(rows_u, rows_v): the "size" of the correction support.
    long support() const { return std::max(u_.rows(), v_.rows()); }

    const Eigen::MatrixXcd& u() const { return u_; }
    const Eigen::MatrixXcd& v() const { return v_; }

    cplx entry(long i, long j) const;
    Eigen::MatrixXcd to_dense(long rows, long cols) const;

    LowRankCorrection adjoint() const;
    LowRankCorrection scaled(cplx alpha) const;

    // max_{ij} |E_{ij} - conj(E_{ji})| <= tol * sigma_max, checked in factored form.
    bool is_self_adjoint(double tol = 1e-13) const;

    // Cached spectral norm; computed on demand when unknown.
    double sigma_max() const;

private:
    Eigen::MatrixXcd u_{0, 0}, v_{0, 0};
    mutable double sigma_max_ = -1.0;

    friend LowRankCorrection lr_compress(const LowRankCorrection&, double, double, double);
};

// The Hankel product H(a^-) H(b^+) of the Widom formula, with
// H(a^-)_{ij} = a_{-i-j+1} and H(b^+)_{ij} = b_{i+j-1} (1-based), assembled
// from the stored coefficients and compressed. Positive sign: the caller of
// qt_mul subtracts it.
LowRankCorrection hankel_correction(const Symbol& a, const Symbol& b, double eps = -1.0);

// Factor concatenation followed by compression; the compression scale is
// sigma_max(E) + sigma_max(F), so exact cancellation collapses to rank 0.
LowRankCorrection lr_add(const LowRankCorrection& e, const LowRankCorrection& f,
                         double eps = Symbol::default_trunc_eps);

// Singular-value truncation at eps * max(sigma_max, scale_floor) plus trailing
// row-support trim at the value threshold row_eps * sigma_max (default
// 10 * eps, the epsilon = 10 * threshold truncation rule). scale_floor lets
// sums of terms truncate relative to the magnitude of the inputs they came from.
LowRankCorrection lr_compress(const LowRankCorrection& e, double eps, double scale_floor = 0.0,
                              double row_eps = -1.0);

// Spectral norm of the finite block.
double lr_norm2(const LowRankCorrection& e);

// Spectral norm of E - F computed in factored form, without compression.
double lr_diff_norm2(const LowRankCorrection& e, const LowRankCorrection& f);

} // namespace qtm

#endif
