#ifndef QTM_SYMBOL_HPP
#define QTM_SYMBOL_HPP

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "qtm/errors.hpp"

namespace qtm {

using cplx = std::complex<double>;

///
/// A 2*pi-periodic symbol a(z) = sum_k c_k z^k, z on the unit circle,
/// stored as a contiguous window of Fourier coefficients c_{offset..offset+len-1}.
///
/// Leading and trailing coefficients below trunc_eps * max|c_k| are trimmed on
/// construction, so the stored window carries no dead padding.
///
class Symbol {
public:
    static constexpr double default_trunc_eps = 1e-14;

    // Zero symbol.
    Symbol() = default;

    Symbol(std::vector<cplx> coeffs, long offset, double trunc_eps = default_trunc_eps);

    static Symbol constant(cplx c, double trunc_eps = default_trunc_eps);

    bool empty() const { return coeffs_.empty(); }
    std::size_t size() const { return coeffs_.size(); }

    // Inclusive index range of stored coefficients; empty symbol has
    // min_index() == 0 and max_index() == -1.
    long min_index() const { return offset_; }
    long max_index() const { return offset_ + static_cast<long>(coeffs_.size()) - 1; }

    // One-sided bandwidth max(|min_index|, max_index); 0 for the zero symbol.
    long bandwidth() const;

    cplx coeff(long k) const;
    const std::vector<cplx>& coeffs() const { return coeffs_; }
    long offset() const { return offset_; }
    double trunc_eps() const { return trunc_eps_; }

    double max_abs_coeff() const;

    // c_{-k} == conj(c_k) within the absolute tolerance.
    bool is_real_valued(double tol = 1e-14) const;
    // True when every coefficient has negligible imaginary part.
    bool has_real_coeffs(double tol = 1e-14) const;

    // Adjoint symbol: T(a)^* = T(conj_transpose(a)); coefficients conj(c_{-k}).
    Symbol conj_transpose() const;
    // a(1/z): coefficients c_{-k}.
    Symbol reflected() const;
    // Averages c_k with conj(c_{-k}), pinning conjugate symmetry exactly.
    Symbol real_valued_part() const;

    // Copy re-truncated at the given relative threshold.
    Symbol truncated(double eps) const;

private:
    std::vector<cplx> coeffs_;
    long offset_ = 0;
    double trunc_eps_ = default_trunc_eps;

    void normalize();
};

// --- evaluation -----------------------------------------------------------

// Values sum_k c_k e^{i k t} at the given angles.
std::vector<cplx> sym_eval(const Symbol& a, std::span<const double> angles);
// Same, with the imaginary part discarded (valid for real-valued symbols).
std::vector<double> sym_eval_real(const Symbol& a, std::span<const double> angles);

// Values a(w^l), l = 0..m-1, at the m-th roots of unity w = e^{2 pi i/m},
// computed by the wrapped FFT.
std::vector<cplx> eval_roots_of_unity(const Symbol& a, std::size_t m);

// Angles 2*pi*l/m, l = 0..m-1.
std::vector<double> uniform_angles(std::size_t m);

// min/max of the real part over a dense grid (4x the coefficient support,
// clamped to [512, 16384] points).
double min_on_grid(const Symbol& a);
double max_on_grid(const Symbol& a);
double max_abs_on_grid(const Symbol& a);

// --- arithmetic ------------------------------------------------------------

Symbol sym_add(const Symbol& a, const Symbol& b);
Symbol sym_scale(const Symbol& a, cplx alpha);
// Coefficient convolution; the result is truncated at eps (default:
// the tighter of the operand thresholds).
Symbol sym_mul(const Symbol& a, const Symbol& b, double eps = -1.0);

// Wiener norm sum_k |c_k| of the stored coefficients.
double wiener_norm(const Symbol& a);

// --- evaluation/interpolation of scalar functions --------------------------

// Scalar function descriptor for sym_apply.
class ScalarFunc {
public:
    enum class Kind { Power, Log, Exp, Reciprocal };

    static ScalarFunc power(double t) { return {Kind::Power, t}; }
    static ScalarFunc sqrt() { return {Kind::Power, 0.5}; }
    static ScalarFunc log() { return {Kind::Log, 0.0}; }
    static ScalarFunc exp() { return {Kind::Exp, 0.0}; }
    static ScalarFunc reciprocal() { return {Kind::Reciprocal, 0.0}; }

    Kind kind() const { return kind_; }
    double exponent() const { return exponent_; }

    double operator()(double x) const;
    // Throws DomainError when [lo, hi] leaves the domain.
    void check_domain(double lo, double hi) const;
    const char* name() const;

private:
    ScalarFunc(Kind k, double t) : kind_(k), exponent_(t) {}
    Kind kind_;
    double exponent_;
};

struct InterpolationInfo {
    std::size_t points = 0;      // interpolation points at exit (the FFT length)
    long length = 0;             // one-sided numerical length of the result
    int doublings = 0;           // times n was doubled past the initial n = 4
};

inline constexpr std::size_t default_interp_cap = std::size_t(1) << 20;

// Evaluation/interpolation approximation of (a_1 ... a_p)^{1/p} at the roots
// of unity, doubling n from 4 until the stopping test
//   sum_{|j| > ceil(n/2)} |g_j|  <  eps * sum_j |g_j|
// passes. Inputs must be real-valued with positive grid minimum.
Symbol sym_geomean(std::span<const Symbol> symbols, double eps,
                   InterpolationInfo* info = nullptr,
                   std::size_t n_cap = default_interp_cap);

// Same doubling/stopping scheme applied to f(a(z)).
Symbol sym_apply(const ScalarFunc& f, const Symbol& a, double eps,
                 InterpolationInfo* info = nullptr,
                 std::size_t n_cap = default_interp_cap);

} // namespace qtm

#endif
