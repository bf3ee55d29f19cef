#ifndef QTM_FINITE_HPP
#define QTM_FINITE_HPP

#include <optional>
#include <span>

#include "qtm/dense_oracle.hpp"
#include "qtm/means.hpp"

namespace qtm {

///
/// Finite m x m quasi-Toeplitz matrix T_m(a) + E_NW + J E_SE J, with the
/// south-east correction stored pre-flipped so both corners reuse the
/// LowRankCorrection machinery (the flip J is applied at reconstruction only).
///
/// The m/4 rule (bandwidth r <= m/4 and corner supports <= m/4) is enforced at
/// construction; structured operations throw SupportOverflow past it. The
/// dense fallback mode carries an explicit m x m array instead.
///
class FiniteQT {
public:
    FiniteQT() = default;

    FiniteQT(long m, Symbol symbol, LowRankCorrection nw = {}, LowRankCorrection se_flipped = {},
             bool self_adjoint = false, bool positive_definite = false);

    static FiniteQT identity(long m);
    static FiniteQT toeplitz(long m, Symbol a);
    static FiniteQT dense(DenseMatrix d, bool self_adjoint = false, bool positive_definite = false);

    long size() const { return m_; }
    bool dense_mode() const { return dense_.has_value(); }

    const Symbol& symbol() const { return symbol_; }
    const LowRankCorrection& nw() const { return nw_; }
    // south-east correction in flipped (stored) coordinates
    const LowRankCorrection& se() const { return se_; }
    const DenseMatrix& dense_payload() const;

    bool self_adjoint() const { return self_adjoint_; }
    bool positive_definite() const { return positive_definite_; }
    FiniteQT with_flags(bool self_adjoint, bool positive_definite) const;

    // Entrywise m x m array T_m(a) + E_NW + J E_SE J (or the dense payload).
    DenseMatrix reconstruct() const;

    long max_support() const;

private:
    long m_ = 0;
    Symbol symbol_;
    LowRankCorrection nw_, se_;
    std::optional<DenseMatrix> dense_;
    bool self_adjoint_ = false;
    bool positive_definite_ = false;
};

// Finite Widom product
//   T_m(a) T_m(b) = T_m(ab) - H_m(a^-) H_m(b^+) - J H_m(a^+) H_m(b^-) J
// plus the corner cross terms. Exact for operands within the m/4 rule; throws
// SupportOverflow when the result breaks it (callers may fall back to dense).
FiniteQT fin_mul(const FiniteQT& a, const FiniteQT& b, const ToleranceConfig& cfg = {});

FiniteQT fin_add(const FiniteQT& a, const FiniteQT& b, const ToleranceConfig& cfg = {});
FiniteQT fin_sub(const FiniteQT& a, const FiniteQT& b, const ToleranceConfig& cfg = {});
FiniteQT fin_scale(const FiniteQT& a, double alpha);
FiniteQT fin_adjoint(const FiniteQT& a);
FiniteQT fin_hermitian_part(const FiniteQT& a, const ToleranceConfig& cfg = {});

// Upper bound ||.||: wiener norm plus the two corner spectral norms.
double fin_norm(const FiniteQT& a);
double fin_diff_norm(const FiniteQT& a, const FiniteQT& b);

// The mean iterations of the means module run over FiniteQT arithmetic. On
// SupportOverflow the whole run falls back to dense arithmetic (logged once)
// and the result is returned in dense mode.
struct FinMeanResult {
    FiniteQT mean;
    IterationTrace trace;
    bool dense_fallback = false;
};
FinMeanResult fin_mean(MeanKind kind, std::span<const FiniteQT> matrices, double tol,
                       int max_iter = 100, const ToleranceConfig& cfg = {},
                       std::span<const double> weights = {});

} // namespace qtm

#endif
