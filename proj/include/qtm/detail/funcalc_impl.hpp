#ifndef QTM_DETAIL_FUNCALC_IMPL_HPP
#define QTM_DETAIL_FUNCALC_IMPL_HPP

#include <cmath>
#include <limits>
#include <numeric>

#include "qtm/detail/algebra.hpp"
#include "qtm/errors.hpp"
#include "qtm/funcalc.hpp"

namespace qtm {
namespace detail {

inline void record(IterationTrace* trace, double residual) {
    if (trace) {
        trace->residual_history.push_back(residual);
        ++trace->iterations;
    }
}

// Detects the roundoff plateau of a residual sequence. The QT-norm stopping
// quantities bottom out near L * trunc_eps for symbols of length L, which can
// sit above a tight tol; a stalled residual within a small factor of tol is
// accepted as converged.
class StallGuard {
public:
    // true once the residual has stopped improving for three steps
    bool stalled(double res) {
        if (res < 0.97 * best_) {
            best_ = res;
            since_ = 0;
            return false;
        }
        return ++since_ >= 3;
    }
    double best() const { return best_; }

private:
    double best_ = std::numeric_limits<double>::infinity();
    int since_ = 0;
};

inline constexpr double stall_slack = 32.0;

inline void finish(IterationTrace* trace, bool converged) {
    if (trace) trace->converged = converged;
}

template <class M>
M pow_int(const M& base, long e, const ToleranceConfig& cfg) {
    using alg = algebra<M>;
    M result = alg::identity_like(base);
    M sq = base;
    long k = e;
    while (k > 0) {
        if (k & 1) result = alg::mul(result, sq, cfg);
        k >>= 1;
        if (k > 0) sq = alg::mul(sq, sq, cfg);
    }
    return result;
}

template <class M>
M inv_core(const M& a, double tol, const ToleranceConfig& cfg, IterationTrace* trace,
           const M* warm = nullptr) {
    using alg = algebra<M>;
    alg::require_spd(a, "qt_inv");
    const M id = alg::identity_like(a);
    M x;
    if (warm) {
        x = *warm;
    } else {
        const SpectralBounds b = alg::bounds(a);
        if (b.beta <= 0.0) throw NotPositiveDefinite("qt_inv: zero matrix");
        x = alg::scale(id, 2.0 / (b.alpha + b.beta));
        M guess = alg::inverse_guess(a, cfg);
        if (alg::norm(guess) > 0.0 &&
            alg::norm(alg::sub(id, alg::mul(a, guess, cfg), cfg)) < 0.9)
            x = std::move(guess);
    }
    StallGuard guard;
    for (int k = 0; k < cfg.max_iter; ++k) {
        const M r = alg::sub(id, alg::mul(a, x, cfg), cfg);
        const double res = alg::norm(r);
        record(trace, res);
        const bool stalled = guard.stalled(res);
        if (res <= tol || (stalled && res <= stall_slack * tol)) {
            finish(trace, true);
            return alg::as_spd(alg::hermitian(x, cfg));
        }
        if (stalled) break;
        x = alg::mul(x, alg::add(id, r, cfg), cfg);
    }
    finish(trace, false);
    throw NoConvergence("qt_inv: Newton-Schulz did not reach tolerance");
}

template <class M>
M sqrt_core(const M& a, double tol, const ToleranceConfig& cfg, IterationTrace* trace) {
    using alg = algebra<M>;
    alg::require_spd(a, "qt_sqrt");
    const M id = alg::identity_like(a);
    const double beta = std::max(alg::bounds(a).beta, 1e-300);
    const M b = alg::as_spd(alg::scale(a, 1.0 / beta));

    M y = alg::hermitian(alg::sub(id, b, cfg), cfg);
    M w = alg::as_spd(alg::scale(alg::add(id, b, cfg), 2.0));
    const double inner_tol = std::max(0.1 * tol, 1e-15);
    M winv = inv_core(w, inner_tol, cfg, nullptr);
    double inner_res = inner_tol;

    StallGuard guard;
    for (int k = 0; k < cfg.max_iter; ++k) {
        const double res = alg::norm(y);
        record(trace, res);
        const bool stalled = guard.stalled(res);
        if (res <= tol || (stalled && res <= stall_slack * tol)) {
            finish(trace, true);
            return alg::as_spd(alg::hermitian(alg::scale(w, std::sqrt(beta) / 4.0), cfg));
        }
        if (stalled) break;
        const M t = alg::mul(winv, y, cfg);
        y = alg::scale(alg::mul(y, t, cfg), -1.0);
        w = alg::as_spd(alg::add(w, alg::scale(y, 2.0), cfg));
        // Neumann update of the inverse; Newton-Schulz polish only when the
        // carried residual estimate exceeds the inner tolerance.
        const M u = alg::mul(winv, y, cfg);
        winv = alg::sub(winv, alg::scale(alg::mul(u, winv, cfg), 2.0), cfg);
        const double nu = alg::norm(u);
        double est = 8.0 * nu * nu + 1.5 * inner_res;
        if (est > inner_tol) {
            StallGuard polish_guard;
            for (int polish = 0; polish < cfg.max_iter; ++polish) {
                const M r = alg::sub(id, alg::mul(w, winv, cfg), cfg);
                est = alg::norm(r);
                if (est <= inner_tol || polish_guard.stalled(est)) break;
                winv = alg::mul(winv, alg::add(id, r, cfg), cfg);
            }
        }
        inner_res = est;
        winv = alg::as_spd(winv);
    }
    finish(trace, false);
    throw NoConvergence("qt_sqrt: CR iteration did not reach tolerance");
}

template <class M>
M proot_core(const M& a, int p, double tol, const ToleranceConfig& cfg, IterationTrace* trace) {
    using alg = algebra<M>;
    if (p < 2) throw Error("qt_proot: p must be at least 2");
    alg::require_spd(a, "qt_proot");
    const M id = alg::identity_like(a);
    const double beta = std::max(alg::bounds(a).beta, 1e-300);
    M mk = alg::as_spd(alg::scale(a, 1.0 / beta));
    M y = id;
    const double inner_tol = std::max(0.1 * tol, 1e-15);
    M ninv;
    bool have_ninv = false;
    StallGuard guard;
    for (int k = 0; k < cfg.max_iter; ++k) {
        const double res = alg::diff_norm(mk, id);
        record(trace, res);
        const bool stalled = guard.stalled(res);
        if (res <= tol || (stalled && res <= stall_slack * tol)) {
            finish(trace, true);
            return alg::as_spd(alg::hermitian(
                alg::scale(y, std::pow(beta, 1.0 / static_cast<double>(p))), cfg));
        }
        if (stalled) break;
        const M n = alg::as_spd(
            alg::scale(alg::add(alg::scale(id, static_cast<double>(p - 1)), mk, cfg),
                       1.0 / static_cast<double>(p)));
        ninv = inv_core(n, inner_tol, cfg, nullptr, have_ninv ? &ninv : nullptr);
        have_ninv = true;
        y = alg::mul(y, n, cfg);
        mk = alg::as_spd(alg::mul(pow_int(ninv, p, cfg), mk, cfg));
    }
    finish(trace, false);
    throw NoConvergence("qt_proot: coupled Newton iteration did not reach tolerance");
}

template <class M>
M pow_rational_core(const M& a, long num, long den, double tol, const ToleranceConfig& cfg,
                    IterationTrace* trace) {
    using alg = algebra<M>;
    if (den <= 0 || num < 0 || num > den) throw Error("qt_pow_rational: need 0 <= num/den <= 1");
    if (num == 0) return alg::identity_like(a);
    const long g = std::gcd(num, den);
    num /= g;
    den /= g;
    if (den == 1) return a;
    M root = (den == 2) ? sqrt_core(a, tol, cfg, trace) : proot_core(a, static_cast<int>(den), tol, cfg, trace);
    if (num == 1) return root;
    return alg::as_spd(alg::hermitian(pow_int(root, num, cfg), cfg));
}

template <class M>
M exp_core(const M& a, double tol, const ToleranceConfig& cfg, IterationTrace* trace) {
    using alg = algebra<M>;
    (void)tol;
    const M id = alg::identity_like(a);
    const double nrm = alg::norm(a);
    int s = 0;
    while (nrm / std::pow(2.0, s) > 0.5 && s < 64) ++s;
    const M z = alg::scale(a, 1.0 / std::pow(2.0, s));
    M q = id;
    for (int k = 16; k >= 1; --k)
        q = alg::add(id, alg::scale(alg::mul(q, z, cfg), 1.0 / static_cast<double>(k)), cfg);
    for (int k = 0; k < s; ++k) q = alg::hermitian(alg::mul(q, q, cfg), cfg);
    record(trace, 0.0);
    finish(trace, true);
    return alg::as_spd(q);
}

template <class M>
M log_core(const M& a, double tol, const ToleranceConfig& cfg, IterationTrace* trace) {
    using alg = algebra<M>;
    alg::require_spd(a, "qt_log");
    const M id = alg::identity_like(a);
    // series threshold: degree-16 log series error theta^17/17 kept below tol
    const double theta = std::min(0.3, std::pow(17.0 * std::max(tol, 1e-16), 1.0 / 17.0));
    const double sqrt_tol = std::max(5e-3 * tol, 1e-15);
    M x = a;
    int s = 0;
    while (alg::diff_norm(x, id) > theta) {
        if (s >= 40) throw NoConvergence("qt_log: square-root scaling did not contract");
        x = sqrt_core(x, sqrt_tol, cfg, nullptr);
        ++s;
    }
    const M z = alg::sub(x, id, cfg);
    M q = alg::scale(id, -1.0 / 16.0);
    for (int k = 15; k >= 1; --k) {
        const double ck = (k % 2 == 1 ? 1.0 : -1.0) / static_cast<double>(k);
        q = alg::add(alg::scale(id, ck), alg::mul(q, z, cfg), cfg);
    }
    M l = alg::hermitian(alg::mul(z, q, cfg), cfg);
    l = alg::scale(l, std::pow(2.0, s));
    record(trace, 0.0);
    finish(trace, true);
    return alg::as_sa(l);
}

template <class M>
M sharp_core(const M& a, const M& b, double t, double tol, const ToleranceConfig& cfg) {
    using alg = algebra<M>;
    const Rational r = approx_rational(t);
    if (r.num == 0) return a;
    if (r.num == r.den) return b;
    alg::require_spd(a, "qt_sharp");
    alg::require_spd(b, "qt_sharp");
    const M s = sqrt_core(a, tol, cfg, nullptr);
    const M si = inv_core(s, tol, cfg, nullptr);
    const M c = alg::as_spd(alg::hermitian(alg::mul(alg::mul(si, b, cfg), si, cfg), cfg));
    const M p = pow_rational_core(c, r.num, r.den, tol, cfg, nullptr);
    return alg::as_spd(alg::hermitian(alg::mul(alg::mul(s, p, cfg), s, cfg), cfg));
}

} // namespace detail
} // namespace qtm

#endif
