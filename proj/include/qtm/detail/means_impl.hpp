#ifndef QTM_DETAIL_MEANS_IMPL_HPP
#define QTM_DETAIL_MEANS_IMPL_HPP

#include <future>
#include <span>
#include <vector>

#include "qtm/detail/funcalc_impl.hpp"

namespace qtm {
namespace detail {

template <class M>
M sharp_rational(const M& a, const M& b, const Rational& t, double tol,
                 const ToleranceConfig& cfg) {
    using alg = algebra<M>;
    if (t.num == 0) return a;
    if (t.num == t.den) return b;
    alg::require_spd(a, "sharp");
    alg::require_spd(b, "sharp");
    const M s = sqrt_core(a, tol, cfg, nullptr);
    const M si = inv_core(s, tol, cfg, nullptr);
    const M c = alg::as_spd(alg::hermitian(alg::mul(alg::mul(si, b, cfg), si, cfg), cfg));
    const M p = pow_rational_core(c, t.num, t.den, tol, cfg, nullptr);
    return alg::as_spd(alg::hermitian(alg::mul(alg::mul(s, p, cfg), s, cfg), cfg));
}

// Square root of an iterate together with its inverse, shared by every sharp
// that uses the same base within one sweep.
template <class M>
struct SqrtBase {
    M a, s, si;
};

template <class M>
SqrtBase<M> make_base(const M& a, double tol, const ToleranceConfig& cfg) {
    SqrtBase<M> b;
    b.a = a;
    b.s = sqrt_core(a, tol, cfg, nullptr);
    b.si = inv_core(b.s, tol, cfg, nullptr);
    return b;
}

template <class M>
M sharp_from_base(const SqrtBase<M>& base, const M& b, const Rational& t, double tol,
                  const ToleranceConfig& cfg) {
    using alg = algebra<M>;
    if (t.num == 0) return base.a;
    if (t.num == t.den) return b;
    const M c =
        alg::as_spd(alg::hermitian(alg::mul(alg::mul(base.si, b, cfg), base.si, cfg), cfg));
    const M p = pow_rational_core(c, t.num, t.den, tol, cfg, nullptr);
    return alg::as_spd(alg::hermitian(alg::mul(alg::mul(base.s, p, cfg), base.s, cfg), cfg));
}

inline std::vector<Rational> alm_exponents_list(std::size_t p) {
    std::vector<Rational> s(p - 1, Rational{1, 1});
    s.back() = Rational{1, 2};
    return s;
}

inline std::vector<Rational> nbmp_exponents_list(std::size_t p) {
    std::vector<Rational> s(p - 1);
    for (std::size_t j = 1; j < p; ++j)
        s[j - 1] = Rational{static_cast<long>(p - j), static_cast<long>(p - j + 1)};
    return s;
}

// Evaluate fn(0..n-1) with the tail on worker threads and index 0 inline.
template <class Fn>
auto parallel_map(std::size_t n, const Fn& fn, bool parallel) {
    using R = decltype(fn(std::size_t(0)));
    std::vector<R> out(n);
    if (parallel && n >= 2) {
        std::vector<std::future<R>> futs;
        futs.reserve(n - 1);
        for (std::size_t i = 1; i < n; ++i)
            futs.push_back(std::async(std::launch::async, [&fn, i] { return fn(i); }));
        out[0] = fn(0);
        for (std::size_t i = 1; i < n; ++i) out[i] = futs[i - 1].get();
    } else {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    }
    return out;
}

// Shared outer loop: Jacobi sweeps until the relative successive difference
// max_i ||A_i^{(k+1)} - A_i^{(k)}|| / ||A_i^{(k)}|| drops to tol.
template <class M, class Sweep>
M mean_fixed_point(std::span<const M> mats, const Sweep& sweep, double tol, int max_iter,
                   IterationTrace* trace) {
    using alg = algebra<M>;
    std::vector<M> cur(mats.begin(), mats.end());
    StallGuard guard;
    for (int k = 0; k < max_iter; ++k) {
        std::vector<M> next = sweep(cur);
        double res = 0.0;
        for (std::size_t i = 0; i < cur.size(); ++i)
            res = std::max(res, alg::diff_norm(next[i], cur[i]) /
                                    std::max(alg::norm(cur[i]), 1e-300));
        cur = std::move(next);
        record(trace, res);
        const bool stalled = guard.stalled(res);
        if (res <= tol || (stalled && res <= stall_slack * tol)) {
            finish(trace, true);
            return cur[0];
        }
        if (stalled) break;
    }
    finish(trace, false);
    throw NoConvergence("mean iteration did not reach tolerance");
}

template <class M>
std::vector<M> drop_index(std::span<const M> mats, std::size_t skip) {
    std::vector<M> out;
    out.reserve(mats.size() - 1);
    for (std::size_t j = 0; j < mats.size(); ++j)
        if (j != skip) out.push_back(mats[j]);
    return out;
}

// ALM/NBMP-style recursive construction with exponents (s_1, ..., s_{p-1}).
template <class M>
M iterative_mean_core(std::span<const M> mats, std::span<const Rational> s, double tol,
                      int max_iter, const ToleranceConfig& cfg, IterationTrace* trace,
                      bool parallel) {
    using alg = algebra<M>;
    const std::size_t p = mats.size();
    if (p == 2) return sharp_rational(mats[0], mats[1], s.back(), tol, cfg);
    for (const M& m : mats) alg::require_spd(m, "mean");

    const bool outer_sharp = s[0].num != s[0].den;
    const bool need_bases = (p == 3) || outer_sharp;
    auto sweep = [&](const std::vector<M>& cur) {
        std::vector<SqrtBase<M>> bases;
        if (need_bases)
            bases = parallel_map(p, [&](std::size_t i) { return make_base(cur[i], tol, cfg); },
                                 parallel);
        auto update = [&](std::size_t i) {
            M inner;
            if (p == 3) {
                const std::size_t j = (i == 0) ? 1 : 0;
                const std::size_t l = (i == 2) ? 1 : 2;
                inner = sharp_from_base(bases[j], cur[l], s[1], tol, cfg);
            } else {
                const std::vector<M> rest = drop_index(std::span<const M>(cur), i);
                inner = iterative_mean_core(std::span<const M>(rest), s.subspan(1), tol, max_iter,
                                            cfg, nullptr, false);
            }
            if (!outer_sharp) return inner;
            return sharp_from_base(bases[i], inner, s[0], tol, cfg);
        };
        return parallel_map(p, update, parallel);
    };
    return mean_fixed_point(mats, sweep, tol, max_iter, trace);
}

// Weighted construction: A_i <- A_i #_{1-w_i} G_{w^(i)}(others).
template <class M>
M weighted_mean_core(std::span<const M> mats, std::span<const double> w, double tol, int max_iter,
                     const ToleranceConfig& cfg, IterationTrace* trace, bool parallel) {
    using alg = algebra<M>;
    const std::size_t p = mats.size();
    if (p == 2) return sharp_rational(mats[0], mats[1], approx_rational(w[1]), tol, cfg);
    for (const M& m : mats) alg::require_spd(m, "mean");

    auto sweep = [&](const std::vector<M>& cur) {
        std::vector<SqrtBase<M>> bases =
            parallel_map(p, [&](std::size_t i) { return make_base(cur[i], tol, cfg); }, parallel);
        auto update = [&](std::size_t i) {
            M inner;
            if (p == 3) {
                const std::size_t j = (i == 0) ? 1 : 0;
                const std::size_t l = (i == 2) ? 1 : 2;
                inner = sharp_from_base(bases[j], cur[l],
                                        approx_rational(w[l] / (1.0 - w[i])), tol, cfg);
            } else {
                const std::vector<M> rest = drop_index(std::span<const M>(cur), i);
                std::vector<double> wh;
                wh.reserve(p - 1);
                for (std::size_t j = 0; j < p; ++j)
                    if (j != i) wh.push_back(w[j] / (1.0 - w[i]));
                inner = weighted_mean_core(std::span<const M>(rest), std::span<const double>(wh),
                                           tol, max_iter, cfg, nullptr, false);
            }
            return sharp_from_base(bases[i], inner, approx_rational(1.0 - w[i]), tol, cfg);
        };
        return parallel_map(p, update, parallel);
    };
    return mean_fixed_point(mats, sweep, tol, max_iter, trace);
}

template <class M>
struct KarcherEval {
    M z;                   // (1/p) sum_i log(X^{-1/2} A_i X^{-1/2})
    double residual = 0.0; // ||sum_i log(...)||
};

template <class M>
KarcherEval<M> karcher_eval(std::span<const M> mats, const M& si, double tol_f,
                            const ToleranceConfig& cfg, bool parallel) {
    using alg = algebra<M>;
    const std::size_t p = mats.size();
    std::vector<M> logs = parallel_map(
        p,
        [&](std::size_t i) {
            const M mid =
                alg::as_spd(alg::hermitian(alg::mul(alg::mul(si, mats[i], cfg), si, cfg), cfg));
            return log_core(mid, tol_f, cfg, nullptr);
        },
        parallel);
    KarcherEval<M> out;
    M sum = logs[0];
    for (std::size_t i = 1; i < p; ++i) sum = alg::add(sum, logs[i], cfg);
    out.residual = alg::norm(sum);
    out.z = alg::as_sa(alg::scale(sum, 1.0 / static_cast<double>(p)));
    return out;
}

template <class M>
M karcher_core(std::span<const M> mats, const M& x0, double tol, int max_iter,
               const ToleranceConfig& cfg, IterationTrace* trace, bool parallel) {
    using alg = algebra<M>;
    const double tol_f = std::max(0.1 * tol, 1e-14);
    M x = x0;
    M s = sqrt_core(x, tol_f, cfg, nullptr);
    M si = inv_core(s, tol_f, cfg, nullptr);
    KarcherEval<M> ev = karcher_eval(mats, si, tol_f, cfg, parallel);
    record(trace, ev.residual);
    if (ev.residual <= tol) {
        finish(trace, true);
        return x;
    }
    double step = 1.0;
    StallGuard guard;
    for (int k = 1; k < max_iter; ++k) {
        const M e = exp_core(alg::scale(ev.z, step), tol_f, cfg, nullptr);
        const M xc = alg::as_spd(alg::hermitian(alg::mul(alg::mul(s, e, cfg), s, cfg), cfg));
        M sc = sqrt_core(xc, tol_f, cfg, nullptr);
        M sic = inv_core(sc, tol_f, cfg, nullptr);
        KarcherEval<M> evc = karcher_eval(mats, sic, tol_f, cfg, parallel);
        record(trace, evc.residual);
        const bool stalled = guard.stalled(evc.residual);
        if (evc.residual <= tol || (stalled && evc.residual <= stall_slack * tol)) {
            finish(trace, true);
            return xc;
        }
        if (evc.residual < ev.residual) {
            x = xc;
            s = std::move(sc);
            si = std::move(sic);
            ev = std::move(evc);
            step = std::min(1.0, 2.0 * step);
        } else {
            step *= 0.5;
            if (step < 1.0 / 1024.0) break;
        }
        if (stalled) break;
    }
    finish(trace, false);
    throw NoConvergence("karcher mean fixed point did not reach tolerance");
}

} // namespace detail
} // namespace qtm

#endif
