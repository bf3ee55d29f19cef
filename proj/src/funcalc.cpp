#include "qtm/funcalc.hpp"

#include "qtm/detail/funcalc_impl.hpp"

#include <cmath>

namespace qtm {

Rational approx_rational(double t, long max_den) {
    if (t < 0.0 || !std::isfinite(t)) throw Error("approx_rational: need t >= 0");
    // continued fraction expansion with convergent denominators capped
    long p0 = 1, q0 = 0; // previous convergent
    long p1 = static_cast<long>(std::floor(t)), q1 = 1;
    double frac = t - std::floor(t);
    while (frac > 1e-15) {
        const double inv = 1.0 / frac;
        const long a = static_cast<long>(std::floor(inv));
        frac = inv - std::floor(inv);
        const long p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > max_den) {
            // best semiconvergent with denominator within the cap
            const long k = (max_den - q0) / q1;
            const long ps = k * p1 + p0, qs = k * q1 + q0;
            if (qs > 0 && std::abs(static_cast<double>(ps) / qs - t) <
                              std::abs(static_cast<double>(p1) / q1 - t))
                return {ps, qs};
            return {p1, q1};
        }
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    }
    return {p1, q1};
}

QTMatrix qt_inv(const QTMatrix& a, double tol, const ToleranceConfig& cfg, IterationTrace* trace) {
    return detail::inv_core(a, tol, cfg, trace);
}

QTMatrix qt_sqrt(const QTMatrix& a, double tol, const ToleranceConfig& cfg, IterationTrace* trace) {
    return detail::sqrt_core(a, tol, cfg, trace);
}

QTMatrix qt_proot(const QTMatrix& a, int p, double tol, const ToleranceConfig& cfg,
                  IterationTrace* trace) {
    return detail::proot_core(a, p, tol, cfg, trace);
}

QTMatrix qt_pow_rational(const QTMatrix& a, long num, long den, double tol,
                         const ToleranceConfig& cfg, IterationTrace* trace) {
    return detail::pow_rational_core(a, num, den, tol, cfg, trace);
}

QTMatrix qt_log(const QTMatrix& a, double tol, const ToleranceConfig& cfg, IterationTrace* trace) {
    return detail::log_core(a, tol, cfg, trace);
}

QTMatrix qt_exp(const QTMatrix& a, double tol, const ToleranceConfig& cfg, IterationTrace* trace) {
    return detail::exp_core(a, tol, cfg, trace);
}

QTMatrix qt_sharp(const QTMatrix& a, const QTMatrix& b, double t, double tol,
                  const ToleranceConfig& cfg) {
    return detail::sharp_core(a, b, t, tol, cfg);
}

} // namespace qtm
