#include "qtm/symbol.hpp"

#include "qtm/fft.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>

namespace qtm {

namespace {

constexpr double pi = std::numbers::pi;

bool near_integer(double t) {
    return std::abs(t - std::round(t)) < 1e-12;
}

} // namespace

// --- Symbol -----------------------------------------------------------------

Symbol::Symbol(std::vector<cplx> coeffs, long offset, double trunc_eps)
    : coeffs_(std::move(coeffs)), offset_(offset), trunc_eps_(trunc_eps) {
    normalize();
}

Symbol Symbol::constant(cplx c, double trunc_eps) {
    return Symbol({c}, 0, trunc_eps);
}

void Symbol::normalize() {
    const double scale = max_abs_coeff();
    if (scale == 0.0) {
        coeffs_.clear();
        offset_ = 0;
        return;
    }
    const double thr = trunc_eps_ * scale;
    std::size_t lead = 0;
    while (lead < coeffs_.size() && (std::abs(coeffs_[lead]) < thr || coeffs_[lead] == cplx(0.0)))
        ++lead;
    std::size_t tail = coeffs_.size();
    while (tail > lead && (std::abs(coeffs_[tail - 1]) < thr || coeffs_[tail - 1] == cplx(0.0)))
        --tail;
    if (lead > 0 || tail < coeffs_.size()) {
        coeffs_ = std::vector<cplx>(coeffs_.begin() + lead, coeffs_.begin() + tail);
        offset_ += static_cast<long>(lead);
    }
    if (coeffs_.empty()) offset_ = 0;
}

long Symbol::bandwidth() const {
    if (empty()) return 0;
    return std::max(std::labs(min_index()), std::labs(max_index()));
}

cplx Symbol::coeff(long k) const {
    if (k < min_index() || k > max_index()) return cplx(0.0);
    return coeffs_[static_cast<std::size_t>(k - offset_)];
}

double Symbol::max_abs_coeff() const {
    double m = 0.0;
    for (const cplx& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

bool Symbol::is_real_valued(double tol) const {
    const long hi = std::max(std::labs(min_index()), std::labs(max_index()));
    for (long k = 0; k <= hi; ++k) {
        if (std::abs(coeff(-k) - std::conj(coeff(k))) > tol) return false;
    }
    return true;
}

bool Symbol::has_real_coeffs(double tol) const {
    const double scale = std::max(max_abs_coeff(), 1.0);
    for (const cplx& c : coeffs_) {
        if (std::abs(c.imag()) > tol * scale) return false;
    }
    return true;
}

Symbol Symbol::conj_transpose() const {
    std::vector<cplx> out(coeffs_.size());
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        out[i] = std::conj(coeffs_[coeffs_.size() - 1 - i]);
    return Symbol(std::move(out), -max_index(), trunc_eps_);
}

Symbol Symbol::reflected() const {
    std::vector<cplx> out(coeffs_.rbegin(), coeffs_.rend());
    return Symbol(std::move(out), -max_index(), trunc_eps_);
}

Symbol Symbol::real_valued_part() const {
    const long hi = std::max(std::labs(min_index()), std::labs(max_index()));
    std::vector<cplx> out(2 * hi + 1);
    for (long k = -hi; k <= hi; ++k)
        out[static_cast<std::size_t>(k + hi)] = 0.5 * (coeff(k) + std::conj(coeff(-k)));
    return Symbol(std::move(out), -hi, trunc_eps_);
}

Symbol Symbol::truncated(double eps) const {
    return Symbol(coeffs_, offset_, eps);
}

// --- evaluation --------------------------------------------------------------

std::vector<cplx> sym_eval(const Symbol& a, std::span<const double> angles) {
    std::vector<cplx> out(angles.size(), cplx(0.0));
    if (a.empty()) return out;
    const auto& c = a.coeffs();
    for (std::size_t i = 0; i < angles.size(); ++i) {
        const cplx z = std::polar(1.0, angles[i]);
        cplx p(0.0);
        for (std::size_t j = c.size(); j-- > 0;) p = p * z + c[j];
        out[i] = p * std::pow(z, static_cast<double>(a.offset()));
    }
    return out;
}

std::vector<double> sym_eval_real(const Symbol& a, std::span<const double> angles) {
    auto v = sym_eval(a, angles);
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].real();
    return out;
}

std::vector<cplx> eval_roots_of_unity(const Symbol& a, std::size_t m) {
    std::vector<cplx> binned(m, cplx(0.0));
    for (long k = a.min_index(); k <= a.max_index(); ++k) {
        const long b = ((k % static_cast<long>(m)) + static_cast<long>(m)) % static_cast<long>(m);
        binned[static_cast<std::size_t>(b)] += a.coeff(k);
    }
    auto v = fft::inverse(binned);
    for (cplx& x : v) x *= static_cast<double>(m);
    return v;
}

std::vector<double> uniform_angles(std::size_t m) {
    std::vector<double> t(m);
    for (std::size_t l = 0; l < m; ++l) t[l] = 2.0 * pi * static_cast<double>(l) / static_cast<double>(m);
    return t;
}

namespace {

std::size_t grid_size_for(const Symbol& a) {
    const std::size_t n = std::bit_ceil(4 * (a.size() + 1));
    return std::clamp<std::size_t>(n, 512, 16384);
}

} // namespace

double min_on_grid(const Symbol& a) {
    if (a.empty()) return 0.0;
    const auto v = eval_roots_of_unity(a, grid_size_for(a));
    double m = v[0].real();
    for (const cplx& x : v) m = std::min(m, x.real());
    return m;
}

double max_on_grid(const Symbol& a) {
    if (a.empty()) return 0.0;
    const auto v = eval_roots_of_unity(a, grid_size_for(a));
    double m = v[0].real();
    for (const cplx& x : v) m = std::max(m, x.real());
    return m;
}

double max_abs_on_grid(const Symbol& a) {
    if (a.empty()) return 0.0;
    const auto v = eval_roots_of_unity(a, grid_size_for(a));
    double m = 0.0;
    for (const cplx& x : v) m = std::max(m, std::abs(x));
    return m;
}

// --- arithmetic ---------------------------------------------------------------

Symbol sym_add(const Symbol& a, const Symbol& b) {
    const double eps = std::min(a.trunc_eps(), b.trunc_eps());
    if (a.empty()) return b.truncated(eps);
    if (b.empty()) return a.truncated(eps);
    const long lo = std::min(a.min_index(), b.min_index());
    const long hi = std::max(a.max_index(), b.max_index());
    std::vector<cplx> out(static_cast<std::size_t>(hi - lo + 1), cplx(0.0));
    for (long k = a.min_index(); k <= a.max_index(); ++k) out[static_cast<std::size_t>(k - lo)] += a.coeff(k);
    for (long k = b.min_index(); k <= b.max_index(); ++k) out[static_cast<std::size_t>(k - lo)] += b.coeff(k);
    return Symbol(std::move(out), lo, eps);
}

Symbol sym_scale(const Symbol& a, cplx alpha) {
    if (alpha == cplx(0.0)) return Symbol();
    std::vector<cplx> out(a.coeffs());
    for (cplx& c : out) c *= alpha;
    return Symbol(std::move(out), a.offset(), a.trunc_eps());
}

Symbol sym_mul(const Symbol& a, const Symbol& b, double eps) {
    if (eps < 0.0) eps = std::min(a.trunc_eps(), b.trunc_eps());
    if (a.empty() || b.empty()) return Symbol();
    auto out = fft::convolve(a.coeffs(), b.coeffs());
    return Symbol(std::move(out), a.offset() + b.offset(), eps);
}

double wiener_norm(const Symbol& a) {
    double s = 0.0;
    for (const cplx& c : a.coeffs()) s += std::abs(c);
    return s;
}

// --- ScalarFunc ----------------------------------------------------------------

double ScalarFunc::operator()(double x) const {
    switch (kind_) {
        case Kind::Power: return std::pow(x, exponent_);
        case Kind::Log: return std::log(x);
        case Kind::Exp: return std::exp(x);
        case Kind::Reciprocal: return 1.0 / x;
    }
    return 0.0;
}

void ScalarFunc::check_domain(double lo, double hi) const {
    switch (kind_) {
        case Kind::Power:
            if (near_integer(exponent_)) {
                if (exponent_ < 0.0 && lo <= 0.0 && hi >= 0.0)
                    throw DomainError("negative integer power over a range containing 0");
            } else {
                if (exponent_ > 0.0 ? lo < 0.0 : lo <= 0.0)
                    throw DomainError("fractional power of a non-positive range");
            }
            return;
        case Kind::Log:
            if (lo <= 0.0) throw DomainError("log of a non-positive range");
            return;
        case Kind::Exp:
            return;
        case Kind::Reciprocal:
            if (lo <= 0.0 && hi >= 0.0) throw DomainError("reciprocal over a range containing 0");
            return;
    }
}

const char* ScalarFunc::name() const {
    switch (kind_) {
        case Kind::Power: return "power";
        case Kind::Log: return "log";
        case Kind::Exp: return "exp";
        case Kind::Reciprocal: return "reciprocal";
    }
    return "?";
}

// --- evaluation/interpolation --------------------------------------------------

namespace {

// One doubling round: interpolate the given real grid values (length m = 2n)
// into Laurent coefficients g_j, j = -n+1..n, returned alongside the stopping
// quantities.
struct RoundResult {
    std::vector<double> coeff; // g_{-n+1}..g_n, stored ascending
    long first = 0;            // = -n+1
    double tail_sum = 0.0;     // sum over |j| > ceil(n/2)
    double total_sum = 0.0;    // sum over all j
};

RoundResult interpolate_round(const std::vector<cplx>& values) {
    const std::size_t m = values.size();
    const long n = static_cast<long>(m / 2);
    auto hat = fft::forward(values);
    RoundResult r;
    r.first = -n + 1;
    r.coeff.resize(m);
    for (long j = -n + 1; j <= n; ++j) {
        const std::size_t bin = static_cast<std::size_t>(j >= 0 ? j : j + static_cast<long>(m));
        r.coeff[static_cast<std::size_t>(j - r.first)] = hat[bin].real() / static_cast<double>(m);
    }
    const long half = (n + 1) / 2; // ceil(n/2)
    for (long j = -n + 1; j <= n; ++j) {
        const double v = std::abs(r.coeff[static_cast<std::size_t>(j - r.first)]);
        r.total_sum += v;
        if (std::labs(j) > half) r.tail_sum += v;
    }
    return r;
}

// Shared doubling loop. values_at(m) returns the (real) target values at the
// m-th roots of unity; enforce_even mirrors r_{-l} = r_l before interpolation.
Symbol interpolate_with_doubling(const std::function<std::vector<cplx>(std::size_t)>& values_at,
                                 bool enforce_even, double eps, std::size_t n_cap,
                                 InterpolationInfo* info) {
    int doublings = 0;
    for (std::size_t n = 4; n <= n_cap; n *= 2, ++doublings) {
        const std::size_t m = 2 * n;
        auto v = values_at(m);
        if (enforce_even) {
            for (std::size_t l = 1; l < n; ++l) v[m - l] = v[l];
        }
        RoundResult r = interpolate_round(v);
        if (r.tail_sum < eps * r.total_sum) {
            double grid_max = 0.0;
            for (const cplx& x : v) grid_max = std::max(grid_max, std::abs(x));
            const double thr = eps * grid_max;
            std::vector<double> c = std::move(r.coeff);
            if (enforce_even) {
                // pin even symmetry: average g_j with g_{-j}
                for (long j = 1; j < static_cast<long>(n); ++j) {
                    const std::size_t p = static_cast<std::size_t>(j - r.first);
                    const std::size_t q = static_cast<std::size_t>(-j - r.first);
                    const double avg = 0.5 * (c[p] + c[q]);
                    c[p] = avg;
                    c[q] = avg;
                }
            }
            std::vector<cplx> kept;
            long first_kept = 0;
            long lo = r.first, hi = static_cast<long>(n);
            while (lo <= hi && std::abs(c[static_cast<std::size_t>(lo - r.first)]) <= thr) ++lo;
            while (hi >= lo && std::abs(c[static_cast<std::size_t>(hi - r.first)]) <= thr) --hi;
            if (lo <= hi) {
                first_kept = lo;
                kept.reserve(static_cast<std::size_t>(hi - lo + 1));
                for (long j = lo; j <= hi; ++j)
                    kept.emplace_back(c[static_cast<std::size_t>(j - r.first)], 0.0);
            }
            Symbol out(std::move(kept), first_kept, eps);
            if (info) {
                info->points = m;
                info->length = out.empty() ? 0 : std::max(out.max_index(), -out.min_index()) + 1;
                info->doublings = doublings;
            }
            return out;
        }
    }
    throw NoConvergence("evaluation/interpolation did not satisfy the stopping test below the cap");
}

// Real values of each symbol at the m-th roots of unity, with a strict
// positivity check on this grid and on a 4x oversampled grid.
std::vector<std::vector<double>> positive_grid_values(std::span<const Symbol> symbols, std::size_t m) {
    std::vector<std::vector<double>> vals(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const auto v = eval_roots_of_unity(symbols[i], m);
        const auto v4 = eval_roots_of_unity(symbols[i], 4 * m);
        for (const cplx& x : v4) {
            if (x.real() <= 0.0)
                throw NonPositiveSymbol("symbol evaluates to a non-positive value on the grid");
        }
        vals[i].resize(m);
        for (std::size_t l = 0; l < m; ++l) {
            if (v[l].real() <= 0.0)
                throw NonPositiveSymbol("symbol evaluates to a non-positive value on the grid");
            vals[i][l] = v[l].real();
        }
    }
    return vals;
}

} // namespace

Symbol sym_geomean(std::span<const Symbol> symbols, double eps, InterpolationInfo* info,
                   std::size_t n_cap) {
    if (symbols.empty()) throw DomainError("sym_geomean needs at least one symbol");
    bool even = true;
    for (const Symbol& a : symbols) {
        if (!a.is_real_valued()) throw DomainError("sym_geomean requires real-valued symbols");
        even = even && a.has_real_coeffs();
    }
    const double inv_p = 1.0 / static_cast<double>(symbols.size());
    auto values_at = [&](std::size_t m) {
        auto vals = positive_grid_values(symbols, m);
        std::vector<cplx> r(m);
        for (std::size_t l = 0; l < m; ++l) {
            double prod = 1.0;
            for (const auto& v : vals) prod *= v[l];
            r[l] = cplx(std::pow(prod, inv_p), 0.0);
        }
        return r;
    };
    return interpolate_with_doubling(values_at, even, eps, n_cap, info);
}

Symbol sym_apply(const ScalarFunc& f, const Symbol& a, double eps, InterpolationInfo* info,
                 std::size_t n_cap) {
    if (!a.is_real_valued()) throw DomainError("sym_apply requires a real-valued symbol");
    const bool even = a.has_real_coeffs();
    auto values_at = [&](std::size_t m) {
        const auto v = eval_roots_of_unity(a, m);
        double lo = v[0].real(), hi = v[0].real();
        std::vector<cplx> r(m);
        for (std::size_t l = 0; l < m; ++l) {
            lo = std::min(lo, v[l].real());
            hi = std::max(hi, v[l].real());
        }
        f.check_domain(lo, hi);
        for (std::size_t l = 0; l < m; ++l) r[l] = cplx(f(v[l].real()), 0.0);
        return r;
    };
    return interpolate_with_doubling(values_at, even, eps, n_cap, info);
}

} // namespace qtm
