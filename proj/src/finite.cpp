#include "qtm/finite.hpp"

#include "qtm/detail/means_impl.hpp"

#include <iostream>

namespace qtm {

using Eigen::MatrixXcd;

namespace {

void check_quarter_rule(long m, long bandwidth, long support, const char* who) {
    if (4 * bandwidth > m || 4 * support > m)
        throw SupportOverflow(std::string(who) + ": bandwidth/support exceed the m/4 rule");
}

MatrixXcd clip_rows(MatrixXcd x, long m) {
    if (x.rows() > m) return x.topRows(m).eval();
    return x;
}

} // namespace

FiniteQT::FiniteQT(long m, Symbol symbol, LowRankCorrection nw, LowRankCorrection se_flipped,
                   bool self_adjoint, bool positive_definite)
    : m_(m), symbol_(std::move(symbol)), nw_(std::move(nw)), se_(std::move(se_flipped)),
      self_adjoint_(self_adjoint), positive_definite_(positive_definite) {
    if (m_ < 1) throw Error("FiniteQT: size must be positive");
    check_quarter_rule(m_, symbol_.bandwidth(), std::max(nw_.support(), se_.support()), "FiniteQT");
}

FiniteQT FiniteQT::identity(long m) {
    return FiniteQT(m, Symbol::constant(1.0), {}, {}, true, true);
}

FiniteQT FiniteQT::toeplitz(long m, Symbol a) {
    const bool sa = a.is_real_valued();
    const bool pd = sa && !a.empty() && min_on_grid(a) > 0.0;
    return FiniteQT(m, std::move(a), {}, {}, sa, pd);
}

FiniteQT FiniteQT::dense(DenseMatrix d, bool self_adjoint, bool positive_definite) {
    FiniteQT out;
    out.m_ = d.rows();
    if (d.rows() != d.cols() || d.rows() < 1) throw Error("FiniteQT::dense: need a square array");
    out.dense_ = std::move(d);
    out.self_adjoint_ = self_adjoint;
    out.positive_definite_ = positive_definite;
    return out;
}

const DenseMatrix& FiniteQT::dense_payload() const {
    if (!dense_) throw Error("FiniteQT: not in dense mode");
    return *dense_;
}

FiniteQT FiniteQT::with_flags(bool self_adjoint, bool positive_definite) const {
    FiniteQT out = *this;
    out.self_adjoint_ = self_adjoint;
    out.positive_definite_ = positive_definite;
    return out;
}

DenseMatrix FiniteQT::reconstruct() const {
    if (dense_) return *dense_;
    MatrixXcd out = MatrixXcd::Zero(m_, m_);
    for (long d = std::max(-(m_ - 1), symbol_.min_index());
         d <= std::min(m_ - 1, symbol_.max_index()); ++d)
        out.diagonal(d).setConstant(symbol_.coeff(d));
    if (!nw_.empty()) out += nw_.to_dense(m_, m_);
    if (!se_.empty()) out += se_.to_dense(m_, m_).reverse();
    return out;
}

long FiniteQT::max_support() const {
    return std::max(nw_.support(), se_.support());
}

FiniteQT fin_mul(const FiniteQT& a, const FiniteQT& b, const ToleranceConfig& cfg) {
    if (a.size() != b.size()) throw Error("fin_mul: size mismatch");
    const long m = a.size();
    if (a.dense_mode() || b.dense_mode())
        return FiniteQT::dense(a.reconstruct() * b.reconstruct());

    const double eps = cfg.trunc_eps;
    Symbol s = sym_mul(a.symbol(), b.symbol(), eps);
    check_quarter_rule(m, s.bandwidth(), 0, "fin_mul");

    // one corner of the product in stored coordinates; the SE corner uses the
    // reflected symbols
    auto corner = [&](const Symbol& sa, const Symbol& sb, const LowRankCorrection& ea,
                      const LowRankCorrection& eb) {
        std::vector<MatrixXcd> us, vs;
        double floor = 0.0;
        auto push = [&](MatrixXcd u, MatrixXcd v) {
            if (u.rows() > 0 && v.rows() > 0 && u.cols() > 0) {
                us.push_back(std::move(u));
                vs.push_back(std::move(v));
            }
        };
        LowRankCorrection hk = hankel_correction(sa, sb, eps);
        if (!hk.empty()) {
            push(-hk.u(), hk.v());
            floor += hk.sigma_max();
        }
        const double wa = wiener_norm(sa), wb = wiener_norm(sb);
        if (!eb.empty()) {
            push(clip_rows(toeplitz_times_block(sa, eb.u()), m), eb.v());
            floor += wa * eb.sigma_max();
        }
        if (!ea.empty()) {
            push(ea.u(), clip_rows(toeplitz_times_block(sb.conj_transpose(), ea.v()), m));
            floor += ea.sigma_max() * wb;
        }
        if (!ea.empty() && !eb.empty()) {
            const long inner = std::min(ea.rows_v(), eb.rows_u());
            if (inner > 0) {
                MatrixXcd core = ea.v().topRows(inner).adjoint() * eb.u().topRows(inner);
                push(ea.u() * core, eb.v());
                floor += ea.sigma_max() * eb.sigma_max();
            }
        }
        if (us.empty()) return LowRankCorrection();
        long ru = 0, rv = 0, k = 0;
        for (std::size_t i = 0; i < us.size(); ++i) {
            ru = std::max<long>(ru, us[i].rows());
            rv = std::max<long>(rv, vs[i].rows());
            k += us[i].cols();
        }
        MatrixXcd u = MatrixXcd::Zero(ru, k), v = MatrixXcd::Zero(rv, k);
        long at = 0;
        for (std::size_t i = 0; i < us.size(); ++i) {
            u.block(0, at, us[i].rows(), us[i].cols()) = us[i];
            v.block(0, at, vs[i].rows(), vs[i].cols()) = vs[i];
            at += us[i].cols();
        }
        return lr_compress(LowRankCorrection(std::move(u), std::move(v)), eps, floor);
    };

    LowRankCorrection nw = corner(a.symbol(), b.symbol(), a.nw(), b.nw());
    LowRankCorrection se =
        corner(a.symbol().reflected(), b.symbol().reflected(), a.se(), b.se());
    check_quarter_rule(m, s.bandwidth(), std::max(nw.support(), se.support()), "fin_mul");
    return FiniteQT(m, std::move(s), std::move(nw), std::move(se));
}

FiniteQT fin_add(const FiniteQT& a, const FiniteQT& b, const ToleranceConfig& cfg) {
    if (a.size() != b.size()) throw Error("fin_add: size mismatch");
    if (a.dense_mode() || b.dense_mode())
        return FiniteQT::dense(a.reconstruct() + b.reconstruct(),
                               a.self_adjoint() && b.self_adjoint(),
                               a.positive_definite() && b.positive_definite());
    return FiniteQT(a.size(), sym_add(a.symbol(), b.symbol()).truncated(cfg.trunc_eps),
                    lr_add(a.nw(), b.nw(), cfg.trunc_eps), lr_add(a.se(), b.se(), cfg.trunc_eps),
                    a.self_adjoint() && b.self_adjoint(),
                    a.positive_definite() && b.positive_definite());
}

FiniteQT fin_scale(const FiniteQT& a, double alpha) {
    if (a.dense_mode())
        return FiniteQT::dense(alpha * a.dense_payload(), a.self_adjoint(),
                               a.positive_definite() && alpha > 0.0);
    return FiniteQT(a.size(), sym_scale(a.symbol(), alpha), a.nw().scaled(alpha),
                    a.se().scaled(alpha), a.self_adjoint(),
                    a.positive_definite() && alpha > 0.0);
}

FiniteQT fin_sub(const FiniteQT& a, const FiniteQT& b, const ToleranceConfig& cfg) {
    return fin_add(a, fin_scale(b, -1.0), cfg);
}

FiniteQT fin_adjoint(const FiniteQT& a) {
    if (a.dense_mode())
        return FiniteQT::dense(a.dense_payload().adjoint(), a.self_adjoint(),
                               a.positive_definite());
    return FiniteQT(a.size(), a.symbol().conj_transpose(), a.nw().adjoint(), a.se().adjoint(),
                    a.self_adjoint(), a.positive_definite());
}

FiniteQT fin_hermitian_part(const FiniteQT& a, const ToleranceConfig& cfg) {
    FiniteQT h = fin_scale(fin_add(a, fin_adjoint(a), cfg), 0.5);
    if (h.dense_mode()) return h.with_flags(true, a.positive_definite());
    return FiniteQT(h.size(), h.symbol().real_valued_part(), h.nw(), h.se(), true,
                    a.positive_definite());
}

double fin_norm(const FiniteQT& a) {
    if (a.dense_mode()) return a.dense_payload().norm();
    return wiener_norm(a.symbol()) + lr_norm2(a.nw()) + lr_norm2(a.se());
}

double fin_diff_norm(const FiniteQT& a, const FiniteQT& b) {
    if (a.dense_mode() || b.dense_mode()) return (a.reconstruct() - b.reconstruct()).norm();
    return wiener_norm(sym_add(a.symbol(), sym_scale(b.symbol(), -1.0))) +
           lr_diff_norm2(a.nw(), b.nw()) + lr_diff_norm2(a.se(), b.se());
}

namespace {

bool fin_check_spd(const FiniteQT& a) {
    if (a.dense_mode()) {
        Eigen::LLT<MatrixXcd> llt(a.dense_payload());
        return llt.info() == Eigen::Success;
    }
    if (!a.symbol().is_real_valued()) return false;
    if (!a.nw().empty() && !a.nw().is_self_adjoint()) return false;
    if (!a.se().empty() && !a.se().is_self_adjoint()) return false;
    Eigen::LLT<MatrixXcd> llt(a.reconstruct());
    return llt.info() == Eigen::Success;
}

} // namespace

namespace detail {

template <>
struct algebra<FiniteQT> {
    using matrix = FiniteQT;

    static FiniteQT mul(const FiniteQT& a, const FiniteQT& b, const ToleranceConfig& cfg) {
        return fin_mul(a, b, cfg);
    }
    static FiniteQT add(const FiniteQT& a, const FiniteQT& b, const ToleranceConfig& cfg) {
        return fin_add(a, b, cfg);
    }
    static FiniteQT sub(const FiniteQT& a, const FiniteQT& b, const ToleranceConfig& cfg) {
        return fin_sub(a, b, cfg);
    }
    static FiniteQT scale(const FiniteQT& a, double alpha) { return fin_scale(a, alpha); }
    static FiniteQT identity_like(const FiniteQT& a) { return FiniteQT::identity(a.size()); }
    static FiniteQT hermitian(const FiniteQT& a, const ToleranceConfig& cfg) {
        return fin_hermitian_part(a, cfg);
    }
    static double norm(const FiniteQT& a) { return fin_norm(a); }
    static double diff_norm(const FiniteQT& a, const FiniteQT& b) { return fin_diff_norm(a, b); }
    static SpectralBounds bounds(const FiniteQT& a) {
        SpectralBounds b;
        b.beta = fin_norm(a);
        const double grid_min = a.symbol().empty() ? 0.0 : min_on_grid(a.symbol());
        b.alpha = std::max(0.0, grid_min - lr_norm2(a.nw()) - lr_norm2(a.se()));
        return b;
    }
    static void require_spd(const FiniteQT& a, const char* who) {
        if (a.self_adjoint() && a.positive_definite()) return;
        if (!fin_check_spd(a))
            throw NotPositiveDefinite(std::string(who) +
                                      ": matrix is not self-adjoint positive definite");
    }
    static FiniteQT as_spd(const FiniteQT& a) { return a.with_flags(true, true); }
    static FiniteQT as_sa(const FiniteQT& a) { return a.with_flags(true, a.positive_definite()); }
    static FiniteQT inverse_guess(const FiniteQT& a, const ToleranceConfig&) {
        if (a.dense_mode() || a.symbol().empty() || min_on_grid(a.symbol()) <= 0.0)
            return FiniteQT();
        try {
            Symbol r = sym_apply(ScalarFunc::reciprocal(), a.symbol(), 1e-10, nullptr, 1 << 14);
            if (4 * r.bandwidth() > a.size()) return FiniteQT();
            return FiniteQT(a.size(), std::move(r), {}, {}, true, true);
        } catch (const Error&) {
            return FiniteQT();
        }
    }
};

} // namespace detail

FinMeanResult fin_mean(MeanKind kind, std::span<const FiniteQT> matrices, double tol, int max_iter,
                       const ToleranceConfig& cfg, std::span<const double> weights) {
    if (matrices.size() < 2) throw Error("fin_mean: need p >= 2 matrices");
    const long m = matrices[0].size();
    for (const FiniteQT& a : matrices)
        if (a.size() != m) throw Error("fin_mean: size mismatch");

    FinMeanResult out;
    try {
        switch (kind) {
            case MeanKind::ALM:
                out.mean = detail::iterative_mean_core(
                    matrices, std::span<const Rational>(detail::alm_exponents_list(matrices.size())),
                    tol, max_iter, cfg, &out.trace, true);
                break;
            case MeanKind::NBMP:
                out.mean = detail::iterative_mean_core(
                    matrices,
                    std::span<const Rational>(detail::nbmp_exponents_list(matrices.size())), tol,
                    max_iter, cfg, &out.trace, true);
                break;
            case MeanKind::Weighted: {
                if (weights.size() != matrices.size())
                    throw Error("fin_mean: weights size mismatch");
                out.mean = detail::weighted_mean_core(matrices, weights, tol, max_iter, cfg,
                                                      &out.trace, true);
                break;
            }
            case MeanKind::Karcher: {
                FiniteQT x0 = detail::iterative_mean_core(
                    matrices,
                    std::span<const Rational>(detail::nbmp_exponents_list(matrices.size())), tol,
                    max_iter, cfg, nullptr, true);
                out.mean = detail::karcher_core(matrices, x0, tol, max_iter, cfg, &out.trace, true);
                break;
            }
        }
        return out;
    } catch (const SupportOverflow&) {
        std::clog << "fin_mean: m/4 support rule broken, falling back to dense arithmetic\n";
    }

    out.dense_fallback = true;
    std::vector<DenseMatrix> dense;
    dense.reserve(matrices.size());
    for (const FiniteQT& a : matrices) dense.push_back(a.reconstruct());
    out.mean = FiniteQT::dense(dense_oracle_mean(kind, dense, tol, max_iter, weights), true, true);
    out.trace.converged = true;
    return out;
}

} // namespace qtm
