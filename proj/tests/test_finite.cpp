#include <doctest.h>

#include <random>

#include "qtm/finite.hpp"
#include "oracles.hpp"

using namespace qtm;
using Eigen::MatrixXcd;
using oracles::family_symbol;

namespace {

double rel_err(const MatrixXcd& got, const MatrixXcd& want) {
    const double scale = std::max(want.cwiseAbs().maxCoeff(), 1e-300);
    return (got - want).cwiseAbs().maxCoeff() / scale;
}

// tridiagonal, well-conditioned family whose intermediate bandwidths stay
// within the m/4 rule for moderate m (structured-path runs)
std::vector<FiniteQT> calm_family(long m) {
    return {FiniteQT::toeplitz(m, family_symbol(2, 1, 0, 4.0)),
            FiniteQT::toeplitz(m, family_symbol(3, 2, 0, 6.0)),
            FiniteQT::toeplitz(m, family_symbol(9, 4, 0, 8.0))};
}

} // namespace

TEST_SUITE_BEGIN("finite");

TEST_CASE("construction enforces the m/4 rule") {
    CHECK_NOTHROW(FiniteQT::toeplitz(16, family_symbol(3, 2, 1, 1.0))); // bandwidth 2
    Symbol wide({cplx(1), cplx(0.5), cplx(0.2), cplx(0.7), cplx(1), cplx(0.7), cplx(0.2),
                 cplx(0.5), cplx(1), cplx(0.3), cplx(0.9)},
                -5); // bandwidth 5
    CHECK_THROWS_AS(FiniteQT::toeplitz(16, wide), SupportOverflow);
    CHECK_NOTHROW(FiniteQT::toeplitz(20, wide));
}

TEST_CASE("fin_mul identity and exact small product") {
    FiniteQT a = FiniteQT::toeplitz(64, family_symbol(2, 1, 0));
    FiniteQT ai = fin_mul(a, FiniteQT::identity(64));
    CHECK(rel_err(ai.reconstruct(), a.reconstruct()) < 1e-15);

    FiniteQT p = fin_mul(a, a);
    MatrixXcd ref = a.reconstruct() * a.reconstruct();
    CHECK(rel_err(p.reconstruct(), ref) <= 1e-14);
    // product picks up both corners
    CHECK_FALSE(p.nw().empty());
    CHECK_FALSE(p.se().empty());
}

TEST_CASE("finite Widom formula is exact for the family") {
    const Symbol syms[] = {family_symbol(2, 1, 0, 1.0), family_symbol(3, 2, 1, 1.0),
                           family_symbol(9, 4, 4, 1.0)};
    for (long m : {32L, 64L, 128L}) {
        for (const Symbol& sa : syms) {
            for (const Symbol& sb : syms) {
                FiniteQT a = FiniteQT::toeplitz(m, sa);
                FiniteQT b = FiniteQT::toeplitz(m, sb);
                FiniteQT ab = fin_mul(a, b);
                CHECK(rel_err(ab.reconstruct(), a.reconstruct() * b.reconstruct()) <= 1e-13);
            }
        }
    }
}

TEST_CASE("self-adjoint inputs give mirrored corners") {
    FiniteQT a = FiniteQT::toeplitz(64, family_symbol(3, 2, 1, 1.0));
    FiniteQT p = fin_mul(a, a);
    const long s = std::max(p.nw().support(), p.se().support());
    MatrixXcd nw = p.nw().to_dense(s, s);
    MatrixXcd se = p.se().to_dense(s, s);
    CHECK((nw - se).cwiseAbs().maxCoeff() < 1e-14 * nw.cwiseAbs().maxCoeff());
}

TEST_CASE("fin_mul with corrections matches dense arithmetic") {
    std::mt19937 rng(71);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    MatrixXcd f(6, 2);
    for (long i = 0; i < 6; ++i)
        for (long c = 0; c < 2; ++c) f(i, c) = cplx(u(rng), u(rng));
    LowRankCorrection nw(f, f);
    MatrixXcd g(4, 1);
    for (long i = 0; i < 4; ++i) g(i, 0) = cplx(u(rng), u(rng));
    LowRankCorrection se(g, g);
    FiniteQT a(48, family_symbol(2, 1, 0, 1.0), nw, se);
    FiniteQT b(48, family_symbol(3, 2, 1, 1.0), se, nw);
    FiniteQT ab = fin_mul(a, b);
    CHECK(rel_err(ab.reconstruct(), a.reconstruct() * b.reconstruct()) <= 1e-13);
}

TEST_CASE("fin_mul signals support overflow") {
    FiniteQT a = FiniteQT::toeplitz(8, family_symbol(3, 2, 1, 1.0)); // bandwidth 2, 4*2 = 8 ok
    CHECK_THROWS_AS(fin_mul(a, a), SupportOverflow); // product bandwidth 4 breaks m/4
}

TEST_CASE("dense mode arithmetic") {
    FiniteQT a = FiniteQT::toeplitz(24, family_symbol(2, 1, 0, 1.0));
    FiniteQT d = FiniteQT::dense(a.reconstruct(), true, true);
    CHECK(d.dense_mode());
    FiniteQT p = fin_mul(d, a);
    CHECK(p.dense_mode());
    CHECK(rel_err(p.reconstruct(), a.reconstruct() * a.reconstruct()) < 1e-14);
    CHECK(rel_err(fin_add(d, a).reconstruct(), 2.0 * a.reconstruct()) < 1e-14);
}

TEST_CASE("fin_mean fixed point and scalars") {
    auto fam = calm_family(256);
    FinMeanResult r = fin_mean(MeanKind::NBMP, std::vector<FiniteQT>{fam[0], fam[0], fam[0]},
                               1e-12);
    CHECK_FALSE(r.dense_fallback);
    CHECK(rel_err(r.mean.reconstruct(), fam[0].reconstruct()) < 1e-10);

    std::vector<FiniteQT> consts = {FiniteQT::toeplitz(16, Symbol::constant(4.0)),
                                    FiniteQT::toeplitz(16, Symbol::constant(9.0))};
    FinMeanResult g = fin_mean(MeanKind::ALM, consts, 1e-13);
    CHECK(rel_err(g.mean.reconstruct(), 6.0 * MatrixXcd::Identity(16, 16)) < 1e-12);
}

TEST_CASE("structured fin_mean matches the dense oracle") {
    const long m = 256;
    auto fam = calm_family(m);
    FinMeanResult r = fin_mean(MeanKind::NBMP, fam, 1e-12);
    CHECK_FALSE(r.dense_fallback);
    CHECK(r.trace.converged);

    std::vector<DenseMatrix> dense;
    for (const auto& a : fam) dense.push_back(a.reconstruct());
    DenseMatrix ref = dense_oracle_mean(MeanKind::NBMP, dense, 1e-12);
    CHECK(rel_err(r.mean.reconstruct(), ref) <= 1e-8);
}

TEST_CASE("fin_mean falls back to dense on overflow") {
    const long m = 64;
    std::vector<FiniteQT> fam = {FiniteQT::toeplitz(m, family_symbol(2, 1, 0, 1.0)),
                                 FiniteQT::toeplitz(m, family_symbol(3, 2, 1, 1.0)),
                                 FiniteQT::toeplitz(m, family_symbol(9, 4, 4, 1.0))};
    FinMeanResult r = fin_mean(MeanKind::NBMP, fam, 1e-12);
    CHECK(r.dense_fallback);
    CHECK(r.mean.dense_mode());
    std::vector<DenseMatrix> dense;
    for (const auto& a : fam) dense.push_back(a.reconstruct());
    CHECK(rel_err(r.mean.reconstruct(), dense_oracle_mean(MeanKind::NBMP, dense, 1e-12)) < 1e-12);
}

TEST_CASE("dense oracle mean examples") {
    DenseMatrix a(1, 1), b(1, 1);
    a << 4.0;
    b << 9.0;
    for (MeanKind kind : {MeanKind::ALM, MeanKind::NBMP, MeanKind::Karcher}) {
        DenseMatrix g = dense_oracle_mean(kind, std::vector<DenseMatrix>{a, b}, 1e-13);
        CHECK(std::abs(g(0, 0) - cplx(6.0)) < 1e-12);
    }
    std::vector<double> w = {0.5, 0.5};
    DenseMatrix gw =
        dense_oracle_mean(MeanKind::Weighted, std::vector<DenseMatrix>{a, b}, 1e-13, 200, w);
    CHECK(std::abs(gw(0, 0) - cplx(6.0)) < 1e-12);

    // commuting diagonal case: elementwise geometric mean
    DenseMatrix d1 = DenseMatrix::Zero(2, 2), d2 = d1, d3 = d1;
    d1.diagonal() << 1.0, 2.0;
    d2.diagonal() << 4.0, 3.0;
    d3.diagonal() << 2.0, 5.0;
    DenseMatrix g3 =
        dense_oracle_mean(MeanKind::ALM, std::vector<DenseMatrix>{d1, d2, d3}, 1e-13);
    CHECK(std::abs(g3(0, 0) - cplx(std::cbrt(8.0))) < 1e-12);
    CHECK(std::abs(g3(1, 1) - cplx(std::cbrt(30.0))) < 1e-12);
    CHECK(std::abs(g3(0, 1)) < 1e-13);
}

TEST_CASE("dense oracle: ALM and NBMP stay close on random SPD inputs") {
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const long n = 50;
    std::vector<DenseMatrix> mats;
    for (int k = 0; k < 3; ++k) {
        MatrixXcd x(n, n);
        for (long i = 0; i < n; ++i)
            for (long j = 0; j < n; ++j) x(i, j) = cplx(u(rng), u(rng));
        MatrixXcd h = 0.5 * (x + x.adjoint());
        mats.push_back(MatrixXcd::Identity(n, n) + (1.4 / h.norm()) * h);
    }
    DenseMatrix alm = dense_oracle_mean(MeanKind::ALM, mats, 1e-12);
    DenseMatrix nbmp = dense_oracle_mean(MeanKind::NBMP, mats, 1e-12);
    const double scale = alm.cwiseAbs().maxCoeff();
    CHECK((alm - nbmp).cwiseAbs().maxCoeff() <= 1e-5 * scale);

    CHECK_THROWS_AS(
        dense_oracle_mean(MeanKind::ALM,
                          std::vector<DenseMatrix>{-mats[0], mats[1]}, 1e-12),
        NotPositiveDefinite);
}

TEST_SUITE_END();
