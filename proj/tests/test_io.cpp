#include <doctest.h>

#include <filesystem>
#include <random>

#include "qtm/io.hpp"
#include "oracles.hpp"

using namespace qtm;

namespace {

Symbol random_tricky_symbol(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> c(11);
    for (auto& x : c) x = cplx(u(rng) * std::pow(10.0, u(rng) * 12.0), u(rng));
    c[3] = cplx(0.1 + 0.2, -1.0 / 3.0); // non-terminating binary fractions
    return Symbol(std::move(c), -4, 0.0);
}

bool bit_equal(const Symbol& a, const Symbol& b) {
    if (a.offset() != b.offset() || a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.coeffs()[i].real() != b.coeffs()[i].real()) return false;
        if (a.coeffs()[i].imag() != b.coeffs()[i].imag()) return false;
    }
    return true;
}

} // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("doubles round-trip through shortest decimal") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng) * std::pow(10.0, 300.0 * u(rng));
        CHECK(io::parse_double(io::format_double(x)) == x);
    }
    CHECK(io::parse_double(io::format_double(0.1)) == 0.1);
    CHECK(io::parse_double(io::format_double(-0.0)) == 0.0);
}

TEST_CASE("symbol CSV and JSON round-trips are bit exact") {
    std::mt19937 rng(5);
    for (int rep = 0; rep < 10; ++rep) {
        Symbol a = random_tricky_symbol(rng);
        CHECK(bit_equal(io::symbol_from_csv(io::symbol_to_csv(a)), a));
        CHECK(bit_equal(io::symbol_from_json(io::symbol_to_json(a)), a));
    }
    CHECK(io::symbol_from_csv("").empty());
}

TEST_CASE("correction and qt matrix round-trips") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXcd fu(6, 2), fv(4, 2);
    for (long i = 0; i < 6; ++i)
        for (long c = 0; c < 2; ++c) fu(i, c) = cplx(u(rng), u(rng));
    for (long i = 0; i < 4; ++i)
        for (long c = 0; c < 2; ++c) fv(i, c) = cplx(u(rng), u(rng));
    LowRankCorrection e(fu, fv);

    LowRankCorrection back = io::correction_from_json(io::correction_to_json(e));
    CHECK(back.rank() == e.rank());
    CHECK((back.u() - e.u()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.v() - e.v()).cwiseAbs().maxCoeff() == 0.0);

    QTMatrix a(oracles::family_symbol(3, 2, 1, 1.0), e, false, false);
    QTMatrix qback = io::qt_from_json(io::qt_to_json(a));
    CHECK(bit_equal(qback.symbol(), a.symbol()));
    CHECK(qback.self_adjoint() == a.self_adjoint());
    CHECK((qback.correction().u() - e.u()).cwiseAbs().maxCoeff() == 0.0);

    // zero correction round-trips too
    QTMatrix t = QTMatrix::toeplitz(oracles::family_symbol(2, 1, 0, 1.0));
    QTMatrix tb = io::qt_from_json(io::qt_to_json(t));
    CHECK(tb.correction().empty());
    CHECK(tb.positive_definite());
}

TEST_CASE("finite matrices round-trip in both modes") {
    FiniteQT a = FiniteQT::toeplitz(32, oracles::family_symbol(2, 1, 0, 1.0));
    FiniteQT ab = io::finite_from_json(io::finite_to_json(a));
    CHECK(ab.size() == 32);
    CHECK_FALSE(ab.dense_mode());
    CHECK((ab.reconstruct() - a.reconstruct()).cwiseAbs().maxCoeff() == 0.0);

    FiniteQT d = FiniteQT::dense(a.reconstruct(), true, true);
    FiniteQT db = io::finite_from_json(io::finite_to_json(d));
    CHECK(db.dense_mode());
    CHECK((db.reconstruct() - d.reconstruct()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("atomic file writes and trace csv") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "qtm_io_test";
    fs::remove_all(dir);
    io::write_file_atomic(dir / "x.txt", "hello\n");
    CHECK(io::read_file(dir / "x.txt") == "hello\n");
    CHECK_FALSE(fs::exists(dir / "x.txt.tmp"));

    IterationTrace t;
    t.iterations = 2;
    t.residual_history = {0.5, 1e-14};
    t.converged = true;
    const std::string csv = io::trace_to_csv(t);
    CHECK(csv == "iter,residual\n1,0.5\n2,1e-14\n");
    fs::remove_all(dir);
}

TEST_SUITE_END();
