#include <doctest.h>

#include <random>

#include "freeconv/linearize.hpp"

using namespace freeconv;

namespace {

NCPolynomial random_selfadjoint_poly(SymbolTable& symbols, std::mt19937_64& rng, int max_vars = 3,
                                     int max_degree = 4) {
    std::uniform_int_distribution<int> nvars(1, max_vars);
    std::uniform_int_distribution<int> nterms(1, 5);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    int k = nvars(rng);
    for (int i = 0; i < k; ++i) symbols.intern("x" + std::to_string(i));
    std::uniform_int_distribution<int> var(0, k - 1);
    NCPolynomial q;
    int t = nterms(rng);
    for (int i = 0; i < t; ++i) {
        std::uniform_int_distribution<int> len(0, max_degree);
        Word w(static_cast<std::size_t>(len(rng)));
        for (auto& s : w) s = var(rng);
        q.add_term(w, Complex{coeff(rng), coeff(rng)});
    }
    NCPolynomial p = q + q.adjoint();
    if (p.is_zero()) p.add_term(Word{0, 0}, 1.0);
    return p;
}

}  // namespace

TEST_CASE("known 3x3 pencil for xy + yx + x^2") {
    SymbolTable symbols;
    NCPolynomial p = parse_polynomial("x*y + y*x + x^2", symbols);
    int x = symbols.lookup("x"), y = symbols.lookup("y");
    NCPolynomial px = NCPolynomial::monomial(Word{x});
    NCPolynomial py = NCPolynomial::monomial(Word{y});

    Linearization lin;
    lin.size = 3;
    lin.phat = PolyMatrix(3, 3);
    lin.phat(0, 1) = px;
    lin.phat(1, 0) = px;
    lin.phat(0, 2) = py + 0.5 * px;
    lin.phat(2, 0) = py + 0.5 * px;
    lin.phat(1, 2) = NCPolynomial(Complex{-1.0});
    lin.phat(2, 1) = NCPolynomial(Complex{-1.0});

    CHECK(verify_linearization(p, lin, 20) <= 1e-10);
    CHECK(schur_resolvent_check(p, lin, Complex{0.0, 1.0}, 20) <= 1e-8);

    PencilCoefficients coeffs = decompose(lin);
    CHECK(coeffs.b0.rows() == 3);
    CHECK(std::abs(coeffs.b0(1, 2) - Complex{-1.0}) <= 1e-14);
    CHECK(std::abs(coeffs.b0(2, 1) - Complex{-1.0}) <= 1e-14);
    CHECK(coeffs.b0.cwiseAbs().sum() == doctest::Approx(2.0).epsilon(1e-12));

    const MatrixXcd& ax = coeffs.a.at(x);
    CHECK(std::abs(ax(0, 1) - 1.0) <= 1e-14);
    CHECK(std::abs(ax(1, 0) - 1.0) <= 1e-14);
    CHECK(std::abs(ax(0, 2) - 0.5) <= 1e-14);
    CHECK(std::abs(ax(2, 0) - 0.5) <= 1e-14);
    CHECK(ax.cwiseAbs().sum() == doctest::Approx(3.0).epsilon(1e-12));

    const MatrixXcd& ay = coeffs.a.at(y);
    CHECK(std::abs(ay(0, 2) - 1.0) <= 1e-14);
    CHECK(std::abs(ay(2, 0) - 1.0) <= 1e-14);
    CHECK(ay.cwiseAbs().sum() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("constructed pencil for xy + yx + x^2 verifies") {
    SymbolTable symbols;
    NCPolynomial p = parse_polynomial("x*y + y*x + x^2", symbols);
    Linearization lin = linearize(p);
    CHECK(verify_linearization(p, lin, 20) <= 1e-10);
    CHECK(schur_resolvent_check(p, lin, Complex{0.0, 1.0}, 20) <= 1e-8);
    // all entries must have degree <= 1, pencil must be selfadjoint
    for (Eigen::Index i = 0; i < lin.size; ++i)
        for (Eigen::Index j = 0; j < lin.size; ++j) {
            CHECK(lin.phat(i, j).degree() <= 1);
            CHECK((lin.phat(i, j) - lin.phat(j, i).adjoint()).is_zero());
        }
}

TEST_CASE("corrupting a pencil entry is detected") {
    SymbolTable symbols;
    NCPolynomial p = parse_polynomial("x*y + y*x + x^2", symbols);
    Linearization lin = linearize(p);
    lin.phat(1, 0).add_term(Word{}, 0.25);
    lin.phat(0, 1).add_term(Word{}, 0.25);
    CHECK(verify_linearization(p, lin, 20) > 0.1);
}

TEST_CASE("random selfadjoint polynomials verify at two matrix sizes") {
    std::mt19937_64 rng(404);
    for (int rep = 0; rep < 100; ++rep) {
        SymbolTable symbols;
        NCPolynomial p = random_selfadjoint_poly(symbols, rng);
        Linearization lin = linearize(p);
        CHECK(verify_linearization(p, lin, 3, 5, 1000 + static_cast<unsigned long>(rep)) <= 1e-9);
        CHECK(verify_linearization(p, lin, 3, 7, 2000 + static_cast<unsigned long>(rep)) <= 1e-9);

        // structural invariants
        CHECK(lin.size >= 2);
        for (Eigen::Index i = 0; i < lin.size; ++i) {
            CHECK(lin.phat(i, i).degree() <= 0);
            for (Eigen::Index j = 0; j < lin.size; ++j)
                CHECK((lin.phat(i, j) - lin.phat(j, i).adjoint()).is_zero());
        }
    }
}

TEST_CASE("schur complement identity at several spectral parameters") {
    std::mt19937_64 rng(505);
    for (int rep = 0; rep < 10; ++rep) {
        SymbolTable symbols;
        NCPolynomial p = random_selfadjoint_poly(symbols, rng);
        Linearization lin = linearize(p);
        for (Complex z : {Complex{0.0, 1.0}, Complex{0.0, 2.0}, Complex{0.0, 10.0}})
            CHECK(schur_resolvent_check(p, lin, z, 5, 5, 7000 + static_cast<unsigned long>(rep))
                  <= 1e-8);
    }
}

TEST_CASE("pencil size is bounded by the monomial letter count") {
    std::mt19937_64 rng(606);
    for (int rep = 0; rep < 50; ++rep) {
        SymbolTable symbols;
        NCPolynomial p = random_selfadjoint_poly(symbols, rng);
        Eigen::Index budget = 0;  // each monomial costs at most its length, one minimum
        for (const auto& [w, c] : p.terms())
            budget += std::max<Eigen::Index>(1, static_cast<Eigen::Index>(w.size()));
        Linearization lin = linearize(p);
        CHECK(lin.size <= 1 + 2 * budget);
    }
}

TEST_CASE("degenerate inputs: constants and degree-one polynomials") {
    SymbolTable symbols;
    for (const char* text : {"2", "x + 3", "x + y - 1"}) {
        NCPolynomial p = parse_polynomial(text, symbols);
        Linearization lin = linearize(p);
        CHECK(verify_linearization(p, lin, 10) <= 1e-10);
    }
}

TEST_CASE("decompose and reassemble round trip") {
    std::mt19937_64 rng(707);
    for (int rep = 0; rep < 20; ++rep) {
        SymbolTable symbols;
        NCPolynomial p = random_selfadjoint_poly(symbols, rng);
        Linearization lin = linearize(p);
        PencilCoefficients coeffs = decompose(lin);
        // b0 and every a_j selfadjoint
        CHECK((coeffs.b0 - coeffs.b0.adjoint()).cwiseAbs().maxCoeff() <= 1e-14);
        for (const auto& [id, a] : coeffs.a)
            CHECK((a - a.adjoint()).cwiseAbs().maxCoeff() <= 1e-14);
        PolyMatrix back = reassemble(coeffs);
        REQUIRE(back.rows() == lin.size);
        for (Eigen::Index i = 0; i < lin.size; ++i)
            for (Eigen::Index j = 0; j < lin.size; ++j)
                CHECK((back(i, j) - lin.phat(i, j)).is_zero());
    }
}

TEST_CASE("kronecker product shape and a known value") {
    MatrixXcd a(2, 2), b(2, 2);
    a << 1, 2, 3, 4;
    b << 0, 1, 1, 0;
    MatrixXcd k = kronecker(a, b);
    REQUIRE(k.rows() == 4);
    CHECK(std::abs(k(0, 1) - 1.0) <= 1e-15);
    CHECK(std::abs(k(0, 0)) <= 1e-15);
    CHECK(std::abs(k(2, 1) - 3.0) <= 1e-15);
    CHECK(std::abs(k(2, 3) - 4.0) <= 1e-15);
}

TEST_CASE("random_selfadjoint is selfadjoint and reproducible") {
    MatrixXcd m1 = random_selfadjoint(6, 42);
    MatrixXcd m2 = random_selfadjoint(6, 42);
    CHECK((m1 - m1.adjoint()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((m1 - m2).cwiseAbs().maxCoeff() == 0.0);
}
