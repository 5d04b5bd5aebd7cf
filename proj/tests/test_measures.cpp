#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "freeconv/measures.hpp"
#include "freeconv/nccomb.hpp"

using namespace freeconv;

namespace {

constexpr double kPi = std::numbers::pi;

SpectralMeasure semicircle(double mean = 0.0, double var = 1.0) {
    return SpectralMeasure(Semicircle{mean, var});
}

std::vector<SpectralMeasure> all_variants() {
    SampledDensity sd;
    sd.grid = make_grid(-1.0, 1.0, 0.001);
    sd.values.resize(sd.grid.size());
    for (std::size_t i = 0; i < sd.grid.size(); ++i)
        sd.values[i] = std::max(0.0, 0.75 * (1.0 - sd.grid[i] * sd.grid[i]));  // parabola
    double mass = 0;
    for (std::size_t i = 0; i + 1 < sd.grid.size(); ++i)
        mass += 0.5 * (sd.values[i] + sd.values[i + 1]) * (sd.grid[i + 1] - sd.grid[i]);
    for (auto& v : sd.values) v /= mass;  // mass exactly 1 under the trapezoid rule
    return {semicircle(), SpectralMeasure(MarchenkoPastur{4.0}),
            SpectralMeasure(MarchenkoPastur{0.25}),
            SpectralMeasure(Atomic{{{0.0, 0.5}, {2.0, 0.5}}}), SpectralMeasure(std::move(sd))};
}

}  // namespace

TEST_CASE("semicircle moments are Catalan numbers") {
    auto mu = semicircle();
    CHECK(mu.moment(0) == doctest::Approx(1.0));
    CHECK(mu.moment(1) == doctest::Approx(0.0));
    CHECK(mu.moment(2) == doctest::Approx(1.0));
    CHECK(mu.moment(3) == doctest::Approx(0.0));
    CHECK(mu.moment(4) == doctest::Approx(2.0));
    CHECK(mu.moment(6) == doctest::Approx(5.0));
    // against the pairing-count oracle
    for (int k = 2; k <= 10; k += 2)
        CHECK(mu.moment(k) ==
              doctest::Approx(static_cast<double>(gaussian_pairing_count(
                  Word(static_cast<std::size_t>(k), 0)))));
}

TEST_CASE("atomic moments are exact sums") {
    SpectralMeasure mu(Atomic{{{0.0, 0.5}, {2.0, 0.5}}});
    CHECK(mu.moment(1) == doctest::Approx(1.0));
    CHECK(mu.moment(2) == doctest::Approx(2.0));
}

TEST_CASE("moment zero is always one") {
    for (const auto& mu : all_variants()) CHECK(mu.moment(0) == doctest::Approx(1.0));
}

TEST_CASE("atomic cauchy is the resolvent sum") {
    SpectralMeasure mu(Atomic{{{1.5, 1.0}}});
    Complex z{0.3, 0.7};
    CHECK(std::abs(mu.cauchy(z) - 1.0 / (z - 1.5)) <= 1e-15);
}

TEST_CASE("semicircle cauchy satisfies its quadratic and maps to C^-") {
    auto mu = semicircle();
    Complex z{0.0, 1.0};
    Complex g = mu.cauchy(z);
    CHECK(std::abs(g * g - z * g + 1.0) <= 1e-12);
    CHECK(g.imag() < 0);
}

TEST_CASE("cauchy tail behaves like 1/z") {
    for (const auto& mu : all_variants()) {
        Complex z{0.0, 100.0};
        Complex g = mu.cauchy(z);
        CHECK(std::abs(g - 1.0 / z) <= 1e-3 * std::abs(1.0 / z) + 1e-3);
    }
    CHECK(std::abs(semicircle().cauchy(Complex{0.0, 100.0}) - Complex{0.0, -0.01}) <= 1e-5);
}

TEST_CASE("cauchy rejects the closed lower half-plane") {
    CHECK_THROWS(semicircle().cauchy(Complex{1.0, 0.0}));
    CHECK_THROWS(semicircle().cauchy(Complex{1.0, -0.5}));
}

TEST_CASE("mapping property Im G < 0 on randomized upper half-plane points") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> re(-5.0, 5.0), im(1e-4, 10.0);
    for (const auto& mu : all_variants())
        for (int i = 0; i < 200; ++i) {
            Complex z{re(rng), im(rng)};
            CHECK(mu.cauchy(z).imag() < 0);
        }
}

TEST_CASE("stieltjes inversion recovers the semicircle density") {
    auto mu = semicircle();
    auto G = [&](Complex z) { return mu.cauchy(z); };
    auto est = stieltjes_invert(G, make_grid(-3.0, 3.0, 1e-3), 1e-6);
    double worst = 0;
    for (std::size_t i = 0; i < est.grid.size(); ++i) {
        double t = est.grid[i];
        if (t < -1.9 || t > 1.9) continue;
        double expected = std::sqrt(4.0 - t * t) / (2.0 * kPi);
        worst = std::max(worst, std::abs(est.density[i] - expected));
    }
    CHECK(worst <= 1e-3);
    CHECK(est.epsilon == 1e-6);
}

TEST_CASE("variance-2 semicircle density matches the scaled closed form") {
    auto mu = semicircle(0.0, 2.0);
    auto G = [&](Complex z) { return mu.cauchy(z); };
    auto est = stieltjes_invert(G, make_grid(-2.7, 2.7, 1e-3), 1e-6);
    double worst = 0;
    for (std::size_t i = 0; i < est.grid.size(); ++i) {
        double t = est.grid[i];
        double expected = std::sqrt(std::max(0.0, 8.0 - t * t)) / (4.0 * kPi);
        worst = std::max(worst, std::abs(est.density[i] - expected));
    }
    CHECK(worst <= 1e-3);
}

TEST_CASE("point mass inverts to a Lorentz bump of height 1/(pi eps)") {
    double eps = 1e-3, a = 0.5;
    auto G = [&](Complex z) { return 1.0 / (z - a); };
    auto est = stieltjes_invert(G, {a - 0.1, a, a + 0.1}, eps);
    CHECK(est.density[1] == doctest::Approx(1.0 / (kPi * eps)).epsilon(1e-9));
}

TEST_CASE("inverted density carries total mass about one") {
    // For a sampled measure G is itself a trapezoid sum, so eps must stay
    // above its internal grid step to smooth over the nodes.
    std::vector<std::pair<SpectralMeasure, double>> cases = {
        {semicircle(), 1e-6},
        {SpectralMeasure(MarchenkoPastur{4.0}), 1e-6},
        {all_variants().back(), 1e-2}};
    for (const auto& [mu, eps] : cases) {
        auto [lo, hi] = mu.support();
        auto G = [&](Complex z) { return mu.cauchy(z); };
        auto est = stieltjes_invert(G, make_grid(lo - 1.0, hi + 1.0, 2e-3), eps);
        double mass = est.trapezoid_mass();
        CHECK(mass >= 1.0 - 10 * eps - 0.01);
        CHECK(mass <= 1.0 + 0.01);
    }
}

TEST_CASE("moment consistency of the inverted closed-form densities") {
    for (const auto& mu : {semicircle(), SpectralMeasure(MarchenkoPastur{4.0})}) {
        auto [lo, hi] = mu.support();
        auto G = [&](Complex z) { return mu.cauchy(z); };
        auto est = stieltjes_invert(G, make_grid(lo - 0.5, hi + 0.5, 1e-3), 1e-6);
        for (int k = 1; k <= 6; ++k)
            CHECK(std::abs(est.moment(k) - mu.moment(k)) <= 0.01 * std::max(1.0, std::abs(mu.moment(k))));
    }
}

TEST_CASE("series expansion of G matches moments") {
    // G(z) = sum m_n / z^{n+1}: recover m_n by n-th difference at large z
    // via evaluations of z^{n+1} G with Richardson in 1/z.
    for (const auto& mu : all_variants()) {
        auto [lo, hi] = mu.support();
        double R = 20.0 * (1.0 + std::max(std::abs(lo), std::abs(hi)));
        for (int n = 0; n <= 4; ++n) {
            // Peel the known lower moments off G and rescale; s(R) =
            // m_n + c/R + O(1/R^2), so two radii eliminate the 1/R term.
            auto tail = [&](double radius) {
                Complex z{0.0, radius};
                Complex g = mu.cauchy(z);
                for (int j = 0; j < n; ++j) g -= mu.moment(j) / std::pow(z, j + 1);
                return g * std::pow(z, n + 1);
            };
            Complex est = 2.0 * tail(2 * R) - tail(R);
            CHECK(std::abs(est - mu.moment(n)) <= 5e-3 * std::max(1.0, std::abs(mu.moment(n))));
        }
    }
}

TEST_CASE("marchenko-pastur first moments match the cumulant convention") {
    SpectralMeasure mu(MarchenkoPastur{4.0});
    CHECK(mu.moment(1) == doctest::Approx(4.0));   // kappa_1 = lambda
    CHECK(mu.moment(2) == doctest::Approx(20.0));  // lambda + lambda^2
    SpectralMeasure sub(MarchenkoPastur{0.25});
    auto atoms = sub.atoms();
    REQUIRE(atoms.size() == 1);
    CHECK(atoms[0].second == doctest::Approx(0.75));  // atom at zero for lambda < 1
}

TEST_CASE("measure json round trips") {
    for (const auto& mu : all_variants()) {
        auto back = SpectralMeasure::from_json(mu.to_json());
        CHECK(back.to_json() == mu.to_json());
        CHECK(back.moment(2) == doctest::Approx(mu.moment(2)));
    }
    CHECK_THROWS(SpectralMeasure::from_json(R"({"type":"nope"})"));
}

TEST_CASE("invalid measures are rejected") {
    CHECK_THROWS(SpectralMeasure(Atomic{{{0.0, 0.4}}}));  // mass 0.4
    CHECK_THROWS(SpectralMeasure(Semicircle{0.0, -1.0}));
    SampledDensity bad;
    bad.grid = {0.0, 1.0, 0.5};
    bad.values = {1.0, 1.0, 1.0};
    CHECK_THROWS(SpectralMeasure(std::move(bad)));
}

TEST_CASE("density estimate CSV export") {
    DensityEstimate d;
    d.grid = {0.0, 1.0};
    d.density = {0.5, 0.25};
    auto csv = d.to_csv();
    CHECK(csv.find("t,density") == 0);
    CHECK(csv.find("0.5") != std::string::npos);
}
