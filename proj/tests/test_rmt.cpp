#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "freeconv/rmt.hpp"

using namespace freeconv;

namespace {

DensityEstimate exact_semicircle_density(double var = 1.0) {
    DensityEstimate est;
    double r = 2.0 * std::sqrt(var);
    est.grid = make_grid(-r, r, 1e-3);
    est.density.resize(est.grid.size());
    for (std::size_t i = 0; i < est.grid.size(); ++i) {
        double t = est.grid[i];
        est.density[i] = std::sqrt(std::max(0.0, 4.0 * var - t * t)) / (2.0 * std::numbers::pi * var);
    }
    return est;
}

}  // namespace

TEST_CASE("gue samples are exactly hermitian") {
    EnsembleSpec spec{EnsembleSpec::Kind::GUE, 50, 1, 7};
    MatrixXcd x = sample(spec);
    CHECK((x - x.adjoint()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sampling is deterministic under the seed") {
    EnsembleSpec spec{EnsembleSpec::Kind::GUE, 40, 1, 99};
    CHECK((sample(spec) - sample(spec)).cwiseAbs().maxCoeff() == 0.0);
    EnsembleSpec wspec{EnsembleSpec::Kind::Wishart, 30, 60, 99};
    CHECK((sample(wspec) - sample(wspec)).cwiseAbs().maxCoeff() == 0.0);
    spec.seed = 100;
    EnsembleSpec other{EnsembleSpec::Kind::GUE, 40, 1, 100};
    CHECK((sample(spec) - sample(other)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stream seeds separate variables and trials") {
    CHECK(stream_seed(1, 0, 0) != stream_seed(1, 0, 1));
    CHECK(stream_seed(1, 0, 0) != stream_seed(1, 1, 0));
    CHECK(stream_seed(1, 2, 3) == stream_seed(1, 2, 3));
    CHECK(stream_seed(1, 2, 3) != stream_seed(2, 2, 3));
}

TEST_CASE("gue normalization: tr(x^2) near one") {
    double acc = 0;
    int trials = 20;
    for (int t = 0; t < trials; ++t) {
        EnsembleSpec spec{EnsembleSpec::Kind::GUE, 300, 1, stream_seed(5, 0, t)};
        MatrixXcd x = sample(spec);
        acc += (x * x).trace().real() / 300.0;
    }
    acc /= trials;
    CHECK(acc >= 0.98);
    CHECK(acc <= 1.02);
}

TEST_CASE("wishart normalization: tr(x) near the ratio") {
    double acc = 0;
    int trials = 20;
    for (int t = 0; t < trials; ++t) {
        EnsembleSpec spec{EnsembleSpec::Kind::Wishart, 250, 1000, stream_seed(6, 0, t)};
        acc += sample(spec).trace().real() / 250.0;
    }
    acc /= trials;
    CHECK(acc >= 3.96);
    CHECK(acc <= 4.04);
}

TEST_CASE("gue spectrum is close to the semicircle in ks distance") {
    SymbolTable symbols;
    NCPolynomial p = parse_polynomial("x", symbols);
    std::map<int, EnsembleSpec> specs{{0, EnsembleSpec{EnsembleSpec::Kind::GUE, 2000, 1, 11}}};
    EmpiricalSpectrum emp = spectrum_of_polynomial(p, specs, 1);
    CHECK(kolmogorov_distance(emp, exact_semicircle_density()) <= 0.03);
}

TEST_CASE("wishart spectrum is close to marchenko-pastur") {
    SymbolTable symbols;
    NCPolynomial p = parse_polynomial("x", symbols);
    std::map<int, EnsembleSpec> specs{
        {0, EnsembleSpec{EnsembleSpec::Kind::Wishart, 1000, 4000, 13}}};
    EmpiricalSpectrum emp = spectrum_of_polynomial(p, specs, 2);
    SpectralMeasure mp(MarchenkoPastur{4.0});
    auto [lo, hi] = mp.support();
    DensityEstimate est;
    est.grid = make_grid(lo, hi, 1e-3);
    est.density.resize(est.grid.size());
    for (std::size_t i = 0; i < est.grid.size(); ++i) est.density[i] = mp.density_at(est.grid[i]);
    CHECK(kolmogorov_distance(emp, est) <= 0.04);
}

TEST_CASE("empirical catalan moments of the gue") {
    std::map<int, EnsembleSpec> specs{{0, EnsembleSpec{EnsembleSpec::Kind::GUE, 1000, 1, 17}}};
    CHECK(std::abs(mixed_moment_estimate(Word{0, 0}, specs, 5) - 1.0) <= 0.03);
    CHECK(std::abs(mixed_moment_estimate(Word{0, 0, 0, 0}, specs, 5) - 2.0) <= 0.06);
    CHECK(std::abs(mixed_moment_estimate(Word(6, 0), specs, 5) - 5.0) <= 0.15);
}

TEST_CASE("mixed moments of independent gue pairs") {
    std::map<int, EnsembleSpec> specs{{0, EnsembleSpec{EnsembleSpec::Kind::GUE, 500, 1, 19}},
                                      {1, EnsembleSpec{EnsembleSpec::Kind::GUE, 500, 1, 23}}};
    // odd word traces vanish in the limit
    CHECK(std::abs(mixed_moment_estimate(Word{0, 1}, specs, 20)) <= 0.05);
    // the pairing count of xxyyxyyx is 2
    CHECK(std::abs(mixed_moment_estimate(Word{0, 0, 1, 1, 0, 1, 1, 0}, specs, 20) - 2.0) <= 0.15);
}

TEST_CASE("freeness statistic shrinks with dimension") {
    std::vector<std::pair<int, int>> groups{{0, 1}, {1, 1}, {0, 1}, {1, 1}};
    std::vector<double> stats;
    for (Eigen::Index n : {100, 200, 400}) {
        std::map<int, EnsembleSpec> specs{
            {0, EnsembleSpec{EnsembleSpec::Kind::GUE, n, 1, 29}},
            {1, EnsembleSpec{EnsembleSpec::Kind::Wishart, n, 4 * n, 31}}};
        stats.push_back(std::abs(freeness_statistic(groups, specs, 10)));
    }
    CHECK(stats.back() <= 0.05);
    CHECK(stats.back() <= stats.front() + 0.01);
}

TEST_CASE("ks distance self-consistency via inverse transform sampling") {
    DensityEstimate est = exact_semicircle_density();
    // build the CDF on the grid and sample from it
    std::vector<double> cdf(est.grid.size(), 0.0);
    for (std::size_t i = 1; i < est.grid.size(); ++i)
        cdf[i] = cdf[i - 1] + 0.5 * (est.density[i] + est.density[i - 1]) *
                                  (est.grid[i] - est.grid[i - 1]);
    for (auto& v : cdf) v /= cdf.back();
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    EmpiricalSpectrum emp;
    emp.n = 200000;
    emp.trials = 1;
    emp.eigenvalues.resize(200000);
    for (auto& t : emp.eigenvalues) {
        double u = u01(rng);
        auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        t = est.grid[static_cast<std::size_t>(it - cdf.begin())];
    }
    std::sort(emp.eigenvalues.begin(), emp.eigenvalues.end());
    CHECK(kolmogorov_distance(emp, est) <= 0.01);
}

TEST_CASE("a shifted spectrum is far in ks distance") {
    SymbolTable symbols;
    NCPolynomial p = parse_polynomial("x + 2", symbols);
    std::map<int, EnsembleSpec> specs{{0, EnsembleSpec{EnsembleSpec::Kind::GUE, 500, 1, 41}}};
    EmpiricalSpectrum emp = spectrum_of_polynomial(p, specs, 2);
    CHECK(kolmogorov_distance(emp, exact_semicircle_density()) >= 0.4);
}

TEST_CASE("empirical cdf and histogram sanity") {
    EmpiricalSpectrum emp;
    emp.eigenvalues = {-1.0, 0.0, 1.0, 2.0};
    emp.n = 4;
    emp.trials = 1;
    CHECK(emp.cdf(-2.0) == 0.0);
    CHECK(emp.cdf(0.5) == doctest::Approx(0.5));
    CHECK(emp.cdf(3.0) == 1.0);
    auto [centers, density] = histogram(emp, 3);
    REQUIRE(centers.size() == 3);
    double mass = 0;
    double width = centers[1] - centers[0];
    for (double d : density) mass += d * width;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("spectrum pooling is reproducible and threaded consistently") {
    SymbolTable symbols;
    NCPolynomial p = parse_polynomial("x^2", symbols);
    std::map<int, EnsembleSpec> specs{{0, EnsembleSpec{EnsembleSpec::Kind::GUE, 100, 1, 43}}};
    EmpiricalSpectrum a = spectrum_of_polynomial(p, specs, 4, 1);
    EmpiricalSpectrum b = spectrum_of_polynomial(p, specs, 4, 4);
    REQUIRE(a.eigenvalues.size() == b.eigenvalues.size());
    for (std::size_t i = 0; i < a.eigenvalues.size(); ++i)
        CHECK(a.eigenvalues[i] == b.eigenvalues[i]);
    for (double t : a.eigenvalues) CHECK(t >= -1e-12);
}
