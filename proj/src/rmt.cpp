#include "freeconv/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "freeconv/parallel.hpp"

namespace freeconv {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

MatrixXcd complex_gaussian(Eigen::Index rows, Eigen::Index cols, double entry_stddev,
                           std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, entry_stddev / std::sqrt(2.0));
    MatrixXcd a(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = Complex{gauss(rng), gauss(rng)};
    return a;
}

std::vector<double> hermitian_eigenvalues(const MatrixXcd& x) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(x, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return std::vector<double>(ev.data(), ev.data() + ev.size());
}

std::map<int, MatrixXcd> sample_all(const std::map<int, EnsembleSpec>& specs, int trial) {
    std::map<int, MatrixXcd> out;
    for (const auto& [var, spec] : specs) {
        EnsembleSpec per_trial = spec;
        per_trial.seed = stream_seed(spec.seed, var, trial);
        out[var] = sample(per_trial);
    }
    return out;
}

Eigen::Index common_size(const std::map<int, EnsembleSpec>& specs) {
    Eigen::Index n = specs.begin()->second.n;
    for (const auto& [var, spec] : specs)
        if (spec.n != n) throw std::invalid_argument("ensemble sizes must match");
    return n;
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t run_seed, int variable, int trial) {
    return splitmix64(run_seed ^ splitmix64(static_cast<std::uint64_t>(variable) << 32 |
                                            static_cast<std::uint64_t>(trial)));
}

MatrixXcd sample(const EnsembleSpec& spec) {
    if (spec.n < 1) throw std::invalid_argument("ensemble size must be >= 1");
    if (spec.kind == EnsembleSpec::Kind::GUE) {
        // Off-diagonal complex Gaussian with variance 1/2 per component,
        // real Gaussian diagonal of variance 1, all scaled by 1/sqrt(N).
        std::mt19937_64 rng(spec.seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        MatrixXcd x(spec.n, spec.n);
        double scale = 1.0 / std::sqrt(static_cast<double>(spec.n));
        for (Eigen::Index i = 0; i < spec.n; ++i) {
            x(i, i) = gauss(rng) * scale;
            for (Eigen::Index j = i + 1; j < spec.n; ++j) {
                Complex e{gauss(rng) / std::sqrt(2.0), gauss(rng) / std::sqrt(2.0)};
                x(i, j) = e * scale;
                x(j, i) = std::conj(e) * scale;
            }
        }
        return x;
    }
    if (spec.m < 1) throw std::invalid_argument("Wishart needs m >= 1");
    double stddev = 1.0 / std::sqrt(static_cast<double>(spec.n));
    MatrixXcd a = complex_gaussian(spec.n, spec.m, stddev, spec.seed);
    return a * a.adjoint();
}

EmpiricalSpectrum spectrum_of_polynomial(const NCPolynomial& p,
                                         const std::map<int, EnsembleSpec>& specs, int trials,
                                         int threads) {
    if (!p.is_selfadjoint())
        throw std::invalid_argument("spectrum_of_polynomial: polynomial not selfadjoint");
    Eigen::Index n = common_size(specs);
    std::vector<std::vector<double>> per_trial(static_cast<std::size_t>(trials));
    parallel_for(
        static_cast<std::size_t>(trials),
        [&](std::size_t t) {
            auto matrices = sample_all(specs, static_cast<int>(t));
            MatrixXcd pm = p.evaluate(matrices, n);
            pm = (pm + pm.adjoint()) / 2.0;  // exact hermitization before solving
            per_trial[t] = hermitian_eigenvalues(pm);
        },
        threads);
    EmpiricalSpectrum out;
    out.n = n;
    out.trials = trials;
    for (const auto& ev : per_trial)
        out.eigenvalues.insert(out.eigenvalues.end(), ev.begin(), ev.end());
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
    return out;
}

double EmpiricalSpectrum::cdf(double t) const {
    auto it = std::upper_bound(eigenvalues.begin(), eigenvalues.end(), t);
    return static_cast<double>(it - eigenvalues.begin()) /
           static_cast<double>(eigenvalues.size());
}

double mixed_moment_estimate(const Word& word, const std::map<int, EnsembleSpec>& specs,
                             int trials, int threads) {
    Eigen::Index n = common_size(specs);
    std::vector<double> per_trial(static_cast<std::size_t>(trials));
    parallel_for(
        static_cast<std::size_t>(trials),
        [&](std::size_t t) {
            auto matrices = sample_all(specs, static_cast<int>(t));
            MatrixXcd prod = MatrixXcd::Identity(n, n);
            for (int var : word) prod = prod * matrices.at(var);
            per_trial[t] = prod.trace().real() / static_cast<double>(n);
        },
        threads);
    double sum = 0;
    for (double v : per_trial) sum += v;  // fixed order for determinism
    return sum / trials;
}

double freeness_statistic(const std::vector<std::pair<int, int>>& groups,
                          const std::map<int, EnsembleSpec>& specs, int trials, int threads) {
    Eigen::Index n = common_size(specs);
    // Marginal centering constants tr(X_v^k) from the same run.
    std::map<std::pair<int, int>, double> marginal;
    for (auto [var, power] : groups) marginal[{var, power}] = 0.0;
    std::vector<std::map<int, MatrixXcd>> samples(static_cast<std::size_t>(trials));
    parallel_for(
        static_cast<std::size_t>(trials),
        [&](std::size_t t) { samples[t] = sample_all(specs, static_cast<int>(t)); }, threads);
    for (const auto& s : samples)
        for (auto& [key, acc] : marginal) {
            MatrixXcd powm = MatrixXcd::Identity(n, n);
            for (int k = 0; k < key.second; ++k) powm = powm * s.at(key.first);
            acc += powm.trace().real() / static_cast<double>(n);
        }
    for (auto& [key, acc] : marginal) acc /= trials;

    std::vector<double> per_trial(static_cast<std::size_t>(trials));
    parallel_for(
        static_cast<std::size_t>(trials),
        [&](std::size_t t) {
            MatrixXcd prod = MatrixXcd::Identity(n, n);
            for (auto [var, power] : groups) {
                MatrixXcd powm = MatrixXcd::Identity(n, n);
                for (int k = 0; k < power; ++k) powm = powm * samples[t].at(var);
                prod = prod * (powm - marginal[{var, power}] * MatrixXcd::Identity(n, n));
            }
            per_trial[t] = prod.trace().real() / static_cast<double>(n);
        },
        threads);
    double sum = 0;
    for (double v : per_trial) sum += v;
    return sum / trials;
}

Complex resolvent_trace_estimate(const NCPolynomial& p, const std::map<int, EnsembleSpec>& specs,
                                 Complex z, int trials, int threads) {
    if (z.imag() <= 0) throw std::invalid_argument("resolvent trace: Im z must be positive");
    Eigen::Index n = common_size(specs);
    std::vector<Complex> per_trial(static_cast<std::size_t>(trials));
    parallel_for(
        static_cast<std::size_t>(trials),
        [&](std::size_t t) {
            auto matrices = sample_all(specs, static_cast<int>(t));
            MatrixXcd pm = p.evaluate(matrices, n);
            pm = (pm + pm.adjoint()) / 2.0;
            MatrixXcd res = (z * MatrixXcd::Identity(n, n) - pm).partialPivLu().inverse();
            per_trial[t] = res.trace() / static_cast<double>(n);
        },
        threads);
    Complex sum{0.0};
    for (Complex v : per_trial) sum += v;
    return sum / static_cast<double>(trials);
}

double kolmogorov_distance(const EmpiricalSpectrum& emp, const DensityEstimate& rho) {
    if (emp.eigenvalues.empty()) throw std::invalid_argument("kolmogorov_distance: empty spectrum");
    double mass = rho.trapezoid_mass();
    if (std::abs(mass - 1.0) > 0.02)
        throw std::invalid_argument("kolmogorov_distance: density mass off by more than 2%");
    // CDF of rho by cumulative trapezoid, renormalized.
    std::vector<double> cdf(rho.grid.size(), 0.0);
    for (std::size_t i = 1; i < rho.grid.size(); ++i)
        cdf[i] = cdf[i - 1] + 0.5 * (rho.density[i] + rho.density[i - 1]) *
                                  (rho.grid[i] - rho.grid[i - 1]);
    for (auto& v : cdf) v /= mass;

    auto rho_cdf = [&](double t) {
        if (t <= rho.grid.front()) return 0.0;
        if (t >= rho.grid.back()) return 1.0;
        auto it = std::upper_bound(rho.grid.begin(), rho.grid.end(), t);
        std::size_t i = static_cast<std::size_t>(it - rho.grid.begin());
        double u = (t - rho.grid[i - 1]) / (rho.grid[i] - rho.grid[i - 1]);
        return (1 - u) * cdf[i - 1] + u * cdf[i];
    };

    double worst = 0.0;
    std::size_t total = emp.eigenvalues.size();
    for (std::size_t i = 0; i < total; ++i) {
        double f = rho_cdf(emp.eigenvalues[i]);
        double lo = static_cast<double>(i) / total;
        double hi = static_cast<double>(i + 1) / total;
        worst = std::max({worst, std::abs(f - lo), std::abs(f - hi)});
    }
    return worst;
}

std::pair<std::vector<double>, std::vector<double>> histogram(const EmpiricalSpectrum& emp,
                                                              int bins) {
    if (emp.eigenvalues.empty() || bins < 1)
        throw std::invalid_argument("histogram: empty spectrum or no bins");
    double lo = emp.eigenvalues.front(), hi = emp.eigenvalues.back();
    if (hi <= lo) hi = lo + 1.0;
    double width = (hi - lo) / bins;
    std::vector<double> centers(static_cast<std::size_t>(bins));
    std::vector<double> values(static_cast<std::size_t>(bins), 0.0);
    for (int b = 0; b < bins; ++b) centers[static_cast<std::size_t>(b)] = lo + (b + 0.5) * width;
    for (double ev : emp.eigenvalues) {
        int b = std::min(bins - 1, static_cast<int>((ev - lo) / width));
        values[static_cast<std::size_t>(b)] += 1.0;
    }
    double norm = width * static_cast<double>(emp.eigenvalues.size());
    for (auto& v : values) v /= norm;
    return {centers, values};
}

}  // namespace freeconv
