#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "freeconv/measures.hpp"
#include "freeconv/ncpoly.hpp"

namespace freeconv {

struct EnsembleSpec {
    enum class Kind { GUE, Wishart };
    Kind kind = Kind::GUE;
    Eigen::Index n = 1;
    Eigen::Index m = 1;  // Wishart only: X = A A* with A of shape n x m
    std::uint64_t seed = 0;
};

struct EmpiricalSpectrum {
    std::vector<double> eigenvalues;  // ascending, pooled over trials
    Eigen::Index n = 0;
    int trials = 0;

    /// Empirical CDF at t.
    double cdf(double t) const;
};

/// GUE: hermitized complex Gaussian scaled by 1/sqrt(N), entry variance 1.
/// Wishart: A A* with i.i.d. complex Gaussian entries of variance 1/N,
/// so tr(X) -> m/n. Deterministic under seed.
MatrixXcd sample(const EnsembleSpec& spec);

/// Stream seed for (variable, trial); keeps trials independent and
/// reproducible under a fixed run seed.
std::uint64_t stream_seed(std::uint64_t run_seed, int variable, int trial);

/// Pooled eigenvalues of p evaluated on fresh samples per trial.
EmpiricalSpectrum spectrum_of_polynomial(const NCPolynomial& p,
                                         const std::map<int, EnsembleSpec>& specs, int trials,
                                         int threads = 0);

/// Average over trials of tr(word evaluated on samples).
double mixed_moment_estimate(const Word& word, const std::map<int, EnsembleSpec>& specs,
                             int trials, int threads = 0);

/// Monte Carlo value of the alternating centered product trace; the
/// centering constants come from the same run's marginal estimates.
double freeness_statistic(const std::vector<std::pair<int, int>>& groups,
                          const std::map<int, EnsembleSpec>& specs, int trials, int threads = 0);

/// E[tr((z - p(X))^{-1})] over trials; oracle for the pipeline's G_p.
Complex resolvent_trace_estimate(const NCPolynomial& p,
                                 const std::map<int, EnsembleSpec>& specs, Complex z, int trials,
                                 int threads = 0);

/// sup_t |empirical CDF - CDF of rho|, rho renormalized to mass 1.
double kolmogorov_distance(const EmpiricalSpectrum& emp, const DensityEstimate& rho);

/// Histogram of the spectrum: returns (bin centers, density values).
std::pair<std::vector<double>, std::vector<double>> histogram(const EmpiricalSpectrum& emp,
                                                              int bins);

}  // namespace freeconv
