#pragma once

#include <vector>

#include "freeconv/measures.hpp"

namespace freeconv {

/// Truncated formal power series c_0 + c_1 z + ... + c_n z^n.
class PowerSeries {
public:
    PowerSeries() : coeffs_(1, Complex{0.0}) {}
    explicit PowerSeries(std::vector<Complex> coeffs);

    int order() const { return static_cast<int>(coeffs_.size()) - 1; }
    Complex operator[](int k) const;
    const std::vector<Complex>& coefficients() const { return coeffs_; }

    PowerSeries truncated(int order) const;
    PowerSeries operator+(const PowerSeries& rhs) const;
    PowerSeries operator-(const PowerSeries& rhs) const;
    PowerSeries operator*(const PowerSeries& rhs) const;  // truncates at min order

    /// Substitutes rhs (which must have zero constant term) into this.
    PowerSeries compose(const PowerSeries& inner) const;

    /// Multiplicative inverse; requires nonzero constant term.
    PowerSeries reciprocal(int order) const;

    /// Multiply by z (shift coefficients up), same order.
    PowerSeries shifted_up() const;

private:
    std::vector<Complex> coeffs_;
};

/// Unique M with m_0 = 1 solving M(z) = C[z M(z)] order by order;
/// requires C(0) = 1.
PowerSeries moment_series_from_cumulant_series(const PowerSeries& C);

/// R(z) = sum kappa_n z^{n-1}; coefficient k holds kappa_{k+1}.
PowerSeries r_transform(const SpectralMeasure& mu, int order);

struct SubordinationOptions {
    double tol = 1e-12;
    double tol_near_axis = 1e-9;  // used when Im z < 1e-4
    long max_iterations = 100000;
};

/// Unique fixed point in C^+ of f_z(w) = F_y(F_x(w) - w + z) - (F_x(w) - w)
/// with F = 1/G; plain iteration from w_0 = z with averaging fallback.
Complex subordination_omega(const SpectralMeasure& mu_x, const SpectralMeasure& mu_y, Complex z,
                            const SubordinationOptions& opts = {});

/// Density of mu_x (+) mu_y via G_{x+y}(z) = G_x(omega(z)).
DensityEstimate free_add_convolve(const SpectralMeasure& mu_x, const SpectralMeasure& mu_y,
                                  const std::vector<double>& grid, double eps,
                                  const SubordinationOptions& opts = {});

}  // namespace freeconv
