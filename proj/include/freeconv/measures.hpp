#pragma once

#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "freeconv/ncpoly.hpp"

namespace freeconv {

/// A fixed-point iteration ran out of its iteration budget.
struct NonConvergence : std::runtime_error {
    NonConvergence(const std::string& msg, double residual_)
        : std::runtime_error(msg), residual(residual_) {}
    double residual;
};

struct Semicircle {
    double mean = 0.0;
    double variance = 1.0;
};

/// Parameterized by ratio lambda with free cumulants kappa_n = lambda * scale^n.
struct MarchenkoPastur {
    double ratio = 1.0;
    double scale = 1.0;
};

struct Atomic {
    std::vector<std::pair<double, double>> atoms;  // (location, weight)
};

struct SampledDensity {
    std::vector<double> grid;    // strictly ascending
    std::vector<double> values;  // nonnegative, trapezoid mass ~ 1
};

/// Compactly supported probability measure on the real line.
class SpectralMeasure {
public:
    using Variant = std::variant<Semicircle, MarchenkoPastur, Atomic, SampledDensity>;

    SpectralMeasure(Semicircle s);
    SpectralMeasure(MarchenkoPastur mp);
    SpectralMeasure(Atomic a);
    SpectralMeasure(SampledDensity s);

    const Variant& form() const { return form_; }

    double moment(int k) const;

    /// G(z) = integral of 1/(z-t) dmu(t); requires Im z > 0, maps to C^-.
    Complex cauchy(Complex z) const;

    /// [lo, hi] containing the support (including atoms).
    std::pair<double, double> support() const;

    /// Point masses of the measure (empty for purely continuous ones).
    std::vector<std::pair<double, double>> atoms() const;

    /// Density of the absolutely continuous part; zero off support.
    double density_at(double t) const;
    bool has_continuous_part() const;

    std::string to_json() const;
    static SpectralMeasure from_json(const std::string& text);

private:
    void validate() const;
    Variant form_;
};

struct DensityEstimate {
    std::vector<double> grid;
    std::vector<double> density;  // >= 0 pointwise
    double epsilon = 0.0;

    double trapezoid_mass() const;
    /// integral of t^k against the density
    double moment(int k) const;
    std::string to_csv() const;  // columns t,density
};

/// density(t) = max(0, -Im G(t + i*eps) / pi). With richardson, evaluates
/// at eps and eps/2 and extrapolates linearly in eps before clamping.
DensityEstimate stieltjes_invert(const std::function<Complex(Complex)>& G,
                                 const std::vector<double>& grid, double eps,
                                 bool richardson = false);

std::vector<double> make_grid(double lo, double hi, double step);

}  // namespace freeconv
