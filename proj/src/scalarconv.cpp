#include "freeconv/scalarconv.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "freeconv/nccomb.hpp"

namespace freeconv {

PowerSeries::PowerSeries(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.assign(1, Complex{0.0});
}

Complex PowerSeries::operator[](int k) const {
    if (k < 0 || k > order()) return Complex{0.0};
    return coeffs_[static_cast<std::size_t>(k)];
}

PowerSeries PowerSeries::truncated(int order) const {
    std::vector<Complex> c(static_cast<std::size_t>(order) + 1, Complex{0.0});
    for (int k = 0; k <= order && k <= this->order(); ++k)
        c[static_cast<std::size_t>(k)] = coeffs_[static_cast<std::size_t>(k)];
    return PowerSeries(std::move(c));
}

PowerSeries PowerSeries::operator+(const PowerSeries& rhs) const {
    int n = std::min(order(), rhs.order());
    std::vector<Complex> c(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) c[static_cast<std::size_t>(k)] = (*this)[k] + rhs[k];
    return PowerSeries(std::move(c));
}

PowerSeries PowerSeries::operator-(const PowerSeries& rhs) const {
    int n = std::min(order(), rhs.order());
    std::vector<Complex> c(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) c[static_cast<std::size_t>(k)] = (*this)[k] - rhs[k];
    return PowerSeries(std::move(c));
}

PowerSeries PowerSeries::operator*(const PowerSeries& rhs) const {
    int n = std::min(order(), rhs.order());
    std::vector<Complex> c(static_cast<std::size_t>(n) + 1, Complex{0.0});
    for (int a = 0; a <= n; ++a)
        for (int b = 0; a + b <= n; ++b) c[static_cast<std::size_t>(a + b)] += (*this)[a] * rhs[b];
    return PowerSeries(std::move(c));
}

PowerSeries PowerSeries::compose(const PowerSeries& inner) const {
    if (std::abs(inner[0]) != 0.0)
        throw std::invalid_argument("compose: inner series must have zero constant term");
    int n = inner.order();
    PowerSeries result = PowerSeries(std::vector<Complex>(static_cast<std::size_t>(n) + 1));
    PowerSeries power = PowerSeries(std::vector<Complex>{Complex{1.0}}).truncated(n);
    for (int k = 0; k <= order() && k <= n; ++k) {
        result = result + power * PowerSeries(std::vector<Complex>{(*this)[k]}).truncated(n);
        power = power * inner;
    }
    return result;
}

PowerSeries PowerSeries::reciprocal(int order) const {
    if (std::abs((*this)[0]) == 0.0)
        throw std::invalid_argument("reciprocal: constant term is zero");
    std::vector<Complex> inv(static_cast<std::size_t>(order) + 1, Complex{0.0});
    inv[0] = 1.0 / (*this)[0];
    for (int k = 1; k <= order; ++k) {
        Complex acc{0.0};
        for (int j = 1; j <= k; ++j) acc += (*this)[j] * inv[static_cast<std::size_t>(k - j)];
        inv[static_cast<std::size_t>(k)] = -acc / (*this)[0];
    }
    return PowerSeries(std::move(inv));
}

PowerSeries PowerSeries::shifted_up() const {
    std::vector<Complex> c(coeffs_.size(), Complex{0.0});
    for (std::size_t k = 1; k < c.size(); ++k) c[k] = coeffs_[k - 1];
    return PowerSeries(std::move(c));
}

PowerSeries moment_series_from_cumulant_series(const PowerSeries& C) {
    if (std::abs(C[0] - Complex{1.0}) > 1e-12)
        throw std::invalid_argument("cumulant series must have constant term 1");
    int n = C.order();
    std::vector<Complex> m(static_cast<std::size_t>(n) + 1, Complex{0.0});
    m[0] = Complex{1.0};
    // Coefficient of z^k in C[zM(z)] only involves m_0..m_{k-1}, so the
    // relation solves forward.
    for (int k = 1; k <= n; ++k) {
        PowerSeries M = PowerSeries(m).truncated(k - 1);
        PowerSeries zM = M.truncated(k).shifted_up();
        m[static_cast<std::size_t>(k)] = C.truncated(k).compose(zM)[k];
    }
    return PowerSeries(std::move(m));
}

PowerSeries r_transform(const SpectralMeasure& mu, int order) {
    if (order > 14) throw std::invalid_argument("r_transform: order must be <= 14");
    MomentSequence m(static_cast<std::size_t>(order) + 1);
    for (int k = 1; k <= order + 1; ++k)
        m[static_cast<std::size_t>(k - 1)] = Complex{mu.moment(k)};
    CumulantSequence kappa = moments_to_free_cumulants(m);
    return PowerSeries(std::vector<Complex>(kappa.begin(), kappa.end()));
}

Complex subordination_omega(const SpectralMeasure& mu_x, const SpectralMeasure& mu_y, Complex z,
                            const SubordinationOptions& opts) {
    if (z.imag() <= 0) throw std::invalid_argument("subordination_omega: Im z must be positive");
    auto F = [](const SpectralMeasure& mu, Complex w) { return 1.0 / mu.cauchy(w); };
    auto f = [&](Complex w) {
        Complex hx = F(mu_x, w) - w;
        return F(mu_y, hx + z) - hx;
    };
    double tol = z.imag() < 1e-4 ? opts.tol_near_axis : opts.tol;
    Complex w = z;
    double prev_res = std::numeric_limits<double>::infinity();
    bool damped = false;
    for (long it = 0; it < opts.max_iterations; ++it) {
        Complex fw = f(w);
        double res = std::abs(fw - w);
        if (res <= tol) {
            if (fw.imag() <= 0)
                throw NonConvergence("subordination iterate left the upper half-plane", res);
            return fw;
        }
        // Averaged update when the residual stalls or oscillates;
        // robustness near the real axis where contraction degrades.
        if (res > prev_res) damped = true;
        w = damped ? (fw + w) / 2.0 : fw;
        prev_res = res;
        if (w.imag() <= 0)
            throw NonConvergence("subordination iterate left the upper half-plane", res);
    }
    throw NonConvergence("subordination fixed point did not converge", prev_res);
}

DensityEstimate free_add_convolve(const SpectralMeasure& mu_x, const SpectralMeasure& mu_y,
                                  const std::vector<double>& grid, double eps,
                                  const SubordinationOptions& opts) {
    auto G = [&](Complex z) { return mu_x.cauchy(subordination_omega(mu_x, mu_y, z, opts)); };
    return stieltjes_invert(G, grid, eps);
}

}  // namespace freeconv
