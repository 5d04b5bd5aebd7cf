#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "freeconv/linearize.hpp"
#include "freeconv/measures.hpp"
#include "freeconv/ncpoly.hpp"
#include "freeconv/scalarconv.hpp"

namespace freeconv {

/// Smallest eigenvalue of (b - b*)/(2i); positive iff b is in H+(M_N).
double half_plane_margin(const MatrixXcd& b);
bool in_upper_half_plane(const MatrixXcd& b, double margin = 0.0);

/// x_hat = c (x) 1 + a (x) x with c, a selfadjoint and x distributed by mu.
struct OVSummand {
    MatrixXcd c;
    MatrixXcd a;
    SpectralMeasure mu;

    bool is_trivial() const;  // c = 0, a = 0 or mu = delta_0: G(b) = b^{-1}
};

struct OVQuadratureOptions {
    double tol = 1e-10;  // entrywise
    int max_nodes = 4096;
};

/// G(b) = integral of (b - c - a t)^{-1} dmu(t) over H+(M_N), adaptive
/// Gauss-Legendre on the continuous part plus exact atom terms.
MatrixXcd ov_cauchy(const OVSummand& s, const MatrixXcd& b,
                    const OVQuadratureOptions& quad = {});

struct BmsOptions {
    double tol = 1e-12;
    double tol_near_axis = 1e-9;  // when the half-plane margin of b < 1e-4
    long max_iterations = 100000;
    OVQuadratureOptions quad;
};

/// Anything with a computable matrix-valued Cauchy transform; sums of
/// free summands get theirs through the subordination fixed point,
/// which is how three and more variables fold pairwise.
class OVElement {
public:
    virtual ~OVElement() = default;
    virtual MatrixXcd cauchy(const MatrixXcd& b) const = 0;
};

class OVLeaf final : public OVElement {
public:
    OVLeaf(OVSummand s, OVQuadratureOptions quad) : summand_(std::move(s)), quad_(quad) {}
    MatrixXcd cauchy(const MatrixXcd& b) const override;
    const OVSummand& summand() const { return summand_; }

private:
    OVSummand summand_;
    OVQuadratureOptions quad_;
};

class OVSum final : public OVElement {
public:
    OVSum(std::shared_ptr<const OVElement> x, std::shared_ptr<const OVElement> y, BmsOptions opts)
        : x_(std::move(x)), y_(std::move(y)), opts_(opts) {}

    MatrixXcd cauchy(const MatrixXcd& b) const override;  // G_x(omega(b))
    MatrixXcd omega(const MatrixXcd& b) const;

    /// Sequential-mode warm start: reuse the previous grid point's omega
    /// as the iteration seed. Changes iteration counts, not results.
    void enable_warm_start(bool on) const { warm_start_ = on; }

private:
    std::shared_ptr<const OVElement> x_, y_;
    BmsOptions opts_;
    mutable bool warm_start_ = false;
    mutable std::optional<MatrixXcd> last_omega_;
};

/// Fixed point of f_b(w) = h_y(h_x(w) + b) + b with h(w) = G(w)^{-1} - w,
/// iterated from w_0 = b (or `start`); every iterate stays in H+.
MatrixXcd bms_fixed_point(const OVElement& x, const OVElement& y, const MatrixXcd& b,
                          const BmsOptions& opts = {},
                          const std::optional<MatrixXcd>& start = std::nullopt);

inline MatrixXcd bms_fixed_point(const OVSummand& x, const OVSummand& y, const MatrixXcd& b,
                                 const BmsOptions& opts = {}) {
    return bms_fixed_point(OVLeaf(x, opts.quad), OVLeaf(y, opts.quad), b, opts);
}

struct PipelineOptions {
    double eps = 1e-3;
    double tol = 1e-12;
    long max_iterations = 100000;
    bool warm_start = false;  // sequential only
    bool skip_bad = false;    // emit NaN-free zero at non-converged points
    int threads = 0;          // 0: FREECONV_THREADS or hardware default
};

/// Builds the operator-valued model of p: linearization coefficients
/// split into one summand per variable, b0 attached to the first.
struct PolynomialModel {
    Linearization lin;
    std::vector<OVSummand> summands;         // one per variable, order of var id
    std::shared_ptr<const OVElement> root;   // left fold of the summands
};
PolynomialModel build_model(const NCPolynomial& p,
                            const std::map<int, SpectralMeasure>& laws,
                            const BmsOptions& opts = {});

/// G_p(z) for Im z > 0: the (1,1) entry of G_{phat} at
/// diag(z, i eps, ..., i eps).
Complex pipeline_cauchy(const PolynomialModel& model, Complex z, double eps);

/// Full pipeline: linearize, subordinate at every grid point, invert.
DensityEstimate polynomial_density(const NCPolynomial& p,
                                   const std::map<int, SpectralMeasure>& laws,
                                   const std::vector<double>& grid,
                                   const PipelineOptions& opts = {});

/// Richardson extrapolation (linear in eps) over a decreasing schedule.
DensityEstimate epsilon_extrapolate(const NCPolynomial& p,
                                    const std::map<int, SpectralMeasure>& laws,
                                    const std::vector<double>& grid,
                                    const std::vector<double>& eps_schedule,
                                    const PipelineOptions& opts = {});

}  // namespace freeconv
