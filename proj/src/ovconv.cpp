#include "freeconv/ovconv.hpp"

#include <cmath>
#include <numbers>

#include "freeconv/parallel.hpp"

namespace freeconv {

namespace {

constexpr double kPi = std::numbers::pi;

// 20-node Gauss-Legendre rule on [-1, 1].
struct GaussLegendre20 {
    static constexpr int n = 10;  // symmetric half
    static constexpr double x[n] = {
        0.0765265211334973, 0.2277858511416451, 0.3737060887154195, 0.5108670019508271,
        0.6360536807265150, 0.7463319064601508, 0.8391169718222188, 0.9122344282513259,
        0.9639719272779138, 0.9931285991850949};
    static constexpr double w[n] = {
        0.1527533871307258, 0.1491729864726037, 0.1420961093183820, 0.1316886384491766,
        0.1181945319615184, 0.1019301198172404, 0.0832767415767048, 0.0626720483341091,
        0.0406014298003869, 0.0176140071391521};
};

MatrixXcd resolvent(const OVSummand& s, const MatrixXcd& b, double t) {
    MatrixXcd m = b - s.c - t * s.a;
    return m.partialPivLu().inverse();
}

// GL20 applied to rho(t) * (b - c - a t)^{-1} on [lo, hi].
MatrixXcd gl_segment(const OVSummand& s, const MatrixXcd& b, double lo, double hi) {
    MatrixXcd acc = MatrixXcd::Zero(b.rows(), b.cols());
    double mid = (lo + hi) / 2, half = (hi - lo) / 2;
    for (int i = 0; i < GaussLegendre20::n; ++i) {
        for (double sign : {-1.0, 1.0}) {
            double t = mid + sign * half * GaussLegendre20::x[i];
            double rho = s.mu.density_at(t);
            if (rho != 0.0) acc += (GaussLegendre20::w[i] * rho) * resolvent(s, b, t);
        }
    }
    return acc * half;
}

struct QuadState {
    int nodes = 0;
};

MatrixXcd adaptive(const OVSummand& s, const MatrixXcd& b, double lo, double hi,
                   const MatrixXcd& whole, const OVQuadratureOptions& opts, QuadState& state) {
    double mid = (lo + hi) / 2;
    MatrixXcd left = gl_segment(s, b, lo, mid);
    MatrixXcd right = gl_segment(s, b, mid, hi);
    state.nodes += 40;
    if ((left + right - whole).cwiseAbs().maxCoeff() < opts.tol || state.nodes >= opts.max_nodes)
        return left + right;
    return adaptive(s, b, lo, mid, left, opts, state) +
           adaptive(s, b, mid, hi, right, opts, state);
}

}  // namespace

double half_plane_margin(const MatrixXcd& b) {
    MatrixXcd im = (b - b.adjoint()) / Complex{0.0, 2.0};
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(im, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool in_upper_half_plane(const MatrixXcd& b, double margin) {
    return half_plane_margin(b) > margin;
}

bool OVSummand::is_trivial() const {
    if (!c.isZero(0.0)) return false;
    if (a.isZero(0.0)) return true;
    auto at = mu.atoms();
    return !mu.has_continuous_part() && at.size() == 1 && at[0].first == 0.0;
}

MatrixXcd ov_cauchy(const OVSummand& s, const MatrixXcd& b, const OVQuadratureOptions& quad) {
    if (!in_upper_half_plane(b))
        throw std::invalid_argument("ov_cauchy: b is not in the matrix upper half-plane");
    if (s.a.isZero(0.0)) return (b - s.c).partialPivLu().inverse();

    MatrixXcd g = MatrixXcd::Zero(b.rows(), b.cols());
    for (auto [t, w] : s.mu.atoms()) g += w * resolvent(s, b, t);
    if (s.mu.has_continuous_part()) {
        auto [lo, hi] = s.mu.support();
        QuadState state;
        MatrixXcd whole = gl_segment(s, b, lo, hi);
        state.nodes = 20;
        g += adaptive(s, b, lo, hi, whole, quad, state);
    }
    return g;
}

MatrixXcd OVLeaf::cauchy(const MatrixXcd& b) const { return ov_cauchy(summand_, b, quad_); }

MatrixXcd bms_fixed_point(const OVElement& x, const OVElement& y, const MatrixXcd& b,
                          const BmsOptions& opts, const std::optional<MatrixXcd>& start) {
    double margin = half_plane_margin(b);
    if (margin <= 0)
        throw std::invalid_argument("bms_fixed_point: b is not strictly in H+");
    double tol = margin < 1e-4 ? opts.tol_near_axis : opts.tol;

    auto h = [](const OVElement& e, const MatrixXcd& w) -> MatrixXcd {
        return e.cauchy(w).partialPivLu().inverse() - w;
    };
    MatrixXcd w = start.value_or(b);
    if (!in_upper_half_plane(w)) w = b;
    double prev_res = std::numeric_limits<double>::infinity();
    bool damped = false;
    for (long it = 0; it < opts.max_iterations; ++it) {
        MatrixXcd fw = h(y, h(x, w) + b) + b;
        double res = (fw - w).norm();
        if (res <= tol) {
            if (!in_upper_half_plane(fw))
                throw NonConvergence("bms iterate left H+ at iteration " + std::to_string(it),
                                     res);
            return fw;
        }
        if (res > prev_res) damped = true;
        w = damped ? ((fw + w) / 2.0).eval() : fw;
        prev_res = res;
        if (!in_upper_half_plane(w))
            throw NonConvergence("bms iterate left H+ at iteration " + std::to_string(it), res);
    }
    throw NonConvergence("bms fixed point did not converge", prev_res);
}

MatrixXcd OVSum::omega(const MatrixXcd& b) const {
    std::optional<MatrixXcd> start;
    if (warm_start_ && last_omega_ && last_omega_->rows() == b.rows()) start = last_omega_;
    MatrixXcd w = bms_fixed_point(*x_, *y_, b, opts_, start);
    if (warm_start_) last_omega_ = w;
    return w;
}

MatrixXcd OVSum::cauchy(const MatrixXcd& b) const {
    const auto* xleaf = dynamic_cast<const OVLeaf*>(x_.get());
    const auto* yleaf = dynamic_cast<const OVLeaf*>(y_.get());
    if (yleaf && yleaf->summand().is_trivial()) return x_->cauchy(b);
    if (xleaf && xleaf->summand().is_trivial()) return y_->cauchy(b);
    return x_->cauchy(omega(b));
}

PolynomialModel build_model(const NCPolynomial& p, const std::map<int, SpectralMeasure>& laws,
                            const BmsOptions& opts) {
    if (!p.is_selfadjoint())
        throw std::invalid_argument("polynomial_density: polynomial not selfadjoint");
    if (p.variables().empty())
        throw std::invalid_argument("polynomial_density: need at least one variable");

    PolynomialModel model;
    model.lin = linearize(p);
    PencilCoefficients coeffs = decompose(model.lin);
    Eigen::Index nsz = model.lin.size;

    bool first = true;
    for (const auto& [var, a] : coeffs.a) {
        auto it = laws.find(var);
        if (it == laws.end())
            throw std::invalid_argument("polynomial_density: no law for a variable of p");
        // Constants live in M_N(C); attaching all of b0 to the first
        // summand leaves freeness over M_N(C) intact.
        MatrixXcd c = first ? coeffs.b0 : MatrixXcd::Zero(nsz, nsz).eval();
        first = false;
        model.summands.push_back(OVSummand{c, a, it->second});
    }

    std::shared_ptr<const OVElement> root =
        std::make_shared<OVLeaf>(model.summands[0], opts.quad);
    for (std::size_t i = 1; i < model.summands.size(); ++i)
        root = std::make_shared<OVSum>(
            root, std::make_shared<OVLeaf>(model.summands[i], opts.quad), opts);
    model.root = std::move(root);
    return model;
}

Complex pipeline_cauchy(const PolynomialModel& model, Complex z, double eps) {
    Eigen::Index nsz = model.lin.size;
    MatrixXcd b = Complex{0.0, eps} * MatrixXcd::Identity(nsz, nsz);
    b(0, 0) = z;
    return model.root->cauchy(b)(0, 0);
}

DensityEstimate polynomial_density(const NCPolynomial& p,
                                   const std::map<int, SpectralMeasure>& laws,
                                   const std::vector<double>& grid,
                                   const PipelineOptions& opts) {
    BmsOptions bms;
    bms.tol = opts.tol;
    bms.max_iterations = opts.max_iterations;
    PolynomialModel model = build_model(p, laws, bms);

    DensityEstimate out;
    out.grid = grid;
    out.epsilon = opts.eps;
    out.density.assign(grid.size(), 0.0);
    std::vector<std::string> failures(grid.size());

    auto eval_point = [&](std::size_t i) {
        try {
            // z itself sits at t + i*eps, a strictly interior point.
            Complex g = pipeline_cauchy(model, Complex{grid[i], opts.eps}, opts.eps);
            out.density[i] = std::max(0.0, -g.imag() / kPi);
        } catch (const NonConvergence& e) {
            if (!opts.skip_bad)
                failures[i] = std::string(e.what()) + " at grid point t=" +
                              std::to_string(grid[i]);
        }
    };

    if (opts.warm_start) {
        if (auto* sum = dynamic_cast<const OVSum*>(model.root.get()))
            sum->enable_warm_start(true);
        for (std::size_t i = 0; i < grid.size(); ++i) eval_point(i);
    } else {
        parallel_for(grid.size(), eval_point, opts.threads);
    }
    for (const auto& f : failures)
        if (!f.empty()) throw NonConvergence(f, 0.0);
    return out;
}

DensityEstimate epsilon_extrapolate(const NCPolynomial& p,
                                    const std::map<int, SpectralMeasure>& laws,
                                    const std::vector<double>& grid,
                                    const std::vector<double>& eps_schedule,
                                    const PipelineOptions& opts) {
    if (eps_schedule.size() < 2)
        throw std::invalid_argument("epsilon_extrapolate: need at least two eps values");
    for (std::size_t i = 1; i < eps_schedule.size(); ++i)
        if (eps_schedule[i] >= eps_schedule[i - 1])
            throw std::invalid_argument("epsilon_extrapolate: schedule must decrease");

    std::vector<DensityEstimate> runs;
    for (double eps : eps_schedule) {
        PipelineOptions run_opts = opts;
        run_opts.eps = eps;
        runs.push_back(polynomial_density(p, laws, grid, run_opts));
    }

    // Least-squares linear fit density(eps) = d0 + slope*eps per point,
    // evaluated at eps = 0.
    std::size_t k = eps_schedule.size();
    double se = 0, see = 0;
    for (double e : eps_schedule) {
        se += e;
        see += e * e;
    }
    DensityEstimate out;
    out.grid = grid;
    out.epsilon = eps_schedule.back();
    out.density.assign(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double sd = 0, sed = 0;
        for (std::size_t j = 0; j < k; ++j) {
            sd += runs[j].density[i];
            sed += eps_schedule[j] * runs[j].density[i];
        }
        double denom = static_cast<double>(k) * see - se * se;
        double slope = (static_cast<double>(k) * sed - se * sd) / denom;
        double d0 = (sd - slope * se) / static_cast<double>(k);
        out.density[i] = std::max(0.0, d0);
    }
    return out;
}

}  // namespace freeconv
