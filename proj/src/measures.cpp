#include "freeconv/measures.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "freeconv/nccomb.hpp"

namespace freeconv {

namespace {

constexpr double kPi = std::numbers::pi;

// Branch of sqrt(w^2 - r) that behaves like w at infinity.
Complex sqrt_like_w(Complex w, double r) {
    Complex s = std::sqrt(w * w - r);
    if (s.real() * w.real() + s.imag() * w.imag() < 0) s = -s;
    return s;
}

}  // namespace

SpectralMeasure::SpectralMeasure(Semicircle s) : form_(s) { validate(); }
SpectralMeasure::SpectralMeasure(MarchenkoPastur mp) : form_(mp) { validate(); }
SpectralMeasure::SpectralMeasure(Atomic a) : form_(std::move(a)) { validate(); }
SpectralMeasure::SpectralMeasure(SampledDensity s) : form_(std::move(s)) { validate(); }

void SpectralMeasure::validate() const {
    if (const auto* s = std::get_if<Semicircle>(&form_)) {
        if (s->variance <= 0) throw std::invalid_argument("semicircle variance must be positive");
    } else if (const auto* mp = std::get_if<MarchenkoPastur>(&form_)) {
        if (mp->ratio <= 0 || mp->scale <= 0)
            throw std::invalid_argument("marchenko_pastur ratio and scale must be positive");
    } else if (const auto* a = std::get_if<Atomic>(&form_)) {
        double mass = 0;
        for (auto [t, w] : a->atoms) {
            if (w < 0) throw std::invalid_argument("atomic weights must be nonnegative");
            mass += w;
        }
        if (std::abs(mass - 1.0) > 1e-9)
            throw std::invalid_argument("atomic measure mass differs from 1");
    } else if (const auto* sd = std::get_if<SampledDensity>(&form_)) {
        if (sd->grid.size() != sd->values.size() || sd->grid.size() < 2)
            throw std::invalid_argument("sampled density needs matching grid/values, size >= 2");
        double mass = 0;
        for (std::size_t i = 0; i + 1 < sd->grid.size(); ++i) {
            if (sd->grid[i + 1] <= sd->grid[i])
                throw std::invalid_argument("sampled grid must be strictly ascending");
            if (sd->values[i] < 0 || sd->values[i + 1] < 0)
                throw std::invalid_argument("sampled density must be nonnegative");
            mass += 0.5 * (sd->values[i] + sd->values[i + 1]) * (sd->grid[i + 1] - sd->grid[i]);
        }
        if (std::abs(mass - 1.0) > 1e-9)
            throw std::invalid_argument("sampled density mass differs from 1");
    }
}

double SpectralMeasure::moment(int k) const {
    if (k < 0) throw std::invalid_argument("moment order must be >= 0");
    if (k == 0) return 1.0;
    if (const auto* s = std::get_if<Semicircle>(&form_)) {
        CumulantSequence kappa(static_cast<std::size_t>(k), Complex{0.0});
        kappa[0] = Complex{s->mean};
        if (k >= 2) kappa[1] = Complex{s->variance};
        return free_cumulants_to_moments(kappa).back().real();
    }
    if (const auto* mp = std::get_if<MarchenkoPastur>(&form_)) {
        CumulantSequence kappa(static_cast<std::size_t>(k));
        double sn = mp->scale;
        for (int i = 0; i < k; ++i, sn *= mp->scale) kappa[static_cast<std::size_t>(i)] = mp->ratio * sn;
        return free_cumulants_to_moments(kappa).back().real();
    }
    if (const auto* a = std::get_if<Atomic>(&form_)) {
        double m = 0;
        for (auto [t, w] : a->atoms) m += w * std::pow(t, k);
        return m;
    }
    const auto& sd = std::get<SampledDensity>(form_);
    double m = 0;
    for (std::size_t i = 0; i + 1 < sd.grid.size(); ++i) {
        double fa = sd.values[i] * std::pow(sd.grid[i], k);
        double fb = sd.values[i + 1] * std::pow(sd.grid[i + 1], k);
        m += 0.5 * (fa + fb) * (sd.grid[i + 1] - sd.grid[i]);
    }
    return m;
}

Complex SpectralMeasure::cauchy(Complex z) const {
    if (z.imag() <= 0) throw std::invalid_argument("cauchy: Im z must be positive");
    if (const auto* s = std::get_if<Semicircle>(&form_)) {
        Complex w = z - s->mean;
        return (w - sqrt_like_w(w, 4.0 * s->variance)) / (2.0 * s->variance);
    }
    if (const auto* mp = std::get_if<MarchenkoPastur>(&form_)) {
        // Root of s*z*G^2 + (lambda*s - s - z)*G + 1 = 0, from 1/G + R(G) = z
        // with R(w) = lambda*s/(1 - s*w).
        double l = mp->ratio, s = mp->scale;
        Complex a = s * z;
        Complex b = l * s - s - z;
        Complex disc = std::sqrt(b * b - 4.0 * a);
        // Citardauq form for the root that vanishes at infinity.
        Complex g1 = (-b + disc) / (2.0 * a);
        Complex g2 = (-b - disc) / (2.0 * a);
        if (g1.imag() < 0 && g2.imag() >= 0) return g1;
        if (g2.imag() < 0 && g1.imag() >= 0) return g2;
        return std::abs(g1 * z - 1.0) < std::abs(g2 * z - 1.0) ? g1 : g2;
    }
    if (const auto* a = std::get_if<Atomic>(&form_)) {
        Complex g{0.0};
        for (auto [t, w] : a->atoms) g += w / (z - t);
        return g;
    }
    const auto& sd = std::get<SampledDensity>(form_);
    Complex g{0.0};
    for (std::size_t i = 0; i + 1 < sd.grid.size(); ++i) {
        Complex fa = sd.values[i] / (z - sd.grid[i]);
        Complex fb = sd.values[i + 1] / (z - sd.grid[i + 1]);
        g += 0.5 * (fa + fb) * (sd.grid[i + 1] - sd.grid[i]);
    }
    return g;
}

std::pair<double, double> SpectralMeasure::support() const {
    if (const auto* s = std::get_if<Semicircle>(&form_)) {
        double r = 2.0 * std::sqrt(s->variance);
        return {s->mean - r, s->mean + r};
    }
    if (const auto* mp = std::get_if<MarchenkoPastur>(&form_)) {
        double rl = std::sqrt(mp->ratio);
        double lo = mp->scale * (1 - rl) * (1 - rl);
        double hi = mp->scale * (1 + rl) * (1 + rl);
        if (mp->ratio < 1) lo = 0.0;  // atom at the origin
        return {lo, hi};
    }
    if (const auto* a = std::get_if<Atomic>(&form_)) {
        double lo = a->atoms.front().first, hi = lo;
        for (auto [t, w] : a->atoms) {
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
        return {lo, hi};
    }
    const auto& sd = std::get<SampledDensity>(form_);
    return {sd.grid.front(), sd.grid.back()};
}

std::vector<std::pair<double, double>> SpectralMeasure::atoms() const {
    if (const auto* mp = std::get_if<MarchenkoPastur>(&form_)) {
        if (mp->ratio < 1) return {{0.0, 1.0 - mp->ratio}};
        return {};
    }
    if (const auto* a = std::get_if<Atomic>(&form_)) return a->atoms;
    return {};
}

bool SpectralMeasure::has_continuous_part() const {
    return !std::holds_alternative<Atomic>(form_);
}

double SpectralMeasure::density_at(double t) const {
    if (const auto* s = std::get_if<Semicircle>(&form_)) {
        double d = 4.0 * s->variance - (t - s->mean) * (t - s->mean);
        return d > 0 ? std::sqrt(d) / (2.0 * kPi * s->variance) : 0.0;
    }
    if (const auto* mp = std::get_if<MarchenkoPastur>(&form_)) {
        double u = t / mp->scale;
        double rl = std::sqrt(mp->ratio);
        double lo = (1 - rl) * (1 - rl), hi = (1 + rl) * (1 + rl);
        if (u <= lo || u >= hi) return 0.0;
        return std::sqrt((hi - u) * (u - lo)) / (2.0 * kPi * u) / mp->scale;
    }
    if (std::holds_alternative<Atomic>(form_)) return 0.0;
    const auto& sd = std::get<SampledDensity>(form_);
    if (t <= sd.grid.front() || t >= sd.grid.back()) return 0.0;
    auto it = std::upper_bound(sd.grid.begin(), sd.grid.end(), t);
    std::size_t i = static_cast<std::size_t>(it - sd.grid.begin()) - 1;
    double u = (t - sd.grid[i]) / (sd.grid[i + 1] - sd.grid[i]);
    return (1 - u) * sd.values[i] + u * sd.values[i + 1];
}

std::string SpectralMeasure::to_json() const {
    nlohmann::json j;
    if (const auto* s = std::get_if<Semicircle>(&form_)) {
        j = {{"type", "semicircle"}, {"mean", s->mean}, {"variance", s->variance}};
    } else if (const auto* mp = std::get_if<MarchenkoPastur>(&form_)) {
        j = {{"type", "marchenko_pastur"}, {"ratio", mp->ratio}};
        if (mp->scale != 1.0) j["scale"] = mp->scale;
    } else if (const auto* a = std::get_if<Atomic>(&form_)) {
        j = {{"type", "atomic"}, {"atoms", nlohmann::json::array()}};
        for (auto [t, w] : a->atoms) j["atoms"].push_back({t, w});
    } else {
        const auto& sd = std::get<SampledDensity>(form_);
        j = {{"type", "sampled"}, {"grid", sd.grid}, {"values", sd.values}};
    }
    return j.dump();
}

SpectralMeasure SpectralMeasure::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    std::string type = j.at("type").get<std::string>();
    if (type == "semicircle")
        return SpectralMeasure(
            Semicircle{j.value("mean", 0.0), j.value("variance", 1.0)});
    if (type == "marchenko_pastur")
        return SpectralMeasure(
            MarchenkoPastur{j.at("ratio").get<double>(), j.value("scale", 1.0)});
    if (type == "atomic") {
        Atomic a;
        for (const auto& pair : j.at("atoms"))
            a.atoms.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
        return SpectralMeasure(std::move(a));
    }
    if (type == "sampled") {
        SampledDensity sd;
        sd.grid = j.at("grid").get<std::vector<double>>();
        sd.values = j.at("values").get<std::vector<double>>();
        return SpectralMeasure(std::move(sd));
    }
    throw std::invalid_argument("unknown measure type: " + type);
}

double DensityEstimate::trapezoid_mass() const {
    double mass = 0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        mass += 0.5 * (density[i] + density[i + 1]) * (grid[i + 1] - grid[i]);
    return mass;
}

double DensityEstimate::moment(int k) const {
    double m = 0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        double fa = density[i] * std::pow(grid[i], k);
        double fb = density[i + 1] * std::pow(grid[i + 1], k);
        m += 0.5 * (fa + fb) * (grid[i + 1] - grid[i]);
    }
    return m;
}

std::string DensityEstimate::to_csv() const {
    std::ostringstream os;
    os.precision(12);
    os << "t,density\n";
    for (std::size_t i = 0; i < grid.size(); ++i) os << grid[i] << "," << density[i] << "\n";
    return os.str();
}

DensityEstimate stieltjes_invert(const std::function<Complex(Complex)>& G,
                                 const std::vector<double>& grid, double eps, bool richardson) {
    if (eps <= 0) throw std::invalid_argument("stieltjes_invert: eps must be positive");
    DensityEstimate out;
    out.grid = grid;
    out.epsilon = eps;
    out.density.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double t = grid[i];
        try {
            double d = -G(Complex{t, eps}).imag() / kPi;
            if (richardson) {
                double d2 = -G(Complex{t, eps / 2}).imag() / kPi;
                d = 2.0 * d2 - d;  // linear extrapolation to eps = 0
            }
            out.density[i] = std::max(0.0, d);
        } catch (const NonConvergence& e) {
            throw NonConvergence("stieltjes_invert: G failed at t=" + std::to_string(t) + ": " +
                                     e.what(),
                                 e.residual);
        } catch (const std::exception& e) {
            throw std::runtime_error("stieltjes_invert: G failed at t=" + std::to_string(t) +
                                     ": " + e.what());
        }
    }
    return out;
}

std::vector<double> make_grid(double lo, double hi, double step) {
    if (step <= 0 || hi < lo) throw std::invalid_argument("invalid grid spec");
    std::vector<double> g;
    for (double t = lo; t <= hi + step / 2; t += step) g.push_back(t);
    return g;
}

}  // namespace freeconv
