// freeconv: spectral distributions of selfadjoint polynomials in free
// random variables. Subcommands write their artifacts atomically and use
// distinct exit codes: 2 parse error, 3 file error, 4 non-convergence.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "freeconv/nccomb.hpp"
#include "freeconv/ovconv.hpp"
#include "freeconv/rmt.hpp"
#include "freeconv/scalarconv.hpp"

using namespace freeconv;
using nlohmann::json;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitFile = 3;
constexpr int kExitNonConvergence = 4;

struct CliError : std::runtime_error {
    CliError(int code_, const std::string& msg) : std::runtime_error(msg), code(code_) {}
    int code;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CliError(kExitFile, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw CliError(kExitFile, "cannot write " + tmp);
        out << content;
        if (!out.flush()) throw CliError(kExitFile, "write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw CliError(kExitFile, "cannot rename " + tmp + " to " + path);
}

std::vector<double> parse_grid(const std::string& text) {
    double lo, hi, step;
    char c1, c2;
    std::istringstream in(text);
    if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof() ||
        step <= 0 || hi < lo)
        throw CliError(kExitParse, "bad grid spec '" + text + "', expected a:b:step with step > 0");
    return make_grid(lo, hi, step);
}

NCPolynomial parse_poly_arg(const std::string& text, SymbolTable& symbols) {
    try {
        return parse_polynomial(text, symbols);
    } catch (const ParseError& e) {
        throw CliError(kExitParse,
                       "polynomial parse error at position " + std::to_string(e.position) + ": " +
                           e.what());
    }
}

json parse_json_text(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw CliError(kExitParse, "invalid JSON in " + what);
    return j;
}

// laws file: {"x": {"type": "semicircle", ...}, "y": {...}}
std::map<int, SpectralMeasure> load_laws(const std::string& path, const SymbolTable& symbols,
                                         const std::vector<int>& needed) {
    json j = parse_json_text(read_file(path), path);
    if (!j.is_object()) throw CliError(kExitParse, path + ": expected an object keyed by variable");
    std::map<int, SpectralMeasure> laws;
    for (auto& [name, spec] : j.items()) {
        int id = symbols.lookup(name);
        if (id < 0) continue;  // law for a variable the polynomial does not use
        try {
            laws.emplace(id, SpectralMeasure::from_json(spec.dump()));
        } catch (const std::exception& e) {
            throw CliError(kExitParse, path + ": measure for '" + name + "': " + e.what());
        }
    }
    for (int id : needed)
        if (!laws.count(id))
            throw CliError(kExitParse, path + ": no law given for variable '" + symbols.name(id) + "'");
    return laws;
}

// ensemble file: {"x": {"kind": "gue", "seed": 1},
//                 "y": {"kind": "wishart", "ratio": 4, "seed": 2}}
std::map<int, EnsembleSpec> load_ensembles(const std::string& path, const SymbolTable& symbols,
                                           const std::vector<int>& needed, Eigen::Index n) {
    json j = parse_json_text(read_file(path), path);
    if (!j.is_object()) throw CliError(kExitParse, path + ": expected an object keyed by variable");
    std::map<int, EnsembleSpec> specs;
    for (auto& [name, spec] : j.items()) {
        int id = symbols.lookup(name);
        if (id < 0) continue;
        if (!spec.is_object() || !spec.contains("kind"))
            throw CliError(kExitParse, path + ": '" + name + "' needs a \"kind\" field");
        EnsembleSpec es;
        es.n = n;
        std::string kind = spec["kind"];
        if (kind == "gue") {
            es.kind = EnsembleSpec::Kind::GUE;
        } else if (kind == "wishart") {
            es.kind = EnsembleSpec::Kind::Wishart;
            if (!spec.contains("ratio"))
                throw CliError(kExitParse, path + ": wishart '" + name + "' needs \"ratio\"");
            double ratio = spec["ratio"];
            if (ratio <= 0) throw CliError(kExitParse, path + ": ratio must be positive");
            es.m = static_cast<Eigen::Index>(ratio * static_cast<double>(n));
        } else {
            throw CliError(kExitParse, path + ": unknown kind '" + kind + "'");
        }
        es.seed = spec.value("seed", 0);
        specs.emplace(id, es);
    }
    for (int id : needed)
        if (!specs.count(id))
            throw CliError(kExitParse,
                           path + ": no ensemble given for variable '" + symbols.name(id) + "'");
    return specs;
}

std::string matrix_to_text(const MatrixXcd& m) {
    std::ostringstream out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            Complex v = m(i, j);
            char buf[64];
            if (std::abs(v.imag()) < 1e-14)
                std::snprintf(buf, sizeof buf, "%10.4g", v.real());
            else
                std::snprintf(buf, sizeof buf, "%10.4g%+.4gi", v.real(), v.imag());
            out << buf << (j + 1 < m.cols() ? " " : "");
        }
        out << "\n";
    }
    return out.str();
}

json matrix_to_json(const MatrixXcd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
        rows.push_back(row);
    }
    return rows;
}

// density CSV with columns t,density (header optional)
DensityEstimate read_density_csv(const std::string& path) {
    std::istringstream in(read_file(path));
    DensityEstimate est;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double t, d;
        char comma;
        std::istringstream row(line);
        if (!(row >> t >> comma >> d) || comma != ',') {
            if (est.grid.empty()) continue;  // tolerate a header line
            throw CliError(kExitParse, path + ": bad CSV row '" + line + "'");
        }
        est.grid.push_back(t);
        est.density.push_back(d);
    }
    if (est.grid.size() < 2) throw CliError(kExitParse, path + ": need at least two CSV rows");
    return est;
}

int run(int argc, char** argv) {
    CLI::App app{"spectral distributions of selfadjoint polynomials in free random variables"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads,
                   "worker thread cap (0: FREECONV_THREADS or hardware default)");

    // density
    auto* density = app.add_subcommand(
        "density", "density of p(x_1,...,x_k) with free inputs; CSV columns t,density");
    std::string poly_text, laws_path, grid_spec = "-4:4:0.01", out_path = "density.csv";
    double eps = 1e-3, tol = 1e-12;
    bool skip_bad = false;
    std::vector<double> eps_schedule;
    density->add_option("polynomial", poly_text, "selfadjoint polynomial, e.g. \"x*y+y*x+x^2\"")
        ->required();
    density->add_option("laws", laws_path, "JSON file mapping variables to measures")->required();
    density->add_option("--grid", grid_spec, "evaluation grid a:b:step");
    density->add_option("--eps", eps, "boundary regularization");
    density->add_option("--tol", tol, "fixed-point tolerance");
    density->add_option("--out", out_path, "output CSV path");
    density->add_flag("--skip-bad", skip_bad, "emit zero at non-converged points instead of failing");
    density->add_option("--extrapolate", eps_schedule,
                        "epsilon schedule for linear extrapolation to eps = 0")
        ->delimiter(',');

    // convolve
    auto* convolve =
        app.add_subcommand("convolve", "free additive convolution of two measures; CSV t,density");
    std::string mx_path, my_path;
    convolve->add_option("measure_x", mx_path, "JSON measure file")->required();
    convolve->add_option("measure_y", my_path, "JSON measure file")->required();
    convolve->add_option("--grid", grid_spec, "evaluation grid a:b:step");
    convolve->add_option("--eps", eps, "boundary regularization");
    convolve->add_option("--tol", tol, "fixed-point tolerance");
    convolve->add_option("--out", out_path, "output CSV path");

    // cumulants
    auto* cumulants =
        app.add_subcommand("cumulants", "free cumulants from a JSON moment list (m_1, m_2, ...)");
    std::string moments_text, cumulants_out;
    bool classical = false;
    cumulants->add_option("--moments", moments_text, "JSON array of moments")->required();
    cumulants->add_flag("--classical", classical, "classical cumulants instead of free ones");
    cumulants->add_option("--out", cumulants_out, "write the JSON here instead of stdout");

    // linearize
    auto* lin_cmd = app.add_subcommand(
        "linearize", "selfadjoint linearization p = -u Q^{-1} v; prints b0 and each a_j");
    std::string lin_out;
    lin_cmd->add_option("polynomial", poly_text, "selfadjoint polynomial")->required();
    lin_cmd->add_option("--out", lin_out, "also write the coefficients as JSON");

    // mc-compare
    auto* mc = app.add_subcommand(
        "mc-compare", "eigenvalue histogram of p on random matrices; CSV t,density");
    std::string ensembles_path, density_path;
    Eigen::Index mc_n = 500;
    int trials = 5, bins = 100;
    std::uint64_t seed = 0;
    mc->add_option("polynomial", poly_text, "selfadjoint polynomial")->required();
    mc->add_option("ensembles", ensembles_path, "JSON file mapping variables to ensembles")
        ->required();
    mc->add_option("--n", mc_n, "matrix size")->check(CLI::PositiveNumber);
    mc->add_option("--trials", trials, "number of pooled trials")->check(CLI::PositiveNumber);
    mc->add_option("--bins", bins, "histogram bins")->check(CLI::PositiveNumber);
    mc->add_option("--seed", seed, "run seed, combined with per-variable seeds");
    mc->add_option("--density", density_path,
                   "density CSV to compare against; prints the Kolmogorov distance");
    mc->add_option("--out", out_path, "output CSV path");

    // freeness
    auto* freeness = app.add_subcommand(
        "freeness", "alternating centered product statistic over matrix sizes; CSV n,statistic");
    std::vector<Eigen::Index> n_values{250, 500, 1000};
    std::string groups_text = "x,y,x,y";
    freeness->add_option("ensembles", ensembles_path, "JSON file mapping variables to ensembles")
        ->required();
    freeness->add_option("--n", n_values, "matrix sizes")->delimiter(',');
    freeness->add_option("--groups", groups_text,
                         "comma-separated factors, each NAME or NAME^POWER");
    freeness->add_option("--trials", trials, "trials per size")->check(CLI::PositiveNumber);
    freeness->add_option("--out", out_path, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitParse;
    }

    if (density->parsed()) {
        SymbolTable symbols;
        NCPolynomial p = parse_poly_arg(poly_text, symbols);
        auto laws = load_laws(laws_path, symbols, p.variables());
        PipelineOptions opts;
        opts.eps = eps;
        opts.tol = tol;
        opts.skip_bad = skip_bad;
        opts.threads = threads;
        opts.warm_start = (threads == 1);
        auto grid = parse_grid(grid_spec);
        DensityEstimate est = eps_schedule.empty()
                                  ? polynomial_density(p, laws, grid, opts)
                                  : epsilon_extrapolate(p, laws, grid, eps_schedule, opts);
        write_atomic(out_path, est.to_csv());
        std::printf("wrote %s (%zu points, mass %.4f)\n", out_path.c_str(), est.grid.size(),
                    est.trapezoid_mass());
    } else if (convolve->parsed()) {
        auto load_measure = [](const std::string& path) {
            try {
                return SpectralMeasure::from_json(read_file(path));
            } catch (const CliError&) {
                throw;
            } catch (const std::exception& e) {
                throw CliError(kExitParse, path + ": " + e.what());
            }
        };
        SpectralMeasure mx = load_measure(mx_path);
        SpectralMeasure my = load_measure(my_path);
        SubordinationOptions opts;
        opts.tol = tol;
        DensityEstimate est = free_add_convolve(mx, my, parse_grid(grid_spec), eps, opts);
        write_atomic(out_path, est.to_csv());
        std::printf("wrote %s (%zu points, mass %.4f)\n", out_path.c_str(), est.grid.size(),
                    est.trapezoid_mass());
    } else if (cumulants->parsed()) {
        json jm = parse_json_text(moments_text, "--moments");
        if (!jm.is_array() || jm.empty())
            throw CliError(kExitParse, "--moments must be a non-empty JSON array");
        MomentSequence m;
        for (const auto& v : jm) {
            if (!v.is_number()) throw CliError(kExitParse, "--moments entries must be numbers");
            m.push_back(Complex{v.get<double>(), 0.0});
        }
        CumulantSequence kappa =
            classical ? moments_to_classical_cumulants(m) : moments_to_free_cumulants(m);
        json out = json::array();
        for (const auto& v : kappa) {
            double r = std::abs(v.real()) < 1e-12 ? 0.0 : v.real();
            out.push_back(r);
        }
        if (cumulants_out.empty())
            std::printf("%s\n", out.dump().c_str());
        else
            write_atomic(cumulants_out, out.dump() + "\n");
    } else if (lin_cmd->parsed()) {
        SymbolTable symbols;
        NCPolynomial p = parse_poly_arg(poly_text, symbols);
        if (!p.is_selfadjoint()) throw CliError(kExitParse, "polynomial is not selfadjoint");
        Linearization lin = linearize(p);
        PencilCoefficients coeffs = decompose(lin);
        std::printf("pencil size %ld\nb0 =\n%s", static_cast<long>(lin.size),
                    matrix_to_text(coeffs.b0).c_str());
        json j;
        j["size"] = lin.size;
        j["b0"] = matrix_to_json(coeffs.b0);
        for (const auto& [id, a] : coeffs.a) {
            std::printf("a_%s =\n%s", symbols.name(id).c_str(), matrix_to_text(a).c_str());
            j["a"][symbols.name(id)] = matrix_to_json(a);
        }
        double residual = verify_linearization(p, lin, 10);
        std::printf("verification residual %.3g\n", residual);
        j["verification_residual"] = residual;
        if (!lin_out.empty()) write_atomic(lin_out, j.dump(2) + "\n");
    } else if (mc->parsed()) {
        SymbolTable symbols;
        NCPolynomial p = parse_poly_arg(poly_text, symbols);
        auto specs = load_ensembles(ensembles_path, symbols, p.variables(), mc_n);
        for (auto& [id, spec] : specs) spec.seed = stream_seed(seed, id, 0) ^ spec.seed;
        EmpiricalSpectrum emp = spectrum_of_polynomial(p, specs, trials, threads);
        auto [centers, values] = histogram(emp, bins);
        std::ostringstream csv;
        csv << "t,density\n";
        for (std::size_t i = 0; i < centers.size(); ++i)
            csv << centers[i] << "," << values[i] << "\n";
        write_atomic(out_path, csv.str());
        std::printf("wrote %s (%d bins, %zu eigenvalues)\n", out_path.c_str(), bins,
                    emp.eigenvalues.size());
        if (!density_path.empty()) {
            double ks = kolmogorov_distance(emp, read_density_csv(density_path));
            std::printf("kolmogorov distance to %s: %.4f\n", density_path.c_str(), ks);
        }
    } else if (freeness->parsed()) {
        SymbolTable symbols;
        std::vector<std::pair<int, int>> groups;
        std::istringstream in(groups_text);
        std::string factor;
        while (std::getline(in, factor, ',')) {
            auto caret = factor.find('^');
            std::string name = factor.substr(0, caret);
            int power = 1;
            if (caret != std::string::npos) {
                try {
                    power = std::stoi(factor.substr(caret + 1));
                } catch (const std::exception&) {
                    power = 0;
                }
            }
            if (name.empty() || power < 1)
                throw CliError(kExitParse, "bad --groups factor '" + factor + "'");
            groups.emplace_back(symbols.intern(name), power);
        }
        if (groups.empty()) throw CliError(kExitParse, "--groups must list at least one factor");
        std::vector<int> needed;
        for (auto [id, power] : groups) needed.push_back(id);
        std::ostringstream csv;
        csv << "n,statistic\n";
        for (Eigen::Index n : n_values) {
            auto specs = load_ensembles(ensembles_path, symbols, needed, n);
            double stat = freeness_statistic(groups, specs, trials, threads);
            csv << n << "," << stat << "\n";
            std::printf("n = %6ld  statistic = %+.6f\n", static_cast<long>(n), stat);
        }
        write_atomic(out_path, csv.str());
        std::printf("wrote %s\n", out_path.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CliError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.code;
    } catch (const NonConvergence& e) {
        std::fprintf(stderr, "error: fixed point did not converge: %s (residual %.3g)\n", e.what(),
                     e.residual);
        return kExitNonConvergence;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s at position %zu\n", e.what(), e.position);
        return kExitParse;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitParse;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
