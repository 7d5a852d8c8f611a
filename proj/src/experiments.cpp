#include "pathlab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "pathlab/cylmeasure.hpp"
#include "pathlab/fock.hpp"
#include "pathlab/linops.hpp"
#include "pathlab/rng.hpp"
#include "pathlab/sqprocess.hpp"
#include "pathlab/telegraph.hpp"
#include "pathlab/timeslice.hpp"
#include "pathlab/wick.hpp"

namespace pathlab {

namespace {

using nlohmann::json;

struct ExperimentOutput {
    Table table;
    json summary = json::object();
    bool within_tolerance = true;
    std::string violation; // single-line reason when a tolerance fails
};

struct Check {
    bool ok;
    std::string what;
};

void record(ExperimentOutput& out, const Check& check) {
    if (!check.ok && out.within_tolerance) {
        out.within_tolerance = false;
        out.violation = check.what;
    }
}

// Index-assigned parallel sampling: slot i is a pure function of (seed, i),
// so the result is independent of the worker count.
void parallel_samples(std::size_t count, unsigned threads,
                      const std::function<void(std::size_t)>& fill) {
    const unsigned workers = std::max(1u, threads);
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fill(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = w; i < count; i += workers) {
                fill(i);
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
}

double fitted_loglog_slope(const std::vector<std::pair<double, double>>& points) {
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& [x, y] : points) {
        const double lx = std::log(x);
        const double ly = std::log(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(points.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double l2_diff(const GridWavefunction& a, const GridWavefunction& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.values.size(); ++j) {
        s += std::norm(a.values[j] - b.values[j]);
    }
    return std::sqrt(a.grid.mesh() * s);
}

json interval_union_json(const IntervalUnion& u) {
    if (u.is_all_reals()) {
        return json("all");
    }
    json arr = json::array();
    for (const auto& [lo, hi] : u.intervals()) {
        arr.push_back(json::array({lo, hi}));
    }
    return arr;
}

json cylinder_set_json(const CylinderSet& e) {
    json j;
    j["at_start"] = interval_union_json(e.at_start);
    j["times"] = e.times;
    json sets = json::array();
    for (const auto& s : e.sets) {
        sets.push_back(interval_union_json(s));
    }
    j["sets"] = sets;
    j["at_end"] = interval_union_json(e.at_end);
    return j;
}

// ---------------------------------------------------------------- trotter

ExperimentOutput run_trotter_convergence(const ExperimentConfig& config,
                                         const ParamReader& params) {
    (void)config;
    const Grid1D grid(params.get_double("x_min"), params.get_double("x_max"),
                      static_cast<std::size_t>(params.get_int("grid")));
    const double t = params.get_double("time");
    const double mass = params.get_double("mass");
    const double hbar = params.get_double("hbar");
    const auto n_list = params.get_int_list("n_list");
    const Potential v = Potential::tabulate(grid, [](double x) { return 0.5 * x * x; });
    const GridWavefunction psi0 =
        gaussian_state(grid, params.get_double("center"), params.get_double("width"));

    const SpectralDecomposition ed = eig_hermitian(discretized_hamiltonian(v, grid, mass, hbar));
    const GridWavefunction psi_exact(
        grid, expm_spectral_apply(ed, cplx(0.0, -t), psi0.values));

    ExperimentOutput out;
    out.table.columns = {"n", "error_l2"};
    std::vector<std::pair<double, double>> points;
    for (long long n : n_list) {
        const GridWavefunction psi_n =
            split_step_evolve(psi0, v, quantum_params(mass, hbar, t, static_cast<std::size_t>(n)));
        const double err = l2_diff(psi_n, psi_exact);
        points.emplace_back(static_cast<double>(n), err);
        out.table.add_row({static_cast<long long>(n), err});
    }
    const double slope = fitted_loglog_slope(points);
    const double final_error = points.back().second;
    // Wrap-around diagnostics: state mass within two units of the box edge
    // at the finest run must be negligible for the periodic transform.
    const GridWavefunction finest = split_step_evolve(
        psi0, v, quantum_params(mass, hbar, t, static_cast<std::size_t>(n_list.back())));
    double edge_mass = 0.0;
    for (std::size_t j = 0; j < grid.points; ++j) {
        if (std::min(grid.x(j) - grid.x_min, grid.x_max - grid.x(j)) < 2.0) {
            edge_mass += std::norm(finest.values[j]) * grid.mesh();
        }
    }
    out.summary["fitted_slope"] = slope;
    out.summary["final_error"] = final_error;
    out.summary["edge_mass"] = edge_mass;
    record(out, {edge_mass < 1e-8, "wrap-around mass " + std::to_string(edge_mass) +
                                       " near the box edge"});
    record(out, {slope <= -0.9, "fitted slope " + std::to_string(slope) + " above -0.9"});
    record(out, {final_error < 1e-2,
                 "error " + std::to_string(final_error) + " at n=" +
                     std::to_string(n_list.back()) + " not below 1e-2"});
    return out;
}

// ------------------------------------------------------- free slice identity

ExperimentOutput run_free_slice_identity(const ExperimentConfig& config,
                                         const ParamReader& params) {
    (void)config;
    const Grid1D grid(params.get_double("x_min"), params.get_double("x_max"),
                      static_cast<std::size_t>(params.get_int("grid")));
    const double t = params.get_double("time");
    const double window = params.get_double("window");
    const auto n_list = params.get_int_list("n_list");
    const Potential v0 = Potential::zero(grid);

    // Interior window: entries far enough from the box edge that the
    // truncated Gaussian tails sit below the comparison tolerance.
    std::vector<std::size_t> inside;
    for (std::size_t j = 0; j < grid.points; ++j) {
        if (std::abs(grid.x(j)) <= window) {
            inside.push_back(j);
        }
    }

    SliceParams heat;
    heat.lambda = cplx(1.0, 0.0);
    heat.total_time = t;
    heat.slices = 1;
    const ComplexMatrix k1 = timeslice_matrix(v0, heat, grid);
    double k1_norm = 0.0;
    for (std::size_t a : inside) {
        for (std::size_t b : inside) {
            k1_norm += std::norm(k1(a, b));
        }
    }
    k1_norm = std::sqrt(k1_norm);

    const GridWavefunction psi0 = gaussian_state(grid, 0.0, 1.0);
    const GridWavefunction base = split_step_evolve(psi0, v0, quantum_params(1.0, 1.0, t, 1));

    ExperimentOutput out;
    out.table.columns = {"n", "matrix_rel_diff", "splitstep_diff"};
    for (long long n : n_list) {
        SliceParams pn = heat;
        pn.slices = static_cast<std::size_t>(n);
        const ComplexMatrix kn = timeslice_matrix(v0, pn, grid);
        double diff = 0.0;
        for (std::size_t a : inside) {
            for (std::size_t b : inside) {
                diff += std::norm(kn(a, b) - k1(a, b));
            }
        }
        const double rel = std::sqrt(diff) / k1_norm;

        const GridWavefunction psi_n =
            split_step_evolve(psi0, v0, quantum_params(1.0, 1.0, t, static_cast<std::size_t>(n)));
        const double sdiff = l2_diff(psi_n, base);
        out.table.add_row({static_cast<long long>(n), rel, sdiff});
        record(out, {rel < 1e-8, "matrix slice identity off by " + std::to_string(rel) +
                                     " at n=" + std::to_string(n)});
        record(out, {sdiff < 1e-12, "split-step n-dependence " + std::to_string(sdiff) +
                                        " at n=" + std::to_string(n)});
    }
    out.summary["window_half_width"] = window;
    return out;
}

// ----------------------------------------------------------- variation blowup

ExperimentOutput run_variation_blowup(const ExperimentConfig& config,
                                      const ParamReader& params) {
    (void)config;
    const double box = params.get_double("box");
    const Grid1D grid(-box, box, static_cast<std::size_t>(params.get_int("grid")));
    const double t = params.get_double("time");
    const cplx lambda_value = parse_complex(params.get_string("lambda"));
    if (lambda_value == cplx(0.0, 0.0) || lambda_value.real() < 0.0) {
        throw ConfigError("lambda must satisfy Re >= 0 and lambda != 0, got " +
                          params.get_string("lambda"));
    }
    const MassScale lambda(lambda_value);
    const auto times = params.get_double_list("times");
    const auto m_list = params.get_int_list("m_list");
    const std::size_t budget = static_cast<std::size_t>(params.get_int("budget"));
    const GridWavefunction phi = gaussian_state(grid, 0.0, params.get_double("width"));

    const double closed = variation_closed_form(lambda, t, times.size(), phi, phi);

    ExperimentOutput out;
    out.table.columns = {"m", "bruteforce_value", "closed_form", "ratio"};
    double prev = 0.0;
    double last_ratio = 0.0;
    for (long long m : m_list) {
        const double bf = variation_bruteforce(lambda, t, times, phi, phi,
                                               static_cast<std::size_t>(m), box, budget);
        last_ratio = bf / closed;
        out.table.add_row({static_cast<long long>(m), bf, closed, last_ratio});
        record(out, {bf >= prev * (1.0 - 1e-12),
                     "brute-force variation decreased at m=" + std::to_string(m)});
        prev = bf;
    }
    const bool blowup = std::abs(lambda.lambda) > lambda.lambda.real() + 1e-15;
    if (blowup) {
        record(out, {last_ratio >= 0.95, "final partition reaches only " +
                                             std::to_string(last_ratio) + " of the closed form"});
    } else {
        record(out, {std::abs(last_ratio - 1.0) <= 0.01,
                     "real-lambda oracle differs from the closed form by " +
                         std::to_string(std::abs(last_ratio - 1.0))});
    }

    // Prefactor arithmetic across the number of intermediate times.
    const MassScale real_part(cplx(lambda.lambda.real(), 0.0));
    const double ratio_scale = std::abs(lambda.lambda) / lambda.lambda.real();
    json prefactors = json::array();
    double max_rel = 0.0;
    for (std::size_t n = 1; n <= 3; ++n) {
        const double a = variation_closed_form(lambda, t, n, phi, phi);
        const double b = variation_closed_form(real_part, t, n, phi, phi);
        const double expected = std::pow(ratio_scale, 0.5 * static_cast<double>(n + 1));
        const double rel = std::abs(a / b - expected) / expected;
        max_rel = std::max(max_rel, rel);
        prefactors.push_back({{"n_times", n}, {"ratio", a / b}, {"expected", expected}});
    }
    out.summary["prefactor_checks"] = prefactors;
    out.summary["max_prefactor_rel_error"] = max_rel;
    record(out, {max_rel <= 1e-12, "prefactor ratio off by relative " + std::to_string(max_rel)});
    // The states live on the truncation box; report the true Gaussian mass
    // beyond it rather than hiding the truncation.
    out.summary["tail_mass_outside_box"] =
        std::erfc(box / (std::sqrt(2.0) * params.get_double("width")));
    return out;
}

// --------------------------------------------------------- analyticity contour

CylinderSet default_contour_event() {
    CylinderSet e;
    e.times = {0.35, 0.6};
    e.sets = {IntervalUnion::interval(-1.2, 0.8), IntervalUnion::interval(-0.5, 2.0)};
    e.at_end = IntervalUnion::interval(-1.5, 1.5);
    return e;
}

ExperimentOutput run_analyticity_contour(const ExperimentConfig& config,
                                         const ParamReader& params) {
    (void)config;
    const double box = params.get_double("box");
    const Grid1D grid(-box, box, static_cast<std::size_t>(params.get_int("grid")));
    const double t = params.get_double("time");
    const cplx center = parse_complex(params.get_string("center"));
    const double radius = params.get_double("radius");
    const std::size_t nodes = static_cast<std::size_t>(params.get_int("nodes"));
    const GridWavefunction phi = gaussian_state(grid, 0.0, 1.0);
    const CylinderSet event = default_contour_event();

    const double r1 = analyticity_residual(event, phi, phi, t, center, radius, nodes);
    const double r2 = analyticity_residual(event, phi, phi, t, center, radius, 2 * nodes);

    ExperimentOutput out;
    out.table.columns = {"nodes", "residual"};
    out.table.add_row({static_cast<long long>(nodes), r1});
    out.table.add_row({static_cast<long long>(2 * nodes), r2});
    out.summary["cylinder_set"] = cylinder_set_json(event);
    out.summary["residual"] = r1;
    record(out, {r1 < 1e-6, "contour residual " + std::to_string(r1) + " not below 1e-6"});
    record(out, {std::abs(r1 - r2) < 1e-8, "node-doubling shifts the residual by " +
                                               std::to_string(std::abs(r1 - r2))});
    return out;
}

// ------------------------------------------------------------------- sq walk

LabeledGraph load_graph(const ParamReader& params) {
    const std::string path = params.get_string("graph");
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("cannot open graph file: " + path);
        }
        LabeledGraph g;
        g.adjacency = adjacency_from_edge_list(in);
        return g;
    }
    const std::string kneser = params.get_string("kneser");
    const auto comma = kneser.find(',');
    if (comma == std::string::npos) {
        throw ConfigError("kneser parameter must be of the form n,k");
    }
    const unsigned n = static_cast<unsigned>(std::stoul(kneser.substr(0, comma)));
    const unsigned k = static_cast<unsigned>(std::stoul(kneser.substr(comma + 1)));
    return kneser_bipartite(n, k);
}

unsigned graph_degree(const ComplexMatrix& adjacency) {
    double row = 0.0;
    for (std::size_t j = 0; j < adjacency.cols(); ++j) {
        row += adjacency(0, j).real();
    }
    return static_cast<unsigned>(std::llround(row));
}

ExperimentOutput run_sq_walk(const ExperimentConfig& config, const ParamReader& params) {
    const LabeledGraph g = load_graph(params);
    const unsigned degree = graph_degree(g.adjacency);
    const HermitianOperator h = graph_hamiltonian(g.adjacency, degree);
    const EvolutionSpec walk = wick_rotate(quantum_evolution(h.matrix()));

    const double t = params.get_double("time");
    const std::size_t paths = static_cast<std::size_t>(params.get_int("paths"));
    const std::size_t start = static_cast<std::size_t>(params.get_int("start"));
    const CylinderEvent full_event; // no constraints
    const WalkComparison cmp = empirical_vs_exact(walk, full_event, start, t, paths,
                                                  config.seed.value(), config.threads);

    ExperimentOutput out;
    out.table.columns = {"state", "empirical", "exact", "stderr"};
    double tv = 0.0;
    double max_z = 0.0;
    for (std::size_t s = 0; s < cmp.exact.size(); ++s) {
        out.table.add_row({static_cast<long long>(s), cmp.empirical[s], cmp.exact[s],
                           cmp.std_error[s]});
        const double diff = std::abs(cmp.empirical[s] - cmp.exact[s]);
        tv += 0.5 * diff;
        if (cmp.std_error[s] > 0.0) {
            max_z = std::max(max_z, diff / cmp.std_error[s]);
        } else if (diff > 0.0) {
            max_z = std::numeric_limits<double>::infinity();
        }
        record(out, {diff <= 4.0 * cmp.std_error[s],
                     "state " + std::to_string(s) + " deviates by more than 4 standard errors"});
    }
    out.summary["tv_distance"] = tv;
    out.summary["max_z"] = max_z;
    if (!g.labels.empty()) {
        out.summary["state_labels"] = g.labels;
    }
    record(out, {tv < 0.01, "total-variation distance " + std::to_string(tv) + " not below 0.01"});
    return out;
}

// ------------------------------------------------------------- sq consistency

ExperimentOutput run_sq_consistency(const ExperimentConfig& config,
                                    const ParamReader& params) {
    (void)config;
    const LabeledGraph g = load_graph(params);
    const unsigned degree = graph_degree(g.adjacency);
    const HermitianOperator h = graph_hamiltonian(g.adjacency, degree);
    const std::size_t n = h.dimension();
    const double t = params.get_double("time");
    const EvolutionSpec quantum = quantum_evolution(h.matrix());
    const EvolutionSpec walk = wick_rotate(quantum);

    std::vector<std::size_t> full(n);
    for (std::size_t i = 0; i < n; ++i) {
        full[i] = i;
    }
    std::vector<std::size_t> evens;
    std::vector<std::size_t> first_half;
    for (std::size_t i = 0; i < n; ++i) {
        if (i % 2 == 0) {
            evens.push_back(i);
        }
        if (i < n / 2) {
            first_half.push_back(i);
        }
    }

    ExperimentOutput out;
    out.table.columns = {"check", "max_abs_error", "tolerance"};
    auto add_check = [&](const std::string& name, double err, double tol) {
        out.table.add_row({name, err, tol});
        record(out, {err <= tol, name + " error " + std::to_string(err) + " exceeds " +
                                     std::to_string(tol)});
    };

    // Full event reproduces the bare semigroup.
    CylinderEvent omega;
    omega.times = {0.25 * t, 0.75 * t};
    omega.subsets = {full, full};
    const ComplexMatrix st = evolution_operator(quantum, t);
    add_check("omega_identity", (sq_measure(omega, quantum, t) - st).max_abs(), 1e-12);

    // Inserting an unconstrained time changes nothing.
    CylinderEvent base;
    base.times = {0.3 * t, 0.7 * t};
    base.subsets = {evens, first_half};
    CylinderEvent inserted = base;
    inserted.times = {0.3 * t, 0.5 * t, 0.7 * t};
    inserted.subsets = {evens, full, first_half};
    add_check("chapman_kolmogorov",
              (sq_measure(base, quantum, t) - sq_measure(inserted, quantum, t)).max_abs(),
              1e-12);

    // Additivity over a disjoint split of one constraint.
    std::vector<std::size_t> part_a;
    std::vector<std::size_t> part_b;
    for (std::size_t s : evens) {
        (s < n / 2 ? part_a : part_b).push_back(s);
    }
    CylinderEvent ea = base;
    ea.subsets = {part_a, first_half};
    CylinderEvent eb = base;
    eb.subsets = {part_b, first_half};
    add_check("finite_additivity",
              (sq_measure(base, quantum, t) -
               (sq_measure(ea, quantum, t) + sq_measure(eb, quantum, t)))
                  .max_abs(),
              1e-12);

    // Wick-rotated walk: columns are probability vectors.
    const ComplexMatrix markov = evolution_operator(walk, t);
    double col_err = 0.0;
    double min_entry = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += markov(i, j).real();
            min_entry = std::min(min_entry, markov(i, j).real());
        }
        col_err = std::max(col_err, std::abs(sum - 1.0));
    }
    add_check("markov_column_sums", col_err, 1e-10);
    add_check("markov_nonnegativity", std::max(0.0, -min_entry), 1e-12);

    // Quantum clock preserves the norm.
    RngStream rng(7, 0);
    std::vector<cplx> psi(n);
    double norm0 = 0.0;
    for (auto& x : psi) {
        x = cplx(rng.normal(), rng.normal());
        norm0 += std::norm(x);
    }
    const auto evolved = st.apply(psi);
    double norm1 = 0.0;
    for (const auto& x : evolved) {
        norm1 += std::norm(x);
    }
    add_check("quantum_norm_preservation",
              std::abs(std::sqrt(norm1) - std::sqrt(norm0)) / std::sqrt(norm0), 1e-10);

    out.summary["states"] = n;
    out.summary["degree"] = degree;
    return out;
}

// ----------------------------------------------------------------- telegraph

ExperimentOutput run_telegraph(const ExperimentConfig& config, const ParamReader& params) {
    KacParams kac;
    kac.intensity = params.get_double("intensity");
    kac.speed = params.get_double("speed");
    kac.horizon = params.get_double("time");
    kac.validate();
    const Grid1D grid(params.get_double("x_min"), params.get_double("x_max"),
                      static_cast<std::size_t>(params.get_int("grid")));
    const std::size_t paths = static_cast<std::size_t>(params.get_int("paths"));
    const auto checkpoints = params.get_double_list("checkpoints");
    const std::uint64_t seed = config.seed.value();

    const InitialData f = [](double x) { return std::exp(-x * x); };
    const std::size_t steps = static_cast<std::size_t>(
        std::ceil(kac.speed * kac.horizon / (0.9 * grid.mesh()))) + 1;
    const std::vector<double> fd = damped_wave_fd(f, kac, grid, steps);

    auto fd_at = [&](double x) {
        const double pos = (x - grid.x_min) / grid.mesh();
        const std::size_t j0 = std::min(static_cast<std::size_t>(pos), grid.points - 2);
        const double frac = pos - static_cast<double>(j0);
        return (1.0 - frac) * fd[j0] + frac * fd[j0 + 1];
    };

    ExperimentOutput out;
    out.table.columns = {"x", "mc_mean", "mc_stderr", "fd_value", "abs_diff"};
    for (double x : checkpoints) {
        const McEstimate mc = kac_expectation(f, x, kac, paths, seed, config.threads);
        const double fdv = fd_at(x);
        const double diff = std::abs(mc.mean - fdv);
        out.table.add_row({x, mc.mean, mc.std_error, fdv, diff});
        const double allowance = std::max(3.0 * mc.std_error, 2e-3);
        record(out, {diff < allowance, "checkpoint x=" + std::to_string(x) +
                                           " differs from the FD solution by " +
                                           std::to_string(diff)});
    }

    // Clock statistics over the same path ensemble.
    double tau_sum = 0.0;
    double tau_sq = 0.0;
    double max_abs_tau = 0.0;
    for (std::size_t p = 0; p < paths; ++p) {
        RngStream rng(seed, p);
        const double tau = sample_tau(kac, rng);
        tau_sum += tau;
        tau_sq += tau * tau;
        max_abs_tau = std::max(max_abs_tau, std::abs(tau));
    }
    const double dn = static_cast<double>(paths);
    const double tau_mean = tau_sum / dn;
    const double tau_se = std::sqrt((tau_sq / dn - tau_mean * tau_mean) / dn);
    const double tau_expected =
        kac.intensity > 0.0
            ? (1.0 - std::exp(-2.0 * kac.intensity * kac.horizon)) / (2.0 * kac.intensity)
            : kac.horizon;
    out.summary["tau_mean"] = tau_mean;
    out.summary["tau_expected"] = tau_expected;
    out.summary["tau_stderr"] = tau_se;
    out.summary["max_abs_tau"] = max_abs_tau;
    out.summary["fd_steps"] = steps;
    record(out, {std::abs(tau_mean - tau_expected) <= 3.0 * tau_se,
                 "mean clock value misses the closed form by more than 3 standard errors"});
    record(out, {max_abs_tau <= kac.horizon + 1e-12, "a clock sample exceeded the horizon"});
    return out;
}

// -------------------------------------------------------------------- amoeba

ExperimentOutput run_amoeba(const ExperimentConfig& config, const ParamReader& params) {
    (void)config;
    const double t = params.get_double("time");
    const TruncatedFock space(1, static_cast<unsigned>(params.get_int("cutoff")));
    const FockCoefficients psi = amoeba_evolution(t, space);

    ExperimentOutput out;
    out.table.columns = {"k", "psi_k", "poisson_exact", "abs_err"};
    double poisson = std::exp(-t);
    double max_err = 0.0;
    double sum = 0.0;
    for (unsigned k = 0; k <= space.cutoff; ++k) {
        if (k > 0) {
            poisson *= t / static_cast<double>(k);
        }
        const double value = psi.values[k].real();
        const double err = std::abs(value - poisson);
        max_err = std::max(max_err, err);
        sum += value;
        out.table.add_row({static_cast<long long>(k), value, poisson, err});
    }
    out.summary["max_abs_err"] = max_err;
    out.summary["coefficient_sum"] = sum;
    record(out, {max_err < 1e-10, "Poisson law violated by " + std::to_string(max_err)});
    record(out, {std::abs(sum - 1.0) <= 1e-10,
                 "coefficient sum differs from 1 by " + std::to_string(std::abs(sum - 1.0))});
    return out;
}

// ------------------------------------------------------------- predator prey

ExperimentOutput run_predator_prey(const ExperimentConfig& config, const ParamReader& params) {
    (void)config;
    RateTriple rates;
    rates.beta = params.get_double("beta");
    rates.gamma = params.get_double("gamma");
    rates.delta = params.get_double("delta");
    const TruncatedFock space(2, static_cast<unsigned>(params.get_int("cutoff")));
    const double t = params.get_double("time");
    const unsigned prey = static_cast<unsigned>(params.get_int("prey"));
    const unsigned predator = static_cast<unsigned>(params.get_int("predator"));

    const ComplexMatrix gen = predator_prey_generator(rates, space);
    const FockCoefficients psi0 = FockCoefficients::basis_state(space, prey, predator);
    const EvolvedCoefficients evolved = evolve_coefficients(gen, psi0, t, false);

    ExperimentOutput out;
    out.table.columns = {"prey", "predator", "probability"};
    std::vector<double> prey_marginal(space.cutoff + 1, 0.0);
    std::vector<double> predator_marginal(space.cutoff + 1, 0.0);
    double total = 0.0;
    for (std::size_t idx = 0; idx < space.dimension(); ++idx) {
        const auto [m1, m2] = space.exponents(idx);
        const double p = evolved.psi.values[idx].real();
        total += p;
        prey_marginal[m1] += p;
        predator_marginal[m2] += p;
        out.table.add_row({static_cast<long long>(m1), static_cast<long long>(m2), p});
    }
    out.summary["total_probability"] = total;
    out.summary["boundary_mass"] = evolved.boundary_mass;
    out.summary["prey_marginal"] = prey_marginal;
    out.summary["predator_marginal"] = predator_marginal;
    record(out, {std::abs(total - 1.0) <= 1e-6,
                 "total probability differs from 1 by " + std::to_string(std::abs(total - 1.0))});
    record(out, {evolved.boundary_mass < 1e-8,
                 "truncation-boundary mass " + std::to_string(evolved.boundary_mass) +
                     " not below 1e-8"});
    return out;
}

// -------------------------------------------------------------- wick moments

double bump(double x) { return std::exp(-0.5 * x * x); }

ExperimentOutput run_wick_moments(const ExperimentConfig& config, const ParamReader& params) {
    const SpectralGrid grid(params.get_double("period"),
                            static_cast<std::size_t>(params.get_int("modes")));
    const std::size_t samples = static_cast<std::size_t>(params.get_int("samples"));
    const unsigned max_degree = static_cast<unsigned>(params.get_int("max_degree"));
    const std::uint64_t seed = config.seed.value();
    const TestFunction f = TestFunction::tabulate(grid, bump);
    const double c = c_of_f(grid, f);

    std::vector<double> u(samples);
    parallel_samples(samples, config.threads, [&](std::size_t i) {
        RngStream rng(seed, i);
        u[i] = pair_field(grid, f, sample_sharp_time(grid, rng));
    });

    ExperimentOutput out;
    out.table.columns = {"m", "n", "empirical", "exact", "stderr", "z_score"};
    double factorial_n = 1.0;
    for (unsigned n = 1; n <= max_degree; ++n) {
        factorial_n *= static_cast<double>(n);
        for (unsigned m = 1; m <= n; ++m) {
            double mean = 0.0;
            double sq = 0.0;
            for (double ui : u) {
                const double v = std::pow(c, m + n) * hermite_monic(m, ui / c) *
                                 hermite_monic(n, ui / c);
                mean += v;
                sq += v * v;
            }
            const double dn = static_cast<double>(samples);
            mean /= dn;
            const double se = std::sqrt(std::max(0.0, (sq / dn - mean * mean) / dn));
            const double exact =
                m == n ? factorial_n * std::pow(c, 2.0 * static_cast<double>(n)) : 0.0;
            const double z = se > 0.0 ? (mean - exact) / se : 0.0;
            out.table.add_row({static_cast<long long>(m), static_cast<long long>(n), mean,
                               exact, se, z});
            record(out, {std::abs(mean - exact) <= 4.0 * se,
                         "moment (" + std::to_string(m) + "," + std::to_string(n) +
                             ") off by more than 4 standard errors"});
        }
    }
    out.summary["c_of_f"] = c;
    return out;
}

// ---------------------------------------------------------------- delta scan

ExperimentOutput run_delta_scan(const ExperimentConfig& config, const ParamReader& params) {
    (void)config;
    const SpectralGrid grid(params.get_double("period"),
                            static_cast<std::size_t>(params.get_int("modes")));
    const auto widths = params.get_double_list("widths");
    const DivergenceScan scan = delta_divergence_scan(grid, widths);

    ExperimentOutput out;
    out.table.columns = {"width", "variance", "fitted_slope"};
    for (const auto& [w, v] : scan.width_variance) {
        out.table.add_row({w, v, scan.fitted_slope});
    }
    out.summary["fitted_slope"] = scan.fitted_slope;
    record(out, {scan.fitted_slope >= -0.7 && scan.fitted_slope <= -0.3,
                 "fitted slope " + std::to_string(scan.fitted_slope) +
                     " outside [-0.7, -0.3]"});
    return out;
}

// -------------------------------------------------------------- ou covariance

ExperimentOutput run_ou_covariance(const ExperimentConfig& config, const ParamReader& params) {
    const SpectralGrid grid(params.get_double("period"),
                            static_cast<std::size_t>(params.get_int("modes")));
    const std::size_t samples = static_cast<std::size_t>(params.get_int("samples"));
    const double dt = params.get_double("time_step");
    const std::size_t nsteps = static_cast<std::size_t>(params.get_int("num_steps"));
    const std::uint64_t seed = config.seed.value();
    const TestFunction f = TestFunction::tabulate(grid, bump);

    std::vector<double> times(nsteps + 1);
    for (std::size_t i = 0; i <= nsteps; ++i) {
        times[i] = dt * static_cast<double>(i);
    }

    std::vector<std::vector<double>> u(samples);
    parallel_samples(samples, config.threads, [&](std::size_t i) {
        RngStream rng(seed, i);
        const auto traj = ou_sample_trajectory(grid, times, rng);
        u[i].resize(times.size());
        for (std::size_t j = 0; j < times.size(); ++j) {
            u[i][j] = pair_field(grid, f, traj[j]);
        }
    });

    ExperimentOutput out;
    out.table.columns = {"lag", "empirical", "exact", "stderr", "z_score"};
    const double dn = static_cast<double>(samples);
    for (std::size_t j = 0; j < times.size(); ++j) {
        double mean0 = 0.0;
        double meanj = 0.0;
        for (std::size_t i = 0; i < samples; ++i) {
            mean0 += u[i][0];
            meanj += u[i][j];
        }
        mean0 /= dn;
        meanj /= dn;
        double cov = 0.0;
        double var_prod = 0.0;
        for (std::size_t i = 0; i < samples; ++i) {
            const double prod = (u[i][0] - mean0) * (u[i][j] - meanj);
            cov += prod;
            var_prod += prod * prod;
        }
        cov /= dn - 1.0;
        const double se = std::sqrt(std::max(0.0, (var_prod / dn - cov * cov) / dn));
        const double exact = ou_covariance(grid, f, f, 0.0, times[j]);
        const double z = se > 0.0 ? (cov - exact) / se : 0.0;
        out.table.add_row({times[j], cov, exact, se, z});
        record(out, {std::abs(cov - exact) <= 4.0 * se,
                     "covariance at lag " + std::to_string(times[j]) +
                         " off by more than 4 standard errors"});
    }
    return out;
}

// ------------------------------------------------------------------ registry

struct ExperimentEntry {
    std::string description;
    bool stochastic;
    std::map<std::string, std::string> defaults;
    std::function<ExperimentOutput(const ExperimentConfig&, const ParamReader&)> fn;
};

const std::vector<std::pair<std::string, ExperimentEntry>>& registry() {
    static const std::vector<std::pair<std::string, ExperimentEntry>> entries = {
        {"trotter-convergence",
         {"split-step error against the eigendecomposition reference",
          false,
          {{"x_min", "-10"}, {"x_max", "10"}, {"grid", "512"}, {"time", "1"},
           {"mass", "1"}, {"hbar", "1"}, {"n_list", "8,16,32,64,128,256"},
           {"center", "1"}, {"width", "1"}},
          run_trotter_convergence}},
        {"free-slice-identity",
         {"slice-count independence of the free propagator",
          false,
          {{"x_min", "-10"}, {"x_max", "10"}, {"grid", "256"}, {"time", "1"},
           {"n_list", "2,4,8"}, {"window", "3"}},
          run_free_slice_identity}},
        {"variation-blowup",
         {"partition oracle against the closed-form total variation",
          false,
          {{"lambda", "1+1i"}, {"time", "1"}, {"times", "0.5"}, {"box", "6"},
           {"grid", "256"}, {"m_list", "8,16,32,64"}, {"width", "1"},
           {"budget", "1000000"}},
          run_variation_blowup}},
        {"analyticity-contour",
         {"contour-integral residual of the amplitude in the mass scale",
          false,
          {{"center", "1.5+0.5i"}, {"radius", "0.25"}, {"nodes", "64"}, {"time", "1"},
           {"box", "8"}, {"grid", "128"}},
          run_analyticity_contour}},
        {"sq-walk",
         {"jump-walk law against the matrix exponential",
          true,
          {{"kneser", "5,2"}, {"graph", ""}, {"time", "1"}, {"paths", "100000"},
           {"start", "0"}},
          run_sq_walk}},
        {"sq-consistency",
         {"operator-measure algebra checks on a graph Hamiltonian",
          false,
          {{"kneser", "5,2"}, {"graph", ""}, {"time", "1"}},
          run_sq_consistency}},
        {"telegraph",
         {"randomised-clock Monte Carlo against the damped-wave FD solution",
          true,
          {{"intensity", "1"}, {"speed", "1"}, {"time", "1"}, {"paths", "100000"},
           {"grid", "1024"}, {"x_min", "-8"}, {"x_max", "8"},
           {"checkpoints", "-2,-1.5,-1,-0.5,0,0.5,1,1.5,2"}},
          run_telegraph}},
        {"amoeba",
         {"division-process coefficients against the Poisson law",
          false,
          {{"time", "1"}, {"cutoff", "60"}},
          run_amoeba}},
        {"predator-prey",
         {"two-mode conservation under the truncated generator",
          false,
          {{"beta", "0.3"}, {"gamma", "0.3"}, {"delta", "0.3"}, {"cutoff", "8"},
           {"time", "0.5"}, {"prey", "1"}, {"predator", "1"}},
          run_predator_prey}},
        {"wick-moments",
         {"Wick monomial second moments over field samples",
          true,
          {{"period", "32"}, {"modes", "1024"}, {"samples", "100000"},
           {"max_degree", "4"}},
          run_wick_moments}},
        {"delta-scan",
         {"sharp-time variance divergence for shrinking boxes",
          false,
          {{"period", "32"}, {"modes", "4096"}, {"widths", "0.4,0.2,0.1,0.05"}},
          run_delta_scan}},
        {"ou-covariance",
         {"trajectory covariance against the spectral closed form",
          true,
          {{"period", "32"}, {"modes", "1024"}, {"samples", "5000"},
           {"time_step", "0.25"}, {"num_steps", "8"}},
          run_ou_covariance}},
    };
    return entries;
}

const ExperimentEntry* find_experiment(const std::string& name) {
    for (const auto& [key, entry] : registry()) {
        if (key == name) {
            return &entry;
        }
    }
    return nullptr;
}

} // namespace

std::vector<std::string> experiment_names() {
    std::vector<std::string> names;
    for (const auto& [key, entry] : registry()) {
        names.push_back(key);
    }
    return names;
}

bool experiment_is_stochastic(const std::string& name) {
    const ExperimentEntry* entry = find_experiment(name);
    return entry != nullptr && entry->stochastic;
}

std::string experiment_description(const std::string& name) {
    const ExperimentEntry* entry = find_experiment(name);
    return entry != nullptr ? entry->description : "";
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    ExperimentResult result;
    const ExperimentEntry* entry = find_experiment(config.name);
    if (entry == nullptr) {
        result.exit_code = 2;
        result.message = "unknown experiment: " + config.name;
        return result;
    }

    ExperimentOutput output;
    std::map<std::string, std::string> resolved;
    try {
        const ParamReader params(config.params, entry->defaults);
        resolved = params.resolved();
        if (entry->stochastic && !config.seed.has_value()) {
            throw ConfigError("experiment " + config.name + " is stochastic: --seed is required");
        }
        output = entry->fn(config, params);
    } catch (const ConfigError& err) {
        result.exit_code = 2;
        result.message = err.what();
        return result;
    } catch (const std::exception& err) {
        result.exit_code = 4;
        result.message = err.what();
        return result;
    }

    const std::string body =
        config.format == OutputFormat::csv ? to_csv(output.table) : to_json_records(output.table);
    const std::string path = config.out_path.empty()
                                 ? config.name + (config.format == OutputFormat::csv ? ".csv" : ".json")
                                 : config.out_path;
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            result.exit_code = 4;
            result.message = "cannot write output file: " + path;
            return result;
        }
        out << body;
    }
    result.artifact = path;

    json manifest;
    manifest["experiment"] = config.name;
    manifest["version"] = kToolVersion;
    manifest["parameters"] = resolved;
    if (config.seed.has_value()) {
        manifest["seed"] = config.seed.value();
    }
    manifest["format"] = config.format == OutputFormat::csv ? "csv" : "json";
    manifest["strict"] = config.strict;
    manifest["threads"] = config.threads;
    manifest["within_tolerance"] = output.within_tolerance;
    if (!output.within_tolerance) {
        manifest["violation"] = output.violation;
    }
    manifest["summary"] = output.summary;
    manifest["unix_time"] =
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
    const std::string manifest_path = path + ".manifest.json";
    {
        std::ofstream out(manifest_path, std::ios::binary);
        out << manifest.dump(2) << "\n";
    }
    result.manifest = manifest_path;

    if (!output.within_tolerance && config.strict) {
        result.exit_code = 3;
        result.message = output.violation;
    }
    return result;
}

} // namespace pathlab
