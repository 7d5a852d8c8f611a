#include "pathlab/sqprocess.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace pathlab {

EvolutionSpec quantum_evolution(ComplexMatrix hamiltonian) {
    HermitianOperator check(hamiltonian); // validates
    EvolutionSpec spec;
    spec.generator = check.matrix();
    spec.mode = ClockMode::quantum;
    return spec;
}

EvolutionSpec dissipative_evolution(ComplexMatrix hamiltonian) {
    if (!hamiltonian.square()) {
        throw std::invalid_argument("dissipative_evolution: generator must be square");
    }
    EvolutionSpec spec;
    spec.generator = std::move(hamiltonian);
    spec.mode = ClockMode::dissipative;
    return spec;
}

EvolutionSpec wick_rotate(const EvolutionSpec& spec) {
    if (spec.mode != ClockMode::quantum) {
        throw std::invalid_argument("wick_rotate: input must be a quantum-mode spec");
    }
    EvolutionSpec out;
    out.generator = spec.generator;
    out.mode = ClockMode::dissipative;
    return out;
}

namespace {

bool nearly_hermitian(const ComplexMatrix& m) {
    const std::size_t n = m.rows();
    double scale = m.max_abs();
    if (scale == 0.0) {
        scale = 1.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            if (std::abs(m(i, j) - std::conj(m(j, i))) > 1e-12 * scale) {
                return false;
            }
        }
    }
    return true;
}

} // namespace

ComplexMatrix evolution_operator(const EvolutionSpec& spec, double t) {
    if (spec.mode == ClockMode::quantum) {
        return expm_spectral(HermitianOperator(spec.generator), cplx(0.0, -t));
    }
    if (nearly_hermitian(spec.generator)) {
        return expm_spectral(HermitianOperator(spec.generator), cplx(-t, 0.0));
    }
    return expm_general(spec.generator.scaled(-1.0), t);
}

ComplexMatrix spectral_Q(const std::vector<std::size_t>& subset, std::size_t n) {
    ComplexMatrix q(n, n);
    for (std::size_t s : subset) {
        if (s >= n) {
            throw std::out_of_range("spectral_Q: state index out of range");
        }
        q(s, s) = 1.0;
    }
    return q;
}

ComplexMatrix sq_measure(const CylinderEvent& event, const EvolutionSpec& spec, double t) {
    if (event.times.size() != event.subsets.size()) {
        throw std::invalid_argument("sq_measure: times/subsets mismatch");
    }
    const std::size_t n = spec.states();
    for (std::size_t i = 0; i < event.times.size(); ++i) {
        if (event.times[i] < 0.0 || event.times[i] > t) {
            throw std::invalid_argument("sq_measure: event time outside [0, t]");
        }
        if (i > 0 && !(event.times[i - 1] < event.times[i])) {
            throw std::invalid_argument("sq_measure: event times must be strictly increasing");
        }
    }

    // One decomposition serves every S factor when the generator is Hermitian.
    const bool hermitian = nearly_hermitian(spec.generator);
    SpectralDecomposition ed;
    if (hermitian) {
        ed = eig_hermitian(HermitianOperator(spec.generator));
    }
    const cplx clock = spec.mode == ClockMode::quantum ? cplx(0.0, -1.0) : cplx(-1.0, 0.0);
    auto s_factor = [&](double gap) {
        if (hermitian) {
            return expm_spectral(ed, clock * gap);
        }
        return expm_general(spec.generator.scaled(-1.0), gap);
    };

    double prev = 0.0;
    ComplexMatrix result = ComplexMatrix::identity(n);
    for (std::size_t i = 0; i < event.times.size(); ++i) {
        result = s_factor(event.times[i] - prev) * result;
        result = spectral_Q(event.subsets[i], n) * result;
        prev = event.times[i];
    }
    return s_factor(t - prev) * result;
}

LabeledGraph kneser_bipartite(unsigned n, unsigned k) {
    if (k < 1 || 2 * k >= n) {
        throw std::invalid_argument("kneser_bipartite: need 1 <= k < n/2");
    }
    auto subsets_of_size = [n](unsigned size) {
        std::vector<unsigned> masks;
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            if (static_cast<unsigned>(__builtin_popcount(mask)) == size) {
                masks.push_back(mask);
            }
        }
        return masks;
    };
    const auto small = subsets_of_size(k);
    const auto large = subsets_of_size(n - k);
    const std::size_t total = small.size() + large.size();

    auto label_of = [n](unsigned mask) {
        std::string s = "{";
        bool first = true;
        for (unsigned b = 0; b < n; ++b) {
            if (mask & (1u << b)) {
                if (!first) {
                    s += ",";
                }
                s += std::to_string(b + 1);
                first = false;
            }
        }
        return s + "}";
    };

    LabeledGraph g;
    g.adjacency = ComplexMatrix(total, total);
    for (unsigned mask : small) {
        g.labels.push_back(label_of(mask));
    }
    for (unsigned mask : large) {
        g.labels.push_back(label_of(mask));
    }
    for (std::size_t i = 0; i < small.size(); ++i) {
        for (std::size_t j = 0; j < large.size(); ++j) {
            if ((small[i] & large[j]) == small[i]) { // containment
                const std::size_t a = i;
                const std::size_t b = small.size() + j;
                g.adjacency(a, b) = 1.0;
                g.adjacency(b, a) = 1.0;
            }
        }
    }
    return g;
}

HermitianOperator graph_hamiltonian(const ComplexMatrix& adjacency, unsigned degree) {
    if (!adjacency.square()) {
        throw std::invalid_argument("graph_hamiltonian: adjacency must be square");
    }
    const std::size_t n = adjacency.rows();
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            row += adjacency(i, j).real();
        }
        if (std::abs(row - static_cast<double>(degree)) > 1e-12) {
            std::ostringstream msg;
            msg << "graph_hamiltonian: vertex " << i << " has degree " << row
                << ", expected " << degree;
            throw std::invalid_argument(msg.str());
        }
    }
    ComplexMatrix h = ComplexMatrix::identity(n).scaled(static_cast<double>(degree)) -
                      adjacency;
    return HermitianOperator(std::move(h));
}

ComplexMatrix adjacency_from_edge_list(std::istream& in) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::size_t max_vertex = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream ls(line);
        std::size_t u = 0;
        std::size_t v = 0;
        if (!(ls >> u >> v)) {
            throw std::invalid_argument("adjacency_from_edge_list: malformed line: " + line);
        }
        edges.emplace_back(u, v);
        max_vertex = std::max({max_vertex, u, v});
    }
    if (edges.empty()) {
        throw std::invalid_argument("adjacency_from_edge_list: no edges");
    }
    ComplexMatrix a(max_vertex + 1, max_vertex + 1);
    for (const auto& [u, v] : edges) {
        a(u, v) = 1.0;
        a(v, u) = 1.0;
    }
    return a;
}

std::size_t JumpPath::state_at(double s) const {
    if (!alive_at(s)) {
        throw std::domain_error("JumpPath::state_at: path already killed");
    }
    std::size_t idx = 0;
    while (idx < jump_times.size() && jump_times[idx] <= s) {
        ++idx;
    }
    return states[idx];
}

MarkovStructure markov_structure(const EvolutionSpec& spec) {
    if (spec.mode != ClockMode::dissipative) {
        throw std::invalid_argument("markov_structure: requires a dissipative spec");
    }
    const std::size_t n = spec.states();
    const ComplexMatrix& h = spec.generator;
    MarkovStructure st;
    st.exit_rate.assign(n, 0.0);
    st.kill_rate.assign(n, 0.0);
    st.jump_rate.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        double col_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const cplx a = -h(i, j); // generator of the forward equation
            if (std::abs(a.imag()) > 1e-12) {
                throw std::invalid_argument("markov_structure: generator must be real");
            }
            col_sum += a.real();
            if (i != j) {
                if (a.real() < -1e-12) {
                    std::ostringstream msg;
                    msg << "markov_structure: negative rate " << a.real() << " for "
                        << j << " -> " << i;
                    throw std::invalid_argument(msg.str());
                }
                st.jump_rate[j][i] = std::max(0.0, a.real());
            }
        }
        if (col_sum > 1e-12) {
            std::ostringstream msg;
            msg << "markov_structure: column " << j << " of the generator sums to "
                << col_sum << " > 0 (mass creation)";
            throw std::invalid_argument(msg.str());
        }
        st.kill_rate[j] = col_sum < -1e-12 ? -col_sum : 0.0;
        double total = st.kill_rate[j];
        for (std::size_t i = 0; i < n; ++i) {
            total += st.jump_rate[j][i];
        }
        st.exit_rate[j] = total;
    }
    return st;
}

JumpPath sample_jump_path(const MarkovStructure& structure, std::size_t start, double t,
                          RngStream& rng) {
    const std::size_t n = structure.exit_rate.size();
    if (start >= n) {
        throw std::out_of_range("sample_jump_path: start state out of range");
    }
    JumpPath path;
    path.states.push_back(start);
    double now = 0.0;
    std::size_t state = start;
    std::vector<double> weights(n + 1, 0.0);
    while (true) {
        const double rate = structure.exit_rate[state];
        if (rate <= 0.0) {
            break; // absorbing state
        }
        now += rng.exponential(rate);
        if (now > t) {
            break;
        }
        for (std::size_t i = 0; i < n; ++i) {
            weights[i] = structure.jump_rate[state][i];
        }
        weights[n] = structure.kill_rate[state];
        const std::size_t pick = rng.choose(weights);
        if (pick == n) {
            path.killing_time = now;
            break;
        }
        path.jump_times.push_back(now);
        path.states.push_back(pick);
        state = pick;
    }
    return path;
}

JumpPath sample_jump_path(const EvolutionSpec& spec, std::size_t start, double t,
                          RngStream& rng) {
    return sample_jump_path(markov_structure(spec), start, t, rng);
}

bool path_in_event(const JumpPath& path, const CylinderEvent& event) {
    for (std::size_t i = 0; i < event.times.size(); ++i) {
        if (!path.alive_at(event.times[i])) {
            return false;
        }
        const std::size_t s = path.state_at(event.times[i]);
        const auto& allowed = event.subsets[i];
        if (std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
            return false;
        }
    }
    return true;
}

WalkComparison empirical_vs_exact(const EvolutionSpec& spec, const CylinderEvent& event,
                                  std::size_t start, double t, std::size_t paths,
                                  std::uint64_t seed, unsigned threads) {
    if (paths < 100) {
        throw std::invalid_argument("empirical_vs_exact: need at least 100 paths");
    }
    const std::size_t n = spec.states();
    const MarkovStructure structure = markov_structure(spec);

    const ComplexMatrix m = sq_measure(event, spec, t);
    WalkComparison out;
    out.paths = paths;
    out.exact.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.exact[i] = m(i, start).real();
    }

    const unsigned workers = std::max(1u, threads);
    std::vector<std::vector<std::size_t>> counts(workers, std::vector<std::size_t>(n, 0));
    auto work = [&](unsigned w) {
        for (std::size_t p = w; p < paths; p += workers) {
            RngStream rng(seed, p);
            const JumpPath path = sample_jump_path(structure, start, t, rng);
            if (!path.alive_at(t)) {
                continue;
            }
            if (!path_in_event(path, event)) {
                continue;
            }
            counts[w][path.state_at(t)] += 1;
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work, w);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    out.empirical.assign(n, 0.0);
    out.std_error.assign(n, 0.0);
    const double dn = static_cast<double>(paths);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t c = 0;
        for (unsigned w = 0; w < workers; ++w) {
            c += counts[w][i];
        }
        const double p = static_cast<double>(c) / dn;
        out.empirical[i] = p;
        out.std_error[i] = std::sqrt(std::max(0.0, p * (1.0 - p) / dn));
    }
    return out;
}

} // namespace pathlab
