#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "pathlab/linops.hpp"
#include "pathlab/rng.hpp"

namespace pathlab {

/// Semigroup clock: quantum S(t) = exp(-itH), dissipative S(t) = exp(-tH).
enum class ClockMode { quantum, dissipative };

/// Generator H together with the clock mode. Quantum mode requires H
/// Hermitian (validated on construction); Markov structure of the
/// dissipative mode is validated when jump sampling is requested.
struct EvolutionSpec {
    ComplexMatrix generator;
    ClockMode mode = ClockMode::dissipative;

    std::size_t states() const { return generator.rows(); }
};

EvolutionSpec quantum_evolution(ComplexMatrix hamiltonian);
EvolutionSpec dissipative_evolution(ComplexMatrix hamiltonian);

/// Wick rotation t -> -it: the quantum spec becomes the dissipative spec
/// with the same generator. Rejects dissipative input.
EvolutionSpec wick_rotate(const EvolutionSpec& spec);

/// S(t) for the spec's clock mode. Hermitian generators go through the
/// spectral route; general dissipative generators through expm_general.
ComplexMatrix evolution_operator(const EvolutionSpec& spec, double t);

/// Diagonal 0/1 projection onto the coordinates in `subset`.
/// Satisfies Q(A intersect B) = Q(A) Q(B) and Q(full) = identity.
ComplexMatrix spectral_Q(const std::vector<std::size_t>& subset, std::size_t n);

/// Path event: position constrained to `subsets[i]` at `times[i]`.
/// A subset may be explicitly empty (the impossible event).
struct CylinderEvent {
    std::vector<double> times;
    std::vector<std::vector<std::size_t>> subsets;
};

/// Operator value of the event: S(t - t_n) Q(B_n) ... Q(B_1) S(t_1).
/// The full event reproduces S(t) exactly.
ComplexMatrix sq_measure(const CylinderEvent& event, const EvolutionSpec& spec, double t);

/// Bipartite Kneser graph H(n, k): vertices are the k-subsets followed by
/// the (n-k)-subsets of {1..n}; a k-subset is joined to every (n-k)-subset
/// containing it. H(5, 2) is the Desargues graph.
struct LabeledGraph {
    ComplexMatrix adjacency;
    std::vector<std::string> labels;
};

LabeledGraph kneser_bipartite(unsigned n, unsigned k);

/// H = degree * I - A for a regular graph; throws naming the first vertex
/// whose degree differs.
HermitianOperator graph_hamiltonian(const ComplexMatrix& adjacency, unsigned degree);

/// Edge list with one "u v" pair per line, 0-indexed; blank lines and lines
/// starting with '#' are skipped.
ComplexMatrix adjacency_from_edge_list(std::istream& in);

/// Right-continuous piecewise-constant trajectory. states[0] is the initial
/// state and states[i] the state entered at jump_times[i-1].
struct JumpPath {
    std::vector<double> jump_times;
    std::vector<std::size_t> states;
    double killing_time = std::numeric_limits<double>::infinity();

    bool alive_at(double s) const { return s < killing_time; }
    /// State occupied at time s; requires alive_at(s).
    std::size_t state_at(double s) const;
};

/// Column-convention Markov data extracted from a dissipative spec:
/// A = -H generates the forward equation dp/dt = A p, jump rates j -> i sit
/// in column j, and any column deficiency becomes the killing rate.
struct MarkovStructure {
    std::vector<double> exit_rate;                // total event rate per state
    std::vector<std::vector<double>> jump_rate;   // [from][to]
    std::vector<double> kill_rate;                // deficiency routed to the cemetery
};

/// Validates dissipative Markov / sub-Markov structure with a 1e-12
/// tolerance on column sums; throws on negative rates.
MarkovStructure markov_structure(const EvolutionSpec& spec);

JumpPath sample_jump_path(const MarkovStructure& structure, std::size_t start, double t,
                          RngStream& rng);
JumpPath sample_jump_path(const EvolutionSpec& spec, std::size_t start, double t,
                          RngStream& rng);

/// Does the path satisfy the event (alive and inside every subset)?
bool path_in_event(const JumpPath& path, const CylinderEvent& event);

struct WalkComparison {
    std::vector<double> empirical;  // estimated P(E and X_t = j)
    std::vector<double> exact;      // matrix element of sq_measure
    std::vector<double> std_error;  // binomial standard error per state
    std::size_t paths = 0;
};

/// Monte-Carlo law of the killed walk against the operator measure, using
/// one counter-based stream per path index so the ensemble is reproducible
/// and order independent. Requires at least 100 paths.
WalkComparison empirical_vs_exact(const EvolutionSpec& spec, const CylinderEvent& event,
                                  std::size_t start, double t, std::size_t paths,
                                  std::uint64_t seed, unsigned threads = 1);

} // namespace pathlab
