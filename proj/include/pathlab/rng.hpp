#pragma once

#include <cstdint>
#include <vector>

namespace pathlab {

/// Counter-based random stream. Output i of stream s under seed k is a pure
/// function of (k, s, i), so ensembles keyed by path index are reproducible
/// and independent of evaluation order or thread count.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();

    /// Uniform draw in the open interval (0, 1).
    double uniform();

    /// Standard normal via Box-Muller; second value of each pair is cached.
    double normal();

    /// Exponential with the given rate (mean 1/rate). Requires rate > 0.
    double exponential(double rate);

    /// Index in [0, weights.size()) with probability proportional to weights.
    /// Weights must be nonnegative with positive sum.
    std::size_t choose(const std::vector<double>& weights);

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace pathlab
