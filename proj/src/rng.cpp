#include "pathlab/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pathlab {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer; full-period bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(mix64(seed + kGolden) ^ mix64(stream * 0xd1342543de82ef95ULL + kGolden))) {}

std::uint64_t RngStream::next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

double RngStream::uniform() {
    // 53 significant bits, shifted into (0,1) so log() is always finite.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

double RngStream::exponential(double rate) {
    if (!(rate > 0.0)) {
        throw std::invalid_argument("RngStream::exponential: rate must be positive");
    }
    return -std::log(uniform()) / rate;
}

std::size_t RngStream::choose(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) {
            throw std::invalid_argument("RngStream::choose: negative weight");
        }
        total += w;
    }
    if (!(total > 0.0)) {
        throw std::invalid_argument("RngStream::choose: weights sum to zero");
    }
    const double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        acc += weights[i];
        if (u <= acc) {
            return i;
        }
    }
    return weights.size() - 1;
}

} // namespace pathlab
