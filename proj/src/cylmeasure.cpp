#include "pathlab/cylmeasure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace pathlab {

IntervalUnion IntervalUnion::all_reals() {
    IntervalUnion u;
    u.all_reals_ = true;
    return u;
}

IntervalUnion IntervalUnion::empty_set() {
    return IntervalUnion();
}

IntervalUnion IntervalUnion::interval(double lo, double hi) {
    return IntervalUnion(std::vector<std::pair<double, double>>{{lo, hi}});
}

IntervalUnion::IntervalUnion(std::vector<std::pair<double, double>> intervals)
    : intervals_(std::move(intervals)) {
    std::sort(intervals_.begin(), intervals_.end());
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        if (!(intervals_[i].first < intervals_[i].second)) {
            throw std::invalid_argument("IntervalUnion: intervals must have lo < hi");
        }
        if (i > 0 && intervals_[i].first < intervals_[i - 1].second) {
            throw std::invalid_argument("IntervalUnion: intervals must be disjoint");
        }
    }
}

bool IntervalUnion::contains(double x) const {
    if (all_reals_) {
        return true;
    }
    for (const auto& [lo, hi] : intervals_) {
        if (x >= lo && x < hi) {
            return true;
        }
    }
    return false;
}

void CylinderSet::validate(double horizon) const {
    if (times.size() != sets.size()) {
        throw std::invalid_argument("CylinderSet: times/sets mismatch");
    }
    if (times.size() > 3) {
        throw std::invalid_argument(
            "CylinderSet: at most 3 intermediate times are supported");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] > 0.0) || !(times[i] < horizon)) {
            throw std::invalid_argument("CylinderSet: times must lie strictly inside (0, t)");
        }
        if (i > 0 && !(times[i - 1] < times[i])) {
            throw std::invalid_argument("CylinderSet: times must be strictly increasing");
        }
    }
}

MassScale::MassScale(cplx value) : lambda(value) {
    if (lambda == cplx(0.0, 0.0) || lambda.real() < 0.0) {
        throw std::domain_error("MassScale: lambda must satisfy Re >= 0 and lambda != 0");
    }
}

namespace {

std::vector<bool> mask_of(const IntervalUnion& set, const Grid1D& grid) {
    std::vector<bool> m(grid.points);
    for (std::size_t j = 0; j < grid.points; ++j) {
        m[j] = set.contains(grid.x(j));
    }
    return m;
}

bool any_empty(const CylinderSet& event) {
    if (event.at_start.is_empty() || event.at_end.is_empty()) {
        return true;
    }
    for (const auto& s : event.sets) {
        if (s.is_empty()) {
            return true;
        }
    }
    return false;
}

// Kernel matrix with the mesh weight folded in, so repeated application
// realises the iterated integrals of the chained Gaussian.
ComplexMatrix weighted_kernel(cplx lambda, double gap, const Grid1D& g) {
    const std::size_t n = g.points;
    const double h = g.mesh();
    ComplexMatrix k(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            k(i, j) = free_kernel(lambda, gap, g.x(i), g.x(j), 1) * h;
        }
    }
    return k;
}

cplx amplitude_kernel_route(const MassScale& scale, double t, const CylinderSet& event,
                            const GridWavefunction& phi, const GridWavefunction& psi) {
    const Grid1D& g = phi.grid;
    std::vector<cplx> state(phi.values);
    const auto start_mask = mask_of(event.at_start, g);
    for (std::size_t j = 0; j < g.points; ++j) {
        if (!start_mask[j]) {
            state[j] = 0.0;
        }
    }
    double prev = 0.0;
    for (std::size_t i = 0; i < event.times.size(); ++i) {
        const ComplexMatrix k = weighted_kernel(scale.lambda, event.times[i] - prev, g);
        state = k.apply(state);
        const auto m = mask_of(event.sets[i], g);
        for (std::size_t j = 0; j < g.points; ++j) {
            if (!m[j]) {
                state[j] = 0.0;
            }
        }
        prev = event.times[i];
    }
    const ComplexMatrix k = weighted_kernel(scale.lambda, t - prev, g);
    state = k.apply(state);
    const auto end_mask = mask_of(event.at_end, g);
    cplx acc(0.0, 0.0);
    for (std::size_t j = 0; j < g.points; ++j) {
        if (end_mask[j]) {
            acc += std::conj(psi.values[j]) * state[j];
        }
    }
    return acc * g.mesh();
}

cplx amplitude_spectral_route(const MassScale& scale, double t, const CylinderSet& event,
                              const GridWavefunction& phi, const GridWavefunction& psi) {
    const Grid1D& g = phi.grid;
    GridWavefunction state(g, phi.values);
    const auto start_mask = mask_of(event.at_start, g);
    for (std::size_t j = 0; j < g.points; ++j) {
        if (!start_mask[j]) {
            state.values[j] = 0.0;
        }
    }
    double prev = 0.0;
    for (std::size_t i = 0; i < event.times.size(); ++i) {
        state = free_evolve_spectral(state, event.times[i] - prev, scale.lambda);
        const auto m = mask_of(event.sets[i], g);
        for (std::size_t j = 0; j < g.points; ++j) {
            if (!m[j]) {
                state.values[j] = 0.0;
            }
        }
        prev = event.times[i];
    }
    state = free_evolve_spectral(state, t - prev, scale.lambda);
    const auto end_mask = mask_of(event.at_end, g);
    cplx acc(0.0, 0.0);
    for (std::size_t j = 0; j < g.points; ++j) {
        if (end_mask[j]) {
            acc += std::conj(psi.values[j]) * state.values[j];
        }
    }
    return acc * g.mesh();
}

} // namespace

cplx cylinder_amplitude(const MassScale& scale, double t, const CylinderSet& event,
                        const GridWavefunction& phi, const GridWavefunction& psi) {
    if (!(t > 0.0)) {
        throw std::domain_error("cylinder_amplitude: horizon must be positive");
    }
    if (phi.grid.points != psi.grid.points) {
        throw std::invalid_argument("cylinder_amplitude: states on different grids");
    }
    event.validate(t);
    if (any_empty(event)) {
        return cplx(0.0, 0.0);
    }
    if (scale.lambda.real() == 0.0) {
        return amplitude_spectral_route(scale, t, event, phi, psi);
    }
    return amplitude_kernel_route(scale, t, event, phi, psi);
}

double variation_closed_form(const MassScale& scale, double t, std::size_t n_times,
                             const GridWavefunction& phi, const GridWavefunction& psi) {
    if (!(t > 0.0)) {
        throw std::domain_error("variation_closed_form: horizon must be positive");
    }
    if (n_times < 1) {
        throw std::invalid_argument("variation_closed_form: n_times must be at least 1");
    }
    if (phi.norm() == 0.0 || psi.norm() == 0.0) {
        return 0.0;
    }
    const double re = scale.lambda.real();
    if (re == 0.0) {
        // The blow-up dichotomy: nonzero states give infinite variation.
        return std::numeric_limits<double>::infinity();
    }
    const double ratio = std::abs(scale.lambda) / re;
    const double exponent = static_cast<double>(n_times + 1) / 2.0;
    const Grid1D& g = phi.grid;
    const double h = g.mesh();
    double overlap = 0.0;
    for (std::size_t i = 0; i < g.points; ++i) {
        const double pi_ = std::abs(psi.values[i]);
        if (pi_ == 0.0) {
            continue;
        }
        double row = 0.0;
        for (std::size_t j = 0; j < g.points; ++j) {
            const double d = g.x(i) - g.x(j);
            row += std::exp(-re * d * d / (2.0 * t)) * std::abs(phi.values[j]);
        }
        overlap += pi_ * row;
    }
    overlap *= h * h;
    return std::pow(ratio, exponent) * std::sqrt(re / (2.0 * std::numbers::pi * t)) * overlap;
}

namespace {

struct MaskedPartial {
    std::size_t lo = 0; // first grid index of the support
    std::vector<cplx> vals;
};

} // namespace

double variation_bruteforce(const MassScale& scale, double t,
                            const std::vector<double>& times,
                            const GridWavefunction& phi, const GridWavefunction& psi,
                            std::size_t cells_per_coordinate, double box_half_width,
                            std::size_t cell_budget) {
    if (!(scale.lambda.real() > 0.0)) {
        throw std::domain_error("variation_bruteforce: requires Re lambda > 0");
    }
    if (cells_per_coordinate < 1 || !(box_half_width > 0.0)) {
        throw std::invalid_argument("variation_bruteforce: need m >= 1 and positive box width");
    }
    if (times.size() > 3) {
        throw std::invalid_argument(
            "variation_bruteforce: at most 3 intermediate times are supported");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] > 0.0) || !(times[i] < t) || (i > 0 && !(times[i - 1] < times[i]))) {
            throw std::invalid_argument("variation_bruteforce: bad time list");
        }
    }
    const std::size_t coords = times.size() + 2;
    double cells = 1.0;
    for (std::size_t c = 0; c < coords; ++c) {
        cells *= static_cast<double>(cells_per_coordinate);
    }
    if (cells > static_cast<double>(cell_budget)) {
        std::ostringstream msg;
        msg << "variation_bruteforce: " << cells << " cells exceed the budget of "
            << cell_budget;
        throw std::invalid_argument(msg.str());
    }

    const Grid1D& g = phi.grid;
    const std::size_t m = cells_per_coordinate;
    const double cell_width = 2.0 * box_half_width / static_cast<double>(m);
    const double h = g.mesh();

    // Grid index range [lo, hi) of each cell under half-open membership.
    std::vector<std::pair<std::size_t, std::size_t>> ranges(m);
    for (std::size_t c = 0; c < m; ++c) {
        const double lo = -box_half_width + static_cast<double>(c) * cell_width;
        const double hi = lo + cell_width;
        std::size_t jlo = g.points;
        std::size_t jhi = 0;
        for (std::size_t j = 0; j < g.points; ++j) {
            const double x = g.x(j);
            if (x >= lo && x < hi) {
                jlo = std::min(jlo, j);
                jhi = std::max(jhi, j + 1);
            }
        }
        if (jlo >= jhi) {
            jlo = jhi = 0; // empty cell on this grid
        }
        ranges[c] = {jlo, jhi};
    }

    // Kernel matrices with mesh weight per time gap.
    std::vector<ComplexMatrix> kernels;
    double prev = 0.0;
    for (double ti : times) {
        kernels.push_back(weighted_kernel(scale.lambda, ti - prev, g));
        prev = ti;
    }
    kernels.push_back(weighted_kernel(scale.lambda, t - prev, g));

    // Level 0: phi restricted to each starting cell.
    std::vector<MaskedPartial> partials;
    partials.reserve(m);
    for (std::size_t c = 0; c < m; ++c) {
        const auto [jlo, jhi] = ranges[c];
        MaskedPartial p;
        p.lo = jlo;
        p.vals.assign(phi.values.begin() + static_cast<long>(jlo),
                      phi.values.begin() + static_cast<long>(jhi));
        partials.push_back(std::move(p));
    }

    // Chain through the intermediate times, splitting into cells at each level.
    for (std::size_t level = 0; level < times.size(); ++level) {
        const ComplexMatrix& k = kernels[level];
        std::vector<MaskedPartial> next;
        next.reserve(partials.size() * m);
        std::vector<cplx> full(g.points);
        for (const auto& p : partials) {
            for (std::size_t i = 0; i < g.points; ++i) {
                cplx acc(0.0, 0.0);
                for (std::size_t j = 0; j < p.vals.size(); ++j) {
                    acc += k(i, p.lo + j) * p.vals[j];
                }
                full[i] = acc;
            }
            for (std::size_t c = 0; c < m; ++c) {
                const auto [jlo, jhi] = ranges[c];
                MaskedPartial q;
                q.lo = jlo;
                q.vals.assign(full.begin() + static_cast<long>(jlo),
                              full.begin() + static_cast<long>(jhi));
                next.push_back(std::move(q));
            }
        }
        partials = std::move(next);
    }

    // Final hop to time t, then sum |amplitude| over the end cells.
    const ComplexMatrix& klast = kernels.back();
    double total = 0.0;
    std::vector<cplx> full(g.points);
    for (const auto& p : partials) {
        for (std::size_t i = 0; i < g.points; ++i) {
            cplx acc(0.0, 0.0);
            for (std::size_t j = 0; j < p.vals.size(); ++j) {
                acc += klast(i, p.lo + j) * p.vals[j];
            }
            full[i] = acc;
        }
        for (std::size_t c = 0; c < m; ++c) {
            const auto [jlo, jhi] = ranges[c];
            cplx amp(0.0, 0.0);
            for (std::size_t j = jlo; j < jhi; ++j) {
                amp += std::conj(psi.values[j]) * full[j];
            }
            total += std::abs(amp * h);
        }
    }
    return total;
}

double analyticity_residual(const CylinderSet& event, const GridWavefunction& phi,
                            const GridWavefunction& psi, double t, cplx contour_center,
                            double contour_radius, std::size_t nodes) {
    if (!(contour_center.real() - contour_radius > 0.0)) {
        throw std::domain_error(
            "analyticity_residual: contour disk must lie in the open right half plane");
    }
    if (nodes < 16) {
        throw std::invalid_argument("analyticity_residual: need at least 16 contour nodes");
    }
    cplx integral(0.0, 0.0);
    double max_abs = 0.0;
    const double dtheta = 2.0 * std::numbers::pi / static_cast<double>(nodes);
    for (std::size_t k = 0; k < nodes; ++k) {
        const double theta = dtheta * static_cast<double>(k);
        const cplx offset = std::polar(contour_radius, theta);
        const MassScale scale(contour_center + offset);
        const cplx value = cylinder_amplitude(scale, t, event, phi, psi);
        max_abs = std::max(max_abs, std::abs(value));
        integral += value * cplx(0.0, 1.0) * offset * dtheta;
    }
    if (max_abs == 0.0) {
        return 0.0;
    }
    return std::abs(integral) / max_abs;
}

} // namespace pathlab
