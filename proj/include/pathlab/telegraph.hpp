#pragma once

#include <functional>
#include <vector>

#include "pathlab/rng.hpp"
#include "pathlab/timeslice.hpp"

namespace pathlab {

/// Poisson switching intensity, wave speed, and time horizon.
struct KacParams {
    double intensity = 1.0; // events per unit time, >= 0
    double speed = 1.0;     // > 0
    double horizon = 1.0;   // > 0

    void validate() const;
};

/// Poisson event times in [0, horizon], increasing.
struct SwitchPath {
    std::vector<double> events;
};

/// Initial displacement; the initial time derivative is zero.
using InitialData = std::function<double(double)>;

SwitchPath sample_switch_path(const KacParams& params, RngStream& rng);

/// Integral of the +/-1 slope over [0, t]: exact piecewise-linear value of
/// the randomised clock. Always satisfies |tau| <= t.
double tau_integral(const SwitchPath& path, double t);

/// One draw of the randomised clock at the horizon.
double sample_tau(const KacParams& params, RngStream& rng);

/// d'Alembert solution of the undamped wave equation with zero initial
/// velocity: (f(x + v s) + f(x - v s)) / 2.
double dalembert(const InitialData& f, double x, double s, double v);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Monte-Carlo mean of the d'Alembert solution evaluated at the randomised
/// clock, one counter-based stream per path. Requires at least 100 paths.
McEstimate kac_expectation(const InitialData& f, double x, const KacParams& params,
                           std::size_t paths, std::uint64_t seed, unsigned threads = 1);

/// Damped wave equation  u_tt + 2a u_t = v^2 u_xx, u(0) = f, u_t(0) = 0,
/// solved with the centred second-order scheme (damping term centred in
/// time, zero-velocity Taylor start). Returns the solution at the horizon
/// on the grid. Throws if the CFL ratio v dt / dx exceeds 0.9.
std::vector<double> damped_wave_fd(const InitialData& f, const KacParams& params,
                                   const Grid1D& grid, std::size_t steps);

} // namespace pathlab
