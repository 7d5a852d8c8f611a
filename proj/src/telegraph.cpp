#include "pathlab/telegraph.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace pathlab {

void KacParams::validate() const {
    if (!(intensity >= 0.0)) {
        throw std::invalid_argument("KacParams: intensity must be nonnegative");
    }
    if (!(speed > 0.0)) {
        throw std::invalid_argument("KacParams: speed must be positive");
    }
    if (!(horizon > 0.0)) {
        throw std::invalid_argument("KacParams: horizon must be positive");
    }
}

SwitchPath sample_switch_path(const KacParams& params, RngStream& rng) {
    params.validate();
    SwitchPath path;
    if (params.intensity == 0.0) {
        return path;
    }
    double now = 0.0;
    while (true) {
        now += rng.exponential(params.intensity);
        if (now > params.horizon) {
            break;
        }
        path.events.push_back(now);
    }
    return path;
}

double tau_integral(const SwitchPath& path, double t) {
    double tau = 0.0;
    double prev = 0.0;
    double sign = 1.0;
    for (double s : path.events) {
        if (s > t) {
            break;
        }
        tau += sign * (s - prev);
        prev = s;
        sign = -sign;
    }
    tau += sign * (t - prev);
    return tau;
}

double sample_tau(const KacParams& params, RngStream& rng) {
    return tau_integral(sample_switch_path(params, rng), params.horizon);
}

double dalembert(const InitialData& f, double x, double s, double v) {
    return 0.5 * (f(x + v * s) + f(x - v * s));
}

McEstimate kac_expectation(const InitialData& f, double x, const KacParams& params,
                           std::size_t paths, std::uint64_t seed, unsigned threads) {
    params.validate();
    if (paths < 100) {
        throw std::invalid_argument("kac_expectation: need at least 100 paths");
    }
    std::vector<double> values(paths, 0.0);
    const unsigned workers = std::max(1u, threads);
    auto work = [&](unsigned w) {
        for (std::size_t p = w; p < paths; p += workers) {
            RngStream rng(seed, p);
            const double tau = sample_tau(params, rng);
            values[p] = dalembert(f, x, tau, params.speed);
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
    double mean = 0.0;
    for (double v : values) {
        mean += v;
    }
    mean /= static_cast<double>(paths);
    double var = 0.0;
    for (double v : values) {
        var += (v - mean) * (v - mean);
    }
    var /= static_cast<double>(paths - 1);
    McEstimate out;
    out.mean = mean;
    out.std_error = std::sqrt(var / static_cast<double>(paths));
    return out;
}

std::vector<double> damped_wave_fd(const InitialData& f, const KacParams& params,
                                   const Grid1D& grid, std::size_t steps) {
    params.validate();
    if (steps < 1) {
        throw std::invalid_argument("damped_wave_fd: need at least one step");
    }
    const double dx = grid.mesh();
    const double dt = params.horizon / static_cast<double>(steps);
    const double cfl = params.speed * dt / dx;
    if (cfl > 0.9) {
        std::ostringstream msg;
        msg << "damped_wave_fd: CFL ratio " << cfl << " exceeds 0.9";
        throw std::invalid_argument(msg.str());
    }
    const std::size_t n = grid.points;
    const double c2 = cfl * cfl;
    const double a_dt = params.intensity * dt;

    std::vector<double> prev(n);
    for (std::size_t j = 0; j < n; ++j) {
        prev[j] = f(grid.x(j));
    }
    auto lap = [&](const std::vector<double>& u, std::size_t j) {
        // Zero ghost values outside the domain; valid while the support
        // stays away from the boundary (finite propagation speed).
        const double left = j > 0 ? u[j - 1] : 0.0;
        const double right = j + 1 < n ? u[j + 1] : 0.0;
        return left - 2.0 * u[j] + right;
    };

    // Zero-velocity Taylor start: u^1 = u^0 + (dt^2/2) v^2 u_xx.
    std::vector<double> curr(n);
    for (std::size_t j = 0; j < n; ++j) {
        curr[j] = prev[j] + 0.5 * c2 * lap(prev, j);
    }
    std::vector<double> next(n);
    for (std::size_t step = 1; step < steps; ++step) {
        for (std::size_t j = 0; j < n; ++j) {
            next[j] = (2.0 * curr[j] - (1.0 - a_dt) * prev[j] + c2 * lap(curr, j)) /
                      (1.0 + a_dt);
        }
        std::swap(prev, curr);
        std::swap(curr, next);
    }
    return curr;
}

} // namespace pathlab
