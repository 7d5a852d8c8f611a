#include "pathlab/wick.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "pathlab/fft.hpp"

namespace pathlab {

SpectralGrid::SpectralGrid(double period_, std::size_t modes_)
    : period(period_), modes(modes_) {
    if (!(period > 0.0)) {
        throw std::invalid_argument("SpectralGrid: period must be positive");
    }
    if (modes == 0 || (modes & (modes - 1)) != 0) {
        throw std::invalid_argument("SpectralGrid: mode count must be a power of two");
    }
}

double SpectralGrid::frequency(std::size_t m) const {
    return 2.0 * std::numbers::pi * static_cast<double>(fft_signed_index(m, modes)) / period;
}

double SpectralGrid::omega(std::size_t m) const {
    const double k = frequency(m);
    return std::sqrt(1.0 + k * k);
}

TestFunction TestFunction::tabulate(const SpectralGrid& grid, double (*f)(double)) {
    TestFunction t;
    t.values.resize(grid.modes);
    for (std::size_t j = 0; j < grid.modes; ++j) {
        t.values[j] = f(grid.x(j));
    }
    return t;
}

TestFunction TestFunction::unit_box(const SpectralGrid& grid, double center, double width) {
    if (!(width > 0.0)) {
        throw std::invalid_argument("TestFunction::unit_box: width must be positive");
    }
    const double h = grid.mesh();
    const double lo = center - 0.5 * width;
    const double hi = center + 0.5 * width;
    TestFunction t;
    t.values.assign(grid.modes, 0.0);
    for (std::size_t j = 0; j < grid.modes; ++j) {
        const double cell_lo = grid.x(j) - 0.5 * h;
        const double cell_hi = grid.x(j) + 0.5 * h;
        const double overlap = std::max(0.0, std::min(cell_hi, hi) - std::max(cell_lo, lo));
        t.values[j] = overlap / (h * width);
    }
    return t;
}

std::vector<cplx> spectral_coefficients(const SpectralGrid& grid,
                                        const std::vector<double>& f) {
    if (f.size() != grid.modes) {
        throw std::invalid_argument("spectral_coefficients: size mismatch");
    }
    std::vector<cplx> modes(grid.modes);
    for (std::size_t j = 0; j < grid.modes; ++j) {
        modes[j] = f[j];
    }
    fft_inplace(modes, false);
    const double scale = std::sqrt(grid.mesh() / static_cast<double>(grid.modes));
    for (auto& m : modes) {
        m *= scale;
    }
    return modes;
}

double pair_field(const SpectralGrid& grid, const TestFunction& f, const FieldSample& xi) {
    if (f.values.size() != grid.modes || xi.values.size() != grid.modes) {
        throw std::invalid_argument("pair_field: size mismatch");
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < grid.modes; ++j) {
        acc += f.values[j] * xi.values[j];
    }
    return acc * grid.mesh();
}

double c_of_f(const SpectralGrid& grid, const TestFunction& f) {
    const auto fk = spectral_coefficients(grid, f.values);
    double acc = 0.0;
    for (std::size_t m = 0; m < grid.modes; ++m) {
        acc += std::norm(fk[m]) / grid.omega(m);
    }
    return std::sqrt(0.5 * acc);
}

double hermite_monic(unsigned n, double x) {
    if (n > 30) {
        throw std::invalid_argument("hermite_monic: degree limited to 30");
    }
    if (n == 0) {
        return 1.0;
    }
    double prev = 1.0;
    double cur = x;
    for (unsigned k = 1; k < n; ++k) {
        const double next = x * cur - static_cast<double>(k) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

namespace {

// Draw the spectral amplitudes of a stationary real field: variance
// 1/(2 w_k) per mode, conjugate symmetry across +-k, zero mode and Nyquist
// mode real. Draw order is fixed for reproducibility.
std::vector<cplx> draw_modes(const SpectralGrid& grid, RngStream& rng) {
    const std::size_t n = grid.modes;
    std::vector<cplx> modes(n, cplx(0.0, 0.0));
    modes[0] = rng.normal() * std::sqrt(0.5 / grid.omega(0));
    for (std::size_t m = 1; m < n / 2; ++m) {
        const double sd = std::sqrt(0.25 / grid.omega(m));
        const double re = rng.normal() * sd;
        const double im = rng.normal() * sd;
        modes[m] = cplx(re, im);
        modes[n - m] = cplx(re, -im);
    }
    modes[n / 2] = rng.normal() * std::sqrt(0.5 / grid.omega(n / 2));
    return modes;
}

FieldSample modes_to_sample(const SpectralGrid& grid, std::vector<cplx> modes) {
    fft_inplace(modes, true);
    const double scale = std::sqrt(static_cast<double>(grid.modes) / grid.mesh());
    FieldSample out;
    out.values.resize(grid.modes);
    for (std::size_t j = 0; j < grid.modes; ++j) {
        out.values[j] = modes[j].real() * scale;
    }
    return out;
}

} // namespace

FieldSample sample_sharp_time(const SpectralGrid& grid, RngStream& rng) {
    return modes_to_sample(grid, draw_modes(grid, rng));
}

double ou_covariance(const SpectralGrid& grid, const TestFunction& f, const TestFunction& g,
                     double s, double t) {
    const auto fk = spectral_coefficients(grid, f.values);
    const auto gk = spectral_coefficients(grid, g.values);
    const double gap = std::abs(t - s);
    cplx acc(0.0, 0.0);
    for (std::size_t m = 0; m < grid.modes; ++m) {
        const double w = grid.omega(m);
        acc += fk[m] * std::conj(gk[m]) * std::exp(-gap * w) / w;
    }
    return 0.5 * acc.real();
}

std::vector<FieldSample> ou_sample_trajectory(const SpectralGrid& grid,
                                              const std::vector<double>& times,
                                              RngStream& rng) {
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (times[i] < times[i - 1]) {
            throw std::invalid_argument("ou_sample_trajectory: times must be nondecreasing");
        }
    }
    std::vector<FieldSample> out;
    out.reserve(times.size());
    if (times.empty()) {
        return out;
    }
    const std::size_t n = grid.modes;
    std::vector<cplx> modes = draw_modes(grid, rng);
    out.push_back(modes_to_sample(grid, modes));
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double dt = times[i] - times[i - 1];
        const std::vector<cplx> fresh = draw_modes(grid, rng);
        for (std::size_t m = 0; m < n; ++m) {
            const double rho = std::exp(-dt * grid.omega(m));
            modes[m] = rho * modes[m] + std::sqrt(1.0 - rho * rho) * fresh[m];
        }
        out.push_back(modes_to_sample(grid, modes));
    }
    return out;
}

double wick_eval(const SpectralGrid& grid, const TestFunction& f, const FieldSample& xi,
                 unsigned n) {
    const double c = c_of_f(grid, f);
    if (!(c > 0.0)) {
        throw std::domain_error("wick_eval: c(f) must be positive");
    }
    const double u = pair_field(grid, f, xi);
    return std::pow(c, static_cast<double>(n)) * hermite_monic(n, u / c);
}

DivergenceScan delta_divergence_scan(const SpectralGrid& grid,
                                     const std::vector<double>& widths) {
    if (widths.empty()) {
        throw std::invalid_argument("delta_divergence_scan: empty width list");
    }
    DivergenceScan scan;
    for (double w : widths) {
        if (w < 4.0 * grid.mesh()) {
            std::ostringstream msg;
            msg << "delta_divergence_scan: width " << w << " spans fewer than 4 mesh cells of "
                << grid.mesh();
            throw std::invalid_argument(msg.str());
        }
        const TestFunction f = TestFunction::unit_box(grid, 0.0, w);
        const double c = c_of_f(grid, f);
        scan.width_variance.emplace_back(w, c * c);
    }
    // Least-squares slope of log Var against log w.
    const std::size_t n = scan.width_variance.size();
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& [w, v] : scan.width_variance) {
        const double lx = std::log(w);
        const double ly = std::log(v);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double dn = static_cast<double>(n);
    scan.fitted_slope = n > 1 ? (dn * sxy - sx * sy) / (dn * sxx - sx * sx) : 0.0;
    return scan;
}

} // namespace pathlab
