#include "pathlab/timeslice.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "pathlab/fft.hpp"

namespace pathlab {

Grid1D::Grid1D(double x_min_, double x_max_, std::size_t points_)
    : x_min(x_min_), x_max(x_max_), points(points_) {
    if (!(x_min < x_max)) {
        throw std::invalid_argument("Grid1D: x_min must be less than x_max");
    }
    if (points == 0 || (points & (points - 1)) != 0) {
        throw std::invalid_argument("Grid1D: point count must be a power of two");
    }
}

GridWavefunction::GridWavefunction(Grid1D g, std::vector<cplx> v)
    : grid(g), values(std::move(v)) {
    if (values.size() != grid.points) {
        throw std::invalid_argument("GridWavefunction: value count does not match grid");
    }
}

double GridWavefunction::norm() const {
    double s = 0.0;
    for (const auto& v : values) {
        s += std::norm(v);
    }
    return std::sqrt(grid.mesh() * s);
}

GridWavefunction GridWavefunction::normalized() const {
    const double n = norm();
    if (n == 0.0) {
        throw std::domain_error("GridWavefunction::normalized: zero state");
    }
    std::vector<cplx> out(values);
    for (auto& v : out) {
        v /= n;
    }
    return GridWavefunction(grid, std::move(out));
}

cplx inner(const GridWavefunction& u, const GridWavefunction& v) {
    if (u.grid.points != v.grid.points) {
        throw std::invalid_argument("inner: grid mismatch");
    }
    cplx acc(0.0, 0.0);
    for (std::size_t j = 0; j < u.values.size(); ++j) {
        acc += u.values[j] * std::conj(v.values[j]);
    }
    return acc * u.grid.mesh();
}

GridWavefunction gaussian_state(const Grid1D& grid, double center, double width) {
    std::vector<cplx> v(grid.points);
    for (std::size_t j = 0; j < grid.points; ++j) {
        const double d = (grid.x(j) - center) / width;
        v[j] = std::exp(-0.5 * d * d);
    }
    return GridWavefunction(grid, std::move(v)).normalized();
}

void SliceParams::validate() const {
    if (!(mass > 0.0) || !(hbar > 0.0)) {
        throw std::invalid_argument("SliceParams: mass and hbar must be positive");
    }
    if (!(total_time >= 0.0)) {
        throw std::invalid_argument("SliceParams: total_time must be nonnegative");
    }
    if (slices < 1) {
        throw std::invalid_argument("SliceParams: slice count must be at least 1");
    }
    if (lambda == cplx(0.0, 0.0) || lambda.real() < 0.0) {
        throw std::invalid_argument("SliceParams: lambda must satisfy Re >= 0 and lambda != 0");
    }
}

SliceParams quantum_params(double mass, double hbar, double total_time, std::size_t slices) {
    SliceParams p;
    p.mass = mass;
    p.hbar = hbar;
    p.total_time = total_time;
    p.slices = slices;
    p.lambda = cplx(0.0, -mass / hbar);
    p.validate();
    return p;
}

Potential Potential::zero(const Grid1D& grid) {
    Potential v;
    v.values.assign(grid.points, 0.0);
    return v;
}

Potential Potential::tabulate(const Grid1D& grid, const std::function<double(double)>& f) {
    Potential v;
    v.values.resize(grid.points);
    for (std::size_t j = 0; j < grid.points; ++j) {
        v.values[j] = f(grid.x(j));
        if (!std::isfinite(v.values[j])) {
            throw std::invalid_argument("Potential::tabulate: non-finite value");
        }
    }
    return v;
}

cplx free_kernel(cplx lambda, double t, double x, double y, unsigned dimension) {
    if (lambda == cplx(0.0, 0.0) || lambda.real() < 0.0) {
        throw std::domain_error("free_kernel: lambda must satisfy Re >= 0 and lambda != 0");
    }
    if (!(t > 0.0)) {
        throw std::domain_error("free_kernel: time must be positive");
    }
    const double d2 = (x - y) * (x - y);
    const cplx prefactor =
        std::pow(lambda / (2.0 * std::numbers::pi * t), 0.5 * static_cast<double>(dimension));
    return prefactor * std::exp(-lambda * d2 / (2.0 * t));
}

GridWavefunction free_evolve_spectral(const GridWavefunction& psi, double s, cplx lambda) {
    if (lambda == cplx(0.0, 0.0) || lambda.real() < 0.0) {
        throw std::domain_error("free_evolve_spectral: invalid lambda");
    }
    if (s < 0.0) {
        throw std::domain_error("free_evolve_spectral: negative duration");
    }
    if (s == 0.0) {
        return psi;
    }
    const std::size_t n = psi.grid.points;
    const double dk = 2.0 * std::numbers::pi / psi.grid.length();
    std::vector<cplx> modes(psi.values);
    fft_inplace(modes, false);
    const cplx half_inv_lambda = 0.5 / lambda;
    for (std::size_t m = 0; m < n; ++m) {
        const double k = dk * static_cast<double>(fft_signed_index(m, n));
        modes[m] *= std::exp(-s * k * k * half_inv_lambda);
    }
    fft_inplace(modes, true);
    return GridWavefunction(psi.grid, std::move(modes));
}

ComplexMatrix timeslice_matrix(const Potential& v, const SliceParams& p, const Grid1D& g) {
    p.validate();
    if (v.values.size() != g.points) {
        throw std::invalid_argument("timeslice_matrix: potential does not match grid");
    }
    if (p.lambda.real() == 0.0 && g.points > 128) {
        throw std::invalid_argument(
            "timeslice_matrix: oscillatory quadrature (Re lambda = 0) is a diagnostic "
            "restricted to grids of at most 128 points");
    }
    if (!(p.total_time > 0.0)) {
        throw std::invalid_argument("timeslice_matrix: total_time must be positive");
    }
    const std::size_t n = g.points;
    const double dt = p.total_time / static_cast<double>(p.slices);
    const double h = g.mesh();

    ComplexMatrix kernel(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            kernel(i, j) = free_kernel(p.lambda, dt, g.x(i), g.x(j), 1);
        }
    }
    std::vector<cplx> phase(n);
    for (std::size_t i = 0; i < n; ++i) {
        phase[i] = std::exp(cplx(0.0, -dt * v.values[i] / p.hbar));
    }
    ComplexMatrix step(kernel);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            step(i, j) = phase[i] * kernel(i, j);
        }
    }

    ComplexMatrix result(step);
    for (std::size_t s = 1; s < p.slices; ++s) {
        result = result * step.scaled(h);
        if (!result.all_finite()) {
            std::ostringstream msg;
            msg << "timeslice_matrix: non-finite product at slice " << s + 1 << " of "
                << p.slices;
            throw std::runtime_error(msg.str());
        }
    }
    return result;
}

GridWavefunction split_step_evolve(const GridWavefunction& psi, const Potential& v,
                                   const SliceParams& p) {
    p.validate();
    if (p.lambda.real() != 0.0) {
        throw std::invalid_argument("split_step_evolve: quantum case (Re lambda = 0) only");
    }
    if (v.values.size() != psi.grid.points) {
        throw std::invalid_argument("split_step_evolve: potential does not match grid");
    }
    const std::size_t n = psi.grid.points;
    const double dt = p.total_time / static_cast<double>(p.slices);
    const double dk = 2.0 * std::numbers::pi / psi.grid.length();

    std::vector<cplx> kinetic(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double k = dk * static_cast<double>(fft_signed_index(m, n));
        kinetic[m] = std::exp(cplx(0.0, -dt * p.hbar * k * k / (2.0 * p.mass)));
    }
    std::vector<cplx> phase(n);
    for (std::size_t j = 0; j < n; ++j) {
        phase[j] = std::exp(cplx(0.0, -dt * v.values[j] / p.hbar));
    }

    std::vector<cplx> state(psi.values);
    for (std::size_t s = 0; s < p.slices; ++s) {
        fft_inplace(state, false);
        for (std::size_t m = 0; m < n; ++m) {
            state[m] *= kinetic[m];
        }
        fft_inplace(state, true);
        for (std::size_t j = 0; j < n; ++j) {
            state[j] *= phase[j];
        }
    }
    return GridWavefunction(psi.grid, std::move(state));
}

HermitianOperator discretized_hamiltonian(const Potential& v, const Grid1D& g, double mass,
                                          double hbar) {
    if (v.values.size() != g.points) {
        throw std::invalid_argument("discretized_hamiltonian: potential does not match grid");
    }
    const std::size_t n = g.points;
    const double dk = 2.0 * std::numbers::pi / g.length();
    std::vector<double> multiplier(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double k = dk * static_cast<double>(fft_signed_index(m, n));
        multiplier[m] = hbar * k * k / (2.0 * mass);
    }
    // Kinetic block F^{-1} diag(multiplier) F is a real circulant: entry (j, l)
    // depends only on (j - l) mod n through a cosine sum.
    std::vector<double> stencil(n, 0.0);
    for (std::size_t d = 0; d < n; ++d) {
        double acc = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            acc += multiplier[m] *
                   std::cos(2.0 * std::numbers::pi * static_cast<double>(m) *
                            static_cast<double>(d) / static_cast<double>(n));
        }
        stencil[d] = acc / static_cast<double>(n);
    }
    ComplexMatrix h(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t l = 0; l < n; ++l) {
            h(j, l) = stencil[(j + n - l) % n];
        }
        h(j, j) += v.values[j] / hbar;
    }
    return HermitianOperator(std::move(h));
}

ComplexMatrix cylinder_function_integral(std::span<const std::vector<cplx>> fs,
                                         std::span<const double> times,
                                         const SliceParams& p, const Grid1D& g) {
    p.validate();
    if (fs.size() != times.size()) {
        throw std::invalid_argument("cylinder_function_integral: times/functions mismatch");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0.0 || times[i] > p.total_time) {
            throw std::invalid_argument("cylinder_function_integral: time outside [0, t]");
        }
        if (i > 0 && !(times[i - 1] < times[i])) {
            throw std::invalid_argument("cylinder_function_integral: times must be strictly increasing");
        }
        if (fs[i].size() != g.points) {
            throw std::invalid_argument("cylinder_function_integral: function does not match grid");
        }
    }
    const std::size_t n = g.points;
    const cplx lambda(0.0, -p.mass / p.hbar);

    ComplexMatrix out(n, n);
    std::vector<cplx> col(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(col.begin(), col.end(), cplx(0.0, 0.0));
        col[j] = 1.0;
        GridWavefunction state(g, col);
        double prev = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            state = free_evolve_spectral(state, times[i] - prev, lambda);
            for (std::size_t x = 0; x < n; ++x) {
                state.values[x] *= fs[i][x];
            }
            prev = times[i];
        }
        state = free_evolve_spectral(state, p.total_time - prev, lambda);
        for (std::size_t i = 0; i < n; ++i) {
            out(i, j) = state.values[i];
        }
    }
    return out;
}

} // namespace pathlab
