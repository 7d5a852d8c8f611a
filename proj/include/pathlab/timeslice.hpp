#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "pathlab/linops.hpp"

namespace pathlab {

/// Uniform periodic grid on [x_min, x_max) with a power-of-two point count.
struct Grid1D {
    double x_min;
    double x_max;
    std::size_t points;

    Grid1D(double x_min, double x_max, std::size_t points);

    double mesh() const { return (x_max - x_min) / static_cast<double>(points); }
    double x(std::size_t j) const { return x_min + static_cast<double>(j) * mesh(); }
    double length() const { return x_max - x_min; }
};

/// Complex state sampled on a Grid1D.
struct GridWavefunction {
    Grid1D grid;
    std::vector<cplx> values;

    GridWavefunction(Grid1D g, std::vector<cplx> v);

    /// l2 norm with mesh weight: sqrt(h * sum |psi_j|^2).
    double norm() const;
    GridWavefunction normalized() const;
};

/// Mesh-weighted inner product, conjugate-linear in the second argument:
/// h * sum_j u_j * conj(v_j).
cplx inner(const GridWavefunction& u, const GridWavefunction& v);

/// Gaussian exp(-(x-center)^2 / (2 width^2)) normalised to unit l2(h) norm.
GridWavefunction gaussian_state(const Grid1D& grid, double center, double width);

/// Evolution parameters for the sliced propagator. The mass scale lambda
/// must satisfy Re lambda >= 0, lambda != 0; the quantum case corresponds
/// to lambda = -i m / hbar.
struct SliceParams {
    double mass = 1.0;
    double hbar = 1.0;
    double total_time = 1.0;
    std::size_t slices = 1;
    cplx lambda{0.0, -1.0};

    void validate() const;
};

/// Quantum parameter set with lambda = -i m / hbar filled in.
SliceParams quantum_params(double mass, double hbar, double total_time, std::size_t slices);

/// Real-valued potential tabulated on a grid.
struct Potential {
    std::vector<double> values;

    static Potential zero(const Grid1D& grid);
    static Potential tabulate(const Grid1D& grid, const std::function<double(double)>& f);
};

/// Scaled heat/Schrodinger kernel (lambda/(2 pi t))^{d/2} exp(-lambda |x-y|^2 / (2t)),
/// principal branch for the complex power. Requires Re lambda >= 0, lambda != 0, t > 0.
cplx free_kernel(cplx lambda, double t, double x, double y, unsigned dimension);

/// Mass-scaled free evolution applied spectrally on the periodic grid:
/// multiplies Fourier mode k by exp(-s k^2 / (2 lambda)). Exact for every
/// slice count; the quantum case Re lambda = 0 is unitary.
GridWavefunction free_evolve_spectral(const GridWavefunction& psi, double s, cplx lambda);

/// Sliced propagator matrix: the chained product of free kernels over n equal
/// time slices with potential phase exp(-i dt V(x_j) / hbar) attached to the
/// endpoint of each slice, intermediate integrals realised as mesh-weighted
/// sums. Entry (i, j) is the kernel density from grid point j to grid point i.
/// With Re lambda = 0 the quadrature is oscillatory and the routine is a
/// diagnostic restricted to grids of at most 128 points.
ComplexMatrix timeslice_matrix(const Potential& v, const SliceParams& p, const Grid1D& g);

/// Split-step evolution: n alternating factors of exact spectral free flight
/// and the diagonal potential phase (free flight first within each slice).
/// Quantum case only (Re lambda = 0). Preserves the l2(h) norm to 1e-12.
GridWavefunction split_step_evolve(const GridWavefunction& psi, const Potential& v,
                                   const SliceParams& p);

/// Operator product  exp(-i(t-t_n)H0) Q(f_n) ... Q(f_1) exp(-i t_1 H0)
/// as a dense matrix, with free factors applied spectrally and Q(f) the
/// diagonal multiplication by the bounded grid function f.
/// Times must be sorted with 0 <= t_1 < ... < t_n <= p.total_time.
ComplexMatrix cylinder_function_integral(std::span<const std::vector<cplx>> fs,
                                         std::span<const double> times,
                                         const SliceParams& p, const Grid1D& g);

/// Generator of the split-step limit on the grid: the spectral kinetic term
/// hbar k^2 / (2m) plus the diagonal potential V / hbar. The unitary
/// exp(-it A) of this Hermitian matrix is the n -> infinity limit of
/// split_step_evolve and serves as the eigendecomposition reference.
HermitianOperator discretized_hamiltonian(const Potential& v, const Grid1D& g, double mass,
                                          double hbar);

} // namespace pathlab
