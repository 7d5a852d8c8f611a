#pragma once

#include <complex>
#include <vector>

#include "pathlab/rng.hpp"

namespace pathlab {

using cplx = std::complex<double>;

/// Periodic spectral truncation of the line: period P, a power-of-two mode
/// count, spatial points x_j = -P/2 + j h, and dispersion w_k = sqrt(1 + k^2).
struct SpectralGrid {
    double period;
    std::size_t modes;

    SpectralGrid(double period, std::size_t modes);

    double mesh() const { return period / static_cast<double>(modes); }
    double x(std::size_t j) const { return -0.5 * period + static_cast<double>(j) * mesh(); }
    double frequency(std::size_t m) const; // signed FFT frequency 2 pi m~ / P
    double omega(std::size_t m) const;     // sqrt(1 + k^2) >= 1
};

/// Real test function sampled on the spatial grid.
struct TestFunction {
    std::vector<double> values;

    static TestFunction tabulate(const SpectralGrid& grid, double (*f)(double));
    /// Unit-mass box of the given width centred at `center`, built from the
    /// exact cell averages of the indicator so the mass is 1 on the grid.
    static TestFunction unit_box(const SpectralGrid& grid, double center, double width);
};

/// One sharp-time field configuration on the spatial grid.
struct FieldSample {
    std::vector<double> values;
};

/// Spectral coefficients normalised so Parseval holds against the
/// mesh-weighted spatial inner product.
std::vector<cplx> spectral_coefficients(const SpectralGrid& grid,
                                        const std::vector<double>& f);

/// Mesh-weighted pairing h * sum_j f_j xi_j.
double pair_field(const SpectralGrid& grid, const TestFunction& f, const FieldSample& xi);

/// Sharp-time covariance norm c(f) = (1/2 sum_k |f_k|^2 / w_k)^{1/2}.
double c_of_f(const SpectralGrid& grid, const TestFunction& f);

/// Monic (probabilists') Hermite polynomial by the recurrence
/// H_{n+1} = x H_n - n H_{n-1}. Supported for n <= 30.
double hermite_monic(unsigned n, double x);

/// Mean-zero Gaussian field with mode variances 1/(2 w_k) and the conjugate
/// symmetry of a real field; Var<f, xi> = c(f)^2.
FieldSample sample_sharp_time(const SpectralGrid& grid, RngStream& rng);

/// Ornstein-Uhlenbeck covariance 1/2 sum_k f_k conj(g_k) e^{-|t-s| w_k} / w_k.
double ou_covariance(const SpectralGrid& grid, const TestFunction& f, const TestFunction& g,
                     double s, double t);

/// Stationary mode-wise OU updates with correlation exp(-dt w_k); every
/// marginal matches sample_sharp_time in law. Times must be nondecreasing.
std::vector<FieldSample> ou_sample_trajectory(const SpectralGrid& grid,
                                              const std::vector<double>& times,
                                              RngStream& rng);

/// Wick monomial c(f)^n H_n(<f, xi> / c(f)). Throws when c(f) = 0.
double wick_eval(const SpectralGrid& grid, const TestFunction& f, const FieldSample& xi,
                 unsigned n);

struct DivergenceScan {
    std::vector<std::pair<double, double>> width_variance;
    double fitted_slope = 0.0; // least-squares slope of log Var against log w
};

/// Sharp-time variance of unit-mass boxes over a decreasing width list;
/// each width must span at least 4 mesh cells.
DivergenceScan delta_divergence_scan(const SpectralGrid& grid,
                                     const std::vector<double>& widths);

} // namespace pathlab
