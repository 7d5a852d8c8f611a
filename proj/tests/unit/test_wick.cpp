#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pathlab/linops.hpp"
#include "pathlab/wick.hpp"
#include "test_helpers.hpp"

using namespace pathlab;

namespace {

double bump(double x) { return std::exp(-0.5 * x * x); }

// Gauss-Hermite nodes/weights for the standard normal weight, built from the
// Jacobi matrix of the monic recurrence (Golub-Welsch). Independent of
// hermite_monic's evaluation path.
struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};

Quadrature gauss_hermite(std::size_t n) {
    ComplexMatrix jacobi(n, n);
    for (std::size_t k = 1; k < n; ++k) {
        const double b = std::sqrt(static_cast<double>(k));
        jacobi(k - 1, k) = b;
        jacobi(k, k - 1) = b;
    }
    const auto ed = eig_hermitian(HermitianOperator(jacobi));
    Quadrature q;
    q.nodes = ed.eigenvalues;
    q.weights.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        q.weights[k] = std::norm(ed.eigenvectors(0, k));
    }
    return q;
}

TestFunction single_cosine(const SpectralGrid& grid, std::size_t mode_index) {
    // Unit Parseval norm cosine at the given positive frequency.
    TestFunction f;
    f.values.resize(grid.modes);
    const double k = grid.frequency(mode_index);
    const double amp = std::sqrt(2.0 / grid.period);
    for (std::size_t j = 0; j < grid.modes; ++j) {
        f.values[j] = amp * std::cos(k * grid.x(j));
    }
    return f;
}

} // namespace

TEST_CASE("Parseval on the spectral grid") {
    const SpectralGrid grid(32.0, 256);
    RngStream rng(2, 0);
    TestFunction f;
    f.values.resize(grid.modes);
    for (auto& v : f.values) {
        v = rng.normal();
    }
    double spatial = 0.0;
    for (double v : f.values) {
        spatial += v * v;
    }
    spatial *= grid.mesh();
    double spectral = 0.0;
    for (const auto& c : spectral_coefficients(grid, f.values)) {
        spectral += std::norm(c);
    }
    CHECK(spectral == doctest::Approx(spatial).epsilon(1e-12));
}

TEST_CASE("covariance norm closed cases") {
    const SpectralGrid grid(32.0, 512);
    TestFunction zero;
    zero.values.assign(grid.modes, 0.0);
    CHECK(c_of_f(grid, zero) == 0.0);

    const std::size_t mode = 24;
    const TestFunction f = single_cosine(grid, mode);
    CHECK(c_of_f(grid, f) ==
          doctest::Approx(std::sqrt(0.5 / grid.omega(mode))).epsilon(1e-12));
}

TEST_CASE("narrow boxes diverge logarithmically") {
    // The sharp-time kernel in one dimension is log-singular, so the
    // variance grows with nearly equal increments per width halving.
    const SpectralGrid grid(32.0, 4096);
    std::vector<double> vars;
    for (double w : {0.8, 0.4, 0.2, 0.1, 0.05}) {
        const TestFunction f = TestFunction::unit_box(grid, 0.0, w);
        const double c = c_of_f(grid, f);
        vars.push_back(c * c);
    }
    for (std::size_t i = 1; i < vars.size(); ++i) {
        CHECK(vars[i] > vars[i - 1]);
    }
    std::vector<double> increments;
    for (std::size_t i = 1; i < vars.size(); ++i) {
        increments.push_back(vars[i] - vars[i - 1]);
    }
    for (std::size_t i = 1; i < increments.size(); ++i) {
        CHECK(std::abs(increments[i] / increments[i - 1] - 1.0) < 0.10);
    }
}

TEST_CASE("monic Hermite values and recurrence table") {
    CHECK(hermite_monic(0, 3.7) == 1.0);
    CHECK(hermite_monic(1, 3.7) == 3.7);
    CHECK(hermite_monic(2, 2.0) == doctest::Approx(3.0).epsilon(1e-15)); // x^2 - 1
    // Exact integer recurrence for n <= 10 at integer arguments.
    for (long long x = -3; x <= 3; ++x) {
        long long prev = 1;
        long long cur = x;
        for (unsigned n = 1; n <= 10; ++n) {
            CHECK(hermite_monic(n, static_cast<double>(x)) == static_cast<double>(cur));
            const long long next = x * cur - static_cast<long long>(n) * prev;
            prev = cur;
            cur = next;
        }
    }
    CHECK_THROWS_AS(hermite_monic(31, 0.0), std::invalid_argument);
}

TEST_CASE("Gaussian orthogonality by 200-point quadrature") {
    const Quadrature q = gauss_hermite(200);
    double factorial = 1.0;
    for (unsigned n = 0; n <= 6; ++n) {
        if (n > 0) {
            factorial *= static_cast<double>(n);
        }
        for (unsigned m = 0; m <= n; ++m) {
            double integral = 0.0;
            for (std::size_t k = 0; k < q.nodes.size(); ++k) {
                integral += q.weights[k] * hermite_monic(m, q.nodes[k]) *
                            hermite_monic(n, q.nodes[k]);
            }
            const double expected = m == n ? factorial : 0.0;
            CHECK(std::abs(integral - expected) < 1e-10 * std::max(1.0, factorial));
        }
    }
}

TEST_CASE("sharp-time sampler matches the covariance norm") {
    const SpectralGrid grid(32.0, 256);
    const TestFunction f = TestFunction::tabulate(grid, bump);
    const double c2 = c_of_f(grid, f) * c_of_f(grid, f);
    const std::size_t n = 20000;
    std::vector<double> pairings(n);
    for (std::size_t i = 0; i < n; ++i) {
        RngStream rng(101, i);
        pairings[i] = pair_field(grid, f, sample_sharp_time(grid, rng));
    }
    const auto m = testutil::sample_moments(pairings);
    CHECK(std::abs(m.mean) <= 4.0 * m.std_error);
    std::vector<double> squares(n);
    for (std::size_t i = 0; i < n; ++i) {
        squares[i] = pairings[i] * pairings[i];
    }
    const auto s = testutil::sample_moments(squares);
    CHECK(std::abs(s.mean - c2) <= 4.0 * s.std_error);
}

TEST_CASE("distinct modes are uncorrelated") {
    const SpectralGrid grid(32.0, 256);
    const TestFunction f = single_cosine(grid, 10);
    const TestFunction g = single_cosine(grid, 25);
    const std::size_t n = 20000;
    std::vector<double> products(n);
    for (std::size_t i = 0; i < n; ++i) {
        RngStream rng(55, i);
        const FieldSample xi = sample_sharp_time(grid, rng);
        products[i] = pair_field(grid, f, xi) * pair_field(grid, g, xi);
    }
    const auto m = testutil::sample_moments(products);
    CHECK(std::abs(m.mean) <= 4.0 * m.std_error);
}

TEST_CASE("OU covariance closed cases") {
    const SpectralGrid grid(32.0, 512);
    const TestFunction f = TestFunction::tabulate(grid, bump);
    const double c2 = c_of_f(grid, f) * c_of_f(grid, f);
    CHECK(ou_covariance(grid, f, f, 0.7, 0.7) == doctest::Approx(c2).epsilon(1e-13));

    double prev = c2;
    for (double gap : {0.5, 1.0, 2.0, 4.0}) {
        const double cov = ou_covariance(grid, f, f, 0.0, gap);
        CHECK(cov < prev);
        CHECK(cov > 0.0);
        prev = cov;
    }

    const std::size_t mode = 30;
    const TestFunction single = single_cosine(grid, mode);
    const double w = grid.omega(mode);
    CHECK(ou_covariance(grid, single, single, 0.0, 1.3) ==
          doctest::Approx(0.5 / w * std::exp(-1.3 * w)).epsilon(1e-12));
}

TEST_CASE("OU trajectories") {
    const SpectralGrid grid(32.0, 256);
    const TestFunction f = TestFunction::tabulate(grid, bump);

    SUBCASE("zero time step repeats the sample") {
        RngStream rng(9, 9);
        const auto traj = ou_sample_trajectory(grid, {0.3, 0.3}, rng);
        REQUIRE(traj.size() == 2);
        for (std::size_t j = 0; j < grid.modes; ++j) {
            CHECK(traj[0].values[j] == traj[1].values[j]);
        }
    }

    SUBCASE("single-time marginal passes a two-sample KS test at the 1% level") {
        const std::size_t n = 10000;
        std::vector<double> a(n);
        std::vector<double> b(n);
        for (std::size_t i = 0; i < n; ++i) {
            RngStream rng_a(71, i);
            a[i] = pair_field(grid, f, sample_sharp_time(grid, rng_a));
            RngStream rng_b(72, i);
            b[i] = pair_field(grid, f, ou_sample_trajectory(grid, {0.0}, rng_b)[0]);
        }
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        double d = 0.0;
        std::size_t ia = 0;
        std::size_t ib = 0;
        while (ia < n && ib < n) {
            if (a[ia] <= b[ib]) {
                ++ia;
            } else {
                ++ib;
            }
            d = std::max(d, std::abs(static_cast<double>(ia) - static_cast<double>(ib)) /
                                static_cast<double>(n));
        }
        const double critical = 1.628 * std::sqrt(2.0 / static_cast<double>(n));
        CHECK(d < critical);
    }

    SUBCASE("lagged covariance and stationarity within four standard errors") {
        const std::vector<double> times = {0.0, 0.5, 1.0};
        const std::size_t n = 10000;
        std::vector<std::vector<double>> u(times.size(), std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i) {
            RngStream rng(88, i);
            const auto traj = ou_sample_trajectory(grid, times, rng);
            for (std::size_t j = 0; j < times.size(); ++j) {
                u[j][i] = pair_field(grid, f, traj[j]);
            }
        }
        // Covariance between the first and last time.
        std::vector<double> prods(n);
        for (std::size_t i = 0; i < n; ++i) {
            prods[i] = u[0][i] * u[2][i];
        }
        const auto cov = testutil::sample_moments(prods);
        CHECK(std::abs(cov.mean - ou_covariance(grid, f, f, 0.0, 1.0)) <= 4.0 * cov.std_error);

        // Mean and second moment look the same at every time along the flow.
        const double c2 = c_of_f(grid, f) * c_of_f(grid, f);
        for (std::size_t j = 0; j < times.size(); ++j) {
            const auto mj = testutil::sample_moments(u[j]);
            CHECK(std::abs(mj.mean) <= 4.0 * mj.std_error);
            std::vector<double> sq(n);
            for (std::size_t i = 0; i < n; ++i) {
                sq[i] = u[j][i] * u[j][i];
            }
            const auto vj = testutil::sample_moments(sq);
            CHECK(std::abs(vj.mean - c2) <= 4.0 * vj.std_error);
        }
    }

    SUBCASE("times must be nondecreasing") {
        RngStream rng(1, 1);
        CHECK_THROWS_AS(ou_sample_trajectory(grid, {0.5, 0.2}, rng), std::invalid_argument);
    }
}

TEST_CASE("Wick monomials") {
    const SpectralGrid grid(32.0, 256);
    const TestFunction f = TestFunction::tabulate(grid, bump);
    const double c = c_of_f(grid, f);

    SUBCASE("degree one and two closed forms") {
        RngStream rng(5, 0);
        const FieldSample xi = sample_sharp_time(grid, rng);
        const double u = pair_field(grid, f, xi);
        CHECK(wick_eval(grid, f, xi, 1) == doctest::Approx(u).epsilon(1e-13));
        CHECK(wick_eval(grid, f, xi, 2) == doctest::Approx(u * u - c * c).epsilon(1e-12));
    }

    SUBCASE("second moments are n! c^{2n} and cross moments vanish") {
        const std::size_t n = 20000;
        std::vector<double> pairings(n);
        for (std::size_t i = 0; i < n; ++i) {
            RngStream rng(301, i);
            pairings[i] = pair_field(grid, f, sample_sharp_time(grid, rng));
        }
        double factorial = 1.0;
        for (unsigned deg = 1; deg <= 4; ++deg) {
            factorial *= static_cast<double>(deg);
            for (unsigned other = 1; other <= deg; ++other) {
                std::vector<double> prods(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const double x = pairings[i] / c;
                    prods[i] = std::pow(c, deg + other) * hermite_monic(deg, x) *
                               hermite_monic(other, x);
                }
                const auto m = testutil::sample_moments(prods);
                const double expected =
                    deg == other ? factorial * std::pow(c, 2.0 * deg) : 0.0;
                CHECK(std::abs(m.mean - expected) <= 4.0 * m.std_error);
            }
        }
    }

    SUBCASE("vanishing test function is rejected") {
        TestFunction zero;
        zero.values.assign(grid.modes, 0.0);
        FieldSample xi;
        xi.values.assign(grid.modes, 0.0);
        CHECK_THROWS_AS(wick_eval(grid, zero, xi, 2), std::domain_error);
    }
}

TEST_CASE("divergence scan mechanics") {
    const SpectralGrid grid(32.0, 4096);

    SUBCASE("translation by whole cells leaves the variance unchanged") {
        const double w = 0.25;
        const TestFunction centered = TestFunction::unit_box(grid, 0.0, w);
        const double shift = 64.0 * grid.mesh();
        const TestFunction moved = TestFunction::unit_box(grid, shift, w);
        const double v0 = c_of_f(grid, centered);
        const double v1 = c_of_f(grid, moved);
        CHECK(std::abs(v0 * v0 - v1 * v1) < 1e-12);
    }

    SUBCASE("grid refinement moves each variance by under 2%") {
        const SpectralGrid fine(32.0, 8192);
        const std::vector<double> widths = {0.4, 0.2, 0.1, 0.05};
        const DivergenceScan coarse_scan = delta_divergence_scan(grid, widths);
        const DivergenceScan fine_scan = delta_divergence_scan(fine, widths);
        for (std::size_t i = 0; i < widths.size(); ++i) {
            const double rel = std::abs(fine_scan.width_variance[i].second /
                                            coarse_scan.width_variance[i].second -
                                        1.0);
            CHECK(rel < 0.02);
        }
    }

    SUBCASE("unresolvable widths are rejected") {
        CHECK_THROWS_AS(delta_divergence_scan(grid, {2.0 * grid.mesh()}),
                        std::invalid_argument);
    }
}
