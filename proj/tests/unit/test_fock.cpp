#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pathlab/fock.hpp"
#include "test_helpers.hpp"

using namespace pathlab;

TEST_CASE("index layout round trip") {
    const TruncatedFock two(2, 5);
    for (std::size_t idx = 0; idx < two.dimension(); ++idx) {
        const auto [m1, m2] = two.exponents(idx);
        CHECK(two.index(m1, m2) == idx);
        CHECK(m1 + m2 <= two.cutoff);
    }
    CHECK(two.dimension() == 21);
    CHECK_THROWS_AS(two.index(4, 3), std::out_of_range);
    const TruncatedFock one(1, 4);
    CHECK(one.dimension() == 5);
    CHECK_THROWS_AS(TruncatedFock(3, 4), std::invalid_argument);
}

TEST_CASE("ladder operators on constants") {
    const TruncatedFock space(1, 6);
    auto [a, c] = ladder_matrices(space, 0);
    const FockCoefficients vac = FockCoefficients::vacuum(space);
    const auto annihilated = a.apply(vac.values);
    for (const auto& v : annihilated) {
        CHECK(std::abs(v) == 0.0);
    }
    const auto created = c.apply(vac.values);
    CHECK(std::abs(created[space.index(1)] - 1.0) == 0.0);
    for (std::size_t i = 0; i < created.size(); ++i) {
        if (i != space.index(1)) {
            CHECK(std::abs(created[i]) == 0.0);
        }
    }
}

TEST_CASE("commutator is the identity below the cutoff") {
    SUBCASE("one mode") {
        const TruncatedFock space(1, 7);
        auto [a, c] = ladder_matrices(space, 0);
        const ComplexMatrix comm = a * c - c * a;
        for (std::size_t j = 0; j < space.dimension(); ++j) {
            if (space.total_degree(j) >= space.cutoff) {
                continue; // truncation breaks the last slot
            }
            for (std::size_t i = 0; i < space.dimension(); ++i) {
                CHECK(comm(i, j) == (i == j ? cplx(1.0, 0.0) : cplx(0.0, 0.0)));
            }
        }
    }
    SUBCASE("two modes, both ladders") {
        const TruncatedFock space(2, 5);
        for (unsigned mode = 0; mode < 2; ++mode) {
            auto [a, c] = ladder_matrices(space, mode);
            const ComplexMatrix comm = a * c - c * a;
            for (std::size_t j = 0; j < space.dimension(); ++j) {
                if (space.total_degree(j) >= space.cutoff) {
                    continue;
                }
                for (std::size_t i = 0; i < space.dimension(); ++i) {
                    CHECK(comm(i, j) == (i == j ? cplx(1.0, 0.0) : cplx(0.0, 0.0)));
                }
            }
        }
    }
}

TEST_CASE("monomial norms") {
    const TruncatedFock one(1, 4);
    const auto n1 = monomial_norms(one);
    CHECK(n1[one.index(0)] == 1.0);
    CHECK(n1[one.index(3)] == doctest::Approx(std::sqrt(6.0)).epsilon(1e-15));

    const TruncatedFock two(2, 4);
    const auto n2 = monomial_norms(two);
    CHECK(n2[two.index(2, 1)] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    CHECK_THROWS_AS(monomial_norms(TruncatedFock(1, 151)), std::overflow_error);
}

TEST_CASE("division process matches the Poisson law") {
    const TruncatedFock space(1, 60);
    const FockCoefficients psi = amoeba_evolution(1.0, space);
    double poisson = std::exp(-1.0);
    double sup_err = 0.0;
    for (unsigned k = 0; k <= space.cutoff; ++k) {
        if (k > 0) {
            poisson /= static_cast<double>(k);
        }
        sup_err = std::max(sup_err, std::abs(psi.values[k].real() - poisson));
        CHECK(std::abs(psi.values[k].imag()) < 1e-15);
    }
    CHECK(sup_err < 1e-10);
    CHECK(std::abs(psi.values[0].real() - std::exp(-1.0)) < 1e-12);
}

TEST_CASE("division process: start, conservation, nonnegativity") {
    const TruncatedFock space(1, 60);
    const FockCoefficients at_zero = amoeba_evolution(0.0, space);
    CHECK(std::abs(at_zero.values[0] - 1.0) < 1e-15);
    for (std::size_t k = 1; k < space.dimension(); ++k) {
        CHECK(std::abs(at_zero.values[k]) < 1e-15);
    }
    for (double t : {0.5, 1.0, 2.0, 3.0}) {
        const FockCoefficients psi = amoeba_evolution(t, space);
        CHECK(std::abs(psi.coefficient_sum().real() - 1.0) < 1e-10);
        for (const auto& v : psi.values) {
            CHECK(v.real() >= -1e-12);
        }
    }
}

TEST_CASE("division process: inadequate cutoff is rejected with advice") {
    CHECK_THROWS_WITH_AS(amoeba_evolution(3.0, TruncatedFock(1, 5)),
                         doctest::Contains("increase"), std::invalid_argument);
}

TEST_CASE("predator-prey generator structure") {
    const TruncatedFock space(2, 6);

    SUBCASE("zero rates give the zero generator") {
        CHECK(predator_prey_generator(RateTriple{}, space).max_abs() == 0.0);
    }

    SUBCASE("birth acting on a single prey: z1^2 - z1") {
        RateTriple rates;
        rates.beta = 1.0;
        const ComplexMatrix gen = predator_prey_generator(rates, space);
        const FockCoefficients one_prey = FockCoefficients::basis_state(space, 1, 0);
        const auto out = gen.apply(one_prey.values);
        for (std::size_t i = 0; i < out.size(); ++i) {
            cplx expected(0.0, 0.0);
            if (i == space.index(2, 0)) {
                expected = 1.0;
            } else if (i == space.index(1, 0)) {
                expected = -1.0;
            }
            CHECK(out[i] == expected);
        }
    }

    SUBCASE("coefficient sums vanish away from the truncation boundary") {
        RateTriple rates;
        rates.beta = 0.4;
        rates.gamma = 0.7;
        rates.delta = 0.2;
        const ComplexMatrix gen = predator_prey_generator(rates, space);
        for (std::size_t j = 0; j < space.dimension(); ++j) {
            if (space.total_degree(j) >= space.cutoff) {
                continue;
            }
            cplx column_sum(0.0, 0.0);
            for (std::size_t i = 0; i < space.dimension(); ++i) {
                column_sum += gen(i, j);
            }
            CHECK(std::abs(column_sum) < 1e-14);
        }
    }

    SUBCASE("negative rates are rejected") {
        RateTriple bad;
        bad.gamma = -0.1;
        CHECK_THROWS_AS(predator_prey_generator(bad, space), std::invalid_argument);
    }
}

TEST_CASE("coefficient evolution") {
    SUBCASE("zero generator leaves the state unchanged") {
        const TruncatedFock space(2, 4);
        const FockCoefficients psi0 = FockCoefficients::basis_state(space, 1, 1);
        const auto out = evolve_coefficients(ComplexMatrix(space.dimension(), space.dimension()),
                                             psi0, 0.7);
        for (std::size_t i = 0; i < psi0.values.size(); ++i) {
            CHECK(std::abs(out.psi.values[i] - psi0.values[i]) < 1e-15);
        }
    }

    SUBCASE("division generator reproduces amoeba_evolution and the closed form") {
        const TruncatedFock space(1, 60);
        auto [a, c] = ladder_matrices(space, 0);
        (void)a;
        const ComplexMatrix gen = c - ComplexMatrix::identity(space.dimension());
        const auto out = evolve_coefficients(gen, FockCoefficients::vacuum(space), 1.0);
        const FockCoefficients direct = amoeba_evolution(1.0, space);
        for (std::size_t k = 0; k < space.dimension(); ++k) {
            CHECK(std::abs(out.psi.values[k] - direct.values[k]) < 1e-12);
        }
    }

    SUBCASE("predator-prey conservation at the stated parameters") {
        RateTriple rates;
        rates.beta = rates.gamma = rates.delta = 0.3;
        const TruncatedFock space(2, 8);
        const ComplexMatrix gen = predator_prey_generator(rates, space);
        const FockCoefficients psi0 = FockCoefficients::basis_state(space, 1, 1);
        const auto out = evolve_coefficients(gen, psi0, 0.5);
        CHECK(std::abs(out.psi.coefficient_sum().real() - 1.0) <= 1e-6);
        CHECK(out.boundary_mass < 1e-4); // measured ~4.5e-6 at this cutoff
    }

    SUBCASE("strict mode flags large boundary mass") {
        const TruncatedFock space(1, 3);
        auto [a, c] = ladder_matrices(space, 0);
        (void)a;
        const ComplexMatrix gen = c - ComplexMatrix::identity(space.dimension());
        CHECK_THROWS_AS(evolve_coefficients(gen, FockCoefficients::vacuum(space), 2.0, true),
                        std::runtime_error);
    }

    SUBCASE("negative time is rejected") {
        const TruncatedFock space(1, 3);
        CHECK_THROWS_AS(evolve_coefficients(ComplexMatrix(4, 4),
                                            FockCoefficients::vacuum(space), -1.0),
                        std::invalid_argument);
    }
}
