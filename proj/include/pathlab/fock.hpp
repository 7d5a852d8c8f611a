#pragma once

#include <utility>
#include <vector>

#include "pathlab/linops.hpp"

namespace pathlab {

/// Coefficient space of entire functions on 1 or 2 modes, truncated at a
/// maximum total monomial degree. The index set enumerates monomials by
/// total degree, then by the first exponent.
struct TruncatedFock {
    unsigned modes = 1;  // 1 or 2
    unsigned cutoff = 1; // max total degree D >= 1

    TruncatedFock(unsigned modes, unsigned cutoff);

    std::size_t dimension() const;
    std::size_t index(unsigned m1, unsigned m2 = 0) const;
    std::pair<unsigned, unsigned> exponents(std::size_t idx) const;
    unsigned total_degree(std::size_t idx) const;
};

/// Coefficients psi_m of the truncated power series, one per monomial slot.
struct FockCoefficients {
    TruncatedFock space;
    std::vector<cplx> values;

    FockCoefficients(TruncatedFock s, std::vector<cplx> v);
    static FockCoefficients vacuum(const TruncatedFock& s);
    static FockCoefficients basis_state(const TruncatedFock& s, unsigned m1, unsigned m2 = 0);

    cplx at(unsigned m1, unsigned m2 = 0) const { return values[space.index(m1, m2)]; }
    /// Sum of coefficients; for probabilistic states this is the total mass.
    cplx coefficient_sum() const;
    /// Sum of |psi_m| over the slots of maximal total degree.
    double boundary_mass() const;
};

/// Annihilation (d/dz_j) and creation (z_j *) in the monomial coefficient
/// basis; creation out of the top degree is truncated to zero.
std::pair<ComplexMatrix, ComplexMatrix> ladder_matrices(const TruncatedFock& space,
                                                        unsigned mode);

/// Hilbert norms sqrt(m1! * m2!) of the monomials, slot by slot.
/// Degrees beyond 150 overflow double factorials and are rejected.
std::vector<double> monomial_norms(const TruncatedFock& space);

/// One-mode division process: generator z - 1 on coefficients, applied to
/// the vacuum through expm_general. Requires the cutoff to hold the Poisson
/// tail below 1e-12, otherwise throws suggesting a larger cutoff.
FockCoefficients amoeba_evolution(double t, const TruncatedFock& space);

struct RateTriple {
    double beta = 0.0;  // prey birth
    double gamma = 0.0; // predation
    double delta = 0.0; // predator death

    void validate() const;
};

/// Two-mode generator beta*B + gamma*C + delta*D with
///   B = (a1*)^2 a1 - a1* a1,  C = (a2*)^2 a1 a2 - a1* a2* a1 a2,
///   D = a2 - a2* a2,
/// products taken in the printed order.
ComplexMatrix predator_prey_generator(const RateTriple& rates, const TruncatedFock& space);

struct EvolvedCoefficients {
    FockCoefficients psi;
    double boundary_mass = 0.0;
};

/// exp(t * gen) psi0 with the truncation-boundary mass of the result
/// reported; in strict mode boundary mass above 1e-6 throws.
EvolvedCoefficients evolve_coefficients(const ComplexMatrix& gen, const FockCoefficients& psi0,
                                        double t, bool strict = false);

} // namespace pathlab
