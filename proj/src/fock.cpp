#include "pathlab/fock.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pathlab {

TruncatedFock::TruncatedFock(unsigned modes_, unsigned cutoff_)
    : modes(modes_), cutoff(cutoff_) {
    if (modes != 1 && modes != 2) {
        throw std::invalid_argument("TruncatedFock: modes must be 1 or 2");
    }
    if (cutoff < 1) {
        throw std::invalid_argument("TruncatedFock: cutoff must be at least 1");
    }
}

std::size_t TruncatedFock::dimension() const {
    const std::size_t d = cutoff;
    return modes == 1 ? d + 1 : (d + 1) * (d + 2) / 2;
}

std::size_t TruncatedFock::index(unsigned m1, unsigned m2) const {
    if (modes == 1) {
        if (m2 != 0 || m1 > cutoff) {
            throw std::out_of_range("TruncatedFock::index: exponent out of range");
        }
        return m1;
    }
    const unsigned d = m1 + m2;
    if (d > cutoff) {
        throw std::out_of_range("TruncatedFock::index: total degree out of range");
    }
    return static_cast<std::size_t>(d) * (d + 1) / 2 + m1;
}

std::pair<unsigned, unsigned> TruncatedFock::exponents(std::size_t idx) const {
    if (idx >= dimension()) {
        throw std::out_of_range("TruncatedFock::exponents: index out of range");
    }
    if (modes == 1) {
        return {static_cast<unsigned>(idx), 0};
    }
    unsigned d = 0;
    std::size_t base = 0;
    while (base + d + 1 <= idx) {
        base += d + 1;
        ++d;
    }
    const unsigned m1 = static_cast<unsigned>(idx - base);
    return {m1, d - m1};
}

unsigned TruncatedFock::total_degree(std::size_t idx) const {
    const auto [m1, m2] = exponents(idx);
    return m1 + m2;
}

FockCoefficients::FockCoefficients(TruncatedFock s, std::vector<cplx> v)
    : space(s), values(std::move(v)) {
    if (values.size() != space.dimension()) {
        throw std::invalid_argument("FockCoefficients: value count does not match space");
    }
}

FockCoefficients FockCoefficients::vacuum(const TruncatedFock& s) {
    std::vector<cplx> v(s.dimension(), cplx(0.0, 0.0));
    v[0] = 1.0;
    return FockCoefficients(s, std::move(v));
}

FockCoefficients FockCoefficients::basis_state(const TruncatedFock& s, unsigned m1, unsigned m2) {
    std::vector<cplx> v(s.dimension(), cplx(0.0, 0.0));
    v[s.index(m1, m2)] = 1.0;
    return FockCoefficients(s, std::move(v));
}

cplx FockCoefficients::coefficient_sum() const {
    cplx acc(0.0, 0.0);
    for (const auto& v : values) {
        acc += v;
    }
    return acc;
}

double FockCoefficients::boundary_mass() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (space.total_degree(i) == space.cutoff) {
            acc += std::abs(values[i]);
        }
    }
    return acc;
}

std::pair<ComplexMatrix, ComplexMatrix> ladder_matrices(const TruncatedFock& space,
                                                        unsigned mode) {
    if (mode >= space.modes) {
        throw std::out_of_range("ladder_matrices: mode out of range");
    }
    const std::size_t dim = space.dimension();
    ComplexMatrix annihilation(dim, dim);
    ComplexMatrix creation(dim, dim);
    for (std::size_t idx = 0; idx < dim; ++idx) {
        const auto [m1, m2] = space.exponents(idx);
        const unsigned m = mode == 0 ? m1 : m2;
        // d/dz: coefficient of z^m feeds slot m-1 with weight m.
        if (m >= 1) {
            const std::size_t lower =
                mode == 0 ? space.index(m1 - 1, m2) : space.index(m1, m2 - 1);
            annihilation(lower, idx) = static_cast<double>(m);
        }
        // z *: shift the degree up, truncated at the cutoff.
        if (m1 + m2 + 1 <= space.cutoff) {
            const std::size_t upper =
                mode == 0 ? space.index(m1 + 1, m2) : space.index(m1, m2 + 1);
            creation(upper, idx) = 1.0;
        }
    }
    return {std::move(annihilation), std::move(creation)};
}

std::vector<double> monomial_norms(const TruncatedFock& space) {
    if (space.cutoff > 150) {
        throw std::overflow_error("monomial_norms: factorials overflow beyond cutoff 150");
    }
    std::vector<double> factorial(space.cutoff + 1, 1.0);
    for (unsigned k = 1; k <= space.cutoff; ++k) {
        factorial[k] = factorial[k - 1] * static_cast<double>(k);
    }
    std::vector<double> norms(space.dimension());
    for (std::size_t idx = 0; idx < space.dimension(); ++idx) {
        const auto [m1, m2] = space.exponents(idx);
        norms[idx] = std::sqrt(factorial[m1] * factorial[m2]);
    }
    return norms;
}

FockCoefficients amoeba_evolution(double t, const TruncatedFock& space) {
    if (space.modes != 1) {
        throw std::invalid_argument("amoeba_evolution: one-mode space required");
    }
    if (!(t >= 0.0)) {
        throw std::invalid_argument("amoeba_evolution: time must be nonnegative");
    }
    // Poisson tail beyond the cutoff must be negligible.
    double term = std::exp(-t);
    double retained = term;
    for (unsigned k = 1; k <= space.cutoff; ++k) {
        term *= t / static_cast<double>(k);
        retained += term;
    }
    const double tail = std::max(0.0, 1.0 - retained);
    if (tail >= 1e-12) {
        std::ostringstream msg;
        msg << "amoeba_evolution: Poisson tail mass " << tail << " at cutoff " << space.cutoff
            << " exceeds 1e-12; increase the cutoff";
        throw std::invalid_argument(msg.str());
    }
    auto [annihilation, creation] = ladder_matrices(space, 0);
    (void)annihilation;
    const ComplexMatrix gen = creation - ComplexMatrix::identity(space.dimension());
    const ComplexMatrix propagator = expm_general(gen, t);
    const FockCoefficients start = FockCoefficients::vacuum(space);
    return FockCoefficients(space, propagator.apply(start.values));
}

void RateTriple::validate() const {
    if (beta < 0.0 || gamma < 0.0 || delta < 0.0) {
        throw std::invalid_argument("RateTriple: rates must be nonnegative");
    }
}

ComplexMatrix predator_prey_generator(const RateTriple& rates, const TruncatedFock& space) {
    rates.validate();
    if (space.modes != 2) {
        throw std::invalid_argument("predator_prey_generator: two-mode space required");
    }
    auto [a1, c1] = ladder_matrices(space, 0);
    auto [a2, c2] = ladder_matrices(space, 1);
    const ComplexMatrix birth = c1 * c1 * a1 - c1 * a1;
    const ComplexMatrix predation = c2 * c2 * a1 * a2 - c1 * c2 * a1 * a2;
    const ComplexMatrix death = a2 - c2 * a2;
    return birth.scaled(rates.beta) + predation.scaled(rates.gamma) + death.scaled(rates.delta);
}

EvolvedCoefficients evolve_coefficients(const ComplexMatrix& gen, const FockCoefficients& psi0,
                                        double t, bool strict) {
    if (!(t >= 0.0)) {
        throw std::invalid_argument("evolve_coefficients: time must be nonnegative");
    }
    if (gen.rows() != psi0.values.size()) {
        throw std::invalid_argument("evolve_coefficients: generator does not match state");
    }
    const ComplexMatrix propagator = expm_general(gen, t);
    EvolvedCoefficients out{FockCoefficients(psi0.space, propagator.apply(psi0.values)), 0.0};
    out.boundary_mass = out.psi.boundary_mass();
    if (strict && out.boundary_mass > 1e-6) {
        std::ostringstream msg;
        msg << "evolve_coefficients: truncation-boundary mass " << out.boundary_mass
            << " exceeds 1e-6";
        throw std::runtime_error(msg.str());
    }
    return out;
}

} // namespace pathlab
