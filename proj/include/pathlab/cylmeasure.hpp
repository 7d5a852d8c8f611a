#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "pathlab/timeslice.hpp"

namespace pathlab {

/// Finite union of disjoint half-open intervals [lo, hi), or all of R.
/// Grid points are assigned to intervals by half-open membership, so a
/// partition of a box into cells covers each point exactly once.
class IntervalUnion {
public:
    static IntervalUnion all_reals();
    static IntervalUnion empty_set();
    static IntervalUnion interval(double lo, double hi);
    explicit IntervalUnion(std::vector<std::pair<double, double>> intervals);

    bool is_all_reals() const { return all_reals_; }
    bool is_empty() const { return !all_reals_ && intervals_.empty(); }
    bool contains(double x) const;
    const std::vector<std::pair<double, double>>& intervals() const { return intervals_; }

private:
    IntervalUnion() = default;
    bool all_reals_ = false;
    std::vector<std::pair<double, double>> intervals_;
};

/// Path event constraining the position at time 0, at finitely many
/// intermediate times in (0, t), and at the final time t. At most 3
/// intermediate times are supported (cost grows like m^(n+2) cells in the
/// partition oracle).
struct CylinderSet {
    IntervalUnion at_start = IntervalUnion::all_reals();
    std::vector<double> times;
    std::vector<IntervalUnion> sets;
    IntervalUnion at_end = IntervalUnion::all_reals();

    void validate(double horizon) const;
};

/// Mass scale lambda with Re lambda >= 0 and lambda != 0.
struct MassScale {
    cplx lambda;
    explicit MassScale(cplx value);
};

/// Scalar value of the cylinder-set set function: the chained Gaussian
/// integral over the event, realised as masked kernel-matrix products with
/// mesh-weighted sums. For Re lambda = 0 the amplitude is computed through
/// the exact spectral free evolution instead of the oscillatory quadrature.
cplx cylinder_amplitude(const MassScale& scale, double t, const CylinderSet& event,
                        const GridWavefunction& phi, const GridWavefunction& psi);

/// Closed-form total variation over the algebra generated by n_times fixed
/// intermediate times:
///   (|lambda|/Re lambda)^{(n+1)/2} (Re lambda/(2 pi t))^{1/2}
///     * integral of |psi(x1)| exp(-Re lambda (x1-x0)^2/(2t)) |phi(x0)|.
/// Returns +infinity when Re lambda = 0 and both states are nonzero, and 0
/// when either state vanishes.
double variation_closed_form(const MassScale& scale, double t, std::size_t n_times,
                             const GridWavefunction& phi, const GridWavefunction& psi);

/// Brute-force partition oracle: sum of |cylinder_amplitude| over all
/// m^(n+2) product cells of the box [-box_half_width, box_half_width)
/// with m cells per coordinate. Monotone nondecreasing under dyadic
/// refinement of m. Throws when the cell count exceeds the budget.
double variation_bruteforce(const MassScale& scale, double t,
                            const std::vector<double>& times,
                            const GridWavefunction& phi, const GridWavefunction& psi,
                            std::size_t cells_per_coordinate, double box_half_width,
                            std::size_t cell_budget = 1000000);

/// Trapezoid approximation of |closed contour integral of the amplitude in
/// lambda| over a circle in the open right half plane, normalised by the
/// maximum amplitude modulus on the contour. Small values certify numerical
/// holomorphy of lambda -> amplitude.
double analyticity_residual(const CylinderSet& event, const GridWavefunction& phi,
                            const GridWavefunction& psi, double t, cplx contour_center,
                            double contour_radius, std::size_t nodes);

} // namespace pathlab
