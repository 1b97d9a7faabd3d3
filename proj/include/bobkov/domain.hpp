#ifndef BOBKOV_DOMAIN_HPP
#define BOBKOV_DOMAIN_HPP

#include <stdexcept>

namespace bobkov {

// A point (t,p,y) with 0 < y < Phi(t).
struct DomainPoint {
    double t = 0.0;
    double p = 0.0;
    double y = 0.0;
};

using SlopeQuery = DomainPoint;

// Thrown when the implicit slope degenerates (y too close to {0, Phi(t)},
// where a diverges) or the solver cannot bracket a root.
class ill_conditioned_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Validates 0 < y < Phi(t); throws std::domain_error otherwise.
void validate_domain_point(const DomainPoint& pt);

// Relative distance of y to the nearer of {0, Phi(t)} is below this fraction
// of Phi(t): the slope blows up and solves are refused. Measured relative to
// Phi(t) so that deep-tail points (t near -8, where Phi(t) itself is tiny)
// remain solvable.
inline constexpr double slope_guard_fraction = 1e-12;

bool slope_ill_conditioned(const DomainPoint& pt);

} // namespace bobkov

#endif
