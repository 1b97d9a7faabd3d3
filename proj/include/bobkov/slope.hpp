#ifndef BOBKOV_SLOPE_HPP
#define BOBKOV_SLOPE_HPP

#include "bobkov/domain.hpp"

namespace bobkov {

struct SlopeSolution {
    double a = 0.0;
    double residual = 0.0; // mass(t,p,a) - y at the returned a
    int iterations = 0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

struct SlopePartials {
    double a = 0.0;
    double a_t = 0.0;
    double a_p = 0.0;
    double a_y = 0.0;
};

inline constexpr double default_slope_tol = 1e-12;

// Solves mass(t,p,a) = y for the unique slope a. Bracket expansion by
// doubling from [-1,1] (mass is strictly decreasing in a), then Brent.
// For t <= 0 the residual is solved in mass/phi(t) units so the deep left
// tail keeps relative accuracy.
SlopeSolution solve_slope(const SlopeQuery& q, double tol = default_slope_tol);

// Closed-form partial derivatives of the implicit slope.
SlopePartials slope_partials(const SlopeQuery& q, double tol = default_slope_tol);
SlopePartials slope_partials(const SlopeQuery& q, const SlopeSolution& sol);

// The residual function the solver uses (production path: bvn closed form
// for t > 0, tail-scaled quadrature for t <= 0).
double halfspace_mass_smooth(double t, double p, double a);

} // namespace bobkov

#endif
