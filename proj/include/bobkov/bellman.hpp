#ifndef BOBKOV_BELLMAN_HPP
#define BOBKOV_BELLMAN_HPP

#include "bobkov/domain.hpp"
#include "bobkov/gauss.hpp"
#include "bobkov/slope.hpp"

namespace bobkov {

struct RotatedCoords {
    double P = 0.0;
    double Q = 0.0;
};

// P = (p - a t)/sqrt(1+a^2), Q = (t + a p)/sqrt(1+a^2); an orthogonal
// rotation of (p,t), so P^2+Q^2 = p^2+t^2 and phi(P)phi(Q) = phi(p)phi(t).
RotatedCoords rotated_coords(double t, double p, double a);

struct BellmanEval {
    double a = 0.0;
    double P = 0.0;
    double Q = 0.0;
    double M = 0.0;
    double M_t = 0.0;
    double M_p = 0.0;
    double M_y = 0.0;
};

// Value M = phi(P)Phi(Q) at the solved slope, together with the closed-form
// partials M_t, M_p, M_y.
BellmanEval bellman_eval(const DomainPoint& pt, double tol = default_slope_tol);

// sqrt(phi^2(t)phi^2(p) - M_p^2) - (M_t + Phi(p)phi(t)M_y); identically zero
// for the analytic value function. A negative radicand is impossible in exact
// arithmetic and raises std::logic_error.
double hjb_residual(const DomainPoint& pt, double tol = default_slope_tol);
double hjb_residual(const DomainPoint& pt, const BellmanEval& ev);

struct BSurfaceEval {
    double B = 0.0;
    double B_t = 0.0;
    double B_x = 0.0;
    double B_y = 0.0;
    double a = 0.0; // slope at the underlying (t, p, y)
    double p = 0.0; // Phi^{-1}(x), shared across value and partials
};

// B(t,x,y) = M(t, Phi^{-1}(x), y) with B_x = M_p / phi(p).
BSurfaceEval b_surface(double t, Probability x, double y, double tol = default_slope_tol);

} // namespace bobkov

#endif
