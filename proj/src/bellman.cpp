#include "bobkov/bellman.hpp"

#include <cmath>

namespace bobkov {

RotatedCoords rotated_coords(double t, double p, double a) {
    if (!std::isfinite(t) || !std::isfinite(p) || !std::isfinite(a))
        throw std::domain_error("rotated_coords: non-finite input");
    const double r = std::sqrt(1.0 + a * a);
    return {(p - a * t) / r, (t + a * p) / r};
}

BellmanEval bellman_eval(const DomainPoint& pt, double tol) {
    const SlopeSolution sol = solve_slope(pt, tol);
    const double a = sol.a;
    const double r = std::sqrt(1.0 + a * a);
    const RotatedCoords rc = rotated_coords(pt.t, pt.p, a);

    BellmanEval ev;
    ev.a = a;
    ev.P = rc.P;
    ev.Q = rc.Q;
    const double phiP = pdf(rc.P);
    const double phiQ = pdf(rc.Q);
    ev.M = phiP * cdf(rc.Q);
    ev.M_t = phiP * phiQ / r + rc.P * pdf(pt.t) * cdf(pt.p);
    ev.M_p = a * phiP * phiQ / r;
    ev.M_y = -rc.P;
    return ev;
}

double hjb_residual(const DomainPoint& pt, const BellmanEval& ev) {
    const double w = pdf(pt.t) * pdf(pt.p);
    const double radicand = w * w - ev.M_p * ev.M_p;
    if (radicand < 0.0)
        throw std::logic_error("hjb_residual: negative radicand, numerics bug");
    return std::sqrt(radicand) - (ev.M_t + cdf(pt.p) * pdf(pt.t) * ev.M_y);
}

double hjb_residual(const DomainPoint& pt, double tol) {
    return hjb_residual(pt, bellman_eval(pt, tol));
}

BSurfaceEval b_surface(double t, Probability x, double y, double tol) {
    const double p = inv_cdf(x);
    const DomainPoint pt{t, p, y};
    const BellmanEval ev = bellman_eval(pt, tol);

    BSurfaceEval out;
    out.B = ev.M;
    out.B_t = ev.M_t;
    out.B_y = ev.M_y;
    out.B_x = ev.M_p / pdf(p);
    out.a = ev.a;
    out.p = p;
    return out;
}

} // namespace bobkov
