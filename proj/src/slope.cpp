#include "bobkov/slope.hpp"

#include <cmath>
#include <string>

#include "bobkov/gauss.hpp"
#include "bobkov/quadrature.hpp"

namespace bobkov {

void validate_domain_point(const DomainPoint& pt) {
    if (!std::isfinite(pt.t) || !std::isfinite(pt.p) || !std::isfinite(pt.y))
        throw std::domain_error("DomainPoint: non-finite coordinate");
    if (!(pt.y > 0.0) || !(pt.y < cdf(pt.t)))
        throw std::domain_error("DomainPoint: y must satisfy 0 < y < Phi(t)");
}

bool slope_ill_conditioned(const DomainPoint& pt) {
    const double cap = cdf(pt.t);
    return std::min(pt.y, cap - pt.y) < slope_guard_fraction * cap;
}

double halfspace_mass_smooth(double t, double p, double a) {
    if (t <= 0.0) return pdf(t) * halfspace_mass_tail_scaled(t, p, a);
    return halfspace_mass_bvn(t, p, a);
}

namespace {

constexpr double bracket_cap = 1e6;

// Residual in solver units: for t <= 0 the mass and the target are both
// divided by phi(t), otherwise used as-is.
struct Residual {
    double t, p, target, scale;

    explicit Residual(const SlopeQuery& q) : t(q.t), p(q.p) {
        if (t <= 0.0) {
            scale = pdf(t);
            target = q.y / scale;
        } else {
            scale = 1.0;
            target = q.y;
        }
    }

    double operator()(double a) const {
        const double m = (t <= 0.0) ? halfspace_mass_tail_scaled(t, p, a)
                                    : halfspace_mass_bvn(t, p, a);
        return m - target;
    }
};

} // namespace

SlopeSolution solve_slope(const SlopeQuery& q, double tol) {
    validate_domain_point(q);
    if (!(tol > 0.0)) throw std::invalid_argument("solve_slope: tol must be > 0");
    if (slope_ill_conditioned(q))
        throw ill_conditioned_error("solve_slope: y within guard fraction of {0, Phi(t)}; slope diverges");

    const Residual g(q);
    const double gtol = tol * std::max(1.0, std::fabs(g.target));

    // mass is strictly decreasing in a: need g(lo) > 0 > g(hi)
    double lo = -1.0, hi = 1.0;
    double glo = g(lo), ghi = g(hi);
    int evals = 2;
    while (glo <= 0.0) {
        lo *= 2.0;
        if (std::fabs(lo) > bracket_cap)
            throw ill_conditioned_error("solve_slope: bracket expansion exceeded |a| = 1e6");
        glo = g(lo);
        ++evals;
    }
    while (ghi >= 0.0) {
        hi *= 2.0;
        if (hi > bracket_cap)
            throw ill_conditioned_error("solve_slope: bracket expansion exceeded |a| = 1e6");
        ghi = g(hi);
        ++evals;
    }

    SlopeSolution sol;
    sol.bracket_lo = lo;
    sol.bracket_hi = hi;

    // Brent's method (Numerical Recipes zbrent structure).
    double a = lo, b = hi, c = hi;
    double fa = glo, fb = ghi, fc = ghi;
    double d = 0.0, e = 0.0;
    const int max_iter = 200;
    int it = 0;
    for (; it < max_iter; ++it) {
        if ((fb > 0.0 && fc > 0.0) || (fb < 0.0 && fc < 0.0)) {
            c = a;
            fc = fa;
            e = d = b - a;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double xtol = 2.0 * 2.220446049250313e-16 * std::fabs(b) + 0.5e-300;
        const double xm = 0.5 * (c - b);
        if (std::fabs(fb) <= gtol || fb == 0.0 || std::fabs(xm) <= xtol) break;
        if (std::fabs(e) >= xtol && std::fabs(fa) > std::fabs(fb)) {
            const double s = fb / fa;
            double pp, qq;
            if (a == c) {
                pp = 2.0 * xm * s;
                qq = 1.0 - s;
            } else {
                const double q2 = fa / fc;
                const double r2 = fb / fc;
                pp = s * (2.0 * xm * q2 * (q2 - r2) - (b - a) * (r2 - 1.0));
                qq = (q2 - 1.0) * (r2 - 1.0) * (s - 1.0);
            }
            if (pp > 0.0) qq = -qq;
            pp = std::fabs(pp);
            if (2.0 * pp < std::min(3.0 * xm * qq - std::fabs(xtol * qq), std::fabs(e * qq))) {
                e = d;
                d = pp / qq;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if (std::fabs(d) > xtol)
            b += d;
        else
            b += (xm > 0.0 ? xtol : -xtol);
        fb = g(b);
        ++evals;
    }
    if (it == max_iter && std::fabs(fb) > gtol)
        throw ill_conditioned_error("solve_slope: Brent failed to reach tolerance in " +
                                    std::to_string(max_iter) + " iterations");

    sol.a = b;
    sol.residual = fb * g.scale;
    sol.iterations = evals;
    return sol;
}

SlopePartials slope_partials(const SlopeQuery& q, const SlopeSolution& sol) {
    const double a = sol.a;
    const double r = std::sqrt(1.0 + a * a);
    const double P = (q.p - a * q.t) / r;
    const double Q = (q.t + a * q.p) / r;
    const double phiP = pdf(P);
    const double denom = pdf(Q) + Q * cdf(Q); // > 0 for every real Q

    SlopePartials out;
    out.a = a;
    out.a_t = (1.0 + a * a) * (cdf(q.p) * pdf(q.t) - (a / r) * phiP * cdf(Q)) / (phiP * denom);
    out.a_y = -(1.0 + a * a) / (phiP * denom);
    out.a_p = cdf(Q) * r / denom;
    return out;
}

SlopePartials slope_partials(const SlopeQuery& q, double tol) {
    return slope_partials(q, solve_slope(q, tol));
}

} // namespace bobkov
