#include "bobkov/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bobkov/bellman.hpp"
#include "bobkov/slope.hpp"

namespace bobkov {

namespace {

// I on the full open interval; the public iso_profile guards a 1e-15 margin,
// integrands here must follow trajectories all the way into the tails.
double iso_open(double x) { return pdf(inv_cdf(Probability(x))); }

double sqrt_cost(const TestFunction1D& f, double s) {
    const double fx = f.value(s);
    const double fp = f.deriv(s);
    const double iso = iso_open(fx);
    return std::sqrt(iso * iso + fp * fp);
}

void require_converged(const QuadResult& r, const char* what) {
    if (!r.converged)
        throw std::runtime_error(std::string(what) + ": quadrature failed to converge (estimate " +
                                 std::to_string(r.value) + ", error " +
                                 std::to_string(r.error_estimate) + ")");
}

// One fixed 15-point Kronrod panel of f(s)*phi(s) on [a,b]; used for the
// short running-mass increments of the Psi sweep (width <= 0.5, analytic
// integrand, so a single panel carries ~1e-16 accuracy).
double mass_increment(const TestFunction1D& f, double a, double b) {
    const QuadResult r =
        adaptive_gk15([&f](double s) { return f.value(s) * pdf(s); }, a, b, 1e-15, 8);
    return r.value;
}

double psi_at(const TestFunction1D& f, double t, double y) {
    const double x = f.value(t);
    const double fp = f.deriv(t);
    const double p = inv_cdf(Probability(x));
    const BellmanEval ev = bellman_eval({t, p, y});
    const double iso = pdf(p);
    const double total_dB =
        ev.M_t + (ev.M_p / iso) * fp + ev.M_y * x * pdf(t);
    return std::sqrt(iso * iso + fp * fp) * pdf(t) - total_dB;
}

// Largest T <= T_want (stepping down by 0.5, floor 4) whose endpoint
// trajectory point is solvable.
double usable_endpoint(const TestFunction1D& f, double T_want, bool left,
                       const QuadratureSpec& spec, double mean) {
    double T = T_want;
    while (T > 4.0) {
        const double t = left ? -T : T;
        QuadratureSpec tail = spec;
        tail.abs_tol = std::max(spec.abs_tol * cdf(t), 1e-60);
        const QuadResult yq = gauss_weighted_integral(
            [&f](double s) { return f.value(s); }, -INFINITY, t, tail);
        const double y = yq.value;
        (void)mean;
        if (y > 0.0 && y < cdf(t) && !slope_ill_conditioned({t, 0.0, y})) return T;
        T -= 0.5;
    }
    return T;
}

} // namespace

double bobkov_lhs(const TestFunction1D& f, const QuadratureSpec& spec) {
    const QuadResult r = gauss_weighted_integral(
        [&f](double s) { return sqrt_cost(f, s); }, -INFINITY, INFINITY, spec);
    require_converged(r, "bobkov_lhs");
    return r.value;
}

DeficitReport bobkov_deficit(const TestFunction1D& f, const QuadratureSpec& spec) {
    spec.validate();
    DeficitReport rep;
    rep.lhs = bobkov_lhs(f, spec);

    const QuadResult meanq = gauss_weighted_integral(
        [&f](double s) { return f.value(s); }, -INFINITY, INFINITY, spec);
    require_converged(meanq, "bobkov_deficit: mean");
    rep.rhs = iso_open(meanq.value);
    rep.deficit = rep.lhs - rep.rhs;

    // Psi sweep over the largest well-conditioned window.
    rep.t_lo = usable_endpoint(f, 7.0, true, spec, meanq.value);
    rep.t_hi = usable_endpoint(f, 7.0, false, spec, meanq.value);

    QuadratureSpec tail = spec;
    tail.abs_tol = std::max(spec.abs_tol * cdf(-rep.t_lo), 1e-60);
    const QuadResult yq = gauss_weighted_integral(
        [&f](double s) { return f.value(s); }, -INFINITY, -rep.t_lo, tail);
    require_converged(yq, "bobkov_deficit: left-tail mass");

    const double panel = 0.25;
    const int npanels = static_cast<int>(std::ceil((rep.t_hi + rep.t_lo) / panel));
    const double width = (rep.t_hi + rep.t_lo) / npanels;
    const double tol_share = spec.abs_tol / npanels;

    double y_cp = yq.value;
    double psi_sum = 0.0;
    double min_psi = std::numeric_limits<double>::infinity();
    for (int k = 0; k < npanels; ++k) {
        const double L = -rep.t_lo + k * width;
        const double R = (k == npanels - 1) ? rep.t_hi : L + width;
        auto psi_local = [&](double s) {
            const double ys = y_cp + mass_increment(f, L, s);
            const double v = psi_at(f, s, ys);
            min_psi = std::min(min_psi, v);
            return v;
        };
        const QuadResult pr = adaptive_gk15(psi_local, L, R, tol_share, 40);
        psi_sum += pr.value;
        y_cp += mass_increment(f, L, R);
    }
    rep.psi_integral = psi_sum;
    rep.min_psi = min_psi;
    return rep;
}

double optimal_velocity(double t, Probability x, double y) {
    const BSurfaceEval b = b_surface(t, x, y);
    const double radicand = pdf(t) * pdf(t) - b.B_x * b.B_x;
    if (radicand <= 0.0)
        throw std::logic_error("optimal_velocity: phi(t)^2 - B_x^2 must stay positive");
    return iso_profile(x) * b.B_x / std::sqrt(radicand);
}

double pointwise_hjb_slack(double t, Probability x, double y, double v) {
    const BSurfaceEval b = b_surface(t, x, y);
    const double iso = iso_profile(x);
    return pdf(t) * std::sqrt(iso * iso + v * v) -
           (b.B_t + b.B_x * v + b.B_y * x.value() * pdf(t));
}

double psi_integrand(const TestFunction1D& f, double t, const QuadratureSpec& spec) {
    QuadratureSpec tail = spec;
    tail.abs_tol = std::max(spec.abs_tol * std::min(1.0, cdf(t)), 1e-60);
    const QuadResult yq = gauss_weighted_integral(
        [&f](double s) { return f.value(s); }, -INFINITY, t, tail);
    require_converged(yq, "psi_integrand: running mass");
    return psi_at(f, t, yq.value);
}

EndpointGaps endpoint_limits(const TestFunction1D& f, double T, const QuadratureSpec& spec) {
    if (!(T >= 4.0)) throw std::invalid_argument("endpoint_limits: T must be >= 4");
    spec.validate();

    const QuadResult meanq = gauss_weighted_integral(
        [&f](double s) { return f.value(s); }, -INFINITY, INFINITY, spec);
    require_converged(meanq, "endpoint_limits: mean");

    EndpointGaps out;
    out.used_t_low = usable_endpoint(f, T, true, spec, meanq.value);
    out.used_t_high = usable_endpoint(f, T, false, spec, meanq.value);

    {
        const double t = -out.used_t_low;
        QuadratureSpec tail = spec;
        tail.abs_tol = std::max(spec.abs_tol * cdf(t), 1e-60);
        const QuadResult yq = gauss_weighted_integral(
            [&f](double s) { return f.value(s); }, -INFINITY, t, tail);
        const double p = inv_cdf(Probability(f.value(t)));
        out.low_end = bellman_eval({t, p, yq.value}).M;
    }
    {
        const double t = out.used_t_high;
        const QuadResult yq = gauss_weighted_integral(
            [&f](double s) { return f.value(s); }, -INFINITY, t, spec);
        const double p = inv_cdf(Probability(f.value(t)));
        const double M = bellman_eval({t, p, yq.value}).M;
        out.high_end_gap = std::fabs(M - iso_open(meanq.value));
    }
    return out;
}

EqualityReport equality_characterization(const TestFunction1D& f, double tol,
                                         const QuadratureSpec& spec) {
    spec.validate();
    constexpr double T = 3.5;
    constexpr int n = 29;
    EqualityReport rep;
    rep.grid_t.reserve(n);
    rep.residual.reserve(n);

    QuadratureSpec tail = spec;
    tail.abs_tol = std::max(spec.abs_tol * cdf(-T), 1e-60);
    const QuadResult y0 = gauss_weighted_integral(
        [&f](double s) { return f.value(s); }, -INFINITY, -T, tail);
    require_converged(y0, "equality_characterization: left mass");

    double y = y0.value;
    double prev_t = -T;
    double sup = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = -T + 2.0 * T * i / (n - 1);
        y += mass_increment(f, prev_t, t);
        prev_t = t;
        const double x = f.value(t);
        const double p = inv_cdf(Probability(x));
        const double a = solve_slope({t, p, y}).a;
        const double r = f.deriv(t) / pdf(p) - a;
        rep.grid_t.push_back(t);
        rep.residual.push_back(r);
        sup = std::max(sup, std::fabs(r));
    }
    rep.sup_residual = sup;
    rep.equality = sup <= tol;
    return rep;
}

TensorChainReport tensorize_check_2d(const TestFunction2D& g, const QuadratureSpec& spec) {
    spec.validate();
    QuadratureSpec inner = spec;
    inner.abs_tol = std::max(spec.abs_tol * 0.1, 1e-13);
    QuadratureSpec outer = spec;
    outer.abs_tol = std::max(spec.abs_tol, 1e-12);

    auto y_avg = [&](const std::function<double(double, double)>& h, double x) {
        const QuadResult r = gauss_weighted_integral(
            [&h, x](double y) { return h(x, y); }, -INFINITY, INFINITY, inner);
        require_converged(r, "tensorize_check_2d: inner integral");
        return r.value;
    };

    TensorChainReport rep;

    const QuadResult mean2 = gauss_weighted_integral_2d(
        [&g](double x, double y) { return g.value(x, y); }, outer);
    require_converged(mean2, "tensorize_check_2d: 2D mean");
    rep.rhs = iso_open(mean2.value);

    auto F = [&](double x) { return y_avg([&g](double a, double b) { return g.value(a, b); }, x); };
    auto Gx = [&](double x) { return y_avg([&g](double a, double b) { return g.grad_x(a, b); }, x); };
    auto H = [&](double x) {
        return y_avg(
            [&g](double a, double b) {
                const double iso = iso_open(g.value(a, b));
                const double gy = g.grad_y(a, b);
                return std::sqrt(iso * iso + gy * gy);
            },
            x);
    };

    const QuadResult t1 = gauss_weighted_integral(
        [&](double x) {
            const double iso = iso_open(F(x));
            const double d = Gx(x);
            return std::sqrt(iso * iso + d * d);
        },
        -INFINITY, INFINITY, outer);
    require_converged(t1, "tensorize_check_2d: term 1");
    rep.term1 = t1.value;

    const QuadResult t2 = gauss_weighted_integral(
        [&](double x) {
            const double h = H(x);
            const double d = Gx(x);
            return std::sqrt(h * h + d * d);
        },
        -INFINITY, INFINITY, outer);
    require_converged(t2, "tensorize_check_2d: term 2");
    rep.term2 = t2.value;

    const QuadResult t3 = gauss_weighted_integral_2d(
        [&g](double x, double y) {
            const double iso = iso_open(g.value(x, y));
            const double gx = g.grad_x(x, y);
            const double gy = g.grad_y(x, y);
            return std::sqrt(iso * iso + gx * gx + gy * gy);
        },
        outer);
    require_converged(t3, "tensorize_check_2d: 2D integral");
    rep.lhs = t3.value;

    rep.slack_x = rep.term1 - rep.rhs;
    rep.slack_y = rep.term2 - rep.term1;
    rep.slack_minkowski = rep.lhs - rep.term2;
    rep.total_deficit = rep.lhs - rep.rhs;
    return rep;
}

} // namespace bobkov
