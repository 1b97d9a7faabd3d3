#ifndef BOBKOV_QUADRATURE_HPP
#define BOBKOV_QUADRATURE_HPP

#include <functional>
#include <stdexcept>

namespace bobkov {

struct QuadratureSpec {
    double abs_tol = 1e-12;        // target absolute error
    int max_subdivisions = 400;    // panel budget for the adaptive rule
    double tail_cutoff = 8.5;      // |s| beyond which phi-weighted mass is dropped

    void validate() const {
        if (!(abs_tol > 0.0)) throw std::invalid_argument("QuadratureSpec: abs_tol must be > 0");
        if (!(tail_cutoff >= 8.0)) throw std::invalid_argument("QuadratureSpec: tail_cutoff must be >= 8");
        if (max_subdivisions < 1) throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 1");
    }
};

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
    int subdivisions = 0;
};

// Adaptive Gauss-Kronrod 15-point integration of an arbitrary integrand on a
// finite interval. Non-convergence is reported through the result flag with
// the best available estimate, never silently.
QuadResult adaptive_gk15(const std::function<double(double)>& f, double a, double b,
                         double abs_tol, int max_subdivisions);

// Integral of g(s)*phi(s) over [lower, upper]; infinite endpoints allowed,
// the interval is truncated at +-tail_cutoff.
QuadResult gauss_weighted_integral(const std::function<double(double)>& g,
                                   double lower, double upper, const QuadratureSpec& spec);

// Gaussian measure of the truncated half-space {s <= t, u <= (s-t)a + p},
// evaluated by quadrature of Phi((s-t)a+p)*phi(s). This is the independent
// oracle; the smooth production path is halfspace_mass_bvn below.
QuadResult truncated_halfspace_mass(double t, double p, double a, const QuadratureSpec& spec);

// Standard bivariate normal CDF P(X <= h, Y <= k), correlation rho in (-1,1).
// Genz (2004) hybrid of the Drezner-Wesolowsky correlation-parameter
// quadrature; absolute accuracy ~1e-15.
double bvn_cdf(double h, double k, double rho);

// Closed form for the truncated half-space mass: rotating (s,u) shows the
// region is a bivariate-normal quadrant with k = (p-at)/sqrt(1+a^2) and
// rho = -a/sqrt(1+a^2).
double halfspace_mass_bvn(double t, double p, double a);

// mass(t,p,a)/phi(t) as the integral of Phi(p-aw)*exp(tw - w^2/2) over w >= 0.
// For t <= 0 this form keeps full relative accuracy however tiny the mass,
// which the slope solver needs for deep-tail evaluations.
double halfspace_mass_tail_scaled(double t, double p, double a, double abs_tol = 1e-14);

// Tensor-product integral of g(x,y)*phi(x)*phi(y) over the plane.
QuadResult gauss_weighted_integral_2d(const std::function<double(double, double)>& g,
                                      const QuadratureSpec& spec);

} // namespace bobkov

#endif
