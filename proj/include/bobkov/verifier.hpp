#ifndef BOBKOV_VERIFIER_HPP
#define BOBKOV_VERIFIER_HPP

#include <vector>

#include "bobkov/gauss.hpp"
#include "bobkov/quadrature.hpp"
#include "bobkov/test_function.hpp"

namespace bobkov {

struct DeficitReport {
    double lhs = 0.0;          // integral of sqrt(I^2(f) + f'^2) against gamma
    double rhs = 0.0;          // I(mean of f)
    double deficit = 0.0;      // lhs - rhs, >= 0
    double min_psi = 0.0;      // smallest pointwise Psi seen on the sweep
    double psi_integral = 0.0; // integral of Psi over [-t_lo, t_hi]
    double t_lo = 0.0;         // window actually used for the Psi sweep
    double t_hi = 0.0;
};

// Left-hand side of the functional inequality for a 1D profile.
double bobkov_lhs(const TestFunction1D& f, const QuadratureSpec& spec);

// Deficit plus the Psi-integrand bookkeeping: the deficit equals the integral
// of the pointwise gap Psi(t) between the running cost and the total
// derivative of the value surface along the trajectory (t, f(t), y(t)).
DeficitReport bobkov_deficit(const TestFunction1D& f, const QuadratureSpec& spec);

// Minimizing velocity v* = I(x) B_x / sqrt(phi^2(t) - B_x^2).
double optimal_velocity(double t, Probability x, double y);

// phi(t) sqrt(I^2(x)+v^2) - (B_t + B_x v + B_y x phi(t)); >= 0, zero iff v = v*.
double pointwise_hjb_slack(double t, Probability x, double y, double v);

// Psi(t) for a single trajectory point, with y(t) integrated on demand.
double psi_integrand(const TestFunction1D& f, double t, const QuadratureSpec& spec);

struct EndpointGaps {
    double low_end = 0.0;       // M at the left endpoint, -> 0
    double high_end_gap = 0.0;  // |M at the right endpoint - I(mean)|, -> 0
    double used_t_low = 0.0;    // largest usable |t| per side (slope conditioning)
    double used_t_high = 0.0;
};

EndpointGaps endpoint_limits(const TestFunction1D& f, double T, const QuadratureSpec& spec);

struct EqualityReport {
    bool equality = false;
    double sup_residual = 0.0; // sup over the grid of |f'/I(f) - a(t, h(t), y(t))|
    std::vector<double> grid_t;
    std::vector<double> residual;
};

// Equality holds iff the trajectory satisfies h' = a along the sweep, which
// forces the probit of f to be affine.
EqualityReport equality_characterization(const TestFunction1D& f, double tol,
                                         const QuadratureSpec& spec);

struct TensorChainReport {
    double rhs = 0.0;    // I(2D mean)
    double term1 = 0.0;  // 1D inequality applied in x to the y-average
    double term2 = 0.0;  // 1D inequality applied in y inside the radical
    double lhs = 0.0;    // full 2D integral
    double slack_x = 0.0;
    double slack_y = 0.0;
    double slack_minkowski = 0.0;
    double total_deficit = 0.0;
};

// The three-step chain lifting the 1D inequality to the plane; each slack is
// >= 0 and they telescope to the 2D deficit.
TensorChainReport tensorize_check_2d(const TestFunction2D& g, const QuadratureSpec& spec);

} // namespace bobkov

#endif
