#ifndef BOBKOV_VARIATIONAL_HPP
#define BOBKOV_VARIATIONAL_HPP

#include <vector>

#include "bobkov/gauss.hpp"

namespace bobkov {

// Uniform time grid on [-T_low, t]; the last node is the query time.
struct CollocationGrid {
    std::vector<double> s;

    static CollocationGrid uniform(double t_end, int n, double T_low = 8.0);
    int size() const { return static_cast<int>(s.size()); }
    double spacing() const { return s[1] - s[0]; }
};

// Discretized profile values, one per grid node, strictly inside (0,1).
struct ControlTrajectory {
    std::vector<double> x;
};

struct OptimizationResult {
    double value = 0.0;
    ControlTrajectory trajectory;
    double constraint_residual = 0.0;
    double gradient_norm = 0.0;
    bool converged = false;
    int outer_iterations = 0;
    int inner_iterations = 0;
};

// Midpoint-rule cost sum_i sqrt(I^2(xbar_i) + ((x_{i+1}-x_i)/h)^2) phi(sbar_i) h.
double discretized_cost(const ControlTrajectory& traj, const CollocationGrid& grid);

// Midpoint-rule running constraint sum_i xbar_i phi(sbar_i) h.
double discretized_constraint(const ControlTrajectory& traj, const CollocationGrid& grid);

enum class InitMode { ConstantFeasible, AnalyticCandidate };

struct MinimizeOptions {
    double constraint_tol = 1e-8;
    double grad_tol = 1e-6;
    int max_outer = 20;
    int max_inner = 400;
    InitMode init = InitMode::ConstantFeasible;
};

// Minimizes the discretized cost subject to x_N = x_end and the running
// constraint equal to y. Augmented-Lagrangian outer loop; L-BFGS inner
// minimizer on probit-transformed variables x = Phi(z), which keeps the
// iterates inside (0,1) without inequality constraints.
OptimizationResult constrained_minimize(double t, Probability x_end, double y,
                                        const CollocationGrid& grid,
                                        const MinimizeOptions& opts = {});

struct ProbitAffineParams {
    double a = 0.0;
    double b = 0.0;
};

// The affine-probit competitor Phi(a* s + b*) matching both endpoint and
// running constraint: a* is the implicit slope, b* = Phi^{-1}(x) - a* t.
ProbitAffineParams analytic_candidate(double t, Probability x, double y);

ControlTrajectory sample_candidate(const ProbitAffineParams& params, const CollocationGrid& grid);

struct CertificationReport {
    double optimum = 0.0;        // collocation optimum at the requested grid
    double candidate_cost = 0.0; // sampled affine-probit competitor, same grid
    double analytic_value = 0.0; // closed-form B(t,x,y)
    double gap_optimum = 0.0;
    double gap_candidate = 0.0;
    double refinement_estimate = 0.0; // from an N -> 2N comparison
    bool certified = false;
    bool converged = false;
    OptimizationResult result;
};

// Certifies that the collocation optimum and the analytic candidate both land
// on the closed-form value up to the measured discretization error.
CertificationReport certify_value(double t, Probability x, double y, const CollocationGrid& grid,
                                  const MinimizeOptions& opts = {});

} // namespace bobkov

#endif
