#include "bobkov/variational.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "bobkov/bellman.hpp"
#include "bobkov/slope.hpp"

namespace bobkov {

namespace {

double iso_open(double x) { return pdf(inv_cdf(Probability(x))); }

// d/dx I(x) = -Phi^{-1}(x)
double iso_open_deriv(double x) { return -inv_cdf(Probability(x)); }

constexpr double z_clamp = 8.2; // keeps Phi(z) strictly inside (0,1) in doubles

double clamp_z(double z) { return std::clamp(z, -z_clamp, z_clamp); }

} // namespace

CollocationGrid CollocationGrid::uniform(double t_end, int n, double T_low) {
    if (n < 64) throw std::invalid_argument("CollocationGrid: need at least 64 nodes");
    if (!(t_end > -T_low)) throw std::invalid_argument("CollocationGrid: t must exceed -T_low");
    CollocationGrid g;
    g.s.resize(static_cast<std::size_t>(n));
    const double h = (t_end + T_low) / (n - 1);
    for (int i = 0; i < n; ++i) g.s[static_cast<std::size_t>(i)] = -T_low + h * i;
    g.s.back() = t_end;
    return g;
}

namespace {

void check_sizes(const ControlTrajectory& traj, const CollocationGrid& grid) {
    if (traj.x.size() != grid.s.size())
        throw std::invalid_argument("trajectory/grid size mismatch");
}

} // namespace

double discretized_cost(const ControlTrajectory& traj, const CollocationGrid& grid) {
    check_sizes(traj, grid);
    const double h = grid.spacing();
    const int n = grid.size();
    double sum = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        const double xm = 0.5 * (traj.x[i] + traj.x[i + 1]);
        const double sm = 0.5 * (grid.s[i] + grid.s[i + 1]);
        const double d = (traj.x[i + 1] - traj.x[i]) / h;
        const double iso = iso_open(xm);
        sum += std::sqrt(iso * iso + d * d) * pdf(sm) * h;
    }
    return sum;
}

double discretized_constraint(const ControlTrajectory& traj, const CollocationGrid& grid) {
    check_sizes(traj, grid);
    const double h = grid.spacing();
    const int n = grid.size();
    double sum = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        const double xm = 0.5 * (traj.x[i] + traj.x[i + 1]);
        const double sm = 0.5 * (grid.s[i] + grid.s[i + 1]);
        sum += xm * pdf(sm) * h;
    }
    return sum;
}

namespace {

// Cost, constraint and their gradients in z-space (x_i = Phi(z_i); the last
// node is pinned to the endpoint and excluded from the variables).
struct CollocationProblem {
    const CollocationGrid& grid;
    double x_end;
    double y_target;
    int nvar; // grid.size() - 1

    explicit CollocationProblem(const CollocationGrid& g, double xe, double y)
        : grid(g), x_end(xe), y_target(y), nvar(g.size() - 1) {}

    void eval(const std::vector<double>& z, double& cost, double& cviol,
              std::vector<double>* cost_grad, std::vector<double>* cons_grad) const {
        const double h = grid.spacing();
        const int n = grid.size();
        cost = 0.0;
        double cons = 0.0;
        if (cost_grad) std::fill(cost_grad->begin(), cost_grad->end(), 0.0);
        if (cons_grad) std::fill(cons_grad->begin(), cons_grad->end(), 0.0);

        auto x_at = [&](int i) {
            return i == n - 1 ? x_end : cdf(clamp_z(z[static_cast<std::size_t>(i)]));
        };

        for (int i = 0; i + 1 < n; ++i) {
            const double xi = x_at(i);
            const double xj = x_at(i + 1);
            const double xm = 0.5 * (xi + xj);
            const double sm = 0.5 * (grid.s[i] + grid.s[i + 1]);
            const double w = pdf(sm) * h;
            const double d = (xj - xi) / h;
            const double iso = iso_open(xm);
            const double e = std::sqrt(iso * iso + d * d);
            cost += e * w;
            cons += xm * w;
            if (!cost_grad) continue;

            // d(cost_i)/dx via midpoint and slope channels
            const double de_dxm = (e > 0.0) ? iso * iso_open_deriv(xm) / e : 0.0;
            const double de_dd = (e > 0.0) ? d / e : 0.0;
            const double gi = w * (0.5 * de_dxm - de_dd / h);
            const double gj = w * (0.5 * de_dxm + de_dd / h);
            const double ci = 0.5 * w;

            if (i < nvar) {
                const double jac = pdf(clamp_z(z[static_cast<std::size_t>(i)]));
                (*cost_grad)[static_cast<std::size_t>(i)] += gi * jac;
                (*cons_grad)[static_cast<std::size_t>(i)] += ci * jac;
            }
            if (i + 1 < nvar) {
                const double jac = pdf(clamp_z(z[static_cast<std::size_t>(i + 1)]));
                (*cost_grad)[static_cast<std::size_t>(i + 1)] += gj * jac;
                (*cons_grad)[static_cast<std::size_t>(i + 1)] += ci * jac;
            }
        }
        cviol = cons - y_target;
    }
};

// L-BFGS with Armijo backtracking on the augmented Lagrangian
//   A(z) = cost + lambda*c + 0.5*mu*c^2.
struct InnerResult {
    double cost, cviol;
    double grad_inf;
    int iterations;
};

InnerResult lbfgs_minimize(const CollocationProblem& prob, std::vector<double>& z, double lambda,
                           double mu, double gtol, int max_iter) {
    const int nv = prob.nvar;
    std::vector<double> g(static_cast<std::size_t>(nv)), cost_g(static_cast<std::size_t>(nv)),
        cons_g(static_cast<std::size_t>(nv));
    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;
    constexpr int memory = 12;

    double cost, cviol;
    auto eval_all = [&](const std::vector<double>& zz, double& cst, double& cv,
                        std::vector<double>& grad) {
        prob.eval(zz, cst, cv, &cost_g, &cons_g);
        const double w = lambda + mu * cv;
        for (int i = 0; i < nv; ++i)
            grad[static_cast<std::size_t>(i)] =
                cost_g[static_cast<std::size_t>(i)] + w * cons_g[static_cast<std::size_t>(i)];
    };

    eval_all(z, cost, cviol, g);
    auto aug = [&](double cst, double cv) { return cst + lambda * cv + 0.5 * mu * cv * cv; };
    double A = aug(cost, cviol);

    int it = 0;
    std::vector<double> dir(static_cast<std::size_t>(nv)), z_new(static_cast<std::size_t>(nv)),
        g_new(static_cast<std::size_t>(nv));
    for (; it < max_iter; ++it) {
        double ginf = 0.0;
        for (double gi : g) ginf = std::max(ginf, std::fabs(gi));
        if (ginf <= gtol) break;

        // two-loop recursion
        dir = g;
        std::vector<double> alpha(s_hist.size());
        for (std::size_t k = s_hist.size(); k-- > 0;) {
            double sg = 0.0;
            for (int i = 0; i < nv; ++i)
                sg += s_hist[k][static_cast<std::size_t>(i)] * dir[static_cast<std::size_t>(i)];
            alpha[k] = rho_hist[k] * sg;
            for (int i = 0; i < nv; ++i)
                dir[static_cast<std::size_t>(i)] -= alpha[k] * y_hist[k][static_cast<std::size_t>(i)];
        }
        if (!s_hist.empty()) {
            double sy = 0.0, yy = 0.0;
            const auto& sb = s_hist.back();
            const auto& yb = y_hist.back();
            for (int i = 0; i < nv; ++i) {
                sy += sb[static_cast<std::size_t>(i)] * yb[static_cast<std::size_t>(i)];
                yy += yb[static_cast<std::size_t>(i)] * yb[static_cast<std::size_t>(i)];
            }
            const double gamma = sy / yy;
            for (double& di : dir) di *= gamma;
        }
        for (std::size_t k = 0; k < s_hist.size(); ++k) {
            double yg = 0.0;
            for (int i = 0; i < nv; ++i)
                yg += y_hist[k][static_cast<std::size_t>(i)] * dir[static_cast<std::size_t>(i)];
            const double beta = rho_hist[k] * yg;
            for (int i = 0; i < nv; ++i)
                dir[static_cast<std::size_t>(i)] +=
                    (alpha[k] - beta) * s_hist[k][static_cast<std::size_t>(i)];
        }
        for (double& di : dir) di = -di;

        double dg = 0.0;
        for (int i = 0; i < nv; ++i)
            dg += dir[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(i)];
        if (dg >= 0.0) { // not a descent direction; restart from steepest descent
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            dg = 0.0;
            for (int i = 0; i < nv; ++i) {
                dir[static_cast<std::size_t>(i)] = -g[static_cast<std::size_t>(i)];
                dg -= g[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(i)];
            }
        }

        // Armijo backtracking
        double step = 1.0;
        double A_new = 0.0, cost_new = 0.0, cviol_new = 0.0;
        bool accepted = false;
        for (int ls = 0; ls < 50; ++ls) {
            for (int i = 0; i < nv; ++i)
                z_new[static_cast<std::size_t>(i)] =
                    z[static_cast<std::size_t>(i)] + step * dir[static_cast<std::size_t>(i)];
            eval_all(z_new, cost_new, cviol_new, g_new);
            A_new = aug(cost_new, cviol_new);
            if (A_new <= A + 1e-4 * step * dg) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break; // line search exhausted; gradient likely at noise floor

        std::vector<double> s_vec(static_cast<std::size_t>(nv)), y_vec(static_cast<std::size_t>(nv));
        double sy = 0.0;
        for (int i = 0; i < nv; ++i) {
            s_vec[static_cast<std::size_t>(i)] =
                z_new[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(i)];
            y_vec[static_cast<std::size_t>(i)] =
                g_new[static_cast<std::size_t>(i)] - g[static_cast<std::size_t>(i)];
            sy += s_vec[static_cast<std::size_t>(i)] * y_vec[static_cast<std::size_t>(i)];
        }
        if (sy > 1e-14) {
            s_hist.push_back(std::move(s_vec));
            y_hist.push_back(std::move(y_vec));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        z.swap(z_new);
        g.swap(g_new);
        cost = cost_new;
        cviol = cviol_new;
        A = A_new;
    }

    double ginf = 0.0;
    for (double gi : g) ginf = std::max(ginf, std::fabs(gi));
    return {cost, cviol, ginf, it};
}

} // namespace

OptimizationResult constrained_minimize(double t, Probability x_end, double y,
                                        const CollocationGrid& grid, const MinimizeOptions& opts) {
    validate_domain_point({t, inv_cdf(x_end), y});
    const int n = grid.size();
    if (std::fabs(grid.s.back() - t) > 1e-12)
        throw std::invalid_argument("constrained_minimize: grid must end at the query time");

    CollocationProblem prob(grid, x_end.value(), y);
    std::vector<double> z(static_cast<std::size_t>(prob.nvar));

    if (opts.init == InitMode::AnalyticCandidate) {
        const ProbitAffineParams cand = analytic_candidate(t, x_end, y);
        for (int i = 0; i < prob.nvar; ++i)
            z[static_cast<std::size_t>(i)] = clamp_z(cand.a * grid.s[static_cast<std::size_t>(i)] + cand.b);
    } else {
        // constant level matching the running constraint, then probit
        double mass = 0.0;
        const double h = grid.spacing();
        for (int i = 0; i + 1 < n; ++i) mass += pdf(0.5 * (grid.s[i] + grid.s[i + 1])) * h;
        const double c = std::clamp(y / mass, 1e-12, 1.0 - 1e-12);
        const double zc = inv_cdf(Probability(c));
        std::fill(z.begin(), z.end(), zc);
    }

    OptimizationResult out;
    double lambda = 0.0;
    double mu = 10.0;
    double prev_viol = std::numeric_limits<double>::infinity();
    double gtol_inner = 1e-4;
    InnerResult inner{0.0, 0.0, 0.0, 0};
    for (int outer = 0; outer < opts.max_outer; ++outer) {
        inner = lbfgs_minimize(prob, z, lambda, mu, gtol_inner, opts.max_inner);
        out.inner_iterations += inner.iterations;
        out.outer_iterations = outer + 1;

        if (std::fabs(inner.cviol) <= opts.constraint_tol && inner.grad_inf <= opts.grad_tol) {
            out.converged = true;
            break;
        }
        lambda += mu * inner.cviol;
        if (std::fabs(inner.cviol) > 0.25 * prev_viol) mu *= 10.0;
        prev_viol = std::fabs(inner.cviol);
        gtol_inner = std::max(gtol_inner * 0.2, opts.grad_tol * 0.5);
    }

    ControlTrajectory traj;
    traj.x.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < prob.nvar; ++i)
        traj.x[static_cast<std::size_t>(i)] = cdf(clamp_z(z[static_cast<std::size_t>(i)]));
    traj.x.back() = x_end.value();

    out.value = discretized_cost(traj, grid);
    out.trajectory = std::move(traj);
    out.constraint_residual = inner.cviol;
    out.gradient_norm = inner.grad_inf;
    return out;
}

ProbitAffineParams analytic_candidate(double t, Probability x, double y) {
    const double p = inv_cdf(x);
    const SlopeSolution sol = solve_slope({t, p, y});
    return {sol.a, p - sol.a * t};
}

ControlTrajectory sample_candidate(const ProbitAffineParams& params, const CollocationGrid& grid) {
    ControlTrajectory traj;
    traj.x.reserve(grid.s.size());
    for (double s : grid.s) traj.x.push_back(cdf(params.a * s + params.b));
    return traj;
}

CertificationReport certify_value(double t, Probability x, double y, const CollocationGrid& grid,
                                  const MinimizeOptions& opts) {
    CertificationReport rep;
    rep.analytic_value = b_surface(t, x, y).B;

    const ProbitAffineParams cand = analytic_candidate(t, x, y);
    rep.candidate_cost = discretized_cost(sample_candidate(cand, grid), grid);

    OptimizationResult res = constrained_minimize(t, x, y, grid, opts);
    rep.optimum = res.value;
    rep.converged = res.converged;

    // refinement estimate from a doubled grid
    const CollocationGrid fine = CollocationGrid::uniform(t, 2 * grid.size(), -grid.s.front());
    const OptimizationResult res2 = constrained_minimize(t, x, y, fine, opts);
    const double cand2 = discretized_cost(sample_candidate(cand, fine), fine);
    rep.refinement_estimate =
        4.0 * std::max(std::fabs(res.value - res2.value), std::fabs(rep.candidate_cost - cand2)) +
        1e-6;

    rep.gap_optimum = std::fabs(rep.optimum - rep.analytic_value);
    rep.gap_candidate = std::fabs(rep.candidate_cost - rep.analytic_value);
    rep.certified = res.converged && res2.converged &&
                    rep.gap_optimum <= rep.refinement_estimate &&
                    rep.gap_candidate <= rep.refinement_estimate;
    rep.result = std::move(res);
    return rep;
}

} // namespace bobkov
