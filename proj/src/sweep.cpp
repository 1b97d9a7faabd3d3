#include "bobkov/sweep.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include <omp.h>

#include "bobkov/bellman.hpp"
#include "bobkov/slope.hpp"

namespace bobkov {

int resolve_threads(const SweepOptions& opts) {
    int n = omp_get_max_threads();
    if (opts.max_threads > 0) {
        n = std::min(n, opts.max_threads);
    } else if (const char* env = std::getenv("BOBKOV_LAB_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    return std::max(1, opts.parallel ? n : 1);
}

namespace {

double grid_at(double lo, double hi, int n, int i) {
    return n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
}

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

template <typename Row, typename Fn>
std::vector<Row> run_rows(int count, const SweepOptions& opts, Fn&& fill) {
    std::vector<Row> rows(static_cast<std::size_t>(count));
    const int threads = resolve_threads(opts);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int i = 0; i < count; ++i) fill(i, rows[static_cast<std::size_t>(i)]);
    return rows;
}

} // namespace

std::vector<HjbRow> hjb_sweep(const HjbGridSpec& grid, const SweepOptions& opts) {
    const int nl = static_cast<int>(grid.lambdas.size());
    const int count = grid.nt * grid.np * nl;
    return run_rows<HjbRow>(count, opts, [&](int idx, HjbRow& row) {
        const int it = idx / (grid.np * nl);
        const int ip = (idx / nl) % grid.np;
        const int il = idx % nl;
        row.t = grid_at(grid.t_min, grid.t_max, grid.nt, it);
        row.p = grid_at(grid.p_min, grid.p_max, grid.np, ip);
        row.lambda = grid.lambdas[static_cast<std::size_t>(il)];
        row.a = row.M = row.residual = row.rel_residual = nan_v;
        try {
            const DomainPoint pt{row.t, row.p, row.lambda * cdf(row.t)};
            const BellmanEval ev = bellman_eval(pt, opts.slope_tol);
            row.a = ev.a;
            row.M = ev.M;
            row.residual = hjb_residual(pt, ev);
            row.rel_residual = std::fabs(row.residual) / (pdf(row.t) * pdf(row.p));
            row.status = RowStatus::ok;
        } catch (const ill_conditioned_error&) {
            row.status = RowStatus::ill_conditioned;
        } catch (const std::exception&) {
            row.status = RowStatus::error;
        }
    });
}

std::vector<DerivativeRow> derivative_sweep(const HjbGridSpec& grid, double fd_step,
                                            const SweepOptions& opts) {
    const int nl = static_cast<int>(grid.lambdas.size());
    const int count = grid.nt * grid.np * nl;
    const double tight_tol = std::min(opts.slope_tol, 1e-14);

    auto rel_gap = [](double closed, double fd) {
        const double scale = std::max({std::fabs(closed), std::fabs(fd), 1e-300});
        return std::fabs(closed - fd) / scale;
    };

    return run_rows<DerivativeRow>(count, opts, [&](int idx, DerivativeRow& row) {
        const int it = idx / (grid.np * nl);
        const int ip = (idx / nl) % grid.np;
        const int il = idx % nl;
        row.t = grid_at(grid.t_min, grid.t_max, grid.nt, it);
        row.p = grid_at(grid.p_min, grid.p_max, grid.np, ip);
        row.lambda = grid.lambdas[static_cast<std::size_t>(il)];
        row.err_a_t = row.err_a_p = row.err_a_y = nan_v;
        row.err_M_t = row.err_M_p = row.err_M_y = nan_v;
        try {
            const double y = row.lambda * cdf(row.t);
            const DomainPoint pt{row.t, row.p, y};
            const SlopeSolution sol = solve_slope(pt, tight_tol);
            const SlopePartials cf = slope_partials(pt, sol);
            const BellmanEval ev = bellman_eval(pt, tight_tol);

            const double ht = fd_step * std::max(1.0, std::fabs(row.t));
            const double hp = fd_step * std::max(1.0, std::fabs(row.p));
            const double hy = fd_step * std::max(1.0, std::fabs(y)) * cdf(row.t);

            auto slope_of = [&](double t, double p, double yy) {
                return solve_slope({t, p, yy}, tight_tol).a;
            };
            auto value_of = [&](double t, double p, double yy) {
                return bellman_eval({t, p, yy}, tight_tol).M;
            };

            const double fd_a_t =
                (slope_of(row.t + ht, row.p, y) - slope_of(row.t - ht, row.p, y)) / (2.0 * ht);
            const double fd_a_p =
                (slope_of(row.t, row.p + hp, y) - slope_of(row.t, row.p - hp, y)) / (2.0 * hp);
            const double fd_a_y =
                (slope_of(row.t, row.p, y + hy) - slope_of(row.t, row.p, y - hy)) / (2.0 * hy);
            const double fd_M_t =
                (value_of(row.t + ht, row.p, y) - value_of(row.t - ht, row.p, y)) / (2.0 * ht);
            const double fd_M_p =
                (value_of(row.t, row.p + hp, y) - value_of(row.t, row.p - hp, y)) / (2.0 * hp);
            const double fd_M_y =
                (value_of(row.t, row.p, y + hy) - value_of(row.t, row.p, y - hy)) / (2.0 * hy);

            row.err_a_t = rel_gap(cf.a_t, fd_a_t);
            row.err_a_p = rel_gap(cf.a_p, fd_a_p);
            row.err_a_y = rel_gap(cf.a_y, fd_a_y);
            row.err_M_t = rel_gap(ev.M_t, fd_M_t);
            row.err_M_p = rel_gap(ev.M_p, fd_M_p);
            row.err_M_y = rel_gap(ev.M_y, fd_M_y);
            row.status = RowStatus::ok;
        } catch (const ill_conditioned_error&) {
            row.status = RowStatus::ill_conditioned;
        } catch (const std::exception&) {
            row.status = RowStatus::error;
        }
    });
}

std::vector<OracleGapRow> oracle_gap_sweep(const OracleGridSpec& grid, const QuadratureSpec& spec,
                                           const SweepOptions& opts) {
    const int count = grid.nt * grid.np * grid.na;
    return run_rows<OracleGapRow>(count, opts, [&](int idx, OracleGapRow& row) {
        const int it = idx / (grid.np * grid.na);
        const int ip = (idx / grid.na) % grid.np;
        const int ia = idx % grid.na;
        row.t = grid_at(grid.t_min, grid.t_max, grid.nt, it);
        row.p = grid_at(grid.p_min, grid.p_max, grid.np, ip);
        row.a = grid_at(grid.a_min, grid.a_max, grid.na, ia);
        row.mass_quadrature = row.mass_closed_form = row.abs_gap = nan_v;
        try {
            const QuadResult q = truncated_halfspace_mass(row.t, row.p, row.a, spec);
            row.mass_quadrature = q.value;
            row.mass_closed_form = halfspace_mass_bvn(row.t, row.p, row.a);
            row.abs_gap = std::fabs(row.mass_quadrature - row.mass_closed_form);
            row.status = q.converged ? RowStatus::ok : RowStatus::error;
        } catch (const std::exception&) {
            row.status = RowStatus::error;
        }
    });
}

std::vector<CorpusRow> deficit_corpus_eval(const std::vector<TestFunction1D>& corpus,
                                           const QuadratureSpec& spec, const SweepOptions& opts) {
    const int count = static_cast<int>(corpus.size());
    return run_rows<CorpusRow>(count, opts, [&](int idx, CorpusRow& row) {
        const TestFunction1D& f = corpus[static_cast<std::size_t>(idx)];
        row.name = f.name();
        try {
            row.deficit = bobkov_deficit(f, spec);
            const EqualityReport eq = equality_characterization(f, ode_equality_threshold, spec);
            row.sup_ode_residual = eq.sup_residual;
            row.equality_by_deficit = row.deficit.deficit <= deficit_equality_threshold;
            row.equality_by_ode = eq.equality;
            row.status = RowStatus::ok;
        } catch (const std::exception&) {
            row.sup_ode_residual = nan_v;
            row.equality_by_deficit = row.equality_by_ode = false;
            row.status = RowStatus::error;
        }
    });
}

} // namespace bobkov
