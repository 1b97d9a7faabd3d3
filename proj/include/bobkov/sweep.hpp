#ifndef BOBKOV_SWEEP_HPP
#define BOBKOV_SWEEP_HPP

#include <string>
#include <vector>

#include "bobkov/quadrature.hpp"
#include "bobkov/test_function.hpp"
#include "bobkov/verifier.hpp"

namespace bobkov {

// Grid sweeps are embarrassingly parallel: every row is an independent pure
// evaluation written to its own slot, so serial and OpenMP runs produce
// byte-identical output. The serial path is kept as the reference the tests
// compare against; tools/bench_sweeps times the two.
struct SweepOptions {
    bool parallel = true;
    int max_threads = 0; // 0: honor BOBKOV_LAB_THREADS, else the OpenMP default
    double slope_tol = 1e-12;
};

// Thread count a sweep will actually use.
int resolve_threads(const SweepOptions& opts);

enum class RowStatus { ok, ill_conditioned, error };

struct HjbGridSpec {
    double t_min = -2.0, t_max = 2.0;
    int nt = 6;
    double p_min = -2.0, p_max = 2.0;
    int np = 6;
    std::vector<double> lambdas = {0.1, 0.3, 0.5, 0.7, 0.9};
};

struct HjbRow {
    double t, p, lambda;
    double a, M, residual, rel_residual;
    RowStatus status;
};

// Residual of the value-surface identity over the grid, normalized by
// phi(t)phi(p). y = lambda * Phi(t).
std::vector<HjbRow> hjb_sweep(const HjbGridSpec& grid, const SweepOptions& opts);

struct DerivativeRow {
    double t, p, lambda;
    // relative gaps between closed forms and central finite differences
    double err_a_t, err_a_p, err_a_y;
    double err_M_t, err_M_p, err_M_y;
    RowStatus status;
};

// Central-difference check of all six closed-form partials. fd_step is scaled
// by max(1,|coordinate|) per axis.
std::vector<DerivativeRow> derivative_sweep(const HjbGridSpec& grid, double fd_step,
                                            const SweepOptions& opts);

struct OracleGapRow {
    double t, p, a;
    double mass_quadrature, mass_closed_form, abs_gap;
    RowStatus status;
};

struct OracleGridSpec {
    double t_min = -2.0, t_max = 2.0;
    int nt = 5;
    double p_min = -2.0, p_max = 2.0;
    int np = 5;
    double a_min = -3.0, a_max = 3.0;
    int na = 5;
};

// Quadrature route vs bivariate-normal closed form for the half-space mass.
std::vector<OracleGapRow> oracle_gap_sweep(const OracleGridSpec& grid, const QuadratureSpec& spec,
                                           const SweepOptions& opts);

struct CorpusRow {
    std::string name;
    DeficitReport deficit;
    double sup_ode_residual;
    bool equality_by_deficit;  // deficit <= 1e-8
    bool equality_by_ode;      // sup residual <= 1e-6
    RowStatus status;
};

inline constexpr double deficit_equality_threshold = 1e-8;
inline constexpr double ode_equality_threshold = 1e-6;

// Deficit, Psi bookkeeping and both equality classifications for a corpus.
std::vector<CorpusRow> deficit_corpus_eval(const std::vector<TestFunction1D>& corpus,
                                           const QuadratureSpec& spec, const SweepOptions& opts);

} // namespace bobkov

#endif
