// bobkov-lab: sweeps and reports for the Gaussian isoperimetry laboratory.
// CSV for grid sweeps, JSON for single-object reports; exit codes:
//   0 all checks pass, 1 tolerance exceeded / non-convergence, 2 usage error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bobkov/bellman.hpp"
#include "bobkov/slope.hpp"
#include "bobkov/sweep.hpp"
#include "bobkov/test_function.hpp"
#include "bobkov/variational.hpp"
#include "bobkov/verifier.hpp"

namespace {

using nlohmann::json;

std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[64];
    std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&tt));
    return buf;
}

const char* status_str(bobkov::RowStatus s) {
    switch (s) {
        case bobkov::RowStatus::ok: return "ok";
        case bobkov::RowStatus::ill_conditioned: return "ill_conditioned";
        default: return "error";
    }
}

class Output {
  public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw std::runtime_error("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

void emit_json(Output& out, json j) {
    j["timestamp"] = timestamp();
    out.stream() << j.dump(2) << "\n";
}

int run_hjb_sweep(const bobkov::HjbGridSpec& grid, double tol, const std::string& path,
                  bool serial) {
    bobkov::SweepOptions opts;
    opts.parallel = !serial;
    const auto rows = bobkov::hjb_sweep(grid, opts);

    Output out(path);
    out.stream() << "# generated " << timestamp() << "\n";
    out.stream() << "t,p,lambda,a,M,residual,rel_residual,status\n";
    double max_rel = 0.0;
    bool flagged = false;
    for (const auto& r : rows) {
        out.stream() << num17(r.t) << ',' << num17(r.p) << ',' << num17(r.lambda) << ','
                     << num17(r.a) << ',' << num17(r.M) << ',' << num17(r.residual) << ','
                     << num17(r.rel_residual) << ',' << status_str(r.status) << "\n";
        if (r.status != bobkov::RowStatus::ok)
            flagged = true;
        else
            max_rel = std::max(max_rel, r.rel_residual);
    }
    return (!flagged && max_rel <= tol) ? 0 : 1;
}

int run_derivative_check(const bobkov::HjbGridSpec& grid, double fd_step, double tol,
                         const std::string& path, bool serial) {
    bobkov::SweepOptions opts;
    opts.parallel = !serial;
    const auto rows = bobkov::derivative_sweep(grid, fd_step, opts);

    Output out(path);
    out.stream() << "# generated " << timestamp() << "\n";
    out.stream() << "t,p,lambda,err_a_t,err_a_p,err_a_y,err_M_t,err_M_p,err_M_y,status\n";
    double max_err = 0.0;
    bool flagged = false;
    for (const auto& r : rows) {
        out.stream() << num17(r.t) << ',' << num17(r.p) << ',' << num17(r.lambda) << ','
                     << num17(r.err_a_t) << ',' << num17(r.err_a_p) << ',' << num17(r.err_a_y)
                     << ',' << num17(r.err_M_t) << ',' << num17(r.err_M_p) << ','
                     << num17(r.err_M_y) << ',' << status_str(r.status) << "\n";
        if (r.status != bobkov::RowStatus::ok) {
            flagged = true;
        } else {
            for (double e : {r.err_a_t, r.err_a_p, r.err_a_y, r.err_M_t, r.err_M_p, r.err_M_y})
                max_err = std::max(max_err, e);
        }
    }
    return (!flagged && max_err <= tol) ? 0 : 1;
}

json deficit_to_json(const bobkov::CorpusRow& row) {
    return json{{"function", row.name},
                {"lhs", row.deficit.lhs},
                {"rhs", row.deficit.rhs},
                {"deficit", row.deficit.deficit},
                {"psi_integral", row.deficit.psi_integral},
                {"min_psi", row.deficit.min_psi},
                {"equality", row.equality_by_deficit},
                {"sup_ode_residual", row.sup_ode_residual},
                {"equality_by_ode", row.equality_by_ode},
                {"status", status_str(row.status)}};
}

bool deficit_row_ok(const bobkov::CorpusRow& row) {
    return row.status == bobkov::RowStatus::ok && row.deficit.deficit >= -1e-9 &&
           std::fabs(row.deficit.deficit - row.deficit.psi_integral) <= 1e-7 &&
           row.deficit.min_psi >= -1e-10 && row.equality_by_deficit == row.equality_by_ode;
}

int run_bobkov_check(const std::string& fn_spec, std::uint64_t seed, const std::string& path,
                     bool serial) {
    bobkov::SweepOptions opts;
    opts.parallel = !serial;
    const bobkov::QuadratureSpec qspec;

    std::vector<bobkov::TestFunction1D> corpus;
    if (fn_spec.rfind("corpus:", 0) == 0) {
        const int n = std::stoi(fn_spec.substr(7));
        if (n < 1) throw CLI::ValidationError("--function", "corpus size must be positive");
        corpus = bobkov::make_corpus_1d(seed, n);
    } else {
        corpus.push_back(bobkov::parse_function_1d(fn_spec));
    }

    const auto rows = bobkov::deficit_corpus_eval(corpus, qspec, opts);
    bool all_ok = true;
    Output out(path);
    if (rows.size() == 1) {
        all_ok = deficit_row_ok(rows[0]);
        json j = deficit_to_json(rows[0]);
        j["seed"] = seed;
        emit_json(out, j);
    } else {
        json items = json::array();
        double min_deficit = INFINITY, max_gap = 0.0;
        int disagreements = 0;
        for (const auto& r : rows) {
            items.push_back(deficit_to_json(r));
            all_ok = all_ok && deficit_row_ok(r);
            min_deficit = std::min(min_deficit, r.deficit.deficit);
            max_gap = std::max(max_gap, std::fabs(r.deficit.deficit - r.deficit.psi_integral));
            if (r.equality_by_deficit != r.equality_by_ode) ++disagreements;
        }
        emit_json(out, json{{"seed", seed},
                            {"count", rows.size()},
                            {"min_deficit", min_deficit},
                            {"max_identity_gap", max_gap},
                            {"classification_disagreements", disagreements},
                            {"status", all_ok ? "ok" : "tolerance_exceeded"},
                            {"functions", std::move(items)}});
    }
    return all_ok ? 0 : 1;
}

int run_solve_slope(double t, double p, double lambda, double tol, const std::string& path) {
    Output out(path);
    out.stream() << "# generated " << timestamp() << "\n";
    out.stream() << "t,p,lambda,y,a,residual,iterations,bracket_lo,bracket_hi,status\n";
    const double y = lambda * bobkov::cdf(t);
    std::string status = "ok";
    bobkov::SlopeSolution sol;
    try {
        sol = bobkov::solve_slope({t, p, y}, tol);
    } catch (const bobkov::ill_conditioned_error&) {
        status = "ill_conditioned";
    }
    out.stream() << num17(t) << ',' << num17(p) << ',' << num17(lambda) << ',' << num17(y) << ','
                 << num17(sol.a) << ',' << num17(sol.residual) << ',' << sol.iterations << ','
                 << num17(sol.bracket_lo) << ',' << num17(sol.bracket_hi) << ',' << status << "\n";
    return status == "ok" ? 0 : 1;
}

int run_certify(double t, double x, double lambda, double y_raw, bool have_y, int n,
                bool init_candidate, const std::string& path) {
    const double y = have_y ? y_raw : lambda * bobkov::cdf(t);
    const bobkov::Probability xp(x);
    const auto grid = bobkov::CollocationGrid::uniform(t, n);
    bobkov::MinimizeOptions mopts;
    if (init_candidate) mopts.init = bobkov::InitMode::AnalyticCandidate;
    const auto rep = bobkov::certify_value(t, xp, y, grid, mopts);

    Output out(path);
    emit_json(out, json{{"t", t},
                        {"x", x},
                        {"y", y},
                        {"n", n},
                        {"optimum", rep.optimum},
                        {"candidate_cost", rep.candidate_cost},
                        {"analytic_B", rep.analytic_value},
                        {"gap_optimum", rep.gap_optimum},
                        {"gap_candidate", rep.gap_candidate},
                        {"refinement_estimate", rep.refinement_estimate},
                        {"constraint_residual", rep.result.constraint_residual},
                        {"gradient_norm", rep.result.gradient_norm},
                        {"converged", rep.converged},
                        {"certified", rep.certified},
                        {"status", rep.certified ? "ok" : "tolerance_exceeded"}});
    return rep.certified ? 0 : 1;
}

int run_limits(const std::string& fn_spec, double T, double tol, const std::string& path) {
    const auto f = bobkov::parse_function_1d(fn_spec);
    const bobkov::QuadratureSpec qspec;
    const auto gaps = bobkov::endpoint_limits(f, T, qspec);
    const bool ok = gaps.low_end <= tol && gaps.high_end_gap <= tol;

    Output out(path);
    emit_json(out, json{{"function", fn_spec},
                        {"T", T},
                        {"low_end", gaps.low_end},
                        {"high_end_gap", gaps.high_end_gap},
                        {"used_t_low", gaps.used_t_low},
                        {"used_t_high", gaps.used_t_high},
                        {"tolerance", tol},
                        {"status", ok ? "ok" : "tolerance_exceeded"}});
    return ok ? 0 : 1;
}

int run_tensor_check(const std::string& g_spec, double slack_tol, const std::string& path) {
    const auto g = bobkov::parse_function_2d(g_spec);
    const bobkov::QuadratureSpec qspec;
    const auto rep = bobkov::tensorize_check_2d(g, qspec);
    const bool ok = rep.slack_x >= -slack_tol && rep.slack_y >= -slack_tol &&
                    rep.slack_minkowski >= -slack_tol;

    Output out(path);
    emit_json(out, json{{"g", g_spec},
                        {"lhs", rep.lhs},
                        {"rhs", rep.rhs},
                        {"slack_x", rep.slack_x},
                        {"slack_y", rep.slack_y},
                        {"slack_minkowski", rep.slack_minkowski},
                        {"total_deficit", rep.total_deficit},
                        {"slack_tolerance", slack_tol},
                        {"status", ok ? "ok" : "tolerance_exceeded"}});
    return ok ? 0 : 1;
}

std::vector<double> parse_lambdas(const std::string& s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const auto comma = s.find(',', pos);
        const std::string tok = s.substr(pos, comma == std::string::npos ? comma : comma - pos);
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw CLI::ValidationError("--lambdas", "bad number '" + tok + "'");
        }
        if (!(out.back() > 0.0) || !(out.back() < 1.0))
            throw CLI::ValidationError("--lambdas", "lambda must lie in (0,1)");
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw CLI::ValidationError("--lambdas", "empty list");
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bellman-function laboratory for the Gaussian isoperimetric inequality"};
    app.require_subcommand(1);

    std::string out_path;
    app.add_option("-o,--out", out_path, "write the report to a file instead of stdout");

    // hjb-sweep
    auto* hjb = app.add_subcommand("hjb-sweep", "residual of the value-surface identity on a grid");
    bobkov::HjbGridSpec grid;
    std::string lambda_str = "0.1,0.3,0.5,0.7,0.9";
    double hjb_tol = 1e-8;
    bool serial = false;
    hjb->add_option("--t-min", grid.t_min);
    hjb->add_option("--t-max", grid.t_max);
    hjb->add_option("--nt", grid.nt)->check(CLI::PositiveNumber);
    hjb->add_option("--p-min", grid.p_min);
    hjb->add_option("--p-max", grid.p_max);
    hjb->add_option("--np", grid.np)->check(CLI::PositiveNumber);
    hjb->add_option("--lambdas", lambda_str, "comma-separated lambda values in (0,1)");
    hjb->add_option("--tol", hjb_tol, "max allowed relative residual");
    hjb->add_flag("--serial", serial, "disable OpenMP row parallelism");

    // derivative-check
    auto* der = app.add_subcommand("derivative-check",
                                   "closed-form partials vs central finite differences");
    double fd_step = 1e-4;
    double der_tol = 1e-6;
    der->add_option("--t-min", grid.t_min);
    der->add_option("--t-max", grid.t_max);
    der->add_option("--nt", grid.nt)->check(CLI::PositiveNumber);
    der->add_option("--p-min", grid.p_min);
    der->add_option("--p-max", grid.p_max);
    der->add_option("--np", grid.np)->check(CLI::PositiveNumber);
    der->add_option("--lambdas", lambda_str);
    der->add_option("--fd-step", fd_step, "finite-difference step, scaled by max(1,|coord|)");
    der->add_option("--tol", der_tol, "max allowed relative derivative gap");
    der->add_flag("--serial", serial);

    // bobkov-check
    auto* bob = app.add_subcommand("bobkov-check", "deficit and Psi report for a test function");
    std::string fn_spec;
    std::uint64_t seed = 42;
    bob->add_option("--function", fn_spec,
                    "probit-poly:c0,c1[,c2[,c3]] | const:c | blend:w,u,v;... | corpus:N")
        ->required();
    bob->add_option("--seed", seed, "seed for corpus:N draws");
    bob->add_flag("--serial", serial);

    // solve-slope
    auto* slp = app.add_subcommand("solve-slope", "implicit slope at a single domain point");
    double st = 0.0, sp = 0.0, slambda = 0.5, stol = 1e-12;
    slp->add_option("t", st, "time coordinate")->required();
    slp->add_option("p", sp, "level coordinate")->required();
    slp->add_option("lambda", slambda, "y = lambda*Phi(t), lambda in (0,1)")->required();
    slp->add_option("--tol", stol, "mass residual tolerance");

    // certify
    auto* cert = app.add_subcommand("certify", "direct-collocation certificate of the value");
    double ct = 1.0, cx = 0.5, clambda = 0.5, cy = 0.0;
    int cn = 512;
    bool init_candidate = false;
    cert->add_option("--t", ct)->required();
    cert->add_option("--x", cx, "endpoint value in (0,1)")->required();
    cert->add_option("--lambda", clambda, "y = lambda*Phi(t)");
    auto* y_opt = cert->add_option("--y", cy, "running-constraint value (overrides --lambda)");
    cert->add_option("--n", cn, "collocation nodes (>= 64)");
    cert->add_flag("--init-candidate", init_candidate, "start at the analytic candidate");

    // limits
    auto* lim = app.add_subcommand("limits", "value-surface endpoint limits along a trajectory");
    std::string lim_fn;
    double lim_T = 7.0, lim_tol = 1e-5;
    lim->add_option("--function", lim_fn)->required();
    lim->add_option("--T", lim_T, "endpoint magnitude (>= 4)");
    lim->add_option("--tol", lim_tol);

    // tensor-check
    auto* ten = app.add_subcommand("tensor-check", "two-dimensional lifting chain slacks");
    std::string g_spec;
    double slack_tol = 1e-7;
    ten->add_option("--g", g_spec, "probit-affine:a,b,c | probit-separable:u..|v..")->required();
    ten->add_option("--slack-tol", slack_tol);

    CLI11_PARSE(app, argc, argv);

    try {
        if (hjb->parsed()) {
            grid.lambdas = parse_lambdas(lambda_str);
            return run_hjb_sweep(grid, hjb_tol, out_path, serial);
        }
        if (der->parsed()) {
            grid.lambdas = parse_lambdas(lambda_str);
            return run_derivative_check(grid, fd_step, der_tol, out_path, serial);
        }
        if (bob->parsed()) return run_bobkov_check(fn_spec, seed, out_path, serial);
        if (slp->parsed()) return run_solve_slope(st, sp, slambda, stol, out_path);
        if (cert->parsed())
            return run_certify(ct, cx, clambda, cy, y_opt->count() > 0, cn, init_candidate,
                               out_path);
        if (lim->parsed()) return run_limits(lim_fn, lim_T, lim_tol, out_path);
        if (ten->parsed()) return run_tensor_check(g_spec, slack_tol, out_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
