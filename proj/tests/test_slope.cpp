#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bobkov/gauss.hpp"
#include "bobkov/quadrature.hpp"
#include "bobkov/slope.hpp"

using namespace bobkov;

namespace {
// frozen forward map: mass(0.8, 0.2, 1.3), cross-checked against an
// independent high-precision integration at build time
constexpr double ystar = 0.13754749886498334;
} // namespace

TEST_CASE("frozen y* matches the quadrature oracle") {
    const QuadratureSpec spec{};
    CHECK(truncated_halfspace_mass(0.8, 0.2, 1.3, spec).value ==
          doctest::Approx(ystar).epsilon(1e-12));
}

TEST_CASE("a = 0 at the factorizing level") {
    for (double t : {-1.0, 0.5, 2.0}) {
        for (double p : {-0.7, 0.0, 1.2}) {
            const SlopeSolution sol = solve_slope({t, p, cdf(p) * cdf(t)});
            CHECK(std::fabs(sol.a) < 1e-10);
            CHECK(std::fabs(sol.residual) <= default_slope_tol);
        }
    }
}

TEST_CASE("forward-map round trip recovers a = 1.3") {
    const SlopeSolution sol = solve_slope({0.8, 0.2, ystar});
    CHECK(sol.a == doctest::Approx(1.3).epsilon(1e-10));
    CHECK(sol.bracket_lo < 1.3);
    CHECK(sol.bracket_hi > 1.3);
}

TEST_CASE("monotone response in y") {
    const double t = 0.5, p = 0.0;
    const double y1 = 0.3 * cdf(t), y2 = 0.6 * cdf(t);
    CHECK(solve_slope({t, p, y1}).a > solve_slope({t, p, y2}).a);
}

TEST_CASE("domain and conditioning guards") {
    CHECK_THROWS_AS(solve_slope({0.5, 0.0, -0.1}), std::domain_error);
    CHECK_THROWS_AS(solve_slope({0.5, 0.0, cdf(0.5) + 0.01}), std::domain_error);
    CHECK_THROWS_AS(solve_slope({0.5, 0.0, cdf(0.5) * (1.0 - 1e-13)}), ill_conditioned_error);
    CHECK_THROWS_AS(solve_slope({0.5, 0.0, cdf(0.5) * 1e-13}), ill_conditioned_error);
}

TEST_CASE("round trip across the domain grid") {
    for (double t : {-1.5, -0.5, 0.5, 1.5}) {
        for (double p : {-1.5, -0.5, 0.5, 1.5}) {
            for (double lam : {0.2, 0.4, 0.6, 0.8}) {
                const double y = lam * cdf(t);
                const SlopeSolution sol = solve_slope({t, p, y});
                const double back = halfspace_mass_smooth(t, p, sol.a);
                CHECK(std::fabs(back - y) < 1e-11);
            }
        }
    }
}

TEST_CASE("deep-tail solves stay accurate (t = -7)") {
    // trajectory point of f = Phi(0.5 t + 0.1) at t = -7
    const double t = -7.0;
    const double p = 0.5 * t + 0.1;
    const QuadratureSpec spec{};
    QuadratureSpec tail = spec;
    tail.abs_tol = 1e-28;
    const double y =
        gauss_weighted_integral([](double s) { return cdf(0.5 * s + 0.1); }, -INFINITY, t, tail)
            .value;
    REQUIRE(y > 0.0);
    REQUIRE(y < cdf(t));
    const SlopeSolution sol = solve_slope({t, p, y});
    CHECK(sol.a == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("closed-form partials: signs") {
    for (double t : {-1.0, 0.3, 1.2}) {
        for (double lam : {0.25, 0.5, 0.75}) {
            const SlopeQuery q{t, 0.4, lam * cdf(t)};
            const SlopePartials d = slope_partials(q);
            CHECK(d.a_y < 0.0);
            CHECK(d.a_p > 0.0);
        }
    }
}

TEST_CASE("closed-form partials match central differences at the round-trip point") {
    const SlopeQuery q{0.8, 0.2, ystar};
    const SlopePartials d = slope_partials(q, 1e-14);
    const double h = 1e-5;

    auto a_of = [](double t, double p, double y) { return solve_slope({t, p, y}, 1e-15).a; };
    const double fd_t = (a_of(q.t + h, q.p, q.y) - a_of(q.t - h, q.p, q.y)) / (2 * h);
    const double fd_p = (a_of(q.t, q.p + h, q.y) - a_of(q.t, q.p - h, q.y)) / (2 * h);
    const double fd_y = (a_of(q.t, q.p, q.y + h * q.y) - a_of(q.t, q.p, q.y - h * q.y)) /
                        (2 * h * q.y);

    CHECK(std::fabs(d.a_t - fd_t) / std::fabs(fd_t) < 1e-6);
    CHECK(std::fabs(d.a_p - fd_p) / std::fabs(fd_p) < 1e-6);
    CHECK(std::fabs(d.a_y - fd_y) / std::fabs(fd_y) < 1e-6);
}

TEST_CASE("degenerate direction reports ill-conditioning, not a spurious root") {
    const double t = 0.5;
    const double y = cdf(t) * (1.0 - 5e-13);
    CHECK_THROWS_AS(solve_slope({t, 0.0, y}), ill_conditioned_error);
}
