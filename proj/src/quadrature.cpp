#include "bobkov/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "bobkov/gauss.hpp"

namespace bobkov {

namespace {

// 15-point Kronrod / 7-point Gauss pair (QUADPACK qk15 constants).
constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelEstimate {
    double value;
    double error;
};

PanelEstimate gk15_panel(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double hlen = 0.5 * (b - a);

    double fv[15];
    const double fc = f(center);
    double resg = wg[3] * fc;
    double resk = wgk[7] * fc;
    fv[7] = fc;
    for (int j = 0; j < 7; ++j) {
        const double absc = hlen * xgk[j];
        const double f1 = f(center - absc);
        const double f2 = f(center + absc);
        fv[j] = f1;
        fv[14 - j] = f2;
        resk += wgk[j] * (f1 + f2);
        if (j % 2 == 1) resg += wg[j / 2] * (f1 + f2);
    }
    const double reskh = resk * 0.5;
    double resasc = wgk[7] * std::fabs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += wgk[j] * (std::fabs(fv[j] - reskh) + std::fabs(fv[14 - j] - reskh));
    resasc *= std::fabs(hlen);

    const double result = resk * hlen;
    double err = std::fabs((resk - resg) * hlen);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    return {result, err};
}

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

} // namespace

QuadResult adaptive_gk15(const std::function<double(double)>& f, double a, double b,
                         double abs_tol, int max_subdivisions) {
    QuadResult out;
    if (!(a < b)) return out;

    std::priority_queue<Segment> heap;
    double total_value = 0.0;
    double total_error = 0.0;
    auto push = [&](double lo, double hi) {
        const PanelEstimate e = gk15_panel(f, lo, hi);
        heap.push({lo, hi, e.value, e.error});
        total_value += e.value;
        total_error += e.error;
    };
    push(a, b);
    out.subdivisions = 1;
    const double min_width = (b - a) * 1e-14;

    while (total_error > abs_tol && out.subdivisions < max_subdivisions) {
        const Segment worst = heap.top();
        if (worst.b - worst.a <= min_width) break; // cannot meaningfully refine further
        heap.pop();
        total_value -= worst.value;
        total_error -= worst.error;
        const double mid = 0.5 * (worst.a + worst.b);
        push(worst.a, mid);
        push(mid, worst.b);
        ++out.subdivisions;
    }

    // final sum recomputed once to shed incremental rounding drift
    total_value = 0.0;
    for (std::priority_queue<Segment> rest = std::move(heap); !rest.empty(); rest.pop())
        total_value += rest.top().value;

    out.value = total_value;
    out.error_estimate = total_error;
    out.converged = total_error <= abs_tol;
    return out;
}

QuadResult gauss_weighted_integral(const std::function<double(double)>& g,
                                   double lower, double upper, const QuadratureSpec& spec) {
    spec.validate();
    const double lo = std::max(lower, -spec.tail_cutoff);
    const double hi = std::min(upper, spec.tail_cutoff);
    if (!(lo < hi)) return {};
    auto integrand = [&g](double s) { return g(s) * pdf(s); };
    return adaptive_gk15(integrand, lo, hi, spec.abs_tol, spec.max_subdivisions);
}

QuadResult truncated_halfspace_mass(double t, double p, double a, const QuadratureSpec& spec) {
    if (!std::isfinite(t) || !std::isfinite(p) || !std::isfinite(a))
        throw std::domain_error("truncated_halfspace_mass: non-finite input");
    auto g = [t, p, a](double s) { return cdf((s - t) * a + p); };
    return gauss_weighted_integral(g, -INFINITY, t, spec);
}

namespace {

// Genz (2004) Gauss-Legendre half-node tables for 6-, 12- and 20-point rules.
constexpr double gl_x6[3] = {-0.9324695142031522, -0.6612093864662647, -0.2386191860831970};
constexpr double gl_w6[3] = {0.1713244923791705, 0.3607615730481384, 0.4679139345726904};
constexpr double gl_x12[6] = {-0.9815606342467191, -0.9041172563704750, -0.7699026741943050,
                              -0.5873179542866171, -0.3678314989981802, -0.1252334085114692};
constexpr double gl_w12[6] = {0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
                              0.2031674267230659, 0.2334925365383547, 0.2491470458134029};
constexpr double gl_x20[10] = {-0.9931285991850949, -0.9639719272779138, -0.9122344282513259,
                               -0.8391169718222188, -0.7463319064601508, -0.6360536807265150,
                               -0.5108670019508271, -0.3737060887154195, -0.2277858511416451,
                               -0.07652652113349734};
constexpr double gl_w20[10] = {0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
                               0.08327674157670475, 0.1019301198172404, 0.1181945319615184,
                               0.1316886384491766, 0.1420961093183820, 0.1491729864726037,
                               0.1527533871307258};

constexpr double two_pi = 6.283185307179586476925286766559;

} // namespace

// Genz (2004) hybrid algorithm, section 2.4; structure follows the reference
// BVND implementation. Computes P(X <= h, Y <= k) via the upper-quadrant form.
double bvn_cdf(double h, double k, double rho) {
    if (!std::isfinite(h) || !std::isfinite(k))
        throw std::domain_error("bvn_cdf: non-finite input");
    if (!(std::fabs(rho) < 1.0))
        throw std::domain_error("bvn_cdf: |rho| must be < 1");

    // Upper-quadrant variables: P(X <= h, Y <= k) = P(-X > -h, -Y > -k).
    double H = -h, K = -k;
    double hk = H * K;
    double bvn = 0.0;

    const double* gx;
    const double* gw;
    int ng;
    const double arho = std::fabs(rho);
    if (arho < 0.3) {
        gx = gl_x6; gw = gl_w6; ng = 3;
    } else if (arho < 0.75) {
        gx = gl_x12; gw = gl_w12; ng = 6;
    } else {
        gx = gl_x20; gw = gl_w20; ng = 10;
    }

    if (arho < 0.925) {
        if (arho > 0.0) {
            const double hs = 0.5 * (H * H + K * K);
            const double asr = std::asin(rho);
            for (int i = 0; i < ng; ++i) {
                for (int is = -1; is <= 1; is += 2) {
                    const double sn = std::sin(asr * (is * gx[i] + 1.0) * 0.5);
                    bvn += gw[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
                }
            }
            bvn *= asr / (2.0 * two_pi);
        }
        bvn += cdf(-H) * cdf(-K);
    } else {
        if (rho < 0.0) {
            K = -K;
            hk = -hk;
        }
        const double as = (1.0 - rho) * (1.0 + rho);
        double A = std::sqrt(as);
        const double bs = (H - K) * (H - K);
        const double c = (4.0 - hk) / 8.0;
        const double d = (12.0 - hk) / 16.0;
        double asr = -0.5 * (bs / as + hk);
        if (asr > -100.0)
            bvn = A * std::exp(asr) *
                  (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
        if (-hk < 100.0) {
            const double B = std::sqrt(bs);
            bvn -= std::exp(-0.5 * hk) * std::sqrt(two_pi) * cdf(-B / A) * B *
                   (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
        }
        A *= 0.5;
        for (int i = 0; i < ng; ++i) {
            for (int is = -1; is <= 1; is += 2) {
                const double xs_ = A * (is * gx[i] + 1.0);
                const double xs = xs_ * xs_;
                const double rs = std::sqrt(1.0 - xs);
                asr = -0.5 * (bs / xs + hk);
                if (asr > -100.0) {
                    bvn += A * gw[i] * std::exp(asr) *
                           (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                            (1.0 + c * xs * (1.0 + d * xs)));
                }
            }
        }
        bvn = -bvn / two_pi;
        if (rho > 0.0) {
            bvn += cdf(-std::max(H, K));
        } else {
            bvn = -bvn;
            if (K > H) {
                // difference of tails evaluated where cdf carries full precision
                if (H >= 0.0)
                    bvn += cdf(-H) - cdf(-K);
                else
                    bvn += cdf(K) - cdf(H);
            }
        }
    }
    return std::clamp(bvn, 0.0, 1.0);
}

double halfspace_mass_bvn(double t, double p, double a) {
    const double r = std::sqrt(1.0 + a * a);
    return bvn_cdf(t, (p - a * t) / r, -a / r);
}

double halfspace_mass_tail_scaled(double t, double p, double a, double abs_tol) {
    if (!(t <= 0.0))
        throw std::domain_error("halfspace_mass_tail_scaled: requires t <= 0");
    // stop where exp(tw - w^2/2) < e^-45
    const double w_cut = t + std::sqrt(t * t + 90.0);
    auto integrand = [t, p, a](double w) {
        return cdf(p - a * w) * std::exp(t * w - 0.5 * w * w);
    };
    const QuadResult r = adaptive_gk15(integrand, 0.0, w_cut, abs_tol, 400);
    return r.value;
}

QuadResult gauss_weighted_integral_2d(const std::function<double(double, double)>& g,
                                      const QuadratureSpec& spec) {
    spec.validate();
    QuadratureSpec inner = spec;
    inner.abs_tol = spec.abs_tol * 0.1;
    bool inner_ok = true;
    double inner_err = 0.0;

    auto outer_fn = [&](double x) {
        const QuadResult r =
            gauss_weighted_integral([&g, x](double y) { return g(x, y); }, -INFINITY, INFINITY, inner);
        if (!r.converged) inner_ok = false;
        inner_err = std::max(inner_err, r.error_estimate);
        return r.value;
    };
    QuadResult out = gauss_weighted_integral(outer_fn, -INFINITY, INFINITY, spec);
    out.converged = out.converged && inner_ok;
    out.error_estimate += inner_err;
    return out;
}

} // namespace bobkov
