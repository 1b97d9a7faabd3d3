#include "bobkov/test_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

#include "bobkov/gauss.hpp"

namespace bobkov {

namespace {

std::string fmt_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double poly_eval(const std::array<double, 4>& c, double t) {
    return ((c[3] * t + c[2]) * t + c[1]) * t + c[0];
}

double poly_deriv(const std::array<double, 4>& c, double t) {
    return (3.0 * c[3] * t + 2.0 * c[2]) * t + c[1];
}

double poly_eval(const std::vector<double>& c, double x) {
    double r = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
    return r;
}

double poly_deriv(const std::vector<double>& c, double x) {
    double r = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) r = r * x + static_cast<double>(k) * c[k];
    return r;
}

} // namespace

TestFunction1D TestFunction1D::probit_poly(std::array<double, 4> c) {
    for (double ci : c)
        if (!std::isfinite(ci)) throw std::invalid_argument("probit_poly: non-finite coefficient");
    TestFunction1D f;
    f.impl_ = Poly{c};
    f.affine_ = (c[2] == 0.0 && c[3] == 0.0);
    std::string nm = "probit-poly:" + fmt_num(c[0]) + "," + fmt_num(c[1]);
    if (c[2] != 0.0 || c[3] != 0.0) nm += "," + fmt_num(c[2]);
    if (c[3] != 0.0) nm += "," + fmt_num(c[3]);
    f.name_ = nm;
    return f;
}

TestFunction1D TestFunction1D::constant(double c) {
    if (!(c > 0.0) || !(c < 1.0)) throw std::invalid_argument("constant: c must lie in (0,1)");
    TestFunction1D f;
    f.impl_ = Const{c};
    f.affine_ = true;
    f.name_ = "const:" + fmt_num(c);
    return f;
}

TestFunction1D TestFunction1D::blend(std::vector<BlendTerm> terms) {
    if (terms.empty()) throw std::invalid_argument("blend: no components");
    double wsum = 0.0;
    for (const auto& bt : terms) {
        if (!(bt.w > 0.0)) throw std::invalid_argument("blend: weights must be positive");
        if (!std::isfinite(bt.u) || !std::isfinite(bt.v))
            throw std::invalid_argument("blend: non-finite component");
        wsum += bt.w;
    }
    for (auto& bt : terms) bt.w /= wsum; // convex combination
    TestFunction1D f;
    f.affine_ = terms.size() == 1;
    std::string nm = "blend:";
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i) nm += ";";
        nm += fmt_num(terms[i].w) + "," + fmt_num(terms[i].u) + "," + fmt_num(terms[i].v);
    }
    f.name_ = nm;
    f.impl_ = Blend{std::move(terms)};
    return f;
}

TestFunction1D TestFunction1D::tabulated(std::vector<double> t, std::vector<double> x) {
    if (t.size() != x.size() || t.size() < 2)
        throw std::invalid_argument("tabulated: need matching samples, at least 2");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1])) throw std::invalid_argument("tabulated: abscissae must increase");
    constexpr double eps = 1e-9;
    for (double& xi : x) xi = std::clamp(xi, eps, 1.0 - eps);

    // Fritsch-Carlson monotone slopes
    const std::size_t n = t.size();
    std::vector<double> d(n - 1), m(n);
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (x[i + 1] - x[i]) / (t[i + 1] - t[i]);
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i)
        m[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (d[i] == 0.0) {
            m[i] = m[i + 1] = 0.0;
            continue;
        }
        const double alpha = m[i] / d[i];
        const double beta = m[i + 1] / d[i];
        const double s = alpha * alpha + beta * beta;
        if (s > 9.0) {
            const double tau = 3.0 / std::sqrt(s);
            m[i] = tau * alpha * d[i];
            m[i + 1] = tau * beta * d[i];
        }
    }

    TestFunction1D f;
    f.name_ = "tabulated:" + std::to_string(n) + "pts";
    f.impl_ = Tab{std::move(t), std::move(x), std::move(m)};
    return f;
}

double TestFunction1D::value(double t) const {
    return std::visit(
        [t](const auto& fam) -> double {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, Poly>) {
                return cdf(poly_eval(fam.c, t));
            } else if constexpr (std::is_same_v<T, Const>) {
                return fam.c;
            } else if constexpr (std::is_same_v<T, Blend>) {
                double s = 0.0;
                for (const auto& bt : fam.terms) s += bt.w * cdf(bt.u * t + bt.v);
                return s;
            } else {
                const auto& tb = fam;
                if (t <= tb.t.front()) return tb.x.front();
                if (t >= tb.t.back()) return tb.x.back();
                const auto it = std::upper_bound(tb.t.begin(), tb.t.end(), t);
                const std::size_t i = static_cast<std::size_t>(it - tb.t.begin()) - 1;
                const double h = tb.t[i + 1] - tb.t[i];
                const double s = (t - tb.t[i]) / h;
                const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
                const double h10 = s * (1.0 - s) * (1.0 - s);
                const double h01 = s * s * (3.0 - 2.0 * s);
                const double h11 = s * s * (s - 1.0);
                return h00 * tb.x[i] + h10 * h * tb.slope[i] + h01 * tb.x[i + 1] +
                       h11 * h * tb.slope[i + 1];
            }
        },
        impl_);
}

double TestFunction1D::deriv(double t) const {
    return std::visit(
        [t](const auto& fam) -> double {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, Poly>) {
                return pdf(poly_eval(fam.c, t)) * poly_deriv(fam.c, t);
            } else if constexpr (std::is_same_v<T, Const>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, Blend>) {
                double s = 0.0;
                for (const auto& bt : fam.terms) s += bt.w * bt.u * pdf(bt.u * t + bt.v);
                return s;
            } else {
                const auto& tb = fam;
                if (t <= tb.t.front() || t >= tb.t.back()) return 0.0;
                const auto it = std::upper_bound(tb.t.begin(), tb.t.end(), t);
                const std::size_t i = static_cast<std::size_t>(it - tb.t.begin()) - 1;
                const double h = tb.t[i + 1] - tb.t[i];
                const double s = (t - tb.t[i]) / h;
                const double d00 = 6.0 * s * (s - 1.0) / h;
                const double d10 = (3.0 * s - 1.0) * (s - 1.0);
                const double d01 = -d00;
                const double d11 = s * (3.0 * s - 2.0);
                return d00 * tb.x[i] + d10 * tb.slope[i] + d01 * tb.x[i + 1] +
                       d11 * tb.slope[i + 1];
            }
        },
        impl_);
}

TestFunction2D TestFunction2D::probit_affine(double alpha, double beta, double c) {
    if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(c))
        throw std::invalid_argument("probit_affine: non-finite parameter");
    TestFunction2D g;
    g.impl_ = Affine{alpha, beta, c};
    g.affine_ = true;
    g.name_ = "probit-affine:" + fmt_num(alpha) + "," + fmt_num(beta) + "," + fmt_num(c);
    return g;
}

TestFunction2D TestFunction2D::probit_separable(std::vector<double> u_coeffs,
                                                std::vector<double> v_coeffs) {
    if (u_coeffs.empty() || v_coeffs.empty())
        throw std::invalid_argument("probit_separable: empty polynomial");
    TestFunction2D g;
    std::string nm = "probit-separable:";
    for (std::size_t i = 0; i < u_coeffs.size(); ++i) nm += (i ? "," : "") + fmt_num(u_coeffs[i]);
    nm += "|";
    for (std::size_t i = 0; i < v_coeffs.size(); ++i) nm += (i ? "," : "") + fmt_num(v_coeffs[i]);
    g.name_ = nm;
    g.affine_ = u_coeffs.size() <= 1 && v_coeffs.size() <= 2;
    g.impl_ = Separable{std::move(u_coeffs), std::move(v_coeffs)};
    return g;
}

double TestFunction2D::value(double x, double y) const {
    return std::visit(
        [x, y](const auto& fam) -> double {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, Affine>)
                return cdf(fam.alpha * x + fam.beta * y + fam.c);
            else
                return cdf(poly_eval(fam.u, x) * y + poly_eval(fam.v, x));
        },
        impl_);
}

double TestFunction2D::grad_x(double x, double y) const {
    return std::visit(
        [x, y](const auto& fam) -> double {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, Affine>)
                return fam.alpha * pdf(fam.alpha * x + fam.beta * y + fam.c);
            else
                return pdf(poly_eval(fam.u, x) * y + poly_eval(fam.v, x)) *
                       (poly_deriv(fam.u, x) * y + poly_deriv(fam.v, x));
        },
        impl_);
}

double TestFunction2D::grad_y(double x, double y) const {
    return std::visit(
        [x, y](const auto& fam) -> double {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, Affine>)
                return fam.beta * pdf(fam.alpha * x + fam.beta * y + fam.c);
            else
                return pdf(poly_eval(fam.u, x) * y + poly_eval(fam.v, x)) * poly_eval(fam.u, x);
        },
        impl_);
}

std::vector<TestFunction1D> make_corpus_1d(std::uint64_t seed, int n) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uni = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
    auto sign = [&]() { return unit(rng) < 0.5 ? -1.0 : 1.0; };

    std::vector<TestFunction1D> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        switch (i % 4) {
            case 0: // constant
                out.push_back(TestFunction1D::constant(cdf(uni(-2.5, 2.5))));
                break;
            case 1: { // exact affine probit
                const double c0 = uni(-2.0, 2.0);
                const double c1 = sign() * uni(0.02, (4.0 - std::fabs(c0)) / 8.5);
                out.push_back(TestFunction1D::probit_poly({c0, c1, 0.0, 0.0}));
                break;
            }
            case 2: { // genuine curvature: |c2| >= 0.01 keeps the deficit well above 1e-8
                const double c0 = uni(-1.0, 1.0);
                const double c1 = sign() * uni(0.0, 0.2);
                const double c2 = sign() * uni(0.01, 0.035);
                out.push_back(TestFunction1D::probit_poly({c0, c1, c2, 0.0}));
                break;
            }
            default: { // blend with enforced component separation
                const double u1 = sign() * uni(0.02, 0.15);
                const double u2 = u1 + sign() * uni(0.2, 0.3);
                const double w1 = uni(0.3, 0.7);
                const double v1 = uni(-0.8, 0.8);
                const double v2 = uni(-0.8, 0.8);
                out.push_back(TestFunction1D::blend({{w1, u1, v1}, {1.0 - w1, u2, v2}}));
                break;
            }
        }
    }
    return out;
}

std::vector<TestFunction2D> make_corpus_2d(std::uint64_t seed, int n) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uni = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
    auto sign = [&]() { return unit(rng) < 0.5 ? -1.0 : 1.0; };

    std::vector<TestFunction2D> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        if (i % 2 == 0) {
            out.push_back(TestFunction2D::probit_affine(sign() * uni(0.1, 0.45),
                                                        sign() * uni(0.1, 0.45), uni(-1.0, 1.0)));
        } else {
            // u constant, v genuinely quadratic
            const double u0 = sign() * uni(0.15, 0.4);
            const double v0 = uni(-0.5, 0.5);
            const double v1 = sign() * uni(0.0, 0.15);
            const double v2 = sign() * uni(0.015, 0.03);
            out.push_back(TestFunction2D::probit_separable({u0}, {v0, v1, v2}));
        }
    }
    return out;
}

namespace {

std::vector<double> parse_csv_numbers(const std::string& s, const std::string& context) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument(context + ": bad number '" + tok + "'");
        }
        if (pos != tok.size())
            throw std::invalid_argument(context + ": bad number '" + tok + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument(context + ": empty parameter list");
    return out;
}

} // namespace

TestFunction1D parse_function_1d(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("function spec '" + spec + "': missing ':'");
    const std::string kind = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);

    if (kind == "probit-poly") {
        const auto c = parse_csv_numbers(rest, spec);
        if (c.size() < 2 || c.size() > 4)
            throw std::invalid_argument(spec + ": probit-poly takes 2 to 4 coefficients");
        std::array<double, 4> cc{0.0, 0.0, 0.0, 0.0};
        std::copy(c.begin(), c.end(), cc.begin());
        return TestFunction1D::probit_poly(cc);
    }
    if (kind == "const") {
        const auto c = parse_csv_numbers(rest, spec);
        if (c.size() != 1) throw std::invalid_argument(spec + ": const takes one value");
        return TestFunction1D::constant(c[0]);
    }
    if (kind == "blend") {
        std::vector<TestFunction1D::BlendTerm> terms;
        std::stringstream ss(rest);
        std::string part;
        while (std::getline(ss, part, ';')) {
            const auto v = parse_csv_numbers(part, spec);
            if (v.size() != 3)
                throw std::invalid_argument(spec + ": blend component '" + part +
                                            "' needs w,u,v");
            terms.push_back({v[0], v[1], v[2]});
        }
        return TestFunction1D::blend(std::move(terms));
    }
    throw std::invalid_argument("function spec '" + spec + "': unknown family '" + kind + "'");
}

TestFunction2D parse_function_2d(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("function spec '" + spec + "': missing ':'");
    const std::string kind = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);

    if (kind == "probit-affine") {
        const auto v = parse_csv_numbers(rest, spec);
        if (v.size() != 3)
            throw std::invalid_argument(spec + ": probit-affine takes alpha,beta,c");
        return TestFunction2D::probit_affine(v[0], v[1], v[2]);
    }
    if (kind == "probit-separable") {
        const auto bar = rest.find('|');
        if (bar == std::string::npos)
            throw std::invalid_argument(spec + ": probit-separable needs 'u coeffs|v coeffs'");
        return TestFunction2D::probit_separable(parse_csv_numbers(rest.substr(0, bar), spec),
                                                parse_csv_numbers(rest.substr(bar + 1), spec));
    }
    throw std::invalid_argument("function spec '" + spec + "': unknown family '" + kind + "'");
}

} // namespace bobkov
