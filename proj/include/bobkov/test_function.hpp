#ifndef BOBKOV_TEST_FUNCTION_HPP
#define BOBKOV_TEST_FUNCTION_HPP

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace bobkov {

// Smooth profiles f : R -> (0,1) with analytic derivatives.
//
//   probit-poly  f(t) = Phi(c0 + c1 t + c2 t^2 + c3 t^3)
//   const        f(t) = c
//   blend        f(t) = sum_i w_i Phi(u_i t + v_i), w_i > 0 normalized to 1
//   tabulated    monotone-cubic (Fritsch-Carlson) interpolant of samples,
//                clamped to [1e-9, 1-1e-9], constant outside the sample range
class TestFunction1D {
  public:
    struct BlendTerm {
        double w, u, v;
    };

    static TestFunction1D probit_poly(std::array<double, 4> c);
    static TestFunction1D constant(double c);
    static TestFunction1D blend(std::vector<BlendTerm> terms);
    static TestFunction1D tabulated(std::vector<double> t, std::vector<double> x);

    double value(double t) const;
    double deriv(double t) const;
    const std::string& name() const { return name_; }

    // True for members constructed with an exactly affine probit argument
    // (constant, degree <= 1 probit-poly, single-term blend).
    bool affine_probit() const { return affine_; }

  private:
    struct Poly {
        std::array<double, 4> c;
    };
    struct Const {
        double c;
    };
    struct Blend {
        std::vector<BlendTerm> terms;
    };
    struct Tab {
        std::vector<double> t, x, slope; // Hermite data
    };
    std::variant<Poly, Const, Blend, Tab> impl_;
    std::string name_;
    bool affine_ = false;

    TestFunction1D() = default;
};

// Smooth profiles g : R^2 -> (0,1).
//
//   probit-affine     g(x,y) = Phi(alpha x + beta y + c)
//   probit-separable  g(x,y) = Phi(u(x) y + v(x)) for polynomial u, v
class TestFunction2D {
  public:
    static TestFunction2D probit_affine(double alpha, double beta, double c);
    static TestFunction2D probit_separable(std::vector<double> u_coeffs,
                                           std::vector<double> v_coeffs);

    double value(double x, double y) const;
    double grad_x(double x, double y) const;
    double grad_y(double x, double y) const;
    const std::string& name() const { return name_; }
    bool affine_probit() const { return affine_; }

  private:
    struct Affine {
        double alpha, beta, c;
    };
    struct Separable {
        std::vector<double> u, v;
    };
    std::variant<Affine, Separable> impl_;
    std::string name_;
    bool affine_ = false;

    TestFunction2D() = default;
};

// Seeded random corpora. Draws are bounded so the probit argument stays in
// [-4, 4] on [-8.5, 8.5]; non-affine draws carry enforced curvature margins
// so deficit-based and ODE-based classification cannot straddle thresholds.
std::vector<TestFunction1D> make_corpus_1d(std::uint64_t seed, int n);
std::vector<TestFunction2D> make_corpus_2d(std::uint64_t seed, int n);

// Mini-grammar used by the CLI:
//   probit-poly:c0,c1[,c2[,c3]] | const:c | blend:w,u,v;w,u,v;...
//   probit-affine:alpha,beta,c  | probit-separable:u0[,u1,..]|v0[,v1,..]
// Throws std::invalid_argument naming the offending token.
TestFunction1D parse_function_1d(const std::string& spec);
TestFunction2D parse_function_2d(const std::string& spec);

} // namespace bobkov

#endif
