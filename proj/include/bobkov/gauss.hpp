#ifndef BOBKOV_GAUSS_HPP
#define BOBKOV_GAUSS_HPP

#include <stdexcept>

namespace bobkov {

// A probability constrained to the open interval (0,1).
class Probability {
  public:
    explicit Probability(double v) : v_(v) {
        if (!(v > 0.0) || !(v < 1.0))
            throw std::domain_error("Probability must lie strictly in (0,1)");
    }
    double value() const { return v_; }

  private:
    double v_;
};

// Standard normal density.
double pdf(double z);

// Standard normal CDF, 0.5*erfc(-z/sqrt(2)); carries full relative accuracy
// in the left tail. Returns values that may saturate at 0 or 1 for |z| huge.
double cdf(double z);

// Inverse CDF: Wichura's AS241 rational approximation plus one Newton
// correction against cdf/pdf, so that cdf(inv_cdf(p)) round-trips to ~1e-15.
double inv_cdf(Probability p);

// Gaussian isoperimetric profile I(x) = pdf(inv_cdf(x)).
// Rejects inputs with min(x, 1-x) < 1e-15; the domain is open.
double iso_profile(Probability x);

inline constexpr double inv_sqrt_2pi = 0.3989422804014326779399460599343818684759;

} // namespace bobkov

#endif
