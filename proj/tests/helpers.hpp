#pragma once

// Closed-form reference distributions used as independent oracles.

#include <cmath>

namespace testref {

// lower regularized incomplete gamma P(a, x)
inline double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 600; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  double b = x + 1.0 - a;
  double c = 1e300;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 600; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return 1.0 - std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

inline double gamma_cdf(double shape, double rate, double x) {
  return gamma_p(shape, rate * x);
}

inline double gamma_pdf(double shape, double rate, double x) {
  if (x <= 0.0) return 0.0;
  return std::exp(shape * std::log(rate) + (shape - 1.0) * std::log(x) -
                  rate * x - std::lgamma(shape));
}

// inverse-Gamma(alpha, beta): P(V <= x) = Q(alpha, beta/x)
inline double inv_gamma_cdf(double alpha, double beta, double x) {
  if (x <= 0.0) return 0.0;
  return 1.0 - gamma_p(alpha, beta / x);
}

inline double inv_gamma_pdf(double alpha, double beta, double x) {
  if (x <= 0.0) return 0.0;
  return std::exp(alpha * std::log(beta) - (alpha + 1.0) * std::log(x) -
                  beta / x - std::lgamma(alpha));
}

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace testref
