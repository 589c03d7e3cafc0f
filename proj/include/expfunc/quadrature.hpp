#pragma once

#include <cmath>
#include <cstddef>
#include <functional>

namespace expfunc {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // absolute error estimate
};

// Adaptive Simpson on [a, b].
QuadResult integrate(const std::function<double(double)>& f, double a,
                     double b, double abs_tol = 1e-12, double rel_tol = 1e-10,
                     int max_depth = 48);

// Integral over [a, inf) by doubling panels until two consecutive panels are
// negligible. Intended for integrands with (at least) exponential-type decay.
QuadResult integrate_to_inf(const std::function<double(double)>& f, double a,
                            double abs_tol = 1e-12, double rel_tol = 1e-10);

// Trapezoid mass of tabulated values on a uniform grid with step h.
double trapezoid_mass(const double* values, std::size_t n, double h);

}  // namespace expfunc
