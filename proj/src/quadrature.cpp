#include "expfunc/quadrature.hpp"

#include <algorithm>
#include <limits>

namespace expfunc {

namespace {

struct SimpsonState {
  const std::function<double(double)>* f;
  double abs_tol;
  double rel_tol;
};

double simpson(double fa, double fm, double fb, double a, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

QuadResult adapt(const SimpsonState& st, double a, double b, double fa,
                 double fm, double fb, double whole, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = (*st.f)(lm);
  const double frm = (*st.f)(rm);
  const double left = simpson(fa, flm, fm, a, m);
  const double right = simpson(fm, frm, fb, m, b);
  const double delta = left + right - whole;
  const double tol =
      std::max(st.abs_tol, st.rel_tol * std::abs(left + right));
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return {left + right + delta / 15.0, std::abs(delta) / 15.0};
  }
  QuadResult l = adapt(st, a, m, fa, flm, fm, left, depth - 1);
  QuadResult r = adapt(st, m, b, fm, frm, fb, right, depth - 1);
  return {l.value + r.value, l.error + r.error};
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a,
                     double b, double abs_tol, double rel_tol, int max_depth) {
  if (a == b) return {0.0, 0.0};
  SimpsonState st{&f, abs_tol * 0.5, rel_tol * 0.5};
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = simpson(fa, fm, fb, a, b);
  return adapt(st, a, b, fa, fm, fb, whole, max_depth);
}

QuadResult integrate_to_inf(const std::function<double(double)>& f, double a,
                            double abs_tol, double rel_tol) {
  QuadResult total{0.0, 0.0};
  double lo = a;
  double len = std::max(1.0, std::abs(a));
  int negligible = 0;
  for (int panel = 0; panel < 64; ++panel) {
    QuadResult piece = integrate(f, lo, lo + len, abs_tol, rel_tol);
    total.value += piece.value;
    total.error += piece.error;
    const double small =
        std::max(abs_tol, rel_tol * std::abs(total.value));
    negligible = (std::abs(piece.value) <= small) ? negligible + 1 : 0;
    if (negligible >= 2) return total;
    lo += len;
    len *= 2.0;
  }
  total.error = std::max(total.error, std::abs(total.value));
  return total;  // did not settle; error reflects that
}

double trapezoid_mass(const double* values, std::size_t n, double h) {
  if (n < 2) return 0.0;
  double s = 0.5 * (values[0] + values[n - 1]);
  for (std::size_t i = 1; i + 1 < n; ++i) s += values[i];
  return s * h;
}

}  // namespace expfunc
