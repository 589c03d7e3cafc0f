#include "expfunc/funcmap.hpp"

#include <algorithm>
#include <cmath>

#include "expfunc/quadrature.hpp"

namespace expfunc {

namespace {

constexpr double kSmallJump = 1e-4;  // below this |y| the expansion is used

// int_(0, hi] y^2 nu(dy) via tail-difference cells on a log grid; only the
// tail function is needed, so this works for every representation.
double small_square_moment(const LevyMeasure& nu, bool negative_side,
                           double hi) {
  auto tail = [&](double y) {
    return negative_side ? nu.tail_minus(y) : nu.tail_plus(y);
  };
  if (tail(0.0) == tail(hi)) return 0.0;  // no mass in (0, hi]
  double s = 0.0;
  double a = hi * 1e-9;  // mass below a contributes only O(a^2)
  const int cells = 64;
  const double r = std::pow(hi / a, 1.0 / cells);
  for (int i = 0; i < cells; ++i) {
    const double b = a * r;
    const double m = tail(a) - tail(b);
    const double mid = 0.5 * (a + b);
    s += m * mid * mid;
    a = b;
  }
  return s;
}

struct JumpIntegrand {
  const LaplaceExponent* psi;
  double u, psi_u, p1, p2;
  bool have_p2;

  // full integrand at jump size y (either sign)
  double full(double y) const {
    const double d = psi_u - (*psi)(u * std::exp(-y));
    double v = std::expm1(d);
    if (std::abs(y) <= 1.0) v -= u * p1 * y;
    return v;
  }
  // O(y^2) coefficient of the expansion near y = 0
  double small_coeff() const {
    return 0.5 * (u * u * (p1 * p1 - p2) - u * p1);
  }
};

}  // namespace

LaplaceExponent psi_eta_from_mu(const CharacteristicTriplet& t,
                                const LaplaceExponent& psi_mu,
                                std::shared_ptr<double> quad_err) {
  if (!psi_mu.valid()) throw Error(errc::bad_input, "psi_mu not set");
  const double gamma = t.gamma;
  const double s2 = t.sigma2;
  const LevyMeasure nu = t.nu;
  const std::vector<Atom> atoms = nu.atom_parts();
  const LevyMeasure cont = nu.continuous_part();
  const bool has_cont = !cont.is_zero();
  const double m2_plus =
      has_cont ? small_square_moment(cont, false, kSmallJump) : 0.0;
  const double m2_minus =
      has_cont ? small_square_moment(cont, true, kSmallJump) : 0.0;

  auto value = [=](double u) -> double {
    if (u <= 0.0) return 0.0;
    JumpIntegrand g;
    g.psi = &psi_mu;
    g.u = u;
    g.psi_u = psi_mu(u);
    g.p1 = psi_mu.d1(u);
    g.p2 = (s2 > 0.0 || has_cont) ? psi_mu.d2(u) : 0.0;
    g.have_p2 = true;

    double out = (gamma - 0.5 * s2) * u * g.p1;
    if (s2 > 0.0) out += 0.5 * s2 * u * u * (g.p1 * g.p1 - g.p2);

    for (const Atom& a : atoms) out += a.mass * g.full(a.x);

    if (has_cont) {
      double err = 0.0;
      // expansion region (0, 1e-4] on both sides
      out += g.small_coeff() * (m2_plus + m2_minus);
      // positive jumps
      if (cont.mass_plus() > 0.0) {
        if (cont.has_density()) {
          auto f = [&](double y) { return cont.density_pos(y) * g.full(y); };
          QuadResult q1 = integrate(f, kSmallJump, 1.0, 1e-12, 1e-10);
          QuadResult q2 = integrate_to_inf(f, 1.0, 1e-12, 1e-10);
          if (q2.error >= std::abs(q2.value) && std::abs(q2.value) > 1e-8)
            throw Error(errc::integral_diverged, "positive-jump integral");
          out += q1.value + q2.value;
          err += q1.error + q2.error;
        } else {
          // tail-difference cells on a log grid
          double a = kSmallJump;
          const double top = 60.0;  // tails of our representations are gone
          const int cells = 600;
          const double r = std::pow(top / a, 1.0 / cells);
          for (int i = 0; i < cells; ++i) {
            const double b = a * r;
            const double m = cont.tail_plus(a) - cont.tail_plus(b);
            if (m > 0.0) out += m * g.full(0.5 * (a + b));
            a = b;
          }
          err += 1e-6 * std::abs(out);
        }
      }
      // negative jumps
      if (cont.mass_minus() > 0.0) {
        if (cont.has_density()) {
          auto f = [&](double y) { return cont.density_neg(y) * g.full(-y); };
          QuadResult q1 = integrate(f, kSmallJump, 1.0, 1e-12, 1e-10);
          QuadResult q2 = integrate_to_inf(f, 1.0, 1e-12, 1e-10);
          if (q2.error >= std::abs(q2.value) && std::abs(q2.value) > 1e-8)
            throw Error(errc::integral_diverged, "negative-jump integral");
          out += q1.value + q2.value;
          err += q1.error + q2.error;
        } else {
          double a = kSmallJump;
          const double top = 60.0;
          const int cells = 600;
          const double r = std::pow(top / a, 1.0 / cells);
          for (int i = 0; i < cells; ++i) {
            const double b = a * r;
            const double m = cont.tail_minus(a) - cont.tail_minus(b);
            if (m > 0.0) out += m * g.full(-0.5 * (a + b));
            a = b;
          }
          err += 1e-6 * std::abs(out);
        }
      }
      if (quad_err) {
        const double rel = err / (std::abs(out) + 1e-30);
        if (rel > *quad_err) *quad_err = rel;
      }
    }
    return out;
  };
  return LaplaceExponent(value);
}

RangeVerdict range_membership(const CharacteristicTriplet& t,
                              const LaplaceExponent& psi_mu,
                              const CMOptions& opt) {
  auto quad_err = std::make_shared<double>(0.0);
  LaplaceExponent psi_eta = psi_eta_from_mu(t, psi_mu, quad_err);
  CMVerdict v = is_bernstein(psi_eta, opt);
  RangeVerdict out;
  out.analytic_derivatives =
      psi_mu.has_analytic_d1() && psi_mu.has_analytic_d2();
  out.order = v.order;
  out.witness = v.witness;
  if (v.passed) {
    out.outcome = RangeVerdict::Outcome::in_range;
    out.psi_eta = psi_eta;
    return out;
  }
  // quadrature-limited failures are not certified
  if (v.margin < 10.0 * *quad_err) {
    out.outcome = RangeVerdict::Outcome::undecided;
    return out;
  }
  out.outcome = RangeVerdict::Outcome::not_in_range;
  return out;
}

LaplaceExponent poisson_range_forward(double lambda, double c,
                                      const LaplaceExponent& psi_mu) {
  if (!(lambda > 0.0) || !(c > 0.0))
    throw Error(errc::bad_input, "need lambda > 0, c > 0");
  const double shrink = std::exp(-c);
  auto value = [lambda, shrink, psi_mu](double u) {
    if (u <= 0.0) return 0.0;
    return lambda * std::expm1(psi_mu(u) - psi_mu(u * shrink));
  };
  return LaplaceExponent(value);
}

LaplaceExponent poisson_range_inverse(double lambda, double c,
                                      const LaplaceExponent& psi_eta,
                                      double tol) {
  if (!(lambda > 0.0) || !(c > 0.0) || !(tol > 0.0))
    throw Error(errc::bad_input, "need lambda > 0, c > 0, tol > 0");
  const double eps = 1e-8;
  const double slope = psi_eta(eps) / eps;
  if (!std::isfinite(slope) || slope < 0.0)
    throw Error(errc::tail_not_summable, "psi_eta'(0+) not estimable");
  const double shrink = std::exp(-c);
  auto terms = [=](double u) -> long {
    if (u <= 0.0 || slope == 0.0) return 1;
    // slope * u * e^{-(N+1)c} / (lambda (1 - e^{-c})) < tol
    const double rhs = tol * lambda * (1.0 - shrink) / (slope * u);
    if (rhs >= 1.0) return 1;
    const long n = static_cast<long>(std::ceil(std::log(rhs) / (-c)));
    if (n > 2000000)
      throw Error(errc::tail_not_summable, "tail bound needs too many terms");
    return std::max<long>(1, n);
  };
  auto value = [=](double u) {
    if (u <= 0.0) return 0.0;
    const long n = terms(u);
    double s = 0.0;
    double arg = u;
    for (long k = 0; k < n; ++k, arg *= shrink)
      s += std::log1p(psi_eta(arg) / lambda);
    return s;
  };
  return LaplaceExponent(value);
}

}  // namespace expfunc
