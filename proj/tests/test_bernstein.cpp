#include <doctest.h>

#include <cmath>
#include <vector>

#include "expfunc/bernstein.hpp"
#include "expfunc/quadrature.hpp"

using namespace expfunc;

namespace {

// symmetric divided-difference estimate of the n-th derivative
double numeric_derivative(const std::function<double(double)>& f, int n,
                          double x, double h) {
  std::vector<double> pts(n + 1), vals(n + 1);
  for (int i = 0; i <= n; ++i) {
    pts[i] = x + (i - 0.5 * n) * h;
    vals[i] = f(pts[i]);
  }
  for (int k = 1; k <= n; ++k)
    for (int i = 0; i + k <= n; ++i)
      vals[i] = (vals[i + 1] - vals[i]) / (pts[i + k] - pts[i]);
  double nfact = 1.0;
  for (int k = 2; k <= n; ++k) nfact *= k;
  return vals[0] * nfact;
}

}  // namespace

TEST_CASE("complete monotonicity engine") {
  auto ratio = [](double x) { return -std::expm1(-x) / x; };
  CMVerdict v = is_completely_monotone(ratio);
  CHECK(v.passed);
  CHECK(v.order == 8);

  CMOptions bounded;
  bounded.grid_hi = 100.0;  // e^x stays finite here
  v = is_completely_monotone([](double x) { return std::exp(x); }, bounded);
  CHECK(!v.passed);
  CHECK(v.order == 1);

  // Levy density of a factor: (k(x) - k(2x))/x with CM k
  auto factor = [](double x) {
    return (std::exp(-x) - std::exp(-2.0 * x)) / x;
  };
  v = is_completely_monotone(factor);
  CHECK(v.passed);
  CHECK(v.order == 8);

  v = is_completely_monotone([](double x) { return x <= 1.0 ? 1.0 : 0.0; });
  CHECK(!v.passed);

  CHECK_THROWS_AS(
      is_completely_monotone([](double x) { return std::log(x - 500.0); }),
      Error);
}

TEST_CASE("closed-form derivatives of (1-e^{-lambda x})/x") {
  CHECK(cm_exp_ratio_derivative(0, 1.0, 1.0) ==
        doctest::Approx(-std::expm1(-1.0)));
  CHECK(cm_exp_ratio_derivative(1, 1.0, 1.0) ==
        doctest::Approx(-std::exp(-1.0) * (std::exp(1.0) - 2.0)));
  // x -> 0 limit: (-1)^n lambda^{n+1} n!/(n+1)!
  for (int n : {0, 1, 2, 3, 5}) {
    const double lambda = 1.3;
    const double want = ((n % 2 == 0) ? 1.0 : -1.0) *
                        std::pow(lambda, n + 1) / (n + 1.0);
    CHECK(cm_exp_ratio_derivative(n, lambda, 1e-13) ==
          doctest::Approx(want).epsilon(1e-9));
  }
  // numeric differentiation agrees to relative 1e-4 for n <= 4
  for (double lambda : {0.5, 1.0}) {
    auto f = [lambda](double x) { return -std::expm1(-lambda * x) / x; };
    for (int n = 1; n <= 4; ++n) {
      for (double x : {0.5, 1.0, 2.0}) {
        const double h = 0.02 * x;
        const double num = numeric_derivative(f, n, x, h);
        const double ana = cm_exp_ratio_derivative(n, lambda, x);
        CHECK(num == doctest::Approx(ana).epsilon(1e-4));
      }
    }
  }
  CHECK_THROWS_AS(cm_exp_ratio_derivative(-1, 1.0, 1.0), Error);
  CHECK_THROWS_AS(cm_exp_ratio_derivative(0, 1.0, -1.0), Error);
}

TEST_CASE("bernstein function test") {
  CHECK(is_bernstein(psi_dirac(1.0)).passed);
  CHECK(is_bernstein(psi_poisson(2.0)).passed);
  CHECK(is_bernstein(psi_gamma(2.0, 1.0)).passed);

  CMVerdict v = is_bernstein(LaplaceExponent([](double u) { return u * u; }));
  CHECK(!v.passed);
  CHECK(v.order == 1);

  CHECK_THROWS_WITH_AS(
      is_bernstein(LaplaceExponent([](double u) { return u + 1.0; })),
      doctest::Contains("NotAnchoredAtZero"), Error);

  // value-only divided differences reach the same verdicts
  LaplaceExponent gv([](double u) { return 2.0 * std::log1p(u); });
  CHECK(is_bernstein(gv).passed);
}

TEST_CASE("complete bernstein = CM Levy density") {
  CHECK(is_complete_bernstein(BernsteinRepr::gamma(1.0, 2.0)).passed);

  BernsteinRepr step = BernsteinRepr::step_k(1.0, 1.0);
  CHECK(!is_complete_bernstein(step).passed);

  BernsteinRepr opaque;
  opaque.drift = 1.0;
  CHECK_THROWS_WITH_AS(is_complete_bernstein(opaque),
                       doctest::Contains("DensityUnavailable"), Error);
}

TEST_CASE("c-factors") {
  LaplaceExponent g = psi_gamma(1.0, 1.0);
  CHECK(c_factor(g, 2.0)(1.0) == doctest::Approx(std::log(1.5)));
  // drift scales by (c-1)
  CHECK(c_factor(psi_dirac(0.7), 3.0)(2.0) == doctest::Approx(0.7 * 2.0 * 2.0));
  CHECK_THROWS_WITH_AS(c_factor(g, 1.0), doctest::Contains("InvalidFactor"),
                       Error);
  CHECK_THROWS_AS(c_factor(g, -0.5), Error);

  // factor identity: psi(u) = psi(cu) + factor(u) for c < 1
  for (double c : {0.25, 0.5, 0.75}) {
    LaplaceExponent f = c_factor(g, c);
    for (double u : {0.3, 1.0, 7.0}) {
      CHECK(f(u) + g(c * u) == doctest::Approx(g(u)).epsilon(1e-14));
    }
  }

  // Prop. 3.1 (ii) <=> (iii): verdicts agree between c and 1/c
  for (double c : {0.25, 0.5, 0.75}) {
    CHECK(is_bernstein(c_factor(g, c)).passed ==
          is_bernstein(c_factor(g, 1.0 / c)).passed);
    LaplaceExponent p = psi_poisson(1.0);
    CHECK(is_bernstein(c_factor(p, c)).passed ==
          is_bernstein(c_factor(p, 1.0 / c)).passed);
    CHECK(!is_bernstein(c_factor(p, c)).passed);  // Poisson is not SD
  }

  // Prop. 3.7 spot check: Gamma factor densities are CM for c in {2, 4}
  for (double c : {2.0, 4.0}) {
    auto g_c = [c](double t) {
      return (std::exp(-t / c) - std::exp(-t)) / t;
    };
    CHECK(is_completely_monotone(g_c).passed);
  }
}

TEST_CASE("selfdecomposability via u psi'(u)") {
  CHECK(is_selfdecomposable(psi_gamma(2.0, 3.0)).passed);
  CHECK(is_selfdecomposable(psi_dirac(2.0)).passed);
  CHECK(!is_selfdecomposable(psi_poisson(1.0)).passed);
  // the step-k law is SD: u psi' = 1 - e^{-u}
  CHECK(is_selfdecomposable(BernsteinRepr::step_k(1.0, 1.0).laplace_exponent())
            .passed);
}

TEST_CASE("GGC via CM k-function") {
  CHECK(is_ggc(BernsteinRepr::gamma(1.5, 0.5)).passed);
  CHECK(!is_ggc(BernsteinRepr::step_k(1.0, 1.0)).passed);

  BernsteinRepr slow;
  slow.k = KFunction::callable([](double t) { return 1.0 / (1.0 + t); }, 1e-4,
                               1e4, 200);
  CHECK(is_ggc(slow).passed);

  BernsteinRepr nok;
  CHECK_THROWS_WITH_AS(is_ggc(nok), doctest::Contains("KUnavailable"), Error);

  // T subset of L+: every GGC verdict must come with an SD verdict
  for (double shape : {0.5, 1.0, 3.0}) {
    BernsteinRepr r = BernsteinRepr::gamma(shape, 1.0);
    if (is_ggc(r).passed)
      CHECK(is_selfdecomposable(r.laplace_exponent()).passed);
  }
}

TEST_CASE("driving subordinator from the k-function") {
  SubordinatorSpec x = sd_to_driving(BernsteinRepr::gamma(2.0, 1.5));
  CHECK(x.drift == 0.0);
  for (double t : {0.1, 1.0, 3.0})
    CHECK(x.nu.tail_plus(t) == doctest::Approx(2.0 * std::exp(-1.5 * t)));

  // degenerate law: pure drift
  BernsteinRepr dirac;
  dirac.drift = 0.7;
  dirac.k = KFunction::atoms({});
  SubordinatorSpec xd = sd_to_driving(dirac);
  CHECK(xd.nu.is_zero());
  CHECK(xd.drift == doctest::Approx(0.7));

  // step k: tail steps 1 -> 0 at the cut, i.e. one atom there
  SubordinatorSpec xs = sd_to_driving(BernsteinRepr::step_k(1.0, 1.0));
  auto atoms = xs.nu.atom_parts();
  REQUIRE(atoms.size() == 1);
  CHECK(atoms[0].x == doctest::Approx(1.0));
  CHECK(atoms[0].mass == doctest::Approx(1.0));

  BernsteinRepr increasing;
  increasing.k = KFunction::callable([](double t) { return t; }, 0.01, 10.0, 64);
  CHECK_THROWS_WITH_AS(sd_to_driving(increasing),
                       doctest::Contains("NotSelfdecomposableRepr"), Error);
}

TEST_CASE("exponential functional of a unit-drift map") {
  // psi_X(u) = u/(u+1) integrates to log(1+u)
  SubordinatorSpec x{0.0, LevyMeasure::exponential_tail(1.0, 1.0)};
  LaplaceExponent mu = exp_map_unit_drift(x);
  for (double u = 0.0; u <= 10.0; u += 0.5)
    CHECK(mu(u) == doctest::Approx(std::log1p(u)).epsilon(1e-9));

  // deterministic in, deterministic out
  SubordinatorSpec d{0.4, LevyMeasure::zero()};
  CHECK(exp_map_unit_drift(d)(3.0) == doctest::Approx(1.2));

  // Stieltjes atom route: rho = k delta_theta drives Gamma(k, theta)
  BernsteinRepr gg = bo_to_ggc(StieltjesRepr{0.0, {{2.0, 1.5}}});
  SubordinatorSpec xg = sd_to_driving(gg);
  LaplaceExponent mug = exp_map_unit_drift(xg);
  LaplaceExponent ref = psi_gamma(1.5, 2.0);
  for (double u : {0.5, 1.0, 4.0, 9.0})
    CHECK(mug(u) == doctest::Approx(ref(u)).epsilon(1e-9));

  SubordinatorSpec heavy{0.0,
      LevyMeasure::compound_poisson(1.0, JumpLaw::heavy_log_tail())};
  CHECK_THROWS_WITH_AS(exp_map_unit_drift(heavy),
                       doctest::Contains("LogMomentInfinite"), Error);
}

TEST_CASE("sd_to_driving inverts exp_map_unit_drift on the CP-Exp family") {
  for (double k : {0.5, 2.0}) {
    for (double theta : {1.0, 3.0}) {
      SubordinatorSpec x{0.0, LevyMeasure::exponential_tail(k, theta)};
      LaplaceExponent psi_x = psi_from_subordinator(x);
      // the functional of X is Gamma(k, theta); back to the driving process
      SubordinatorSpec back = sd_to_driving(BernsteinRepr::gamma(k, theta));
      LaplaceExponent psi_back = psi_from_subordinator(back);
      for (double u : {0.1, 1.0, 5.0, 20.0})
        CHECK(psi_back(u) == doctest::Approx(psi_x(u)).epsilon(1e-8));
    }
  }
}

TEST_CASE("Stieltjes representation round trip") {
  StieltjesRepr rho{0.3, {{1.0, 1.0}, {2.0, 1.0}}};
  BernsteinRepr r = bo_to_ggc(rho);
  CHECK((*r.k)(1.0) ==
        doctest::Approx(std::exp(-1.0) + std::exp(-2.0)));
  StieltjesRepr back = ggc_to_bo(r);
  REQUIRE(back.atoms.size() == 2);
  CHECK(back.drift == doctest::Approx(0.3));
  CHECK(back.atoms[0].first == doctest::Approx(1.0));
  CHECK(back.atoms[1].second == doctest::Approx(1.0));

  // empty measure: pure drift
  BernsteinRepr r0 = bo_to_ggc(StieltjesRepr{1.0, {}});
  CHECK((*r0.k)(0.5) == 0.0);
  CHECK(r0.laplace_exponent()(2.0) == doctest::Approx(2.0));

  CHECK_THROWS_WITH_AS(ggc_to_bo(BernsteinRepr::step_k(1.0, 1.0)),
                       doctest::Contains("RepresentationNotRecoverable"),
                       Error);
}

TEST_CASE("semi-selfdecomposable synthesis") {
  // f(u) = u, c = 1/2: geometric series doubles the drift
  LaplaceExponent lin = semi_sd_synthesize(psi_dirac(1.0), 0.5, 1e-12);
  CHECK(lin(1.0) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(lin(3.0) == doctest::Approx(6.0).epsilon(1e-9));

  // factor recovery: psi(u) - psi(u/2) = f(u)
  SubordinatorSpec cp{0.0, LevyMeasure::compound_poisson(1.0, JumpLaw::dirac(1.0))};
  LaplaceExponent f = psi_from_subordinator(cp);
  LaplaceExponent psi = semi_sd_synthesize(f, 0.5, 1e-12);
  for (double u : {0.5, 1.0, 4.0})
    CHECK(psi(u) - psi(0.5 * u) == doctest::Approx(f(u)).epsilon(1e-9));

  // direct summation oracle for f = log(1+u) at u = 1
  double brute = 0.0;
  for (int i = 0; i < 200; ++i) brute += std::log1p(std::pow(0.5, i));
  LaplaceExponent lg = semi_sd_synthesize(psi_gamma(1.0, 1.0), 0.5, 1e-10);
  CHECK(lg(1.0) == doctest::Approx(brute).epsilon(1e-9));
}

TEST_CASE("iterated factors telescope") {
  LaplaceExponent g = psi_gamma(2.0, 1.0);
  const double c = 0.6;
  LaplaceExponent fc = c_factor(g, c);
  for (int n : {2, 5, 10}) {
    for (double u : {0.7, 2.0}) {
      double sum = 0.0;
      double arg = u;
      for (int i = 0; i < n; ++i, arg *= c) sum += fc(arg);
      const double direct = g(u) - g(std::pow(c, n) * u);
      CHECK(sum == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("inverse gamma exponent (Dufresne's law)") {
  LaplaceExponent ig = psi_inverse_gamma(1.0, 1.0);
  CHECK(ig(0.0) == doctest::Approx(0.0));
  // u^2((psi')^2 - psi'') == u, the Bessel identity behind Dufresne
  for (double u : {0.2, 1.0, 4.0, 25.0}) {
    const double p1 = ig.d1(u);
    const double p2 = ig.d2(u);
    CHECK(u * u * (p1 * p1 - p2) == doctest::Approx(u).epsilon(1e-9));
  }
  CHECK(is_bernstein(ig).passed);  // inverse-Gamma is infinitely divisible
}
