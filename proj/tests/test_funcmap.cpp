#include <doctest.h>

#include <cmath>

#include "expfunc/funcmap.hpp"

using namespace expfunc;

namespace {

const CharacteristicTriplet kUnitDrift{1.0, 0.0, LevyMeasure::zero()};

}  // namespace

TEST_CASE("deterministic xi collapses the map to u psi'(u)") {
  for (double shape : {0.5, 2.0}) {
    for (double rate : {1.0, 3.0}) {
      LaplaceExponent eta = psi_eta_from_mu(kUnitDrift, psi_gamma(shape, rate));
      for (double u = 0.0; u <= 100.0; u += 2.5) {
        CHECK(eta(u) ==
              doctest::Approx(shape * u / (rate + u)).epsilon(1e-10));
      }
    }
  }
  // Dirac law maps to pure drift
  LaplaceExponent d = psi_eta_from_mu(kUnitDrift, psi_dirac(0.8));
  CHECK(d(2.0) == doctest::Approx(1.6).epsilon(1e-10));
}

TEST_CASE("Dufresne: Brownian xi with drift maps inverse-Gamma to eta_t = t") {
  CharacteristicTriplet bm{1.0, 2.0, LevyMeasure::zero()};
  LaplaceExponent eta = psi_eta_from_mu(bm, psi_inverse_gamma(1.0, 1.0));
  for (double u : {0.1, 0.5, 1.0, 5.0, 20.0})
    CHECK(eta(u) == doctest::Approx(u).epsilon(1e-8));
}

TEST_CASE("the drift slot is exactly linear") {
  CharacteristicTriplet base{0.5, 0.0,
      LevyMeasure::compound_poisson(1.0, JumpLaw::dirac(-1.0))};
  CharacteristicTriplet shifted = base;
  shifted.gamma += 0.7;
  LaplaceExponent mu = psi_gamma(1.0, 1.0);
  LaplaceExponent e0 = psi_eta_from_mu(base, mu);
  LaplaceExponent e1 = psi_eta_from_mu(shifted, mu);
  for (double u : {0.3, 1.0, 6.0}) {
    const double add = 0.7 * u * mu.d1(u);
    CHECK(e1(u) - e0(u) == doctest::Approx(add).epsilon(1e-12));
  }
}

TEST_CASE("range membership") {
  // Gamma lies in the range of xi_t = t, with psi_eta = k u/(theta+u)
  RangeVerdict in = range_membership(kUnitDrift, psi_gamma(2.0, 1.0));
  CHECK(in.outcome == RangeVerdict::Outcome::in_range);
  REQUIRE(in.psi_eta.has_value());
  CHECK((*in.psi_eta)(1.0) == doctest::Approx(1.0).epsilon(1e-9));

  // Dirac maps to pure drift: in range
  CHECK(range_membership(kUnitDrift, psi_dirac(1.0)).outcome ==
        RangeVerdict::Outcome::in_range);

  // a GGC with k(0+) < inf is not in the range of a Brownian xi with drift
  CharacteristicTriplet bm{1.0, 1.0, LevyMeasure::zero()};
  RangeVerdict out = range_membership(bm, psi_gamma(1.0, 1.0));
  CHECK(out.outcome == RangeVerdict::Outcome::not_in_range);
  CHECK(out.analytic_derivatives);
}

TEST_CASE("two quadrature routes agree on a continuous nu_xi") {
  // same exponential negative tail, once with a density, once tabulated
  CharacteristicTriplet smooth{1.5, 0.0,
      LevyMeasure::exponential_tail(0.5, 2.0, /*negative_side=*/true)};
  // image of a positive tabulated measure lands on the negative axis;
  // build it so the image tail matches 0.5 e^{-2x}:
  // nu_img((-inf,-x)) = base(((e^x-1)/phi, inf)) with phi = 1
  std::vector<double> xs, tails;
  for (int i = 0; i <= 6000; ++i) {
    const double s = 1e-5 + i * (400.0 - 1e-5) / 6000.0;
    xs.push_back(s);
    tails.push_back(0.5 * std::exp(-2.0 * std::log1p(s)));
  }
  CharacteristicTriplet cells{1.5, 0.0,
      LevyMeasure::cogarch_image(1.0, LevyMeasure::tabulated(xs, tails))};
  LaplaceExponent mu = psi_gamma(1.0, 1.0);
  LaplaceExponent ea = psi_eta_from_mu(smooth, mu);
  LaplaceExponent eb = psi_eta_from_mu(cells, mu);
  for (double u : {0.5, 1.0, 3.0, 10.0})
    CHECK(ea(u) == doctest::Approx(eb(u)).epsilon(2e-3));
}

TEST_CASE("poisson range forward map") {
  LaplaceExponent zero([](double) { return 0.0; });
  CHECK(poisson_range_forward(1.0, 1.0, zero)(2.0) == doctest::Approx(0.0));

  // monotone input gives a monotone output vanishing at zero
  LaplaceExponent mu = psi_gamma(1.0, 1.0);
  LaplaceExponent fwd = poisson_range_forward(2.0, 0.7, mu);
  CHECK(fwd(0.0) == doctest::Approx(0.0));
  double prev = 0.0;
  for (double u = 0.25; u <= 40.0; u *= 2.0) {
    const double v = fwd(u);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
}

TEST_CASE("poisson range inverse and the round trip") {
  // psi_eta = a u: partial sums of log(1 + a e^{-kc} u / lambda)
  const double a = 0.8, lambda = 1.0, c = std::log(2.0);
  LaplaceExponent inv = poisson_range_inverse(lambda, c, psi_dirac(a), 1e-10);
  double brute = 0.0;
  for (int k = 0; k < 120; ++k)
    brute += std::log1p(a * std::exp(-k * c) * 2.0 / lambda);
  CHECK(inv(2.0) == doctest::Approx(brute).epsilon(1e-8));

  // round trip through the forward map on psi_eta(u) = 1 - e^{-u}
  LaplaceExponent eta = psi_poisson(1.0);
  LaplaceExponent mu = poisson_range_inverse(1.0, c, eta, 1e-10);
  LaplaceExponent eta_back = poisson_range_forward(1.0, c, mu);
  for (double u : {0.3, 1.0, 2.5, 8.0})
    CHECK(eta_back(u) == doctest::Approx(eta(u)).epsilon(1e-6));

  // zero eta maps to zero mu
  LaplaceExponent zero([](double) { return 0.0; });
  CHECK(poisson_range_inverse(1.0, c, zero, 1e-10)(1.5) ==
        doctest::Approx(0.0));
}

TEST_CASE("scaled-Poisson laws have no drift part") {
  const double c = std::log(2.0);
  LaplaceExponent mu = poisson_range_inverse(1.0, c, psi_poisson(1.0), 1e-9);
  double prev = kInf;
  for (double u : {1.0, 1e2, 1e4, 1e6}) {
    const double slope = mu(u) / u;
    CHECK(slope <= prev + 1e-15);
    prev = slope;
  }
  CHECK(mu(1e6) / 1e6 < 1e-3);
}
