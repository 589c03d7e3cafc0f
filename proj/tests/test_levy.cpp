#include <doctest.h>

#include <cmath>

#include "expfunc/levy.hpp"

using namespace expfunc;

TEST_CASE("gamma0 on the documented configurations") {
  CHECK(gamma0({1.0, 0.0, LevyMeasure::zero()}) == doctest::Approx(1.0));

  // compound Poisson point mass at 0.5 with rate 2 compensates by 1
  CharacteristicTriplet cp{0.0, 0.0,
      LevyMeasure::compound_poisson(2.0, JumpLaw::dirac(0.5))};
  CHECK(gamma0(cp) == doctest::Approx(-1.0));

  // COGARCH image with phi = 1 and a point mass at e-1: the xi-jump sits at
  // -log(e) = -1, inside the truncation window
  LevyMeasure img = LevyMeasure::cogarch_image(
      1.0, LevyMeasure::compound_poisson(1.0, JumpLaw::dirac(std::expm1(1.0))));
  CharacteristicTriplet t{0.25, 0.0, img};
  CHECK(gamma0(t) == doctest::Approx(0.25 + 1.0));
}

TEST_CASE("gamma0 is linear under superposition") {
  LevyMeasure nu1 = LevyMeasure::compound_poisson(2.0, JumpLaw::dirac(0.5));
  LevyMeasure nu2 = LevyMeasure::exponential_tail(1.5, 2.0);
  LevyMeasure both = LevyMeasure::superpose({nu1, nu2});
  const double lhs = gamma0({0.7, 0.0, both});
  const double rhs = gamma0({0.7, 0.0, nu1}) + gamma0({0.0, 0.0, nu2});
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("mean_xi") {
  CHECK(mean_xi({1.0, 4.0, LevyMeasure::zero()}) == doctest::Approx(1.0));

  CharacteristicTriplet cp{0.0, 0.0,
      LevyMeasure::compound_poisson(1.0, JumpLaw::dirac(-2.0))};
  CHECK(mean_xi(cp) == doctest::Approx(-2.0));

  // negative exponential tail, k = theta = 1: big-jump mean is -2/e
  CharacteristicTriplet et{3.0, 0.0,
      LevyMeasure::exponential_tail(1.0, 1.0, /*negative_side=*/true)};
  CHECK(mean_xi(et) == doctest::Approx(3.0 - 2.0 / std::exp(1.0)));

  // heavy positive tail dominates
  CharacteristicTriplet heavy{0.0, 0.0,
      LevyMeasure::compound_poisson(1.0, JumpLaw::heavy_log_tail())};
  CHECK(mean_xi(heavy) == kInf);

  // both tails non-integrable
  LevyMeasure neg_heavy = LevyMeasure::cogarch_image(
      1.0, LevyMeasure::compound_poisson(1.0, JumpLaw::heavy_log_tail()));
  CharacteristicTriplet both{0.0, 0.0,
      LevyMeasure::superpose(
          {LevyMeasure::compound_poisson(1.0, JumpLaw::heavy_log_tail()),
           neg_heavy})};
  CHECK_THROWS_WITH_AS(mean_xi(both), doctest::Contains("MeanUndefined"),
                       Error);
}

TEST_CASE("convergence_check") {
  SubordinatorSpec drift_eta{1.0, LevyMeasure::zero()};
  CHECK(convergence_check({1.0, 0.0, LevyMeasure::zero()}, drift_eta) ==
        Convergence::converges);
  CHECK(convergence_check({-1.0, 0.0, LevyMeasure::zero()}, drift_eta) ==
        Convergence::diverges);

  // eta with infinite log-moment: the sufficient condition cannot conclude
  SubordinatorSpec heavy{0.0,
      LevyMeasure::compound_poisson(1.0, JumpLaw::heavy_log_tail())};
  CHECK(convergence_check({1.0, 0.0, LevyMeasure::zero()}, heavy) ==
        Convergence::unknown);

  // identically zero eta gives the point mass at zero
  SubordinatorSpec null_eta{0.0, LevyMeasure::zero()};
  CHECK(convergence_check({-1.0, 0.0, LevyMeasure::zero()}, null_eta) ==
        Convergence::converges);
}

TEST_CASE("support_of_functional") {
  SubordinatorSpec eta1{1.0, LevyMeasure::zero()};
  // both deterministic: a Dirac mass
  Support s = support_of_functional({1.0, 0.0, LevyMeasure::zero()}, eta1);
  CHECK(s.singleton);
  CHECK(s.lo == doctest::Approx(1.0));
  CHECK(s.hi == doctest::Approx(1.0));

  // spectrally negative with eta jumps: [a_eta/gamma0, inf)
  SubordinatorSpec eta2{1.0,
      LevyMeasure::compound_poisson(1.0, JumpLaw::exponential(1.0))};
  s = support_of_functional({1.0, 0.0, LevyMeasure::zero()}, eta2);
  CHECK(!s.singleton);
  CHECK(s.lo == doctest::Approx(1.0));
  CHECK(s.hi == kInf);

  // Gaussian part: full support
  s = support_of_functional({1.0, 1.0, LevyMeasure::zero()}, eta2);
  CHECK(s.lo == doctest::Approx(0.0));
  CHECK(s.hi == kInf);

  // spectrally positive xi, deterministic eta: [0, a_eta/gamma0]
  CharacteristicTriplet pos{1.0, 0.0,
      LevyMeasure::compound_poisson(1.0, JumpLaw::dirac(0.5))};
  s = support_of_functional(pos, eta1);
  CHECK(s.lo == doctest::Approx(0.0));
  CHECK(s.hi == doctest::Approx(1.0 / gamma0(pos)));

  // diverging functional is rejected
  CHECK_THROWS_AS(
      support_of_functional({-1.0, 0.0, LevyMeasure::zero()}, eta1), Error);
}

TEST_CASE("cogarch_to_gou") {
  // stationarity fails at equality: log(1 + (e-1)) = 1 = eta
  COGARCHSpec at_eq{1.0, 1.0, 1.0,
      LevyMeasure::compound_poisson(1.0, JumpLaw::dirac(std::expm1(1.0)))};
  CHECK_THROWS_WITH_AS(cogarch_to_gou(at_eq),
                       doctest::Contains("NotStationary"), Error);

  // unit jumps: log 2 < 1, xi jumps at -log 2
  COGARCHSpec ok{1.0, 1.0, 1.0,
      LevyMeasure::compound_poisson(1.0, JumpLaw::dirac(1.0))};
  auto [xi, eta] = cogarch_to_gou(ok);
  CHECK(xi.sigma2 == 0.0);
  CHECK(gamma0(xi) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(xi.nu.mass_plus() == 0.0);
  auto atoms = xi.nu.atom_parts();
  REQUIRE(atoms.size() == 1);
  CHECK(atoms[0].x == doctest::Approx(-std::log(2.0)));
  CHECK(atoms[0].mass == doctest::Approx(1.0));
  CHECK(eta.drift == doctest::Approx(1.0));
  CHECK(eta.nu.is_zero());

  // no jumps map to no jumps
  COGARCHSpec det{2.0, 1.0, 1.0, LevyMeasure::zero()};
  auto [xi2, eta2] = cogarch_to_gou(det);
  CHECK(xi2.nu.is_zero());
  CHECK(eta2.drift == doctest::Approx(2.0));
}

TEST_CASE("tail functions are non-increasing across representations") {
  Rng rng(123);
  auto uniform = [&rng] {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
  };
  std::vector<LevyMeasure> reps;
  reps.push_back(LevyMeasure::compound_poisson(2.0, JumpLaw::exponential(0.7)));
  reps.push_back(LevyMeasure::compound_poisson(1.0, JumpLaw::normal_squared()));
  reps.push_back(LevyMeasure::compound_poisson(1.0, JumpLaw::heavy_log_tail()));
  reps.push_back(LevyMeasure::exponential_tail(1.2, 0.5));
  reps.push_back(LevyMeasure::exponential_tail(0.8, 2.0, true));
  reps.push_back(LevyMeasure::tabulated({0.1, 0.5, 1.0, 2.0, 5.0},
                                        {2.0, 1.1, 0.6, 0.2, 0.01}));
  reps.push_back(LevyMeasure::cogarch_image(
      0.5, LevyMeasure::compound_poisson(1.0, JumpLaw::normal_squared())));
  reps.push_back(LevyMeasure::superpose(
      {LevyMeasure::exponential_tail(1.0, 1.0),
       LevyMeasure::compound_poisson(0.5, JumpLaw::dirac(-0.4))}));
  for (const auto& nu : reps) {
    for (int trial = 0; trial < 200; ++trial) {
      double x1 = 8.0 * uniform();
      double x2 = 8.0 * uniform();
      if (x1 > x2) std::swap(x1, x2);
      CHECK(nu.tail_plus(x1) >= nu.tail_plus(x2) - 1e-12);
      CHECK(nu.tail_minus(x1) >= nu.tail_minus(x2) - 1e-12);
    }
  }
}

TEST_CASE("tabulated moments track the closed-form exponential tail") {
  // sample tail(x) = e^{-x} densely; moments should match ExponentialTail(1,1)
  std::vector<double> xs, tails;
  for (int i = 0; i <= 4000; ++i) {
    const double x = 1e-4 + i * (25.0 - 1e-4) / 4000.0;
    xs.push_back(x);
    tails.push_back(std::exp(-x));
  }
  LevyMeasure tab = LevyMeasure::tabulated(xs, tails);
  LevyMeasure ref = LevyMeasure::exponential_tail(1.0, 1.0);
  CHECK(tab.mean_small() == doctest::Approx(ref.mean_small()).epsilon(1e-4));
  CHECK(tab.mean_big_plus() ==
        doctest::Approx(ref.mean_big_plus()).epsilon(1e-4));
  CHECK(tab.mean_plus() == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(tab.log_moment_plus() ==
        doctest::Approx(ref.log_moment_plus()).epsilon(1e-3));
}

TEST_CASE("cogarch image geometry") {
  LevyMeasure base = LevyMeasure::compound_poisson(2.0, JumpLaw::exponential(1.0));
  LevyMeasure img = LevyMeasure::cogarch_image(0.5, base);
  CHECK(img.mass_plus() == 0.0);
  CHECK(img.mass_minus() == doctest::Approx(2.0));
  // nu_img((-inf,-x)) = nu_S(((e^x - 1)/phi, inf))
  for (double x : {0.1, 0.5, 1.0, 2.0}) {
    CHECK(img.tail_minus(x) ==
          doctest::Approx(base.tail_plus(std::expm1(x) / 0.5)));
  }
  // scaling acts on the intensity
  CHECK(img.scaled(0.25).mass_minus() == doctest::Approx(0.5));
}

TEST_CASE("sampling matches the law means") {
  Rng rng(7);
  auto mean_of = [&rng](const LevyMeasure& nu, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += nu.sample_jump(rng);
    return s / n;
  };
  CHECK(mean_of(LevyMeasure::compound_poisson(3.0, JumpLaw::exponential(2.0)),
                40000) == doctest::Approx(0.5).epsilon(0.05));
  CHECK(mean_of(LevyMeasure::compound_poisson(1.0, JumpLaw::normal_squared()),
                40000) == doctest::Approx(1.0).epsilon(0.05));
  LevyMeasure tab = LevyMeasure::tabulated({0.5, 1.0, 2.0}, {1.0, 0.5, 0.0});
  // mean of the normalized tabulated law: int t dJ = int tail / mass = 1.125
  CHECK(mean_of(tab, 40000) == doctest::Approx(1.125).epsilon(0.05));
}
