#pragma once

#include <optional>
#include <vector>

#include "expfunc/bernstein.hpp"
#include "expfunc/density.hpp"
#include "expfunc/levy.hpp"

namespace expfunc {

struct MonotoneProfile {
  std::vector<double> t;
  std::vector<double> g;
  bool non_decreasing = false;
  double violated_at = 0.0;  // first grid point with a certified decrease
  // extracted subordinator when non-decreasing: nu_eta(dt) = dG(t)
  bool has_extraction = false;
  SubordinatorSpec extracted_eta;
};

// CDF of the c-factor (c > 1) of mu: compound Poisson with intensity
// lambda_c = k(0+) log c, jump density g_c(t) = (k(t/c) - k(t))/t, drift
// shift a(c-1); the atom e^{-lambda_c} at the shift is kept exact.
GridCDF c_factor_cdf(const BernsteinRepr& mu, double c, const GridSpec& grid);

// G1(t) = gamma0 nu_X((0,t)) - int mu_{e^{-x}}((0,t)) nu_xi(dx) for a
// spectrally negative xi without Gaussian part; non-decreasing iff mu lies in
// the range, in which case nu_eta = dG1 and a_eta = gamma0 * drift(mu).
MonotoneProfile g1_profile(const CharacteristicTriplet& t,
                           const BernsteinRepr& mu, const GridSpec& grid);

// Gaussian case: G2 built from the density g of nu_X, its self-convolution
// and the factor CDFs; requires zero drift and the edge conditions
// t g(t) -> 0 at both ends of the grid.
MonotoneProfile g2_profile(const CharacteristicTriplet& t,
                           const BernsteinRepr& mu, const GridSpec& grid);

// (gamma, sigma^2, nu) -> (gamma/sigma^2, 1, nu/sigma^2); same range.
CharacteristicTriplet nested_normalize(const CharacteristicTriplet& t);

// (gamma', sigma^2, lambda nu) with the drift-compensation inequality
// gamma' - gamma >= -(1-lambda) int_{[-1,0)} x nu(dx) enforced.
CharacteristicTriplet thin_jumps(const CharacteristicTriplet& t, double lambda,
                                 double gamma_prime);

// First t where the necessary inequality for a GGC with finite Stieltjes
// measure to lie in the range of sigma B + a t fails; nullopt when no
// violation shows up to t_max (try a larger horizon).
std::optional<double> ggc_bm_exclusion_witness(const StieltjesRepr& rho,
                                               double a, double sigma2,
                                               double t_max);

}  // namespace expfunc
