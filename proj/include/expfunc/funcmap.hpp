#pragma once

#include <memory>
#include <optional>

#include "expfunc/bernstein.hpp"
#include "expfunc/levy.hpp"

namespace expfunc {

struct RangeVerdict {
  enum class Outcome { in_range, not_in_range, undecided };
  Outcome outcome = Outcome::undecided;
  std::optional<LaplaceExponent> psi_eta;  // certifying BF when in range
  double witness = 0.0;                    // grid point of the BF violation
  int order = 0;
  bool analytic_derivatives = false;  // derivative source for psi_mu
};

// The Laplace-domain map: psi_eta(u) =
//   (gamma - s2/2) u psi'(u) + (s2/2) u^2 ((psi')^2 - psi'')
//   + int ( e^{psi(u) - psi(u e^{-y})} - 1 - u psi'(u) y 1_{|y|<=1} ) nu(dy).
// Atoms of nu are summed exactly; continuous components are integrated with
// the O(y^2) expansion of the integrand below |y| = 1e-4. quad_err, when
// given, accumulates the largest relative quadrature error seen.
LaplaceExponent psi_eta_from_mu(const CharacteristicTriplet& t,
                                const LaplaceExponent& psi_mu,
                                std::shared_ptr<double> quad_err = nullptr);

// mu in R_xi^+ iff psi_eta_from_mu yields a Bernstein function.
RangeVerdict range_membership(const CharacteristicTriplet& t,
                              const LaplaceExponent& psi_mu,
                              const CMOptions& opt = {});

// xi = c N_t for a Poisson process of intensity lambda:
// psi_eta(u) = lambda e^{psi_mu(u) - psi_mu(u e^{-c})} - lambda.
LaplaceExponent poisson_range_forward(double lambda, double c,
                                      const LaplaceExponent& psi_mu);

// Inverse of the above: truncated sum of log(1 + psi_eta(e^{-kc}u)/lambda).
LaplaceExponent poisson_range_inverse(double lambda, double c,
                                      const LaplaceExponent& psi_eta,
                                      double tol);

}  // namespace expfunc
