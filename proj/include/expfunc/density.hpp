#pragma once

#include <functional>
#include <string>
#include <vector>

#include "expfunc/bernstein.hpp"
#include "expfunc/levy.hpp"

namespace expfunc {

struct GridSpec {
  double t_max = 20.0;
  double h = 1e-3;
  bool auto_extend = true;       // extend T until the fitted tail is small
  double tail_mass_tol = 1e-6;   // relative to the captured mass
  int max_extensions = 4;
};

// Tabulated density on a uniform grid starting at t0. Solver outputs are
// normalized to unit trapezoid mass on the grid; the fitted exponential tail
// mass beyond the grid is recorded, not added.
struct GridDensity {
  double t0 = 0.0;
  double h = 1e-3;
  std::vector<double> f;
  bool normalized = false;
  Support support;
  double tail_mass = 0.0;
  std::function<double(double)> analytic_derivative;  // optional

  double t(std::size_t i) const { return t0 + h * static_cast<double>(i); }
  double at(double x) const;  // linear interpolation, 0 outside the grid
  double mass() const;
};

struct GridCDF {
  double t0 = 0.0;
  double h = 1e-3;
  std::vector<double> F;
  // an atom kept exact at the left edge (compound Poisson factors)
  double atom_pos = 0.0;
  double atom_mass = 0.0;

  double t(std::size_t i) const { return t0 + h * static_cast<double>(i); }
  double at(double x) const;  // 0 left of the grid, F.back() right of it
  // mass of (0, x): excludes an atom sitting exactly at zero
  double open_mass(double x) const;
};

struct ResidualReport {
  std::vector<double> t;
  std::vector<double> residual;
  double max_abs = 0.0;
  std::string equation;
};

// Volterra marching for the spectrally negative case: f supported on
// [a_eta/gamma0, inf) with
//   (gamma0 t - a_eta) f(t) = int ( nu_xi((-inf, log(s/t))) +
//                                   nu_eta((t-s, inf)) ) f(s) ds.
// The scheme seeds the left edge with the local power law, marches an
// implicit trapezoid step, then normalizes to unit mass.
GridDensity solve_case_i(const CharacteristicTriplet& t,
                         const SubordinatorSpec& s, const GridSpec& grid);

// Spectrally positive case with deterministic eta: f supported on
// [0, a_eta/gamma0], marched backwards from the right edge.
GridDensity solve_case_ii(const CharacteristicTriplet& t,
                          const SubordinatorSpec& s, const GridSpec& grid);

// Residual of the general integro-differential equation; a small maximum
// certifies f as the density of the exponential functional via the converse
// direction of the theorem. Uses the density's analytic_derivative when set,
// central differences otherwise.
ResidualReport residual_case_iii(const CharacteristicTriplet& t,
                                 const SubordinatorSpec& s,
                                 const GridDensity& f);

// COGARCH stationary volatility density via the marching solver applied to
// the converted generalized-OU pair.
GridDensity solve_cogarch(const COGARCHSpec& c, const GridSpec& grid);

// COGARCH with Poisson driving jumps: the CDF satisfies
// (eta t - beta) F'(t) = c (F(t) - F(t/(1+phi))), F ~ (t-beta/eta)^{c/eta}
// at the left edge. Solved by RK4 with the delayed term interpolated.
GridCDF cogarch_poisson_cdf(double beta, double eta, double intensity,
                            double phi, const GridSpec& grid);

// (a - t) f(t) + int_a^t nu((t-s, inf)) f(s) ds; zero residual certifies a
// selfdecomposable law with driving tail nu((x, inf)).
ResidualReport sd_density_residual(const GridDensity& f, double a,
                                   const std::function<double(double)>& nu_tail);

// (a - t) f(t) + int_a^t f(s) int_{t-s}^inf m(x) dx ds with CM density m;
// m_tail may supply the inner tail integral in closed form.
ResidualReport ggc_density_residual(
    const GridDensity& f, double a, const std::function<double(double)>& m,
    const std::function<double(double)>& m_tail = nullptr,
    const CMOptions& cm_opt = {});

struct SelfsimResult {
  GridCDF cdf;
  double sup_change = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Fixed point of F(t) = (1-q) F(ct) + q F(t-1) on [0, T], F == 1 beyond T.
// The map is not provably contractive; the achieved sup-change is reported
// and a NotConverged flag is the contract, not an exception.
SelfsimResult poisson_selfsim_iterate(double c, double q, double t_max,
                                      double h, int max_iters = 4000);

// psi_mu = -log of the trapezoid Laplace transform of the grid density, with
// exact first and second derivatives of the quadrature.
LaplaceExponent laplace_exponent_from_density(const GridDensity& f);

}  // namespace expfunc
