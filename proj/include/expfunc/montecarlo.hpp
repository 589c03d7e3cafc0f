#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "expfunc/density.hpp"
#include "expfunc/levy.hpp"

namespace expfunc {

struct SimConfig {
  std::size_t n_samples = 100000;
  std::uint64_t seed = 1;
  double diffusion_step = 1e-3;   // Brownian parts only; jumps are exact
  double fixed_horizon = 0.0;     // > 0: stop at T instead of the adaptive rule
  double truncation_eps = 1e-17;  // adaptive: stop once e^{-xi_t} < eps
  double hard_cap_time = 1e7;
  int shards = 0;  // 0: use the hardware concurrency
};

struct EmpiricalDistribution {
  std::vector<double> samples;  // sorted ascending
  // e^{-xi_T} at truncation times the 99.9% sample quantile; the recorded
  // bias bound of the adaptive rule
  double truncation_bound = 0.0;

  double cdf(double x) const;  // right-continuous step function
  double mean() const;
  double sd() const;
  double quantile(double p) const;
};

// Jump-adapted exact simulation of V = int e^{-xi_{t-}} d eta_t: compound
// Poisson jumps at their exact event times, Gaussian parts on a step grid,
// the drift integral accumulated in closed form between events.
EmpiricalDistribution simulate_functional(const CharacteristicTriplet& t,
                                          const SubordinatorSpec& s,
                                          const SimConfig& cfg);

// eta a Poisson process with intensity v, xi = (log c) N_t with intensity u:
// V = sum_j c^{-N_{tau_j -}}, simulated exactly.
EmpiricalDistribution simulate_poisson_poisson(double c, double intensity_u,
                                               double intensity_v,
                                               const SimConfig& cfg);

double ks_distance(const EmpiricalDistribution& e,
                   const std::function<double(double)>& target_cdf);
double ks_distance(const EmpiricalDistribution& e, const GridCDF& target);

}  // namespace expfunc
