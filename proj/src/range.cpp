#include "expfunc/range.hpp"

#include <algorithm>
#include <cmath>

namespace expfunc {

namespace {

// jump density of the c-factor, g_c(t) = (k(t/c) - k(t))/t, extended by its
// limit -k'(0+)(1 - 1/c) at t = 0
double factor_density(const KFunction& k, double c, double kp0, double t) {
  if (t <= 0.0) return -kp0 * (1.0 - 1.0 / c);
  return (k(t / c) - k(t)) / t;
}

double poisson_tail_terms(double lambda, double tol) {
  double p = std::exp(-lambda);
  double cdf = p;
  int n = 0;
  while (1.0 - cdf > tol && n < 4000) {
    ++n;
    p *= lambda / n;
    cdf += p;
  }
  return n;
}

struct ProfileScan {
  bool non_decreasing = true;
  double violated_at = 0.0;
};

ProfileScan scan_monotone(const std::vector<double>& t,
                          const std::vector<double>& g) {
  ProfileScan s;
  double scale = 0.0;
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    scale = std::max(scale, std::abs(g[i]));
    if (g[i + 1] < g[i] - 1e-8 * (scale + 1e-12)) {
      s.non_decreasing = false;
      s.violated_at = t[i + 1];
      return s;
    }
  }
  return s;
}

SubordinatorSpec extract_eta(const std::vector<double>& t,
                             const std::vector<double>& g, double g_inf,
                             double drift) {
  // nu_eta(dt) = dG(t): tabulate the tail G(inf) - G(t)
  std::vector<double> xs, tails;
  xs.reserve(t.size());
  tails.reserve(t.size());
  double prev = kInf;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] <= 0.0) continue;
    double tail = std::max(g_inf - g[i], 0.0);
    tail = std::min(tail, prev);
    prev = tail;
    xs.push_back(t[i]);
    tails.push_back(tail);
  }
  SubordinatorSpec eta;
  eta.drift = drift;
  eta.nu = tails.empty() || tails.front() <= 0.0
               ? LevyMeasure::zero()
               : LevyMeasure::tabulated(std::move(xs), std::move(tails));
  return eta;
}

std::vector<Atom> negative_jump_nodes(const LevyMeasure& nu) {
  // the x-integral is a finite sum over jump nodes
  if (!nu.purely_atomic())
    throw Error(errc::precondition_violated,
                "profiles need finitely many jump nodes (atomic nu_xi)");
  return nu.atom_parts();
}

}  // namespace

GridCDF c_factor_cdf(const BernsteinRepr& mu, double c, const GridSpec& grid) {
  if (!(c > 1.0)) throw Error(errc::invalid_factor, "factor CDF needs c > 1");
  if (!mu.k) throw Error(errc::k_unavailable, "factor CDF needs k");
  const KFunction& k = *mu.k;
  const double k0 = k.k0();
  const double kp0 = k.kprime0();
  if (!std::isfinite(k0) || !std::isfinite(kp0))
    throw Error(errc::factor_not_compound_poisson,
                "k(0+) or k'(0+) not finite");
  const double a_c = mu.drift * (c - 1.0);
  if (k0 == 0.0) {
    // pure drift: the factor is the point mass at a_c
    GridCDF out;
    out.t0 = a_c;
    out.h = grid.h;
    out.F = {1.0, 1.0};
    out.atom_pos = a_c;
    out.atom_mass = 1.0;
    return out;
  }
  const double lambda_c = k0 * std::log(c);
  const double atom = std::exp(-lambda_c);
  const int n_poisson =
      static_cast<int>(poisson_tail_terms(lambda_c, 1e-8));

  const double h = grid.h;
  const std::size_t n =
      static_cast<std::size_t>(std::ceil(grid.t_max / h)) + 1;

  // normalized jump density on the grid
  std::vector<double> jump(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    jump[i] = std::max(
        factor_density(k, c, kp0, static_cast<double>(i) * h) / lambda_c, 0.0);

  // accumulate sum_n pois(n) * jump^{*n}
  std::vector<double> conv = jump;
  std::vector<double> density(n, 0.0);
  double pois = atom;
  for (int m = 1; m <= std::max(n_poisson, 1); ++m) {
    pois *= lambda_c / m;
    for (std::size_t i = 0; i < n; ++i) density[i] += pois * conv[i];
    if (m == n_poisson) break;
    // conv <- conv * jump (trapezoid in the inner integral)
    std::vector<double> next(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
      double s = 0.5 * (conv[0] * jump[i] + conv[i] * jump[0]);
      for (std::size_t j = 1; j < i; ++j) s += conv[j] * jump[i - j];
      next[i] = s * h;
    }
    conv.swap(next);
  }

  GridCDF out;
  out.t0 = a_c;
  out.h = h;
  out.atom_pos = a_c;
  out.atom_mass = atom;
  out.F.resize(n);
  double acc = atom;
  out.F[0] = acc;
  for (std::size_t i = 1; i < n; ++i) {
    acc += 0.5 * h * (density[i - 1] + density[i]);
    out.F[i] = std::min(acc, 1.0);
  }
  return out;
}

MonotoneProfile g1_profile(const CharacteristicTriplet& t,
                           const BernsteinRepr& mu, const GridSpec& grid) {
  if (t.sigma2 != 0.0)
    throw Error(errc::precondition_violated, "G1 needs sigma = 0");
  if (t.nu.mass_plus() > 0.0)
    throw Error(errc::precondition_violated, "G1 needs nu_xi((0,inf)) = 0");
  const double g0 = gamma0(t);
  if (!(g0 > 0.0))
    throw Error(errc::precondition_violated, "G1 needs gamma0 > 0");
  if (!mu.k) throw Error(errc::k_unavailable, "G1 needs the k-function of mu");
  const KFunction& k = *mu.k;
  const double k0 = k.k0();

  std::vector<Atom> nodes;
  if (!t.nu.is_zero()) {
    for (const Atom& a : negative_jump_nodes(t.nu)) {
      if (a.x >= 0.0)
        throw Error(errc::precondition_violated, "positive jump in nu_xi");
      nodes.push_back(a);
    }
  }
  std::vector<GridCDF> factors;
  factors.reserve(nodes.size());
  for (const Atom& a : nodes)
    factors.push_back(c_factor_cdf(mu, std::exp(-a.x), grid));

  const double h = grid.h;
  const std::size_t n =
      static_cast<std::size_t>(std::ceil(grid.t_max / h)) + 1;
  MonotoneProfile prof;
  prof.t.resize(n);
  prof.g.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ti = static_cast<double>(i) * h;
    prof.t[i] = ti;
    double v = ti <= 0.0 ? 0.0 : g0 * (k0 - k(ti));  // gamma0 nu_X((0,t))
    for (std::size_t j = 0; j < nodes.size(); ++j)
      v -= nodes[j].mass * factors[j].open_mass(ti);
    prof.g[i] = v;
  }
  const ProfileScan s = scan_monotone(prof.t, prof.g);
  prof.non_decreasing = s.non_decreasing;
  prof.violated_at = s.violated_at;
  if (prof.non_decreasing) {
    double g_inf = g0 * k0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const double open_total =
          1.0 - (factors[j].atom_pos <= 0.0 ? factors[j].atom_mass : 0.0);
      g_inf -= nodes[j].mass * open_total;
    }
    prof.extracted_eta = extract_eta(prof.t, prof.g, g_inf, g0 * mu.drift);
    prof.has_extraction = true;
  }
  return prof;
}

MonotoneProfile g2_profile(const CharacteristicTriplet& t,
                           const BernsteinRepr& mu, const GridSpec& grid) {
  if (!(t.sigma2 > 0.0))
    throw Error(errc::precondition_violated, "G2 needs sigma > 0");
  if (t.nu.mass_plus() > 0.0)
    throw Error(errc::precondition_violated, "G2 needs nu_xi((0,inf)) = 0");
  if (mu.drift != 0.0)
    throw Error(errc::precondition_violated, "G2 needs mu with zero drift");
  const double g0 = gamma0(t);
  if (!(g0 > 0.0))
    throw Error(errc::precondition_violated, "G2 needs gamma0 > 0");
  if (!mu.k) throw Error(errc::k_unavailable, "G2 needs the k-function of mu");
  const KFunction& k = *mu.k;
  const double mass_x = k.k0();  // nu_X(R+) = k(0+)
  if (!std::isfinite(mass_x))
    throw Error(errc::precondition_violated, "G2 needs nu_X(R+) < inf");

  // density g of nu_X: g = -k'
  std::function<double(double)> g;
  switch (k.kind()) {
    case KFunction::Kind::atoms: {
      const std::vector<KFunction::ExpAtom> at = k.exp_atoms();
      g = [at](double x) {
        double s = 0.0;
        for (const auto& a : at) s += a.weight * a.rate * std::exp(-a.rate * x);
        return s;
      };
      break;
    }
    case KFunction::Kind::callable: {
      const KFunction kf = k;
      g = [kf](double x) {
        const double h0 = std::max(1e-6, 1e-4 * x);
        return -(kf(x + h0) - kf(std::max(x - h0, 0.0))) / (2.0 * h0);
      };
      break;
    }
    case KFunction::Kind::step:
      throw Error(errc::precondition_violated,
                  "G2 needs a density for nu_X; step k has none");
  }

  const double h = grid.h;
  const std::size_t n =
      static_cast<std::size_t>(std::ceil(grid.t_max / h)) + 1;
  std::vector<double> gv(n);
  for (std::size_t i = 0; i < n; ++i)
    gv[i] = g(static_cast<double>(i) * h);

  // edge conditions t g(t) -> 0 at both ends of the grid: the low edge only
  // needs to rule out 1/t-type blowups (its value scales with h otherwise),
  // the high edge catches slowly decaying tails
  double max_tg = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    max_tg = std::max(max_tg, static_cast<double>(i) * h * gv[i]);
  const double lo_edge = h * gv[1];
  const double hi_edge = static_cast<double>(n - 1) * h * gv[n - 1];
  if (lo_edge > 0.1 * max_tg || hi_edge > 1e-2 * max_tg)
    throw Error(errc::edge_condition_violated, "t g(t) does not vanish");

  std::vector<Atom> nodes;
  if (!t.nu.is_zero()) nodes = negative_jump_nodes(t.nu);
  std::vector<GridCDF> factors;
  for (const Atom& a : nodes)
    factors.push_back(c_factor_cdf(mu, std::exp(-a.x), grid));

  // cumulative of g, discrete self-convolution and its cumulative
  std::vector<double> cum_g(n, 0.0);
  for (std::size_t i = 1; i < n; ++i)
    cum_g[i] = cum_g[i - 1] + 0.5 * h * (gv[i - 1] + gv[i]);
  std::vector<double> conv(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    double s = 0.5 * (gv[0] * gv[i] + gv[i] * gv[0]);
    for (std::size_t j = 1; j < i; ++j) s += gv[j] * gv[i - j];
    conv[i] = s * h;
  }
  std::vector<double> cum_conv(n, 0.0);
  for (std::size_t i = 1; i < n; ++i)
    cum_conv[i] = cum_conv[i - 1] + 0.5 * h * (conv[i - 1] + conv[i]);

  MonotoneProfile prof;
  prof.t.resize(n);
  prof.g.resize(n);
  const double s2 = t.sigma2;
  for (std::size_t i = 0; i < n; ++i) {
    const double ti = static_cast<double>(i) * h;
    prof.t[i] = ti;
    double v = (g0 + s2 * mass_x) * cum_g[i] + 0.5 * s2 * ti * gv[i] -
               0.5 * s2 * cum_conv[i];
    for (std::size_t j = 0; j < nodes.size(); ++j)
      v -= nodes[j].mass * factors[j].open_mass(ti);
    prof.g[i] = v;
  }
  const ProfileScan s = scan_monotone(prof.t, prof.g);
  prof.non_decreasing = s.non_decreasing;
  prof.violated_at = s.violated_at;
  if (prof.non_decreasing) {
    // G2(inf): tg -> 0 and the convolution integrates to mass_x^2
    double g_inf = (g0 + s2 * mass_x) * mass_x - 0.5 * s2 * mass_x * mass_x;
    for (std::size_t j = 0; j < nodes.size(); ++j)
      g_inf -= nodes[j].mass *
               (1.0 - (factors[j].atom_pos <= 0.0 ? factors[j].atom_mass : 0.0));
    prof.extracted_eta = extract_eta(prof.t, prof.g, g_inf, 0.0);
    prof.has_extraction = true;
  }
  return prof;
}

CharacteristicTriplet nested_normalize(const CharacteristicTriplet& t) {
  if (!(t.sigma2 > 0.0))
    throw Error(errc::zero_gaussian_part, "normalization needs sigma^2 > 0");
  CharacteristicTriplet out;
  out.gamma = t.gamma / t.sigma2;
  out.sigma2 = 1.0;
  out.nu = t.nu.is_zero() ? LevyMeasure::zero() : t.nu.scaled(1.0 / t.sigma2);
  return out;
}

CharacteristicTriplet thin_jumps(const CharacteristicTriplet& t, double lambda,
                                 double gamma_prime) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw Error(errc::bad_input, "thinning needs lambda in (0,1]");
  if (t.nu.mass_plus() > 0.0)
    throw Error(errc::precondition_violated,
                "thinning needs nu((0,inf)) = 0");
  const double small = t.nu.abs_mean_small();  // = -int_{[-1,0)} x nu(dx)
  if (!std::isfinite(small))
    throw Error(errc::precondition_violated, "small jumps not integrable");
  const double required = (1.0 - lambda) * small;
  if (gamma_prime - t.gamma < required - 1e-12)
    throw Error(errc::drift_compensation_too_small,
                "gamma' - gamma must be >= (1-lambda) int |x| nu(dx)");
  CharacteristicTriplet out;
  out.gamma = gamma_prime;
  out.sigma2 = t.sigma2;
  out.nu = (lambda == 1.0 || t.nu.is_zero()) ? t.nu : t.nu.scaled(lambda);
  return out;
}

std::optional<double> ggc_bm_exclusion_witness(const StieltjesRepr& rho,
                                               double a, double sigma2,
                                               double t_max) {
  if (!(a > 0.0) || !(sigma2 > 0.0))
    throw Error(errc::bad_input, "needs a > 0, sigma^2 > 0");
  if (rho.atoms.empty())
    throw Error(errc::precondition_violated, "k == 0 excluded: rho is empty");
  double inv_moment = 0.0;
  for (const auto& [x, m] : rho.atoms) {
    if (!(x > 0.0) || !(m > 0.0))
      throw Error(errc::bad_input, "atoms need location > 0, mass > 0");
    inv_moment += m / x;
  }
  const double front = a + sigma2 * inv_moment + 0.5 * sigma2;

  auto gap = [&](double t) {
    double lhs = 0.0;
    for (const auto& [x, m] : rho.atoms)
      lhs += (front / t - 0.5 * sigma2 * x) * m * std::exp(-x * t);
    double rhs = 0.0;
    for (const auto& [x1, m1] : rho.atoms)
      for (const auto& [x2, m2] : rho.atoms) {
        double q;
        if (x1 == x2)
          q = t * std::exp(-x1 * t);
        else
          q = (std::exp(-x2 * t) - std::exp(-x1 * t)) / (x1 - x2);
        rhs += 0.5 * sigma2 * m1 * m2 * q / t;
      }
    return lhs - rhs;
  };

  const int n = 600;
  const double lo = 1e-3;
  for (int i = 0; i <= n; ++i) {
    const double t =
        lo * std::pow(t_max / lo, static_cast<double>(i) / n);
    if (gap(t) < -1e-300) return t;
  }
  return std::nullopt;
}

}  // namespace expfunc
