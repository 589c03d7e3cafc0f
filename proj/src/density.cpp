#include "expfunc/density.hpp"

#include <algorithm>
#include <cmath>

#include "expfunc/quadrature.hpp"

namespace expfunc {

double GridDensity::at(double x) const {
  if (f.size() < 2) return 0.0;
  const double pos = (x - t0) / h;
  if (pos < 0.0 || pos > static_cast<double>(f.size() - 1)) return 0.0;
  std::size_t j = static_cast<std::size_t>(pos);
  if (j >= f.size() - 1) j = f.size() - 2;
  const double w = pos - static_cast<double>(j);
  return f[j] * (1.0 - w) + f[j + 1] * w;
}

double GridDensity::mass() const {
  return trapezoid_mass(f.data(), f.size(), h);
}

double GridCDF::at(double x) const {
  if (F.empty()) return 0.0;
  const double pos = (x - t0) / h;
  if (pos < 0.0) return 0.0;
  if (pos >= static_cast<double>(F.size() - 1)) return F.back();
  const std::size_t j = static_cast<std::size_t>(pos);
  const double w = pos - static_cast<double>(j);
  return F[j] * (1.0 - w) + F[j + 1] * w;
}

double GridCDF::open_mass(double x) const {
  if (x <= 0.0) return 0.0;
  double v = at(x);
  if (atom_mass > 0.0 && atom_pos <= 0.0) v -= atom_mass;
  return std::max(v, 0.0);
}

namespace {

struct XiKernel {
  // jump distances d and masses of the atomic part (kernel jumps in s)
  std::vector<Atom> atoms;  // x stores d > 0, the |jump| size
  // lookup table for the continuous part, tail(rho) on [0, rho_max]
  std::vector<double> table;
  double rho_max = 0.0;
  bool has_cont = false;

  double cont_at(double rho) const {
    if (!has_cont) return 0.0;
    if (rho <= 0.0) return table.front();
    if (rho >= rho_max) return table.back();
    const double pos = rho / rho_max * static_cast<double>(table.size() - 1);
    const std::size_t j = static_cast<std::size_t>(pos);
    const double w = pos - static_cast<double>(j);
    return table[j] * (1.0 - w) + table[j + 1] * w;
  }
  double at(double rho) const {
    double v = cont_at(rho);
    for (const Atom& a : atoms)
      if (rho < a.x) v += a.mass;
    return v;
  }
};

XiKernel build_xi_kernel(const LevyMeasure& nu, bool minus_side,
                         double rho_max) {
  XiKernel k;
  for (const Atom& a : nu.atom_parts()) {
    const double d = minus_side ? -a.x : a.x;
    if (d > 0.0) k.atoms.push_back({d, a.mass});
  }
  const LevyMeasure cont = nu.continuous_part();
  if (!cont.is_zero()) {
    k.has_cont = true;
    k.rho_max = rho_max;
    const std::size_t n = 4096;
    k.table.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      const double rho = rho_max * static_cast<double>(i) / n;
      k.table[i] = minus_side ? cont.tail_minus(rho) : cont.tail_plus(rho);
    }
  }
  return k;
}

int seed_width(double mass, double g0) {
  return std::max(2, static_cast<int>(std::ceil(mass / (2.0 * g0))) + 2);
}

}  // namespace

GridDensity solve_case_i(const CharacteristicTriplet& t,
                         const SubordinatorSpec& s, const GridSpec& grid) {
  if (t.sigma2 != 0.0)
    throw Error(errc::precondition_violated, "case (i) needs sigma = 0");
  if (t.nu.mass_plus() > 0.0)
    throw Error(errc::precondition_violated,
                "case (i) needs a spectrally negative xi");
  const double g0 = gamma0(t);
  if (!(g0 > 0.0))
    throw Error(errc::precondition_violated, "case (i) needs gamma0 > 0");
  if (t.nu.is_zero() && s.nu.is_zero())
    throw Error(errc::precondition_violated,
                "both processes deterministic: the law is a Dirac mass");
  if (convergence_check(t, s) != Convergence::converges)
    throw Error(errc::precondition_violated, "functional must converge");
  if (!(grid.h > 0.0)) throw Error(errc::bad_input, "grid step <= 0");

  const double t0 = s.drift / g0;
  const double mass_kernel = t.nu.mass_minus() + s.nu.mass_plus();
  const double p = mass_kernel / g0 - 1.0;

  double h = grid.h;
  for (int attempt = 0;; ++attempt) {
    const int m = seed_width(mass_kernel, g0);
    const double t_top = std::max(grid.t_max, t0 + 20.0 * h);
    std::size_t n = static_cast<std::size_t>(std::ceil((t_top - t0) / h));
    if (m + 2 < static_cast<int>(n) / 2) {
      // march, extending the right edge until the fitted tail is negligible
      std::vector<double> f(n + 1, 0.0);
      for (int j = 1; j <= m; ++j)
        f[static_cast<std::size_t>(j)] = std::pow(j * h, p);

      std::vector<double> eta_band(n + 1);
      for (std::size_t d = 0; d <= n; ++d)
        eta_band[d] = s.nu.tail_plus(static_cast<double>(d) * h);
      const double t1 = t0 + h;
      XiKernel xi = build_xi_kernel(t.nu, /*minus_side=*/true,
                                    std::log((t0 + 64.0 * t_top) / t1));
      std::vector<Atom> eta_atoms = s.nu.atom_parts();

      const bool xi_empty = xi.atoms.empty() && !xi.has_cont;
      std::vector<double> log_t(n + 1);
      for (std::size_t j = 1; j <= n; ++j)
        log_t[j] = std::log(t0 + static_cast<double>(j) * h);
      // with the log-ratio kernel cached per node the marching is O(N^2)
      // adds; extensions stop once the grid gets expensive
      const std::size_t n_cap = xi_empty ? 400000 : 120000;
      std::size_t i = static_cast<std::size_t>(m) + 1;
      int extensions = 0;
      double tail_mass = 0.0;
      for (;;) {
        for (; i <= n; ++i) {
          const double ti = t0 + static_cast<double>(i) * h;
          double acc = 0.0;
          // first cell [t0, t1]: local power law under a frozen kernel
          const double k_i1 =
              (xi_empty ? 0.0 : xi.at(log_t[i] - log_t[1])) + eta_band[i - 1];
          acc += k_i1 * f[1] * h / (p + 1.0);
          acc += 0.5 * h * k_i1 * f[1];
          if (xi_empty) {
            for (std::size_t j = 2; j < i; ++j)
              acc += h * eta_band[i - j] * f[j];
          } else {
            const double li = log_t[i];
            for (std::size_t j = 2; j < i; ++j) {
              const double kij = xi.at(li - log_t[j]) + eta_band[i - j];
              acc += h * kij * f[j];
            }
          }
          // split the one cell where an atom flips the kernel
          auto correct = [&](double s_star, double mass) {
            const double pos = (s_star - t0) / h;
            if (pos <= 1.0 || pos >= static_cast<double>(i - 1)) return;
            const std::size_t j = static_cast<std::size_t>(pos);
            const double w = pos - static_cast<double>(j);
            const double fs = f[j] * (1.0 - w) + f[j + 1] * w;
            const double right = (static_cast<double>(j + 1)) * h -
                                 (s_star - t0);
            const double true_piece = mass * right * 0.5 * (fs + f[j + 1]);
            const double naive_piece = mass * 0.5 * h * f[j + 1];
            acc += true_piece - naive_piece;
          };
          for (const Atom& a : xi.atoms) correct(ti * std::exp(-a.x), a.mass);
          for (const Atom& a : eta_atoms) correct(ti - a.x, a.mass);

          const double denom =
              g0 * static_cast<double>(i) * h - 0.5 * h * mass_kernel;
          f[i] = acc / denom;
        }
        // fitted exponential tail
        const double fa = f[n - 1], fb = f[n];
        double rate = 0.0;
        if (fb > 0.0 && fa > fb) rate = std::log(fa / fb) / h;
        tail_mass = rate > 0.0 ? fb / rate : kInf;
        const double captured = trapezoid_mass(f.data(), f.size(), h);
        if (!grid.auto_extend || tail_mass <= grid.tail_mass_tol * captured ||
            extensions >= grid.max_extensions || 2 * n > n_cap)
          break;
        ++extensions;
        const std::size_t n_new = 2 * n;
        f.resize(n_new + 1, 0.0);
        eta_band.resize(n_new + 1);
        log_t.resize(n_new + 1);
        for (std::size_t d = n + 1; d <= n_new; ++d) {
          eta_band[d] = s.nu.tail_plus(static_cast<double>(d) * h);
          log_t[d] = std::log(t0 + static_cast<double>(d) * h);
        }
        i = n + 1;
        n = n_new;
      }

      f[0] = p > 0.0 ? 0.0 : f[1];
      const double captured = trapezoid_mass(f.data(), f.size(), h);
      for (double& v : f) v /= captured;

      GridDensity out;
      out.t0 = t0;
      out.h = h;
      out.f = std::move(f);
      out.normalized = true;
      out.support = support_of_functional(t, s);
      out.tail_mass = std::isfinite(tail_mass) ? tail_mass / captured : kInf;
      return out;
    }
    if (attempt >= 4)
      throw Error(errc::singular_at_left_edge,
                  "kernel mass needs a seed region wider than the grid");
    h *= 0.5;
  }
}

GridDensity solve_case_ii(const CharacteristicTriplet& t,
                          const SubordinatorSpec& s, const GridSpec& grid) {
  if (t.sigma2 != 0.0)
    throw Error(errc::precondition_violated, "case (ii) needs sigma = 0");
  if (t.nu.mass_minus() > 0.0 || !(t.nu.mass_plus() > 0.0))
    throw Error(errc::precondition_violated,
                "case (ii) needs a spectrally positive, non-trivial xi");
  if (!s.nu.is_zero())
    throw Error(errc::precondition_violated, "case (ii) needs nu_eta = 0");
  const double g0 = gamma0(t);
  if (!(g0 > 0.0) || !(s.drift > 0.0))
    throw Error(errc::precondition_violated,
                "case (ii) needs gamma0 > 0 and a_eta > 0");
  if (convergence_check(t, s) != Convergence::converges)
    throw Error(errc::precondition_violated, "functional must converge");

  const double edge = s.drift / g0;  // right end of the support
  const double mass_kernel = t.nu.mass_plus();
  const double p = mass_kernel / g0 - 1.0;

  double h = grid.h;
  for (int attempt = 0;; ++attempt) {
    const int m = seed_width(mass_kernel, g0);
    std::size_t n = static_cast<std::size_t>(std::ceil(edge / h));
    h = edge / static_cast<double>(n);  // land exactly on zero
    if (m + 2 < static_cast<int>(n) / 2) {
      // node j sits at s_j = edge - j h, marching j upward (t downward)
      std::vector<double> f(n + 1, 0.0);
      for (int j = 1; j <= m; ++j)
        f[static_cast<std::size_t>(j)] = std::pow(j * h, p);

      XiKernel xi = build_xi_kernel(t.nu, /*minus_side=*/false,
                                    std::log(edge / (0.5 * h)) + 40.0);
      std::vector<double> log_s(n + 1, 0.0);
      for (std::size_t j = 0; j < n; ++j)
        log_s[j] = std::log(edge - static_cast<double>(j) * h);

      for (std::size_t i = static_cast<std::size_t>(m) + 1; i <= n; ++i) {
        const double ti = edge - static_cast<double>(i) * h;
        const bool at_zero = ti <= 0.0;
        const double log_ti = at_zero ? 0.0 : std::log(ti);
        double acc = 0.0;
        auto kern = [&](std::size_t j) {
          return at_zero ? 0.0 : xi.at(log_s[j] - log_ti);
        };
        // first cell at the right edge [edge - h, edge]
        const double k_i1 = kern(1);
        acc += k_i1 * f[1] * h / (p + 1.0);
        acc += 0.5 * h * k_i1 * f[1];
        for (std::size_t j = 2; j < i; ++j) acc += h * kern(j) * f[j];
        // kernel steps from positive xi atoms: s* = t_i e^{d}
        for (const Atom& a : xi.atoms) {
          if (ti <= 0.0) break;
          const double s_star = ti * std::exp(a.x);
          const double pos = (edge - s_star) / h;  // node index coordinate
          if (pos <= 1.0 || pos >= static_cast<double>(i - 1)) continue;
          const std::size_t j = static_cast<std::size_t>(pos);
          const double w = pos - static_cast<double>(j);
          const double fs = f[j] * (1.0 - w) + f[j + 1] * w;
          // the atom counts for s < s*, i.e. node j+1 and below in s
          const double covered = s_star - (edge - static_cast<double>(j + 1) * h);
          const double true_piece = a.mass * covered * 0.5 * (fs + f[j + 1]);
          const double naive_piece = a.mass * 0.5 * h * f[j + 1];
          acc += true_piece - naive_piece;
        }
        const double denom =
            g0 * static_cast<double>(i) * h - 0.5 * h * mass_kernel;
        f[i] = acc / denom;
      }

      f[0] = p > 0.0 ? 0.0 : f[1];
      std::reverse(f.begin(), f.end());  // store on [0, edge] ascending
      const double captured = trapezoid_mass(f.data(), f.size(), h);
      for (double& v : f) v /= captured;

      GridDensity out;
      out.t0 = 0.0;
      out.h = h;
      out.f = std::move(f);
      out.normalized = true;
      out.support = support_of_functional(t, s);
      out.tail_mass = 0.0;
      return out;
    }
    if (attempt >= 4)
      throw Error(errc::singular_at_left_edge,
                  "kernel mass needs a seed region wider than the grid");
    h *= 0.5;
  }
}

GridDensity solve_cogarch(const COGARCHSpec& c, const GridSpec& grid) {
  if (c.nu_s.is_zero())
    throw Error(errc::precondition_violated,
                "deterministic S: the stationary law is a Dirac mass");
  auto [xi, eta] = cogarch_to_gou(c);
  return solve_case_i(xi, eta, grid);
}

GridCDF cogarch_poisson_cdf(double beta, double eta, double intensity,
                            double phi, const GridSpec& grid) {
  if (!(beta > 0.0) || !(eta > 0.0) || !(intensity > 0.0) || !(phi > 0.0))
    throw Error(errc::bad_input, "parameters must be positive");
  if (!(intensity * std::log1p(phi) < eta))
    throw Error(errc::not_stationary, "c log(1+phi) >= eta");
  const double t0 = beta / eta;
  const double p = intensity / eta;
  const double h = grid.h;
  if (!(h < t0 * phi / (1.0 + phi)))
    throw Error(errc::bad_input, "step too large for the delayed term");

  std::size_t n =
      static_cast<std::size_t>(std::ceil((std::max(grid.t_max, t0 * 2.0) - t0) / h));
  std::vector<double> F(n + 1, 0.0);

  auto interp = [&](double x) -> double {
    const double pos = (x - t0) / h;
    if (pos <= 0.0) return 0.0;
    std::size_t j = static_cast<std::size_t>(pos);
    if (j + 1 >= F.size()) j = F.size() - 2;
    const double w = pos - static_cast<double>(j);
    return F[j] * (1.0 - w) + F[j + 1] * w;
  };
  auto rhs = [&](double x, double val) -> double {
    const double delayed = interp(x / (1.0 + phi));
    return intensity * (val - delayed) / (eta * x - beta);
  };

  // exact local solution while the delayed argument is left of the support
  const std::size_t i1 = std::min(
      n, static_cast<std::size_t>(std::floor(phi * t0 / h)));
  for (std::size_t i = 0; i <= i1; ++i)
    F[i] = std::pow(static_cast<double>(i) * h, p);

  std::size_t i = i1;
  int extensions = 0;
  double tail_est = 0.0;
  for (;;) {
    for (; i < n; ++i) {
      const double x = t0 + static_cast<double>(i) * h;
      const double y = F[i];
      const double k1 = rhs(x, y);
      const double k2 = rhs(x + 0.5 * h, y + 0.5 * h * k1);
      const double k3 = rhs(x + 0.5 * h, y + 0.5 * h * k2);
      const double k4 = rhs(x + h, y + h * k3);
      F[i + 1] = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    // exponential extrapolation of the right edge from the slope decay
    const double d1 = rhs(t0 + (static_cast<double>(n) - 1.0) * h, F[n - 1]);
    const double d0 = rhs(t0 + static_cast<double>(n) * h, F[n]);
    double rate = 0.0;
    if (d0 > 0.0 && d1 > d0) rate = std::log(d1 / d0) / h;
    tail_est = rate > 0.0 ? d0 / rate : kInf;
    if (!grid.auto_extend || tail_est <= grid.tail_mass_tol * F[n] ||
        extensions >= grid.max_extensions)
      break;
    ++extensions;
    F.resize(2 * n + 1, 0.0);
    i = n;
    n = 2 * n;
  }

  const double f_inf = F[n] + (std::isfinite(tail_est) ? tail_est : 0.0);
  for (double& v : F) v = std::min(v / f_inf, 1.0);

  GridCDF out;
  out.t0 = t0;
  out.h = h;
  out.F = std::move(F);
  return out;
}

namespace {

std::vector<double> derivative_on_grid(const GridDensity& f) {
  const std::size_t n = f.f.size();
  std::vector<double> d(n, 0.0);
  if (f.analytic_derivative) {
    for (std::size_t i = 0; i < n; ++i) d[i] = f.analytic_derivative(f.t(i));
    return d;
  }
  const double h = f.h;
  for (std::size_t i = 1; i + 1 < n; ++i)
    d[i] = (f.f[i + 1] - f.f[i - 1]) / (2.0 * h);
  if (n >= 3) {
    d[0] = (-3.0 * f.f[0] + 4.0 * f.f[1] - f.f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f.f[n - 1] - 4.0 * f.f[n - 2] + f.f[n - 3]) / (2.0 * h);
  }
  return d;
}

}  // namespace

ResidualReport residual_case_iii(const CharacteristicTriplet& t,
                                 const SubordinatorSpec& s,
                                 const GridDensity& f) {
  const std::size_t n = f.f.size();
  if (n < 8) throw Error(errc::bad_input, "density grid too small");
  const double h = f.h;
  const double g0 = gamma0(t);
  const double s2 = t.sigma2;

  if (s2 > 0.0) {
    // lim_{t->0} t^2 f(t) = 0, checked at the first positive node
    double max_t2f = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      max_t2f = std::max(max_t2f, f.t(i) * f.t(i) * f.f[i]);
    std::size_t first = (f.t0 > 0.0) ? 0 : 1;
    const double e = f.t(first) * f.t(first) * f.f[first];
    if (e > 1e-4 * max_t2f + 1e-12)
      throw Error(errc::edge_condition_violated, "t^2 f(t) does not vanish");
  }

  const std::vector<double> fp = derivative_on_grid(f);
  const bool xi_plus = t.nu.mass_plus() > 0.0;
  const bool xi_minus = t.nu.mass_minus() > 0.0;
  const bool eta_jumps = !s.nu.is_zero();

  std::vector<double> eta_band;
  if (eta_jumps) {
    eta_band.resize(n);
    for (std::size_t d = 0; d < n; ++d)
      eta_band[d] = s.nu.tail_plus(static_cast<double>(d) * h);
  }

  ResidualReport rep;
  rep.equation = "Thm 2.1(iii)";
  rep.t.resize(n);
  rep.residual.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ti = f.t(i);
    rep.t[i] = ti;
    double r = s.drift * f.f[i] - (g0 + 0.5 * s2) * ti * f.f[i] -
               0.5 * s2 * ti * ti * fp[i];
    if (xi_plus && ti > 0.0) {
      double acc = 0.0;
      for (std::size_t j = i; j < n; ++j) {
        const double w = (j == i || j == n - 1) ? 0.5 : 1.0;
        acc += w * t.nu.tail_plus(std::log(f.t(j) / ti)) * f.f[j];
      }
      r -= acc * h;
    }
    if ((xi_minus || eta_jumps) && i > 0) {
      double acc = 0.0;
      for (std::size_t j = 0; j <= i; ++j) {
        const double w = (j == 0 || j == i) ? 0.5 : 1.0;
        double k = 0.0;
        if (xi_minus && f.t(j) > 0.0 && ti > 0.0)
          k += t.nu.tail_minus(std::log(ti / f.t(j)));
        if (eta_jumps) k += eta_band[i - j];
        acc += w * k * f.f[j];
      }
      r += acc * h;
    }
    rep.residual[i] = r;
    rep.max_abs = std::max(rep.max_abs, std::abs(r));
  }
  return rep;
}

ResidualReport sd_density_residual(
    const GridDensity& f, double a,
    const std::function<double(double)>& nu_tail) {
  const std::size_t n = f.f.size();
  const double h = f.h;
  std::vector<double> band(n);
  for (std::size_t d = 0; d < n; ++d)
    band[d] = nu_tail(static_cast<double>(d) * h);

  ResidualReport rep;
  rep.equation = "Cor 3.4";
  rep.t.resize(n);
  rep.residual.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ti = f.t(i);
    rep.t[i] = ti;
    double acc = 0.0;
    if (i > 0) {
      for (std::size_t j = 0; j <= i; ++j) {
        const double w = (j == 0 || j == i) ? 0.5 : 1.0;
        acc += w * band[i - j] * f.f[j];
      }
      acc *= h;
    }
    const double r = (a - ti) * f.f[i] + acc;
    rep.residual[i] = r;
    rep.max_abs = std::max(rep.max_abs, std::abs(r));
  }
  return rep;
}

ResidualReport ggc_density_residual(const GridDensity& f, double a,
                                    const std::function<double(double)>& m,
                                    const std::function<double(double)>& m_tail,
                                    const CMOptions& cm_opt) {
  CMVerdict cm = is_completely_monotone(m, cm_opt);
  if (!cm.passed)
    throw Error(errc::not_cm, "Levy density m is not completely monotone");
  std::function<double(double)> tail = m_tail;
  if (!tail) {
    const std::size_t n = f.f.size();
    auto table = std::make_shared<std::vector<double>>(n);
    const double h = f.h;
    (*table)[n - 1] =
        integrate_to_inf(m, static_cast<double>(n - 1) * h).value;
    for (std::size_t d = n - 1; d > 0; --d) {
      const double lo = static_cast<double>(d - 1) * h;
      (*table)[d - 1] =
          (*table)[d] + 0.5 * h * (m(lo) + m(lo + h));
    }
    tail = [table, h, n](double x) {
      const double pos = x / h;
      if (pos >= static_cast<double>(n - 1)) return (*table)[n - 1];
      const std::size_t j = static_cast<std::size_t>(pos);
      const double w = pos - static_cast<double>(j);
      return (*table)[j] * (1.0 - w) + (*table)[j + 1] * w;
    };
  }
  ResidualReport rep = sd_density_residual(f, a, tail);
  rep.equation = "Cor 3.6";
  return rep;
}

SelfsimResult poisson_selfsim_iterate(double c, double q, double t_max,
                                      double h, int max_iters) {
  if (!(c > 1.0) || !(q > 0.0 && q < 1.0) || !(t_max > 1.0) || !(h > 0.0))
    throw Error(errc::bad_input, "need c > 1, q in (0,1), t_max > 1, h > 0");
  const std::size_t n = static_cast<std::size_t>(std::round(t_max / h));
  const double mean = q * c / ((c - 1.0) * (1.0 - q));

  std::vector<double> cur(n + 1), next(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    cur[i] = (static_cast<double>(i) * h >= mean) ? 1.0 : 0.0;

  auto interp = [&](const std::vector<double>& F, double x) -> double {
    if (x <= 0.0) return 0.0;
    const double pos = x / h;
    if (pos >= static_cast<double>(n)) return 1.0;  // F == 1 beyond T
    const std::size_t j = static_cast<std::size_t>(pos);
    const double w = pos - static_cast<double>(j);
    return F[j] * (1.0 - w) + F[j + 1] * w;
  };

  SelfsimResult out;
  double sup = kInf;
  int it = 0;
  for (; it < max_iters; ++it) {
    sup = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      const double ti = static_cast<double>(i) * h;
      const double v =
          (1.0 - q) * interp(cur, c * ti) + q * interp(cur, ti - 1.0);
      next[i] = v;
      sup = std::max(sup, std::abs(v - cur[i]));
    }
    cur.swap(next);
    if (sup < 1e-6) {
      ++it;
      break;
    }
  }
  out.cdf.t0 = 0.0;
  out.cdf.h = h;
  out.cdf.F = std::move(cur);
  out.sup_change = sup;
  out.iterations = it;
  out.converged = sup < 1e-6;
  return out;
}

LaplaceExponent laplace_exponent_from_density(const GridDensity& f) {
  if (!f.normalized)
    throw Error(errc::bad_input, "density must be normalized first");
  auto grid = std::make_shared<GridDensity>(f);
  auto moments = [grid](double u, double& l, double& d1, double& d2) {
    const std::size_t n = grid->f.size();
    l = d1 = d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
      const double ti = grid->t(i);
      const double e = w * std::exp(-u * ti) * grid->f[i];
      l += e;
      d1 += ti * e;
      d2 += ti * ti * e;
    }
    l *= grid->h;
    d1 *= grid->h;
    d2 *= grid->h;
  };
  auto value = [moments](double u) {
    if (u <= 0.0) return 0.0;
    double l, d1, d2;
    moments(u, l, d1, d2);
    return -std::log(l);
  };
  auto deriv = [moments](double u) {
    double l, d1, d2;
    moments(u, l, d1, d2);
    return d1 / l;
  };
  auto deriv2 = [moments](double u) {
    double l, d1, d2;
    moments(u, l, d1, d2);
    return (d1 / l) * (d1 / l) - d2 / l;
  };
  return LaplaceExponent(value, deriv, deriv2);
}

}  // namespace expfunc
