#include "expfunc/bernstein.hpp"

#include <algorithm>
#include <cmath>

#include "expfunc/quadrature.hpp"

namespace expfunc {

namespace {

double expint_e1(double x) {
  // E1(x) = -Ei(-x), x > 0
  return -std::expint(-x);
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
  std::vector<double> x(static_cast<std::size_t>(n));
  const double r = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = lo * std::exp(r * i);
  x.back() = hi;
  return x;
}

// Divided-difference sign test. Row n carries dd's of order n; sign_of_row
// gives the required sign, reported_order translates a violated row into the
// order the verdict should carry. The magnitude row propagates the same
// recurrence on |values| and serves as the noise scale.
struct RowCheck {
  int row_first;
  int row_last;
  int (*reported_order)(int row);
  double (*sign_of_row)(int row);
};

CMVerdict dd_engine(const std::vector<double>& x, std::vector<double> row,
                    const CMOptions& opt, const RowCheck& rc,
                    std::string source) {
  const std::size_t n = x.size();
  for (double v : row)
    if (!std::isfinite(v))
      throw Error(errc::evaluation_failed, "non-finite value on the CM grid");

  std::vector<double> mag(n);
  for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(row[i]);

  // A global floor of rel_tol^2 times the row scale absorbs values whose
  // evaluation cancelled all the way down (e.g. exponentially small tails);
  // genuine sign violations sit many orders of magnitude above it.
  auto row_floor = [&](const std::vector<double>& m, std::size_t len) {
    double top = 0.0;
    for (std::size_t i = 0; i < len; ++i) top = std::max(top, m[i]);
    return opt.rel_tol * opt.rel_tol * top + 1e-300;
  };

  if (rc.row_first == 0) {
    const double floor0 = row_floor(mag, n);
    for (std::size_t i = 0; i < n; ++i) {
      double scale = mag[i];
      if (i > 0) scale = std::max(scale, mag[i - 1]);
      if (i + 1 < n) scale = std::max(scale, mag[i + 1]);
      const double tol = opt.rel_tol * scale + floor0;
      if (rc.sign_of_row(0) * row[i] < -tol) {
        return CMVerdict::fail(rc.reported_order(0), x[i],
                               -rc.sign_of_row(0) * row[i] / (scale + floor0),
                               std::move(source));
      }
    }
  }

  std::vector<double> next(n), nmag(n);
  const int top_row = rc.row_last;
  for (int k = 1; k <= top_row; ++k) {
    const std::size_t len = n - static_cast<std::size_t>(k);
    for (std::size_t i = 0; i < len; ++i) {
      const double dx = x[i + static_cast<std::size_t>(k)] - x[i];
      next[i] = (row[i + 1] - row[i]) / dx;
      nmag[i] = (mag[i + 1] + mag[i]) / dx;
    }
    row.swap(next);
    mag.swap(nmag);
    if (k < rc.row_first) continue;
    const double sign = rc.sign_of_row(k);
    const double floor_k = row_floor(mag, len);
    for (std::size_t i = 0; i < len; ++i) {
      const double tol = opt.rel_tol * mag[i] + floor_k;
      if (sign * row[i] < -tol) {
        return CMVerdict::fail(rc.reported_order(k), x[i],
                               -sign * row[i] / (mag[i] + floor_k),
                               std::move(source));
      }
    }
  }
  return CMVerdict::pass(opt.max_order, std::move(source));
}

double cm_sign(int rowk) { return (rowk % 2 == 0) ? 1.0 : -1.0; }
int cm_order(int rowk) { return rowk; }
double bf_sign(int rowk) { return (rowk % 2 == 1) ? 1.0 : -1.0; }
int bf_order(int rowk) { return rowk - 1; }

}  // namespace

CMVerdict CMVerdict::pass(int order, std::string source) {
  CMVerdict v;
  v.passed = true;
  v.order = order;
  v.source = std::move(source);
  return v;
}

CMVerdict CMVerdict::fail(int order, double witness, double margin,
                          std::string source) {
  CMVerdict v;
  v.passed = false;
  v.order = order;
  v.witness = witness;
  v.margin = margin;
  v.source = std::move(source);
  return v;
}

double LaplaceExponent::d1(double u) const {
  if (d1_) return d1_(u);
  if (u <= 0.0) {
    const double h = 1e-9;
    return (value_(h) - value_(0.0)) / h;
  }
  const double h = 1e-4 * u;
  return (value_(u + h) - value_(u - h)) / (2.0 * h);
}

double LaplaceExponent::d2(double u) const {
  if (d2_) return d2_(u);
  if (u <= 0.0) {
    const double h = 1e-6;
    return (value_(2 * h) - 2.0 * value_(h) + value_(0.0)) / (h * h);
  }
  const double h = 1e-4 * u;
  if (d1_) return (d1_(u + h) - d1_(u - h)) / (2.0 * h);
  return (value_(u + h) - 2.0 * value_(u) + value_(u - h)) / (h * h);
}

// ---------------------------------------------------------------------------
// KFunction
// ---------------------------------------------------------------------------

KFunction KFunction::atoms(std::vector<ExpAtom> a) {
  for (const auto& at : a)
    if (!(at.weight >= 0.0) || !(at.rate > 0.0))
      throw Error(errc::bad_input, "k-atoms need weight >= 0, rate > 0");
  KFunction k(Kind::atoms);
  k.atoms_ = std::move(a);
  return k;
}

KFunction KFunction::step(double height, double cut) {
  if (!(height > 0.0) || !(cut > 0.0))
    throw Error(errc::bad_input, "step k needs height > 0, cut > 0");
  KFunction k(Kind::step);
  k.a_ = height;
  k.b_ = cut;
  return k;
}

KFunction KFunction::callable(std::function<double(double)> fn, double grid_lo,
                              double grid_hi, int grid_points) {
  if (!(grid_lo > 0.0) || !(grid_hi > grid_lo) || grid_points < 8)
    throw Error(errc::bad_input, "bad callable-k grid");
  KFunction k(Kind::callable);
  k.fn_ = std::move(fn);
  k.a_ = grid_lo;
  k.b_ = grid_hi;
  k.n_ = grid_points;
  return k;
}

double KFunction::operator()(double t) const {
  switch (kind_) {
    case Kind::atoms: {
      double s = 0.0;
      for (const auto& a : atoms_) s += a.weight * std::exp(-a.rate * t);
      return s;
    }
    case Kind::step:
      return t <= b_ ? a_ : 0.0;
    case Kind::callable:
      return fn_(t);
  }
  return 0.0;
}

double KFunction::k0() const {
  switch (kind_) {
    case Kind::atoms: {
      double s = 0.0;
      for (const auto& a : atoms_) s += a.weight;
      return s;
    }
    case Kind::step:
      return a_;
    case Kind::callable:
      return fn_(a_);
  }
  return 0.0;
}

double KFunction::kprime0() const {
  switch (kind_) {
    case Kind::atoms: {
      double s = 0.0;
      for (const auto& a : atoms_) s -= a.weight * a.rate;
      return s;
    }
    case Kind::step:
      return 0.0;
    case Kind::callable: {
      const double h = a_;
      return (fn_(2.0 * h) - fn_(h)) / h;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// BernsteinRepr
// ---------------------------------------------------------------------------

BernsteinRepr BernsteinRepr::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw Error(errc::bad_input, "Gamma needs shape > 0, rate > 0");
  BernsteinRepr r;
  r.drift = 0.0;
  r.k = KFunction::atoms({{shape, rate}});
  r.density = [shape, rate](double t) {
    return t > 0.0 ? shape * std::exp(-rate * t) / t : 0.0;
  };
  return r;
}

BernsteinRepr BernsteinRepr::step_k(double height, double cut, double drift) {
  BernsteinRepr r;
  r.drift = drift;
  r.k = KFunction::step(height, cut);
  r.density = [height, cut](double t) {
    return (t > 0.0 && t <= cut) ? height / t : 0.0;
  };
  return r;
}

BernsteinRepr BernsteinRepr::from_subordinator(const SubordinatorSpec& s) {
  BernsteinRepr r;
  r.drift = s.drift;
  r.nu = s.nu;
  if (s.nu.has_density()) {
    LevyMeasure nu = s.nu;
    r.density = [nu](double t) { return nu.density_pos(t); };
    r.k = KFunction::callable(
        [nu](double t) { return t * nu.density_pos(t); }, 1e-6, 1e3, 400);
  }
  return r;
}

LaplaceExponent BernsteinRepr::laplace_exponent() const {
  if (k && k->kind() == KFunction::Kind::atoms) {
    const double a = drift;
    const std::vector<KFunction::ExpAtom> at = k->exp_atoms();
    return LaplaceExponent(
        [a, at](double u) {
          double s = a * u;
          for (const auto& w : at) s += w.weight * std::log1p(u / w.rate);
          return s;
        },
        [a, at](double u) {
          double s = a;
          for (const auto& w : at) s += w.weight / (w.rate + u);
          return s;
        },
        [at](double u) {
          double s = 0.0;
          for (const auto& w : at)
            s -= w.weight / ((w.rate + u) * (w.rate + u));
          return s;
        });
  }
  if (k && k->kind() == KFunction::Kind::step) {
    const double a = drift, h = k->step_height(), c = k->step_cut();
    return LaplaceExponent(
        [a, h, c](double u) {
          if (u <= 0.0) return 0.0;
          const double z = u * c;
          const double euler = 0.57721566490153286060651209;
          return a * u + h * (euler + std::log(z) + expint_e1(z));
        },
        [a, h, c](double u) {
          if (u <= 0.0) return a + h * c;
          return a + h * (-std::expm1(-u * c)) / u;
        },
        [h, c](double u) {
          if (u <= 0.0) return -0.5 * h * c * c;
          const double z = u * c;
          return -h * (1.0 - std::exp(-z) * (1.0 + z)) / (u * u);
        });
  }
  if (nu) return psi_from_subordinator(SubordinatorSpec{drift, *nu});
  if (k) {
    const KFunction kf = *k;
    const double a = drift;
    return LaplaceExponent([a, kf](double u) {
      if (u <= 0.0) return 0.0;
      auto f = [&](double t) {
        return -std::expm1(-u * t) * kf(t) / t;
      };
      return a * u + integrate_to_inf(f, 1e-12).value;
    });
  }
  const double a = drift;
  return LaplaceExponent([a](double u) { return a * u; },
                         [a](double) { return a; }, [](double) { return 0.0; });
}

// ---------------------------------------------------------------------------
// CM engine and class tests
// ---------------------------------------------------------------------------

CMVerdict is_completely_monotone(const std::function<double(double)>& g,
                                 const CMOptions& opt) {
  if (opt.max_order < 1) throw Error(errc::bad_input, "max_order < 1");
  const std::vector<double> x =
      geometric_grid(opt.grid_lo, opt.grid_hi, opt.grid_points);
  std::vector<double> row(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) row[i] = g(x[i]);
  RowCheck rc{0, opt.max_order, cm_order, cm_sign};
  return dd_engine(x, std::move(row), opt, rc, "divided-difference");
}

double cm_exp_ratio_derivative(int n, double lambda, double x) {
  if (n < 0 || !(lambda > 0.0) || !(x > 0.0))
    throw Error(errc::bad_input, "need n >= 0, lambda > 0, x > 0");
  const double z = lambda * x;
  // R = P(Poisson(z) > n), evaluated without cancellation on either side
  double r;
  if (z <= 30.0) {
    double term = 1.0;
    for (int k = 1; k <= n + 1; ++k) term *= z / k;
    double sum = 0.0;
    double t = term;
    for (int k = n + 1; k < n + 400; ++k) {
      sum += t;
      t *= z / (k + 1);
      if (t < 1e-18 * sum) break;
    }
    r = std::exp(-z) * sum;
  } else {
    double p = std::exp(-z);
    double cdf = p;
    for (int k = 1; k <= n; ++k) {
      p *= z / k;
      cdf += p;
    }
    r = 1.0 - cdf;
  }
  double nfact = 1.0;
  for (int k = 2; k <= n; ++k) nfact *= k;
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return sign * nfact * std::pow(x, -(n + 1)) * r;
}

CMVerdict is_bernstein(const LaplaceExponent& psi, const CMOptions& opt) {
  const double at0 = psi(0.0);
  const double anchor_scale = std::max(1.0, std::abs(psi(1.0)));
  if (!(std::abs(at0) <= 1e-8 * anchor_scale))
    throw Error(errc::not_anchored_at_zero, "psi(0) != 0");

  const std::vector<double> x =
      geometric_grid(opt.grid_lo, opt.grid_hi, opt.grid_points);
  std::vector<double> row(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) row[i] = psi(x[i]);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(row[i]))
      throw Error(errc::evaluation_failed, "non-finite psi on the grid");
    if (row[i] < -opt.rel_tol * (std::abs(row[i]) + 1.0))
      return CMVerdict::fail(0, x[i], -row[i], "positivity");
  }

  if (psi.has_analytic_d1()) {
    std::vector<double> dp(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) dp[i] = psi.d1(x[i]);
    RowCheck rc{0, opt.max_order, cm_order, cm_sign};
    return dd_engine(x, std::move(dp), opt, rc, "analytic-derivative");
  }
  RowCheck rc{1, opt.max_order + 1, bf_order, bf_sign};
  return dd_engine(x, std::move(row), opt, rc, "divided-difference");
}

CMVerdict is_complete_bernstein(const BernsteinRepr& repr,
                                const CMOptions& opt) {
  if (!repr.density)
    throw Error(errc::density_unavailable,
                "CBF test needs a Levy density representation");
  return is_completely_monotone(*repr.density, opt);
}

LaplaceExponent c_factor(const LaplaceExponent& psi, double c) {
  if (!(c > 0.0) || c == 1.0)
    throw Error(errc::invalid_factor, "factor needs c > 0, c != 1");
  const bool lower = c < 1.0;
  auto value = [psi, c, lower](double u) {
    return lower ? psi(u) - psi(c * u) : psi(c * u) - psi(u);
  };
  std::function<double(double)> d1;
  std::function<double(double)> d2;
  if (psi.has_analytic_d1()) {
    d1 = [psi, c, lower](double u) {
      return lower ? psi.d1(u) - c * psi.d1(c * u)
                   : c * psi.d1(c * u) - psi.d1(u);
    };
  }
  if (psi.has_analytic_d2()) {
    d2 = [psi, c, lower](double u) {
      return lower ? psi.d2(u) - c * c * psi.d2(c * u)
                   : c * c * psi.d2(c * u) - psi.d2(u);
    };
  }
  return LaplaceExponent(value, d1, d2);
}

CMVerdict is_selfdecomposable(const LaplaceExponent& psi,
                              const CMOptions& opt) {
  std::function<double(double)> d1;
  if (psi.has_analytic_d1() && psi.has_analytic_d2()) {
    d1 = [psi](double u) { return psi.d1(u) + u * psi.d2(u); };
  }
  LaplaceExponent u_psi_prime(
      [psi](double u) { return u <= 0.0 ? 0.0 : u * psi.d1(u); },
      std::move(d1));
  return is_bernstein(u_psi_prime, opt);
}

CMVerdict is_ggc(const BernsteinRepr& repr, const CMOptions& opt) {
  if (!repr.k)
    throw Error(errc::k_unavailable, "GGC test needs the k-function");
  const KFunction k = *repr.k;
  return is_completely_monotone([k](double t) { return k(t); }, opt);
}

SubordinatorSpec sd_to_driving(const BernsteinRepr& repr) {
  if (!repr.k)
    throw Error(errc::k_unavailable, "driving process needs the k-function");
  const KFunction& k = *repr.k;
  SubordinatorSpec x;
  x.drift = repr.drift;
  switch (k.kind()) {
    case KFunction::Kind::atoms: {
      std::vector<LevyMeasure> parts;
      for (const auto& a : k.exp_atoms())
        if (a.weight > 0.0)
          parts.push_back(LevyMeasure::exponential_tail(a.weight, a.rate));
      x.nu = LevyMeasure::superpose(std::move(parts));
      return x;
    }
    case KFunction::Kind::step:
      // the tail steps from height to 0 at the cut: one atom there
      x.nu = LevyMeasure::compound_poisson(k.step_height(),
                                           JumpLaw::dirac(k.step_cut()));
      return x;
    case KFunction::Kind::callable: {
      const int n = k.grid_points();
      std::vector<double> xs(static_cast<std::size_t>(n)),
          tails(static_cast<std::size_t>(n));
      const double r = std::log(k.grid_hi() / k.grid_lo()) / (n - 1);
      double prev = kInf;
      for (int i = 0; i < n; ++i) {
        xs[static_cast<std::size_t>(i)] = k.grid_lo() * std::exp(r * i);
        const double v = k(xs[static_cast<std::size_t>(i)]);
        if (v > prev * (1.0 + 1e-9) + 1e-12)
          throw Error(errc::not_selfdecomposable_repr,
                      "k increases on the sampling grid");
        tails[static_cast<std::size_t>(i)] = std::min(v, prev);
        prev = tails[static_cast<std::size_t>(i)];
      }
      x.nu = LevyMeasure::tabulated(std::move(xs), std::move(tails));
      return x;
    }
  }
  throw Error(errc::k_unavailable, "unreachable");
}

LaplaceExponent exp_map_unit_drift(const SubordinatorSpec& x) {
  if (!(x.nu.log_moment_plus() < kInf))
    throw Error(errc::log_moment_infinite,
                "int log(1+t) nu_X(dt) diverges");
  const LaplaceExponent psi_x = psi_from_subordinator(x);
  const double slope0 = x.drift + x.nu.mean_plus();
  auto integrand = [psi_x, slope0](double v) {
    return v <= 0.0 ? slope0 : psi_x(v) / v;
  };
  auto value = [integrand](double u) {
    if (u <= 0.0) return 0.0;
    return integrate(integrand, 0.0, u, 1e-13, 1e-12).value;
  };
  auto d1 = [psi_x, slope0](double u) {
    return u <= 0.0 ? slope0 : psi_x(u) / u;
  };
  std::function<double(double)> d2;
  if (psi_x.has_analytic_d1()) {
    d2 = [psi_x](double u) {
      if (u <= 0.0) return 0.0;  // not needed at the origin
      return (psi_x.d1(u) * u - psi_x(u)) / (u * u);
    };
  }
  return LaplaceExponent(value, d1, d2);
}

BernsteinRepr bo_to_ggc(const StieltjesRepr& rho) {
  std::vector<KFunction::ExpAtom> atoms;
  for (const auto& [x, m] : rho.atoms) {
    if (!(x > 0.0) || !(m >= 0.0))
      throw Error(errc::bad_input, "Stieltjes atoms need x > 0, mass >= 0");
    if (m > 0.0) atoms.push_back({m, x});
  }
  BernsteinRepr r;
  r.drift = rho.drift;
  r.k = KFunction::atoms(std::move(atoms));
  const std::vector<KFunction::ExpAtom> at = r.k->exp_atoms();
  r.density = [at](double t) {
    if (t <= 0.0) return 0.0;
    double s = 0.0;
    for (const auto& a : at) s += a.weight * std::exp(-a.rate * t);
    return s / t;
  };
  return r;
}

StieltjesRepr ggc_to_bo(const BernsteinRepr& repr) {
  if (!repr.k)
    throw Error(errc::k_unavailable, "needs the k-function");
  if (repr.k->kind() != KFunction::Kind::atoms)
    throw Error(errc::representation_not_recoverable,
                "representing measure only recoverable from atomic k");
  StieltjesRepr rho;
  rho.drift = repr.drift;
  for (const auto& a : repr.k->exp_atoms())
    rho.atoms.emplace_back(a.rate, a.weight);
  return rho;
}

LaplaceExponent semi_sd_synthesize(const LaplaceExponent& f, double c,
                                   double tol) {
  if (!(c > 0.0 && c < 1.0))
    throw Error(errc::invalid_factor, "semi-sd factor needs c in (0,1)");
  if (!(tol > 0.0)) throw Error(errc::bad_input, "tol <= 0");
  const double eps = 1e-8;
  const double slope = f(eps) / eps;
  if (!std::isfinite(slope) || slope < 0.0)
    throw Error(errc::tail_not_summable, "f'(0+) not estimable");
  auto terms_needed = [c, tol, slope](double u) -> long {
    if (u <= 0.0 || slope == 0.0) return 1;
    const double rhs = tol * (1.0 - c) / (slope * u);
    if (rhs >= 1.0) return 1;
    const long n = static_cast<long>(std::ceil(std::log(rhs) / std::log(c)));
    return std::max<long>(1, n + 1);
  };
  if (terms_needed(1.0) > 2000000)
    throw Error(errc::tail_not_summable, "tail bound needs too many terms");
  auto value = [f, c, terms_needed](double u) {
    if (u <= 0.0) return 0.0;
    const long n = terms_needed(u);
    double s = 0.0;
    double arg = u;
    for (long i = 0; i < n; ++i, arg *= c) s += f(arg);
    return s;
  };
  std::function<double(double)> d1;
  if (f.has_analytic_d1()) {
    d1 = [f, c, terms_needed](double u) {
      const long n = terms_needed(std::max(u, 1e-12));
      double s = 0.0;
      double pow_c = 1.0;
      double arg = u;
      for (long i = 0; i < n; ++i, arg *= c, pow_c *= c)
        s += pow_c * f.d1(arg);
      return s;
    };
  }
  return LaplaceExponent(value, d1);
}

// ---------------------------------------------------------------------------
// closed-form exponents
// ---------------------------------------------------------------------------

LaplaceExponent psi_from_subordinator(const SubordinatorSpec& s) {
  struct Part {
    // psi contribution and first two derivatives, all closed-form
    std::function<double(double)> v, d1, d2;
  };
  std::vector<Part> parts;
  bool analytic = true;

  std::function<void(const LevyMeasure&)> add = [&](const LevyMeasure& m) {
    using LM = LevyMeasure;
    if (m.is_zero()) return;
    if (const auto* cp = std::get_if<LM::CompoundPoisson>(&m.repr())) {
      const double lam = cp->rate;
      switch (cp->jump.kind()) {
        case JumpLaw::Kind::dirac: {
          const double t0 = cp->jump.param();
          if (t0 <= 0.0)
            throw Error(errc::bad_input, "subordinator jumps must be > 0");
          parts.push_back(
              {[lam, t0](double u) { return -lam * std::expm1(-u * t0); },
               [lam, t0](double u) { return lam * t0 * std::exp(-u * t0); },
               [lam, t0](double u) {
                 return -lam * t0 * t0 * std::exp(-u * t0);
               }});
          return;
        }
        case JumpLaw::Kind::exponential: {
          const double th = cp->jump.param();
          parts.push_back({[lam, th](double u) { return lam * u / (u + th); },
                           [lam, th](double u) {
                             return lam * th / ((u + th) * (u + th));
                           },
                           [lam, th](double u) {
                             return -2.0 * lam * th /
                                    ((u + th) * (u + th) * (u + th));
                           }});
          return;
        }
        case JumpLaw::Kind::normal_squared: {
          // E e^{-u Z^2} = (1+2u)^{-1/2}
          parts.push_back(
              {[lam](double u) {
                 return lam * (1.0 - 1.0 / std::sqrt(1.0 + 2.0 * u));
               },
               [lam](double u) { return lam * std::pow(1.0 + 2.0 * u, -1.5); },
               [lam](double u) {
                 return -3.0 * lam * std::pow(1.0 + 2.0 * u, -2.5);
               }});
          return;
        }
        case JumpLaw::Kind::heavy_log_tail: {
          const JumpLaw j = cp->jump;
          analytic = false;
          parts.push_back({[lam, j](double u) {
                             if (u <= 0.0) return 0.0;
                             auto f = [&](double t) {
                               return std::exp(-u * t) * j.tail_above(t);
                             };
                             const double i =
                                 integrate_to_inf(f, 1.0).value;
                             return lam * (-std::expm1(-u) + u * i);
                           },
                           nullptr,
                           nullptr});
          return;
        }
      }
    }
    if (const auto* e = std::get_if<LM::ExponentialTail>(&m.repr())) {
      if (e->negative_side)
        throw Error(errc::bad_input, "subordinator measure must be positive");
      add(LM::compound_poisson(e->k, JumpLaw::exponential(e->theta)));
      return;
    }
    if (const auto* t = std::get_if<LM::Tabulated>(&m.repr())) {
      // int (1-e^{-ut}) nu(dt) = u * int_0^inf e^{-ut} T(t) dt, evaluated
      // cell-by-cell in closed form on the piecewise-linear tail.
      const LM::Tabulated tab = *t;
      analytic = false;
      parts.push_back({[tab](double u) {
                         if (u <= 0.0) return 0.0;
                         double s = 0.0;
                         // constant piece below the first node
                         s += tab.tail.front() * (1.0 - std::exp(-u * tab.x.front())) / u;
                         for (std::size_t j = 0; j + 1 < tab.x.size(); ++j) {
                           const double a = tab.x[j], b = tab.x[j + 1];
                           const double Ta = tab.tail[j], Tb = tab.tail[j + 1];
                           const double slope = (Tb - Ta) / (b - a);
                           // int_a^b e^{-ut} (Ta + slope (t-a)) dt
                           const double ea = std::exp(-u * a),
                                        eb = std::exp(-u * b);
                           s += Ta * (ea - eb) / u +
                                slope * ((ea - eb) / (u * u) -
                                         (b - a) * eb / u);
                         }
                         const double xe = tab.x.back(), Te = tab.tail.back();
                         if (Te > 0.0) {
                           const double r = tab.ext_rate;
                           s += Te * std::exp(-u * xe) / (u + r);
                         }
                         return u * s;
                       },
                       nullptr,
                       nullptr});
      return;
    }
    if (std::get_if<LM::CogarchImage>(&m.repr()))
      throw Error(errc::bad_input, "subordinator measure must be positive");
    if (const auto* sp = std::get_if<LM::Superposition>(&m.repr())) {
      for (const auto& p : sp->parts) add(*p);
      return;
    }
  };
  add(s.nu);

  const double a = s.drift;
  auto shared = std::make_shared<std::vector<Part>>(std::move(parts));
  auto value = [a, shared](double u) {
    double v = a * u;
    for (const auto& p : *shared) v += p.v(u);
    return v;
  };
  if (!analytic) return LaplaceExponent(value);
  auto d1 = [a, shared](double u) {
    double v = a;
    for (const auto& p : *shared) v += p.d1(u);
    return v;
  };
  auto d2 = [shared](double u) {
    double v = 0.0;
    for (const auto& p : *shared) v += p.d2(u);
    return v;
  };
  return LaplaceExponent(value, d1, d2);
}

LaplaceExponent psi_gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw Error(errc::bad_input, "Gamma needs shape > 0, rate > 0");
  return LaplaceExponent(
      [shape, rate](double u) { return shape * std::log1p(u / rate); },
      [shape, rate](double u) { return shape / (rate + u); },
      [shape, rate](double u) { return -shape / ((rate + u) * (rate + u)); });
}

LaplaceExponent psi_poisson(double rate) {
  if (!(rate > 0.0)) throw Error(errc::bad_input, "Poisson rate <= 0");
  return LaplaceExponent(
      [rate](double u) { return -rate * std::expm1(-u); },
      [rate](double u) { return rate * std::exp(-u); },
      [rate](double u) { return -rate * std::exp(-u); });
}

LaplaceExponent psi_dirac(double a) {
  if (!(a >= 0.0)) throw Error(errc::bad_input, "point mass must be >= 0");
  return LaplaceExponent([a](double u) { return a * u; },
                         [a](double) { return a; }, [](double) { return 0.0; });
}

namespace {

// L(u) = 2 (beta u)^{alpha/2} K_alpha(2 sqrt(beta u)) / Gamma(alpha), the
// Laplace transform of inverse-Gamma(alpha, beta); in terms of z = 2
// sqrt(beta u), L = c z^alpha K_alpha(z) with c = 2^{1-alpha}/Gamma(alpha).
struct InvGammaLT {
  double alpha, beta, c;
  double L(double u) const {
    if (u <= 0.0) return 1.0;
    const double z = 2.0 * std::sqrt(beta * u);
    return c * std::pow(z, alpha) * std::cyl_bessel_k(alpha, z);
  }
  double dL(double u) const {  // d/dz [z^a K_a] = -z^a K_{a-1}
    if (u <= 0.0) return -beta / std::max(alpha - 1.0, 1e-300);
    const double z = 2.0 * std::sqrt(beta * u);
    return -2.0 * beta * c * std::pow(z, alpha - 1.0) *
           std::cyl_bessel_k(std::abs(alpha - 1.0), z);
  }
  double d2L(double u) const {
    const double z = 2.0 * std::sqrt(beta * u);
    return 4.0 * beta * beta * c * std::pow(z, alpha - 2.0) *
           std::cyl_bessel_k(std::abs(alpha - 2.0), z);
  }
};

}  // namespace

LaplaceExponent psi_inverse_gamma(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw Error(errc::bad_input, "inverse-Gamma needs alpha, beta > 0");
  InvGammaLT lt{alpha, beta,
                std::pow(2.0, 1.0 - alpha) / std::tgamma(alpha)};
  return LaplaceExponent(
      [lt](double u) { return u <= 0.0 ? 0.0 : -std::log(lt.L(u)); },
      [lt](double u) { return -lt.dL(u) / lt.L(u); },
      [lt](double u) {
        const double l = lt.L(u), d = lt.dL(u);
        return (d * d) / (l * l) - lt.d2L(u) / l;
      });
}

LaplaceExponent psi_stable(double alpha, double scale) {
  if (!(alpha > 0.0 && alpha < 1.0) || !(scale > 0.0))
    throw Error(errc::bad_input, "stable needs alpha in (0,1), scale > 0");
  return LaplaceExponent(
      [alpha, scale](double u) { return scale * std::pow(u, alpha); },
      [alpha, scale](double u) {
        return scale * alpha * std::pow(u, alpha - 1.0);
      },
      [alpha, scale](double u) {
        return scale * alpha * (alpha - 1.0) * std::pow(u, alpha - 2.0);
      });
}

}  // namespace expfunc
