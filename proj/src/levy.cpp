#include "expfunc/levy.hpp"

#include <algorithm>
#include <cmath>

#include "expfunc/quadrature.hpp"

namespace expfunc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(8.0 * std::atan(1.0) * 2.0);
}

double uniform01(Rng& rng) {
  // 53-bit mantissa draw in (0,1)
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

// ---------------------------------------------------------------------------
// JumpLaw
// ---------------------------------------------------------------------------

JumpLaw JumpLaw::dirac(double at) {
  if (at == 0.0) throw Error(errc::bad_input, "dirac jump at zero");
  return JumpLaw(Kind::dirac, at);
}

JumpLaw JumpLaw::exponential(double rate) {
  if (!(rate > 0.0)) throw Error(errc::bad_input, "exponential rate <= 0");
  return JumpLaw(Kind::exponential, rate);
}

JumpLaw JumpLaw::normal_squared() { return JumpLaw(Kind::normal_squared, 0); }

JumpLaw JumpLaw::heavy_log_tail() { return JumpLaw(Kind::heavy_log_tail, 0); }

double JumpLaw::tail_above(double x) const {
  switch (kind_) {
    case Kind::dirac:
      return a_ > x ? 1.0 : 0.0;
    case Kind::exponential:
      return std::exp(-a_ * x);
    case Kind::normal_squared:
      return x <= 0.0 ? 1.0 : std::erfc(std::sqrt(0.5 * x));
    case Kind::heavy_log_tail:
      return x <= 1.0 ? 1.0 : 1.0 / (1.0 + std::log(x));
  }
  return 0.0;
}

double JumpLaw::tail_below(double x) const {
  if (kind_ == Kind::dirac) return a_ < -x ? 1.0 : 0.0;
  return 0.0;  // the other laws live on (0, inf)
}

double JumpLaw::mean_small() const {
  switch (kind_) {
    case Kind::dirac:
      return std::abs(a_) <= 1.0 ? a_ : 0.0;
    case Kind::exponential:
      return (1.0 - std::exp(-a_) * (1.0 + a_)) / a_;
    case Kind::normal_squared:
      // int_{-1}^{1} z^2 phi(z) dz
      return (2.0 * norm_cdf(1.0) - 1.0) - 2.0 * norm_pdf(1.0);
    case Kind::heavy_log_tail:
      return 0.0;  // no mass at or below 1
  }
  return 0.0;
}

double JumpLaw::abs_mean_small() const {
  if (kind_ == Kind::dirac) return std::abs(a_) <= 1.0 ? std::abs(a_) : 0.0;
  return mean_small();  // remaining laws are positive
}

double JumpLaw::mean_big_plus() const {
  switch (kind_) {
    case Kind::dirac:
      return a_ > 1.0 ? a_ : 0.0;
    case Kind::exponential:
      return std::exp(-a_) * (1.0 + 1.0 / a_);
    case Kind::normal_squared:
      return 1.0 - mean_small();
    case Kind::heavy_log_tail:
      return kInf;
  }
  return 0.0;
}

double JumpLaw::mean_big_minus() const {
  if (kind_ == Kind::dirac) return a_ < -1.0 ? a_ : 0.0;
  return 0.0;
}

double JumpLaw::mean() const {
  switch (kind_) {
    case Kind::dirac:
      return a_;
    case Kind::exponential:
      return 1.0 / a_;
    case Kind::normal_squared:
      return 1.0;
    case Kind::heavy_log_tail:
      return kInf;
  }
  return 0.0;
}

double JumpLaw::log_moment_above1() const {
  switch (kind_) {
    case Kind::dirac:
      return a_ > 1.0 ? std::log(a_) : 0.0;
    case Kind::exponential: {
      const double rate = a_;
      return integrate_to_inf(
                 [rate](double t) {
                   return std::log(t) * rate * std::exp(-rate * t);
                 },
                 1.0)
          .value;
    }
    case Kind::normal_squared: {
      static const double cached = [] {
        return integrate_to_inf(
                   [](double z) { return 4.0 * std::log(z) * norm_pdf(z); },
                   1.0)
            .value;
      }();
      return cached;
    }
    case Kind::heavy_log_tail:
      return kInf;
  }
  return 0.0;
}

double JumpLaw::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::dirac:
      return a_;
    case Kind::exponential:
      return -std::log(uniform01(rng)) / a_;
    case Kind::normal_squared: {
      std::normal_distribution<double> z;
      const double v = z(rng);
      return v * v;
    }
    case Kind::heavy_log_tail:
      return std::exp(1.0 / uniform01(rng) - 1.0);
  }
  return 0.0;
}

bool JumpLaw::has_density() const { return kind_ != Kind::dirac; }

double JumpLaw::density_pos(double y) const {
  if (y <= 0.0) return 0.0;
  switch (kind_) {
    case Kind::dirac:
      return 0.0;
    case Kind::exponential:
      return a_ * std::exp(-a_ * y);
    case Kind::normal_squared:
      return std::exp(-0.5 * y) / std::sqrt(8.0 * std::atan(1.0) * y * 2.0) *
             std::sqrt(2.0);
    case Kind::heavy_log_tail: {
      if (y <= 1.0) return 0.0;
      const double l = 1.0 + std::log(y);
      return 1.0 / (y * l * l);
    }
  }
  return 0.0;
}

double JumpLaw::density_neg(double) const { return 0.0; }

// ---------------------------------------------------------------------------
// LevyMeasure
// ---------------------------------------------------------------------------

LevyMeasure LevyMeasure::zero() { return LevyMeasure(Zero{}); }

LevyMeasure LevyMeasure::compound_poisson(double rate, JumpLaw jump) {
  if (!(rate > 0.0)) throw Error(errc::bad_input, "compound Poisson rate <= 0");
  return LevyMeasure(CompoundPoisson{rate, jump});
}

LevyMeasure LevyMeasure::exponential_tail(double k, double theta,
                                          bool negative_side) {
  if (!(k > 0.0) || !(theta > 0.0))
    throw Error(errc::bad_input, "exponential tail needs k > 0, theta > 0");
  return LevyMeasure(ExponentialTail{k, theta, negative_side});
}

LevyMeasure LevyMeasure::tabulated(std::vector<double> x,
                                   std::vector<double> tail) {
  if (x.size() != tail.size() || x.size() < 2)
    throw Error(errc::bad_input, "tabulated tail needs >= 2 matching points");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || tail[i] < 0.0)
      throw Error(errc::bad_input, "tabulated tail needs x > 0, tail >= 0");
    if (i > 0 && (x[i] <= x[i - 1] || tail[i] > tail[i - 1] + 1e-15))
      throw Error(errc::bad_input, "tabulated tail must be non-increasing");
  }
  const std::size_t n = x.size();
  double rate = 0.0;
  if (tail[n - 1] > 0.0 && tail[n - 2] > tail[n - 1]) {
    rate = std::log(tail[n - 2] / tail[n - 1]) / (x[n - 1] - x[n - 2]);
  }
  return LevyMeasure(Tabulated{std::move(x), std::move(tail), rate});
}

LevyMeasure LevyMeasure::cogarch_image(double phi, LevyMeasure base) {
  if (!(phi > 0.0)) throw Error(errc::bad_input, "cogarch image needs phi > 0");
  if (base.mass_minus() > 0.0)
    throw Error(errc::bad_input, "cogarch image base must live on (0,inf)");
  return LevyMeasure(
      CogarchImage{phi, std::make_shared<const LevyMeasure>(std::move(base))});
}

LevyMeasure LevyMeasure::superpose(std::vector<LevyMeasure> parts) {
  Superposition s;
  for (auto& p : parts) {
    if (p.is_zero()) continue;
    s.parts.push_back(std::make_shared<const LevyMeasure>(std::move(p)));
  }
  if (s.parts.empty()) return zero();
  return LevyMeasure(std::move(s));
}

bool LevyMeasure::is_zero() const {
  return std::holds_alternative<Zero>(repr_);
}

namespace {

double tabulated_tail_at(const LevyMeasure::Tabulated& t, double x) {
  if (x <= t.x.front()) return t.tail.front();
  if (x >= t.x.back()) {
    if (t.tail.back() == 0.0) return 0.0;
    if (t.ext_rate == 0.0) return t.tail.back();
    return t.tail.back() * std::exp(-t.ext_rate * (x - t.x.back()));
  }
  auto it = std::upper_bound(t.x.begin(), t.x.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - t.x.begin());
  const double w = (x - t.x[j - 1]) / (t.x[j] - t.x[j - 1]);
  return t.tail[j - 1] + w * (t.tail[j] - t.tail[j - 1]);
}

// int_a^b T(x) dx for the piecewise-linear tail with exponential extension.
double tabulated_tail_integral(const LevyMeasure::Tabulated& t, double a,
                               double b) {
  if (b <= a) return 0.0;
  double s = 0.0;
  // constant part below the first grid point
  const double lo0 = std::min(b, t.x.front());
  if (a < lo0) s += (lo0 - a) * t.tail.front();
  // linear cells
  for (std::size_t j = 0; j + 1 < t.x.size(); ++j) {
    const double lo = std::max(a, t.x[j]);
    const double hi = std::min(b, t.x[j + 1]);
    if (hi <= lo) continue;
    s += 0.5 * (tabulated_tail_at(t, lo) + tabulated_tail_at(t, hi)) *
         (hi - lo);
  }
  // exponential extension
  const double xe = t.x.back();
  if (b > xe && t.tail.back() > 0.0) {
    const double lo = std::max(a, xe);
    if (t.ext_rate == 0.0) {
      if (b == kInf) return kInf;
      s += (b - lo) * t.tail.back();
    } else {
      const double top = (b == kInf)
                             ? 0.0
                             : std::exp(-t.ext_rate * (b - xe));
      s += t.tail.back() / t.ext_rate *
           (std::exp(-t.ext_rate * (lo - xe)) - top);
    }
  }
  return s;
}

}  // namespace

double LevyMeasure::tail_plus(double x) const {
  return std::visit(
      overloaded{
          [](const Zero&) { return 0.0; },
          [x](const CompoundPoisson& cp) {
            return cp.rate * cp.jump.tail_above(x);
          },
          [x](const ExponentialTail& e) {
            return e.negative_side ? 0.0 : e.k * std::exp(-e.theta * x);
          },
          [x](const Tabulated& t) { return tabulated_tail_at(t, x); },
          [](const CogarchImage&) { return 0.0; },
          [x](const Superposition& s) {
            double v = 0.0;
            for (const auto& p : s.parts) v += p->tail_plus(x);
            return v;
          }},
      repr_);
}

double LevyMeasure::tail_minus(double x) const {
  return std::visit(
      overloaded{
          [](const Zero&) { return 0.0; },
          [x](const CompoundPoisson& cp) {
            return cp.rate * cp.jump.tail_below(x);
          },
          [x](const ExponentialTail& e) {
            return e.negative_side ? e.k * std::exp(-e.theta * x) : 0.0;
          },
          [](const Tabulated&) { return 0.0; },
          [x, this](const CogarchImage& im) {
            // nu((-inf,-x)) = nu_S(( (e^x - 1)/phi, inf ))
            return im.base->tail_plus(std::expm1(x) / im.phi);
          },
          [x](const Superposition& s) {
            double v = 0.0;
            for (const auto& p : s.parts) v += p->tail_minus(x);
            return v;
          }},
      repr_);
}

namespace {

// int g dnu over (a, b] for a measure supported on (0, inf).
double stieltjes_pos(const LevyMeasure& m,
                     const std::function<double(double)>& g, double a,
                     double b);

double stieltjes_jumplaw(const JumpLaw& j,
                         const std::function<double(double)>& g, double a,
                         double b) {
  switch (j.kind()) {
    case JumpLaw::Kind::dirac: {
      const double at = j.param();
      return (at > a && at <= b) ? g(at) : 0.0;
    }
    default: {
      auto f = [&](double t) { return g(t) * j.density_pos(t); };
      if (b == kInf) {
        // start the doubling at a point where the density is meaningful
        return integrate_to_inf(f, std::max(a, 1e-12)).value;
      }
      return integrate(f, std::max(a, 1e-12), b).value;
    }
  }
}

double stieltjes_pos(const LevyMeasure& m,
                     const std::function<double(double)>& g, double a,
                     double b) {
  return std::visit(
      overloaded{
          [](const LevyMeasure::Zero&) { return 0.0; },
          [&](const LevyMeasure::CompoundPoisson& cp) {
            return cp.rate * stieltjes_jumplaw(cp.jump, g, a, b);
          },
          [&](const LevyMeasure::ExponentialTail& e) {
            if (e.negative_side) return 0.0;
            return e.k *
                   stieltjes_jumplaw(JumpLaw::exponential(e.theta), g, a, b);
          },
          [&](const LevyMeasure::Tabulated& t) {
            // piecewise-constant density per cell, then the exponential tail
            double s = 0.0;
            for (std::size_t j = 0; j + 1 < t.x.size(); ++j) {
              const double lo = std::max(a, t.x[j]);
              const double hi = (b == kInf) ? t.x[j + 1] : std::min(b, t.x[j + 1]);
              if (hi <= lo) continue;
              const double dens = (t.tail[j] - t.tail[j + 1]) / (t.x[j + 1] - t.x[j]);
              if (dens <= 0.0) continue;
              s += dens * integrate(g, lo, hi).value;
            }
            const double xe = t.x.back();
            if (t.tail.back() > 0.0 && t.ext_rate > 0.0 && (b == kInf || b > xe)) {
              const double lo = std::max(a, xe);
              const double T0 = t.tail.back();
              const double r = t.ext_rate;
              auto f = [&](double x) {
                return g(x) * T0 * r * std::exp(-r * (x - xe));
              };
              s += (b == kInf) ? integrate_to_inf(f, lo).value
                               : integrate(f, lo, b).value;
            }
            return s;
          },
          [](const LevyMeasure::CogarchImage&) { return 0.0; },
          [&](const LevyMeasure::Superposition& sp) {
            double s = 0.0;
            for (const auto& p : sp.parts) s += stieltjes_pos(*p, g, a, b);
            return s;
          }},
      m.repr());
}

}  // namespace

double LevyMeasure::mean_small() const {
  return std::visit(
      overloaded{
          [](const Zero&) { return 0.0; },
          [](const CompoundPoisson& cp) {
            return cp.rate * cp.jump.mean_small();
          },
          [](const ExponentialTail& e) {
            const double m =
                e.k * (1.0 - std::exp(-e.theta) * (1.0 + e.theta)) / e.theta;
            return e.negative_side ? -m : m;
          },
          [this](const Tabulated& t) {
            // int_(0,1] x nu(dx) = -T(1) * 1 + int_0^1 T
            return tabulated_tail_integral(t, 0.0, 1.0) -
                   tabulated_tail_at(t, 1.0);
          },
          [this](const CogarchImage& im) {
            // jumps at -log(1+phi s) lie in [-1,0) iff s <= (e-1)/phi
            const double s1 = std::expm1(1.0) / im.phi;
            const double phi = im.phi;
            return -stieltjes_pos(
                *im.base, [phi](double s) { return std::log1p(phi * s); }, 0.0,
                s1);
          },
          [](const Superposition& sp) {
            double v = 0.0;
            for (const auto& p : sp.parts) v += p->mean_small();
            return v;
          }},
      repr_);
}

double LevyMeasure::abs_mean_small() const {
  return std::visit(
      overloaded{
          [](const Zero&) { return 0.0; },
          [](const CompoundPoisson& cp) {
            return cp.rate * cp.jump.abs_mean_small();
          },
          [this](const ExponentialTail&) { return std::abs(mean_small()); },
          [this](const Tabulated&) { return mean_small(); },
          [this](const CogarchImage&) { return -mean_small(); },
          [](const Superposition& sp) {
            double v = 0.0;
            for (const auto& p : sp.parts) v += p->abs_mean_small();
            return v;
          }},
      repr_);
}

double LevyMeasure::mean_big_plus() const {
  return std::visit(
      overloaded{
          [](const Zero&) { return 0.0; },
          [](const CompoundPoisson& cp) {
            return cp.rate * cp.jump.mean_big_plus();
          },
          [](const ExponentialTail& e) {
            if (e.negative_side) return 0.0;
            return e.k * std::exp(-e.theta) * (1.0 + 1.0 / e.theta);
          },
          [this](const Tabulated& t) {
            if (t.tail.back() > 0.0 && t.ext_rate == 0.0) return kInf;
            return tabulated_tail_at(t, 1.0) +
                   tabulated_tail_integral(t, 1.0, kInf);
          },
          [](const CogarchImage&) { return 0.0; },
          [](const Superposition& sp) {
            double v = 0.0;
            for (const auto& p : sp.parts) v += p->mean_big_plus();
            return v;
          }},
      repr_);
}

double LevyMeasure::mean_big_minus() const {
  return std::visit(
      overloaded{
          [](const Zero&) { return 0.0; },
          [](const CompoundPoisson& cp) {
            return cp.rate * cp.jump.mean_big_minus();
          },
          [](const ExponentialTail& e) {
            if (!e.negative_side) return 0.0;
            return -e.k * std::exp(-e.theta) * (1.0 + 1.0 / e.theta);
          },
          [](const Tabulated&) { return 0.0; },
          [this](const CogarchImage& im) {
            if (im.base->log_moment_plus() == kInf) return -kInf;
            const double s1 = std::expm1(1.0) / im.phi;
            const double phi = im.phi;
            return -stieltjes_pos(
                *im.base, [phi](double s) { return std::log1p(phi * s); }, s1,
                kInf);
          },
          [](const Superposition& sp) {
            double v = 0.0;
            for (const auto& p : sp.parts) v += p->mean_big_minus();
            return v;
          }},
      repr_);
}

double LevyMeasure::mean_plus() const {
  return std::visit(
      overloaded{
          [](const Zero&) { return 0.0; },
          [](const CompoundPoisson& cp) {
            const double m = cp.jump.mean();
            return m > 0.0 ? cp.rate * m : 0.0;
          },
          [](const ExponentialTail& e) {
            return e.negative_side ? 0.0 : e.k / e.theta;
          },
          [this](const Tabulated& t) {
            if (t.tail.back() > 0.0 && t.ext_rate == 0.0) return kInf;
            return tabulated_tail_integral(t, 0.0, kInf);
          },
          [](const CogarchImage&) { return 0.0; },
          [](const Superposition& sp) {
            double v = 0.0;
            for (const auto& p : sp.parts) v += p->mean_plus();
            return v;
          }},
      repr_);
}

double LevyMeasure::log_moment_plus() const {
  return std::visit(
      overloaded{
          [](const Zero&) { return 0.0; },
          [](const CompoundPoisson& cp) {
            return cp.rate * cp.jump.log_moment_above1();
          },
          [](const ExponentialTail& e) {
            if (e.negative_side) return 0.0;
            return e.k *
                   JumpLaw::exponential(e.theta).log_moment_above1();
          },
          [](const Tabulated& t) {
            if (t.tail.back() > 0.0 && t.ext_rate == 0.0) return kInf;
            // int_(1,inf) log x nu(dx) = int_1^inf T(x)/x dx
            auto f = [&t](double x) { return tabulated_tail_at(t, x) / x; };
            return integrate_to_inf(f, 1.0).value;
          },
          [](const CogarchImage&) { return 0.0; },
          [](const Superposition& sp) {
            double v = 0.0;
            for (const auto& p : sp.parts) v += p->log_moment_plus();
            return v;
          }},
      repr_);
}

LevyMeasure LevyMeasure::scaled(double factor) const {
  if (!(factor > 0.0)) throw Error(errc::bad_input, "scale factor <= 0");
  return std::visit(
      overloaded{
          [](const Zero&) { return zero(); },
          [factor](const CompoundPoisson& cp) {
            return compound_poisson(cp.rate * factor, cp.jump);
          },
          [factor](const ExponentialTail& e) {
            return exponential_tail(e.k * factor, e.theta, e.negative_side);
          },
          [factor](const Tabulated& t) {
            std::vector<double> tail = t.tail;
            for (double& v : tail) v *= factor;
            return tabulated(t.x, std::move(tail));
          },
          [factor](const CogarchImage& im) {
            return cogarch_image(im.phi, im.base->scaled(factor));
          },
          [factor](const Superposition& sp) {
            std::vector<LevyMeasure> parts;
            parts.reserve(sp.parts.size());
            for (const auto& p : sp.parts) parts.push_back(p->scaled(factor));
            return superpose(std::move(parts));
          }},
      repr_);
}

std::vector<Atom> LevyMeasure::atom_parts() const {
  std::vector<Atom> out;
  std::visit(
      overloaded{
          [](const Zero&) {},
          [&](const CompoundPoisson& cp) {
            if (cp.jump.kind() == JumpLaw::Kind::dirac)
              out.push_back({cp.jump.param(), cp.rate});
          },
          [](const ExponentialTail&) {},
          [](const Tabulated&) {},
          [&](const CogarchImage& im) {
            for (const Atom& a : im.base->atom_parts())
              out.push_back({-std::log1p(im.phi * a.x), a.mass});
          },
          [&](const Superposition& sp) {
            for (const auto& p : sp.parts)
              for (const Atom& a : p->atom_parts()) out.push_back(a);
          }},
      repr_);
  return out;
}

bool LevyMeasure::purely_atomic() const {
  return std::visit(
      overloaded{
          [](const Zero&) { return true; },
          [](const CompoundPoisson& cp) {
            return cp.jump.kind() == JumpLaw::Kind::dirac;
          },
          [](const ExponentialTail&) { return false; },
          [](const Tabulated&) { return false; },
          [](const CogarchImage& im) { return im.base->purely_atomic(); },
          [](const Superposition& sp) {
            for (const auto& p : sp.parts)
              if (!p->purely_atomic()) return false;
            return true;
          }},
      repr_);
}

LevyMeasure LevyMeasure::continuous_part() const {
  if (purely_atomic()) return zero();
  return std::visit(
      overloaded{
          [](const Zero&) { return zero(); },
          [this](const CompoundPoisson&) { return *this; },
          [this](const ExponentialTail&) { return *this; },
          [this](const Tabulated&) { return *this; },
          [this](const CogarchImage& im) {
            return cogarch_image(im.phi, im.base->continuous_part());
          },
          [](const Superposition& sp) {
            std::vector<LevyMeasure> parts;
            for (const auto& p : sp.parts)
              if (!p->purely_atomic()) parts.push_back(p->continuous_part());
            return superpose(std::move(parts));
          }},
      repr_);
}

bool LevyMeasure::has_density() const {
  return std::visit(
      overloaded{
          [](const Zero&) { return true; },
          [](const CompoundPoisson& cp) { return cp.jump.has_density(); },
          [](const ExponentialTail&) { return true; },
          [](const Tabulated&) { return false; },
          [](const CogarchImage& im) { return im.base->has_density(); },
          [](const Superposition& sp) {
            for (const auto& p : sp.parts)
              if (!p->has_density()) return false;
            return true;
          }},
      repr_);
}

double LevyMeasure::density_pos(double y) const {
  if (y <= 0.0) return 0.0;
  return std::visit(
      overloaded{
          [](const Zero&) { return 0.0; },
          [y](const CompoundPoisson& cp) {
            return cp.rate * cp.jump.density_pos(y);
          },
          [y](const ExponentialTail& e) {
            return e.negative_side ? 0.0
                                   : e.k * e.theta * std::exp(-e.theta * y);
          },
          [](const Tabulated&) { return 0.0; },
          [](const CogarchImage&) { return 0.0; },
          [y](const Superposition& sp) {
            double v = 0.0;
            for (const auto& p : sp.parts) v += p->density_pos(y);
            return v;
          }},
      repr_);
}

double LevyMeasure::density_neg(double y) const {
  if (y <= 0.0) return 0.0;
  return std::visit(
      overloaded{
          [](const Zero&) { return 0.0; },
          [y](const CompoundPoisson& cp) {
            return cp.rate * cp.jump.density_neg(y);
          },
          [y](const ExponentialTail& e) {
            return e.negative_side ? e.k * e.theta * std::exp(-e.theta * y)
                                   : 0.0;
          },
          [](const Tabulated&) { return 0.0; },
          [y](const CogarchImage& im) {
            // x = -log(1+phi s); density transported by |ds/dx| = e^y / phi
            const double s = std::expm1(y) / im.phi;
            return im.base->density_pos(s) * std::exp(y) / im.phi;
          },
          [y](const Superposition& sp) {
            double v = 0.0;
            for (const auto& p : sp.parts) v += p->density_neg(y);
            return v;
          }},
      repr_);
}

double LevyMeasure::sample_jump(Rng& rng) const {
  return std::visit(
      overloaded{
          [](const Zero&) -> double {
            throw Error(errc::bad_input, "cannot sample from the zero measure");
          },
          [&rng](const CompoundPoisson& cp) { return cp.jump.sample(rng); },
          [&rng](const ExponentialTail& e) {
            const double j = JumpLaw::exponential(e.theta).sample(rng);
            return e.negative_side ? -j : j;
          },
          [&rng, this](const Tabulated& t) {
            // invert the normalized tail
            const double mass = t.tail.front();
            const double u = uniform01(rng) * mass;
            if (u <= t.tail.back()) {
              // extrapolated region
              if (t.ext_rate == 0.0 || t.tail.back() == 0.0)
                return t.x.back();
              return t.x.back() +
                     std::log(t.tail.back() / u) / t.ext_rate;
            }
            auto it = std::lower_bound(t.tail.begin(), t.tail.end(), u,
                                       std::greater<double>());
            std::size_t j = static_cast<std::size_t>(it - t.tail.begin());
            if (j == 0) return t.x.front();
            const double t0 = t.tail[j - 1], t1 = t.tail[j];
            const double w = (t0 - u) / std::max(t0 - t1, 1e-300);
            return t.x[j - 1] + w * (t.x[j] - t.x[j - 1]);
          },
          [&rng](const CogarchImage& im) {
            return -std::log1p(im.phi * im.base->sample_jump(rng));
          },
          [&rng, this](const Superposition& sp) {
            double total = 0.0;
            for (const auto& p : sp.parts) total += p->total_mass();
            double u = uniform01(rng) * total;
            for (const auto& p : sp.parts) {
              const double m = p->total_mass();
              if (u < m || &p == &sp.parts.back()) return p->sample_jump(rng);
              u -= m;
            }
            return sp.parts.back()->sample_jump(rng);
          }},
      repr_);
}

// ---------------------------------------------------------------------------
// structural operations
// ---------------------------------------------------------------------------

double gamma0(const CharacteristicTriplet& t) {
  const double abs_small = t.nu.abs_mean_small();
  if (!std::isfinite(abs_small))
    throw Error(errc::small_jumps_not_integrable,
                "int_{[-1,1]} |x| nu(dx) diverges");
  return t.gamma - t.nu.mean_small();
}

double mean_xi(const CharacteristicTriplet& t) {
  const double mp = t.nu.mean_big_plus();
  const double mm = t.nu.mean_big_minus();
  if (mp == kInf && mm == -kInf)
    throw Error(errc::mean_undefined, "both big-jump tails are non-integrable");
  if (mp == kInf) return kInf;
  if (mm == -kInf) return -kInf;
  return t.gamma + mp + mm;
}

Convergence convergence_check(const CharacteristicTriplet& t,
                              const SubordinatorSpec& s) {
  if (s.drift == 0.0 && s.nu.is_zero()) return Convergence::converges;  // V = 0
  double m;
  try {
    m = mean_xi(t);
  } catch (const Error&) {
    return Convergence::unknown;
  }
  if (m <= 0.0) return Convergence::diverges;
  if (s.nu.log_moment_plus() < kInf) return Convergence::converges;
  return Convergence::unknown;
}

Support support_of_functional(const CharacteristicTriplet& t,
                              const SubordinatorSpec& s) {
  if (convergence_check(t, s) != Convergence::converges)
    throw Error(errc::precondition_violated,
                "support requires a convergent functional");
  if (t.sigma2 > 0.0) return Support{0.0, kInf, false};
  const double g0 = gamma0(t);
  const bool xi_det = t.nu.is_zero();
  const bool eta_det = s.nu.is_zero();
  if (xi_det && eta_det) {
    if (!(g0 > 0.0))
      throw Error(errc::precondition_violated, "gamma0 <= 0");
    const double p = s.drift / g0;
    return Support{p, p, true};
  }
  if (t.nu.mass_plus() == 0.0) {
    if (!(g0 > 0.0))
      throw Error(errc::precondition_violated, "gamma0 <= 0");
    return Support{s.drift / g0, kInf, false};
  }
  if (t.nu.mass_minus() == 0.0 && t.nu.mass_plus() > 0.0 && eta_det) {
    if (!(g0 > 0.0))
      throw Error(errc::precondition_violated, "gamma0 <= 0");
    return Support{0.0, s.drift / g0, false};
  }
  return Support{0.0, kInf, false};
}

double cogarch_log_moment(const COGARCHSpec& c) {
  const double phi = c.phi;
  return stieltjes_pos(
      c.nu_s, [phi](double s) { return std::log1p(phi * s); }, 0.0, kInf);
}

std::pair<CharacteristicTriplet, SubordinatorSpec> cogarch_to_gou(
    const COGARCHSpec& c) {
  if (!(c.beta > 0.0) || !(c.eta > 0.0) || !(c.phi > 0.0))
    throw Error(errc::bad_input, "COGARCH parameters must be positive");
  if (!c.nu_s.is_zero() && c.nu_s.mass_minus() > 0.0)
    throw Error(errc::bad_input, "nu_S must live on (0,inf)");
  const double lm = c.nu_s.is_zero() ? 0.0 : cogarch_log_moment(c);
  if (!(lm < c.eta))
    throw Error(errc::not_stationary,
                "int log(1+phi y) nu_S(dy) >= eta");
  CharacteristicTriplet xi;
  xi.sigma2 = 0.0;
  xi.nu = c.nu_s.is_zero() ? LevyMeasure::zero()
                           : LevyMeasure::cogarch_image(c.phi, c.nu_s);
  xi.gamma = c.eta + xi.nu.mean_small();  // so that gamma0 == eta exactly
  SubordinatorSpec eta;
  eta.drift = c.beta;
  eta.nu = LevyMeasure::zero();
  return {std::move(xi), std::move(eta)};
}

const char* to_string(errc code) {
  switch (code) {
    case errc::small_jumps_not_integrable: return "SmallJumpsNotIntegrable";
    case errc::mean_undefined: return "MeanUndefined";
    case errc::precondition_violated: return "PreconditionViolated";
    case errc::not_stationary: return "NotStationary";
    case errc::invalid_factor: return "InvalidFactor";
    case errc::evaluation_failed: return "EvaluationFailed";
    case errc::not_anchored_at_zero: return "NotAnchoredAtZero";
    case errc::density_unavailable: return "DensityUnavailable";
    case errc::k_unavailable: return "KUnavailable";
    case errc::not_selfdecomposable_repr: return "NotSelfdecomposableRepr";
    case errc::log_moment_infinite: return "LogMomentInfinite";
    case errc::representation_not_recoverable:
      return "RepresentationNotRecoverable";
    case errc::tail_not_summable: return "TailNotSummable";
    case errc::integral_diverged: return "IntegralDiverged";
    case errc::singular_at_left_edge: return "SingularAtLeftEdge";
    case errc::edge_condition_violated: return "EdgeConditionViolated";
    case errc::truncation_budget_exceeded: return "TruncationBudgetExceeded";
    case errc::factor_not_compound_poisson: return "FactorNotCompoundPoisson";
    case errc::zero_gaussian_part: return "ZeroGaussianPart";
    case errc::drift_compensation_too_small:
      return "DriftCompensationTooSmall";
    case errc::not_cm: return "NotCM";
    case errc::bad_input: return "BadInput";
  }
  return "UnknownError";
}

}  // namespace expfunc
