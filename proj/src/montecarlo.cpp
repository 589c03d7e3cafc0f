#include "expfunc/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

namespace expfunc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng sample_rng(std::uint64_t seed, std::size_t idx) {
  return Rng(
      splitmix64(seed * 0x9E3779B97F4A7C15ULL ^
                 (static_cast<std::uint64_t>(idx) + 1) * 0xD1B54A32D192ED03ULL));
}

double uniform01(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Marsaglia polar pair with a cached second value; leaner than the library
// distribution in the per-step diffusion loop.
struct Gauss {
  bool has = false;
  double cached = 0.0;
  double operator()(Rng& rng) {
    if (has) {
      has = false;
      return cached;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01(rng) - 1.0;
      v = 2.0 * uniform01(rng) - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double r = std::sqrt(-2.0 * std::log(s) / s);
    cached = v * r;
    has = true;
    return u * r;
  }
};

struct PathContext {
  double g0 = 0.0;
  double sigma = 0.0;
  double a_eta = 0.0;
  double rate_xi = 0.0;
  double rate_eta = 0.0;
  const LevyMeasure* nu_xi = nullptr;
  const LevyMeasure* nu_eta = nullptr;
  double h = 1e-3;
  double eps = 1e-17;
  double horizon = 0.0;  // > 0: fixed horizon
  double cap = 1e7;
};

double exp_draw(Rng& rng, double rate) {
  return -std::log(uniform01(rng)) / rate;
}

// Diffusion with drift only, adaptive truncation: the hot path. Draws come in
// blocks so the Taylor exp runs on an array and only the short multiply chain
// stays serial; the trapezoid factor a_eta h / 2 is applied once at the end.
// The block may overshoot the truncation threshold by a few steps, which only
// tightens the recorded bias bound.
double run_diffusion_only(const PathContext& c, Rng& rng, double& final_w) {
  Gauss gauss;
  const double drift_h = c.g0 * c.h;
  const double vol_h = c.sigma * std::sqrt(c.h);
  const long max_steps = static_cast<long>(c.cap / c.h);
  constexpr int kBlock = 64;
  double dxi[kBlock];
  double ew[kBlock];
  double w = 1.0;
  double acc = 0.0;
  for (long done = 0; done < max_steps; done += kBlock) {
    for (int k = 0; k < kBlock; ++k)
      dxi[k] = -(drift_h + vol_h * gauss(rng));
    for (int k = 0; k < kBlock; ++k) {
      const double x = dxi[k];
      double s = 1.0 + x * 0.125;
      s = 1.0 + x * s * (1.0 / 7.0);
      s = 1.0 + x * s * (1.0 / 6.0);
      s = 1.0 + x * s * 0.2;
      s = 1.0 + x * s * 0.25;
      s = 1.0 + x * s * (1.0 / 3.0);
      s = 1.0 + x * s * 0.5;
      ew[k] = 1.0 + x * s;
    }
    for (int k = 0; k < kBlock; ++k)
      if (dxi[k] < -0.25 || dxi[k] > 0.25) ew[k] = std::exp(dxi[k]);
    for (int k = 0; k < kBlock; ++k) {
      const double w2 = w * ew[k];
      acc += w + w2;
      w = w2;
    }
    if (w < c.eps) {
      final_w = w;
      return 0.5 * c.a_eta * c.h * acc;
    }
  }
  throw Error(errc::truncation_budget_exceeded,
              "adaptive truncation did not trigger before the cap");
}

double run_sample(const PathContext& c, Rng& rng,
                  double& final_w) {
  if (c.sigma > 0.0 && c.rate_xi == 0.0 && c.rate_eta == 0.0 &&
      c.horizon <= 0.0)
    return run_diffusion_only(c, rng, final_w);
  Gauss gauss;
  double w = 1.0;
  double v = 0.0;
  double t = 0.0;
  const bool adaptive = c.horizon <= 0.0;
  const double t_stop = adaptive ? c.cap : c.horizon;
  double next_xi = c.rate_xi > 0.0 ? exp_draw(rng, c.rate_xi) : kInf;
  double next_eta = c.rate_eta > 0.0 ? exp_draw(rng, c.rate_eta) : kInf;
  const double sqrt_h = std::sqrt(c.h);

  for (;;) {
    const double t_event = std::min(next_xi, next_eta);
    const double seg_end = std::min(t_event, t_stop);
    if (c.sigma == 0.0) {
      const double dt = seg_end - t;
      if (dt > 0.0 && c.a_eta > 0.0) {
        v += c.a_eta * w *
             (c.g0 != 0.0 ? -std::expm1(-c.g0 * dt) / c.g0 : dt);
      }
      if (dt > 0.0) w *= std::exp(-c.g0 * dt);
      t = seg_end;
    } else {
      while (t < seg_end) {
        const double dt = std::min(c.h, seg_end - t);
        const double root = dt == c.h ? sqrt_h : std::sqrt(dt);
        const double dxi = c.g0 * dt + c.sigma * root * gauss(rng);
        const double w2 = w * std::exp(-dxi);
        v += 0.5 * c.a_eta * dt * (w + w2);
        w = w2;
        t += dt;
        if (adaptive && w < c.eps) {
          final_w = w;
          return v;
        }
      }
    }
    if (adaptive && w < c.eps) {
      final_w = w;
      return v;
    }
    if (t >= t_stop) {
      if (adaptive)
        throw Error(errc::truncation_budget_exceeded,
                    "adaptive truncation did not trigger before the cap");
      final_w = w;
      return v;
    }
    if (next_xi <= next_eta) {
      w *= std::exp(-c.nu_xi->sample_jump(rng));
      next_xi = t + exp_draw(rng, c.rate_xi);
    } else {
      v += w * c.nu_eta->sample_jump(rng);  // left limit of e^{-xi}
      next_eta = t + exp_draw(rng, c.rate_eta);
    }
  }
}

EmpiricalDistribution finalize(std::vector<double> samples, double mean_w) {
  std::sort(samples.begin(), samples.end());
  EmpiricalDistribution e;
  e.samples = std::move(samples);
  const std::size_t n = e.samples.size();
  const std::size_t q = std::min(
      n - 1, static_cast<std::size_t>(0.999 * static_cast<double>(n)));
  e.truncation_bound = mean_w * e.samples[q];
  return e;
}

}  // namespace

double EmpiricalDistribution::cdf(double x) const {
  const auto it = std::upper_bound(samples.begin(), samples.end(), x);
  return static_cast<double>(it - samples.begin()) /
         static_cast<double>(samples.size());
}

double EmpiricalDistribution::mean() const {
  double s = 0.0;
  for (double v : samples) s += v;
  return s / static_cast<double>(samples.size());
}

double EmpiricalDistribution::sd() const {
  const double m = mean();
  double s = 0.0;
  for (double v : samples) s += (v - m) * (v - m);
  return std::sqrt(s / std::max<std::size_t>(1, samples.size() - 1));
}

double EmpiricalDistribution::quantile(double p) const {
  if (samples.empty()) return 0.0;
  const double idx = p * static_cast<double>(samples.size());
  const std::size_t j = std::min(
      samples.size() - 1,
      static_cast<std::size_t>(std::max(0.0, idx)));
  return samples[j];
}

EmpiricalDistribution simulate_functional(const CharacteristicTriplet& t,
                                          const SubordinatorSpec& s,
                                          const SimConfig& cfg) {
  if (cfg.n_samples < 1) throw Error(errc::bad_input, "n_samples < 1");
  if (convergence_check(t, s) == Convergence::diverges)
    throw Error(errc::precondition_violated, "the functional diverges");

  PathContext ctx;
  ctx.g0 = gamma0(t);
  ctx.sigma = std::sqrt(t.sigma2);
  ctx.a_eta = s.drift;
  ctx.rate_xi = t.nu.total_mass();
  ctx.rate_eta = s.nu.mass_plus();
  ctx.nu_xi = &t.nu;
  ctx.nu_eta = &s.nu;
  ctx.h = cfg.diffusion_step;
  ctx.eps = cfg.truncation_eps;
  ctx.horizon = cfg.fixed_horizon;
  ctx.cap = cfg.hard_cap_time;

  const std::size_t n = cfg.n_samples;
  std::vector<double> samples(n, 0.0);
  std::vector<double> w_sums;

  int shards = cfg.shards > 0
                   ? cfg.shards
                   : static_cast<int>(std::max(1u,
                         std::min(8u, std::thread::hardware_concurrency())));
  if (static_cast<std::size_t>(shards) > n) shards = static_cast<int>(n);
  w_sums.assign(static_cast<std::size_t>(shards), 0.0);

  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&](int shard) {
    const std::size_t lo = n * static_cast<std::size_t>(shard) /
                           static_cast<std::size_t>(shards);
    const std::size_t hi = n * (static_cast<std::size_t>(shard) + 1) /
                           static_cast<std::size_t>(shards);
    try {
      double wsum = 0.0;
      for (std::size_t i = lo; i < hi && !failed.load(std::memory_order_relaxed);
           ++i) {
        Rng rng = sample_rng(cfg.seed, i);
        double wf = 0.0;
        samples[i] = run_sample(ctx, rng, wf);
        wsum += wf;
      }
      w_sums[static_cast<std::size_t>(shard)] = wsum;
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };

  if (shards == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(shards));
    for (int sh = 0; sh < shards; ++sh) pool.emplace_back(work, sh);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) std::rethrow_exception(failure);

  double mean_w = 0.0;
  for (double v : w_sums) mean_w += v;
  mean_w /= static_cast<double>(n);
  return finalize(std::move(samples), mean_w);
}

EmpiricalDistribution simulate_poisson_poisson(double c, double intensity_u,
                                               double intensity_v,
                                               const SimConfig& cfg) {
  if (!(c > 1.0)) throw Error(errc::bad_input, "need c > 1");
  if (!(intensity_u > 0.0) || intensity_v < 0.0)
    throw Error(errc::bad_input, "need u > 0, v >= 0");
  const double p_eta = intensity_v / (intensity_u + intensity_v);
  const std::size_t n = cfg.n_samples;
  std::vector<double> samples(n, 0.0);
  double w_last = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = sample_rng(cfg.seed, i);
    double factor = 1.0;
    double v = 0.0;
    while (factor >= cfg.truncation_eps) {
      if (uniform01(rng) < p_eta)
        v += factor;
      else
        factor /= c;
    }
    w_last += factor;
    samples[i] = v;
  }
  return finalize(std::move(samples), w_last / static_cast<double>(n));
}

double ks_distance(const EmpiricalDistribution& e,
                   const std::function<double(double)>& target_cdf) {
  const std::size_t n = e.samples.size();
  if (n == 0) throw Error(errc::bad_input, "empty sample set");
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ft = target_cdf(e.samples[i]);
    const double lo = static_cast<double>(i) / static_cast<double>(n);
    const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
    d = std::max(d, std::max(ft - lo, hi - ft));
  }
  return d;
}

double ks_distance(const EmpiricalDistribution& e, const GridCDF& target) {
  return ks_distance(e, [&target](double x) { return target.at(x); });
}

}  // namespace expfunc
