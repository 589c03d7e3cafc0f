#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "expfunc/errors.hpp"

namespace expfunc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// xoshiro256++ behind the standard URBG interface; per-sample streams are
// seeded from (master seed, sample index) through splitmix64.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 1) {
    for (auto& word : state_) {
      seed += 0x9E3779B97F4A7C15ULL;
      std::uint64_t z = seed;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
      word = z ^ (z >> 31);
    }
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ULL; }

  result_type operator()() {
    const std::uint64_t out = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return out;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

// Law of a single jump, normalized to total mass one. All supported laws are
// samplable and expose the closed-form (or cached quadrature) moments the
// structural operations need.
class JumpLaw {
 public:
  enum class Kind { dirac, exponential, normal_squared, heavy_log_tail };

  static JumpLaw dirac(double at);
  static JumpLaw exponential(double rate);  // Exp(rate) on (0,inf)
  static JumpLaw normal_squared();          // square of a standard normal
  // P(J > x) = 1/(1 + log x) for x >= 1; infinite log-moment by design.
  static JumpLaw heavy_log_tail();

  Kind kind() const { return kind_; }
  double param() const { return a_; }  // dirac location / exponential rate

  double tail_above(double x) const;  // P(J > x), x >= 0
  double tail_below(double x) const;  // P(J < -x), x >= 0
  double mean_small() const;          // E[J 1_{|J|<=1}]
  double abs_mean_small() const;      // E[|J| 1_{|J|<=1}]
  double mean_big_plus() const;       // E[J 1_{J>1}], may be +inf
  double mean_big_minus() const;      // E[J 1_{J<-1}], may be -inf
  double mean() const;                // E[J], may be +-inf
  double log_moment_above1() const;   // E[log J 1_{J>1}], may be +inf
  double sample(Rng& rng) const;

  // Density at y on the positive (negative) half line, when one exists.
  bool has_density() const;
  double density_pos(double y) const;  // density at +y, y > 0
  double density_neg(double y) const;  // density at -y, y > 0

 private:
  JumpLaw(Kind kind, double a) : kind_(kind), a_(a) {}
  Kind kind_;
  double a_;
};

struct Atom {
  double x;     // jump location (nonzero)
  double mass;  // intensity carried by the atom
};

// Finite-activity Levy measure on R \ {0}. Several concrete representations
// share one interface; infinite-activity k(t)/t-type measures live in
// BernsteinRepr instead (see bernstein.hpp).
class LevyMeasure {
 public:
  struct Zero {};
  struct CompoundPoisson {
    double rate;
    JumpLaw jump;
  };
  // tail(x) = k e^{-theta x} on (0,inf); mirrored to (-inf,0) when negative.
  struct ExponentialTail {
    double k;
    double theta;
    bool negative_side;
  };
  // Tail values on an increasing grid of x > 0. No mass below x.front();
  // exponential extrapolation of the last two points beyond x.back().
  struct Tabulated {
    std::vector<double> x;
    std::vector<double> tail;
    double ext_rate;  // fitted decay rate of the extrapolated tail
  };
  // Image of a measure on (0,inf) under s -> -log(1 + phi s); the COGARCH
  // jump map. Support lies in (-inf, 0).
  struct CogarchImage {
    double phi;
    std::shared_ptr<const LevyMeasure> base;
  };
  struct Superposition {
    std::vector<std::shared_ptr<const LevyMeasure>> parts;
  };

  using Repr = std::variant<Zero, CompoundPoisson, ExponentialTail, Tabulated,
                            CogarchImage, Superposition>;

  LevyMeasure() : repr_(Zero{}) {}

  static LevyMeasure zero();
  static LevyMeasure compound_poisson(double rate, JumpLaw jump);
  static LevyMeasure exponential_tail(double k, double theta,
                                      bool negative_side = false);
  static LevyMeasure tabulated(std::vector<double> x,
                               std::vector<double> tail);
  static LevyMeasure cogarch_image(double phi, LevyMeasure base);
  static LevyMeasure superpose(std::vector<LevyMeasure> parts);

  const Repr& repr() const { return repr_; }

  bool is_zero() const;
  double tail_plus(double x) const;   // nu((x, inf)), x >= 0
  double tail_minus(double x) const;  // nu((-inf, -x)), x >= 0
  double mass_plus() const { return tail_plus(0.0); }
  double mass_minus() const { return tail_minus(0.0); }
  double total_mass() const { return mass_plus() + mass_minus(); }
  bool spectrally_negative() const { return mass_plus() == 0.0; }
  bool spectrally_positive() const { return mass_minus() == 0.0; }

  double mean_small() const;      // int_{[-1,1]} x nu(dx)
  double abs_mean_small() const;  // int_{[-1,1]} |x| nu(dx)
  double mean_big_plus() const;   // int_(1,inf) x nu(dx), may be +inf
  double mean_big_minus() const;  // int_(-inf,-1) x nu(dx), may be -inf
  double mean_plus() const;       // int_(0,inf) t nu(dt), may be +inf
  double log_moment_plus() const; // int_(1,inf) log x nu(dx), may be +inf

  LevyMeasure scaled(double factor) const;

  // Atoms of the purely atomic components; purely_atomic() tells whether they
  // exhaust the measure. continuous_part() collects the rest.
  std::vector<Atom> atom_parts() const;
  bool purely_atomic() const;
  LevyMeasure continuous_part() const;

  // Density with respect to Lebesgue on either half line, when available for
  // every non-atomic component.
  bool has_density() const;
  double density_pos(double y) const;  // at +y, y > 0
  double density_neg(double y) const;  // at -y, y > 0

  double sample_jump(Rng& rng) const;  // from nu / total_mass

 private:
  explicit LevyMeasure(Repr r) : repr_(std::move(r)) {}
  Repr repr_;
};

// (gamma, sigma^2, nu) with truncation function 1_{|x|<=1}.
struct CharacteristicTriplet {
  double gamma = 0.0;
  double sigma2 = 0.0;
  LevyMeasure nu;
};

// Subordinator: drift a >= 0 plus a Levy measure on (0, inf).
struct SubordinatorSpec {
  double drift = 0.0;
  LevyMeasure nu;
};

struct COGARCHSpec {
  double beta = 1.0;
  double eta = 1.0;
  double phi = 1.0;
  LevyMeasure nu_s;  // on (0, inf)
};

enum class Convergence { converges, unknown, diverges };

struct Support {
  double lo = 0.0;
  double hi = kInf;
  bool singleton = false;
};

// gamma_0 = gamma - int_{[-1,1]} x nu(dx); the pathwise drift once the
// finite-variation small jumps are uncompensated.
double gamma0(const CharacteristicTriplet& t);

// E[xi_1] = gamma + int_{|x|>1} x nu(dx). +inf when only the positive tail
// has infinite first moment; throws mean_undefined when both tails do.
double mean_xi(const CharacteristicTriplet& t);

// Sufficient-condition check: Converges requires E[xi_1] > 0 together with a
// finite log-moment of nu_eta. The full necessary-and-sufficient criterion is
// not implemented; Unknown is an honest verdict.
Convergence convergence_check(const CharacteristicTriplet& t,
                              const SubordinatorSpec& s);

Support support_of_functional(const CharacteristicTriplet& t,
                              const SubordinatorSpec& s);

// COGARCH volatility as a generalized OU pair: xi has sigma^2 = 0,
// gamma_0 = eta and jump measure the image of nu_S under s -> -log(1+phi s);
// the integrator is the deterministic drift beta.
std::pair<CharacteristicTriplet, SubordinatorSpec> cogarch_to_gou(
    const COGARCHSpec& c);

// int_(0,inf) log(1 + phi y) nu_S(dy); the COGARCH stationarity integral.
double cogarch_log_moment(const COGARCHSpec& c);

}  // namespace expfunc
