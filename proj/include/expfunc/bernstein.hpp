#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "expfunc/levy.hpp"

namespace expfunc {

// Laplace exponent psi(u), u >= 0, psi(0) = 0. Derivatives fall back to
// central differences with step 1e-4 * u when no analytic form is attached.
class LaplaceExponent {
 public:
  LaplaceExponent() = default;
  explicit LaplaceExponent(std::function<double(double)> value,
                           std::function<double(double)> d1 = nullptr,
                           std::function<double(double)> d2 = nullptr)
      : value_(std::move(value)), d1_(std::move(d1)), d2_(std::move(d2)) {}

  double operator()(double u) const { return value_(u); }
  double d1(double u) const;
  double d2(double u) const;
  bool valid() const { return static_cast<bool>(value_); }
  bool has_analytic_d1() const { return static_cast<bool>(d1_); }
  bool has_analytic_d2() const { return static_cast<bool>(d2_); }

 private:
  std::function<double(double)> value_;
  std::function<double(double)> d1_;
  std::function<double(double)> d2_;
};

// k-function of the Bernstein representation nu(dt) = k(t)/t dt.
class KFunction {
 public:
  struct ExpAtom {
    double weight;
    double rate;
  };
  enum class Kind { atoms, step, callable };

  // k(t) = sum_i w_i e^{-r_i t}
  static KFunction atoms(std::vector<ExpAtom> a);
  // k(t) = height * 1_{t <= cut}
  static KFunction step(double height, double cut);
  static KFunction callable(std::function<double(double)> k, double grid_lo,
                            double grid_hi, int grid_points = 400);

  Kind kind() const { return kind_; }
  const std::vector<ExpAtom>& exp_atoms() const { return atoms_; }
  double step_height() const { return a_; }
  double step_cut() const { return b_; }
  double grid_lo() const { return a_; }
  double grid_hi() const { return b_; }
  int grid_points() const { return n_; }

  double operator()(double t) const;
  double k0() const;       // k(0+)
  double kprime0() const;  // k'(0+), numeric for callables

 private:
  KFunction(Kind k) : kind_(k) {}
  Kind kind_;
  std::vector<ExpAtom> atoms_;
  std::function<double(double)> fn_;
  double a_ = 0.0, b_ = 0.0;
  int n_ = 0;
};

// Bernstein representation psi(u) = a u + int (1 - e^{-ut}) nu(dt). The
// measure may be given as a finite-activity LevyMeasure, through a k-function
// (possibly infinite activity), or both.
struct BernsteinRepr {
  double drift = 0.0;
  std::optional<KFunction> k;
  std::optional<std::function<double(double)>> density;  // Levy density m(t)
  std::optional<LevyMeasure> nu;

  static BernsteinRepr gamma(double shape, double rate);
  static BernsteinRepr step_k(double height, double cut, double drift = 0.0);
  static BernsteinRepr from_subordinator(const SubordinatorSpec& s);

  LaplaceExponent laplace_exponent() const;
};

// Stieltjes representation of a complete Bernstein function,
// psi(u) = a u + int u/(u+x) drho(x), atomic rho.
struct StieltjesRepr {
  double drift = 0.0;
  std::vector<std::pair<double, double>> atoms;  // (location x > 0, mass)
};

struct CMOptions {
  double grid_lo = 1e-3;
  double grid_hi = 1e3;
  int grid_points = 200;
  int max_order = 8;
  double rel_tol = 1e-7;
};

// Numerical semi-decision for complete monotonicity: a failure is certified
// by a sign witness, a pass only holds up to the checked order on the grid.
struct CMVerdict {
  bool passed = false;
  int order = 0;         // pass: highest order checked; fail: violated order
  double witness = 0.0;  // fail: left end of the violating stencil
  double margin = 0.0;   // fail: violation relative to the local noise scale
  std::string source;

  static CMVerdict pass(int order, std::string source = {});
  static CMVerdict fail(int order, double witness, double margin,
                        std::string source = {});
};

// Checks (-1)^n D^n g >= -tol * scale for divided differences up to
// max_order on a geometric grid.
CMVerdict is_completely_monotone(const std::function<double(double)>& g,
                                 const CMOptions& opt = {});

// Closed-form n-th derivative of (1 - e^{-lambda x})/x.
double cm_exp_ratio_derivative(int n, double lambda, double x);

CMVerdict is_bernstein(const LaplaceExponent& psi, const CMOptions& opt = {});

// A BF is a complete BF exactly when its Levy measure has a CM density.
CMVerdict is_complete_bernstein(const BernsteinRepr& repr,
                                const CMOptions& opt = {});

// c in (0,1): psi(u) - psi(cu); c > 1: psi(cu) - psi(u).
LaplaceExponent c_factor(const LaplaceExponent& psi, double c);

// Selfdecomposable iff u psi'(u) is a BF.
CMVerdict is_selfdecomposable(const LaplaceExponent& psi,
                              const CMOptions& opt = {});

// GGC iff the k-function is completely monotone.
CMVerdict is_ggc(const BernsteinRepr& repr, const CMOptions& opt = {});

// Driving subordinator X of mu in L+: same drift, nu_X((t,inf)) = k(t).
SubordinatorSpec sd_to_driving(const BernsteinRepr& repr);

// psi_mu(u) = int_0^u psi_X(v)/v dv; the law of int e^{-t} dX_t.
LaplaceExponent exp_map_unit_drift(const SubordinatorSpec& x);

// k(t) = int e^{-tx} drho(x) and back; exact on atomic representations.
BernsteinRepr bo_to_ggc(const StieltjesRepr& rho);
StieltjesRepr ggc_to_bo(const BernsteinRepr& repr);

// psi(u) = sum_{i>=0} f(c^i u), truncated once the geometric tail bound
// f'(0+) u c^{N+1}/(1-c) drops below tol.
LaplaceExponent semi_sd_synthesize(const LaplaceExponent& f, double c,
                                   double tol);

// Closed-form exponents.
LaplaceExponent psi_from_subordinator(const SubordinatorSpec& s);
LaplaceExponent psi_gamma(double shape, double rate);
LaplaceExponent psi_poisson(double rate);
LaplaceExponent psi_dirac(double a);
LaplaceExponent psi_inverse_gamma(double alpha, double beta);
LaplaceExponent psi_stable(double alpha, double scale);

}  // namespace expfunc
