// Batch front door: parse JSON process specs, dispatch to the solvers,
// class/range checkers and simulators, and emit CSV/JSON artifacts with
// CI-friendly exit codes:
//   0  success / verdict passed
//   1  usage or IO error
//   2  mathematical rejection (CertifiedFail, NotInRange, residual above
//      tolerance, non-stationary parameters)
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "expfunc/bernstein.hpp"
#include "expfunc/density.hpp"
#include "expfunc/funcmap.hpp"
#include "expfunc/json_io.hpp"
#include "expfunc/montecarlo.hpp"
#include "expfunc/range.hpp"
#include "expfunc/version.hpp"

using namespace expfunc;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRejected = 2;

void emit(const json& j, const std::string& out_path) {
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error(errc::bad_input, "cannot write " + out_path);
  out << text;
}

json verdict_json(const CMVerdict& v) {
  json j;
  j["outcome"] = v.passed ? "pass" : "fail";
  j["order"] = v.order;
  if (!v.passed) j["witness"] = v.witness;
  if (!v.source.empty()) j["source"] = v.source;
  return j;
}

json base_report(const std::string& hash, const std::string& command) {
  json j;
  j["tool"] = "expfunc";
  j["version"] = kVersion;
  j["command"] = command;
  j["spec_hash"] = hash;
  return j;
}

struct GridArgs {
  double t_max = 20.0;
  double h = 1e-3;
  void attach(CLI::App* cmd) {
    cmd->add_option("--grid-max", t_max, "right end of the solver grid");
    cmd->add_option("--grid-step", h, "uniform grid step");
  }
  GridSpec spec() const { return GridSpec{t_max, h, true, 1e-6, 4}; }
};

int run_solve_density(const std::string& spec_path, const GridArgs& grid,
                      const std::string& out_path) {
  ProcessSpec spec = load_process_spec(spec_path);
  GridDensity d;
  if (spec.xi.nu.mass_plus() == 0.0) {
    d = solve_case_i(spec.xi, spec.eta, grid.spec());
  } else if (spec.xi.nu.mass_minus() == 0.0 && spec.eta.nu.is_zero()) {
    d = solve_case_ii(spec.xi, spec.eta, grid.spec());
  } else {
    throw Error(errc::precondition_violated,
                "no forward solver for two-sided jumps; use verify");
  }
  CsvHeader h;
  h["spec_hash"] = spec.hash;
  h["support_lo"] = format_double(d.support.lo);
  h["support_hi"] = format_double(d.support.hi);
  write_density_csv(out_path.empty() ? "density.csv" : out_path, d, h);
  return kExitOk;
}

int run_simulate(const std::string& spec_path, SimConfig cfg,
                 const std::string& target_csv, const std::string& out_path,
                 const std::string& samples_path) {
  ProcessSpec spec = load_process_spec(spec_path);
  EmpiricalDistribution emp = simulate_functional(spec.xi, spec.eta, cfg);
  json j = base_report(spec.hash, "simulate");
  j["n"] = emp.samples.size();
  j["seed"] = cfg.seed;
  j["diffusion_step"] = cfg.diffusion_step;
  j["mean"] = emp.mean();
  j["sd"] = emp.sd();
  for (int q : {1, 5, 10, 25, 50, 75, 90, 95, 99}) {
    char key[8];
    std::snprintf(key, sizeof(key), "q%02d", q);
    j[key] = emp.quantile(q / 100.0);
  }
  j["truncation_bound"] = emp.truncation_bound;
  if (!target_csv.empty()) {
    GridDensity target = read_density_csv(target_csv);
    std::vector<double> cum(target.f.size(), 0.0);
    for (std::size_t i = 1; i < target.f.size(); ++i)
      cum[i] = cum[i - 1] + 0.5 * target.h * (target.f[i - 1] + target.f[i]);
    GridCDF cdf;
    cdf.t0 = target.t0;
    cdf.h = target.h;
    cdf.F = std::move(cum);
    j["ks_vs_target"] = ks_distance(emp, cdf);
  }
  if (!samples_path.empty()) {
    std::ofstream out(samples_path, std::ios::binary);
    out << "v\n";
    for (double v : emp.samples) out << format_double(v) << "\n";
  }
  emit(j, out_path);
  return kExitOk;
}

int run_check_class(const std::string& spec_path, const std::string& test,
                    const CMOptions& opt, const std::string& out_path) {
  LawSpec law = load_law_spec(spec_path);
  CMVerdict v;
  if (test == "selfdecomposable") {
    v = is_selfdecomposable(law.psi, opt);
  } else if (test == "ggc") {
    if (!law.repr) throw Error(errc::k_unavailable, "law has no k-function");
    v = is_ggc(*law.repr, opt);
  } else if (test == "bernstein") {
    v = is_bernstein(law.psi, opt);
  } else if (test == "complete-bernstein") {
    if (!law.repr)
      throw Error(errc::density_unavailable, "law has no density");
    v = is_complete_bernstein(*law.repr, opt);
  } else {
    throw Error(errc::bad_input, "unknown class test: " + test);
  }
  json j = base_report(law.hash, "check-class");
  j["law"] = law.name;
  j["test"] = test;
  j["verdict"] = verdict_json(v);
  emit(j, out_path);
  return v.passed ? kExitOk : kExitRejected;
}

int run_check_range(const std::string& spec_path, const CMOptions& opt,
                    const std::string& out_path) {
  const std::string text = [&] {
    std::ifstream in(spec_path, std::ios::binary);
    if (!in) throw Error(errc::bad_input, "cannot open " + spec_path);
    return std::string(std::istreambuf_iterator<char>(in), {});
  }();
  const json doc = json::parse(text);
  LawSpec law = parse_law_spec(text);
  CharacteristicTriplet xi;
  xi.gamma = doc.at("xi").at("gamma").get<double>();
  xi.sigma2 = doc.at("xi").at("sigma2").get<double>();
  xi.nu = parse_levy_measure_json(doc.at("xi").at("nu").dump());
  RangeVerdict v = range_membership(xi, law.psi, opt);
  json j = base_report(fnv1a_hex(text), "check-range");
  j["law"] = law.name;
  switch (v.outcome) {
    case RangeVerdict::Outcome::in_range:
      j["outcome"] = "in_range";
      break;
    case RangeVerdict::Outcome::not_in_range:
      j["outcome"] = "not_in_range";
      j["witness"] = v.witness;
      j["order"] = v.order;
      break;
    case RangeVerdict::Outcome::undecided:
      j["outcome"] = "undecided";
      break;
  }
  j["analytic_derivatives"] = v.analytic_derivatives;
  emit(j, out_path);
  return v.outcome == RangeVerdict::Outcome::in_range ? kExitOk
                                                      : kExitRejected;
}

int run_cogarch(const std::string& spec_path, const std::string& mode,
                const GridArgs& grid, const std::string& out_path) {
  ProcessSpec spec = load_process_spec(spec_path);
  if (!spec.from_cogarch)
    throw Error(errc::bad_input, "spec has no cogarch block");
  CsvHeader h;
  h["spec_hash"] = spec.hash;
  if (mode == "density") {
    GridDensity d = solve_cogarch(spec.cogarch, grid.spec());
    write_density_csv(out_path.empty() ? "cogarch_density.csv" : out_path, d,
                      h);
    return kExitOk;
  }
  if (mode == "cdf") {
    const auto* cp = std::get_if<LevyMeasure::CompoundPoisson>(
        &spec.cogarch.nu_s.repr());
    if (!cp || cp->jump.kind() != JumpLaw::Kind::dirac ||
        cp->jump.param() != 1.0)
      throw Error(errc::bad_input,
                  "cdf mode needs nu_S = compound Poisson with unit jumps");
    GridCDF cdf = cogarch_poisson_cdf(spec.cogarch.beta, spec.cogarch.eta,
                                      cp->rate, spec.cogarch.phi, grid.spec());
    write_cdf_csv(out_path.empty() ? "cogarch_cdf.csv" : out_path, cdf, h);
    return kExitOk;
  }
  throw Error(errc::bad_input, "mode must be density or cdf");
}

int run_poisson_selfsim(double c, double q, const GridArgs& grid,
                        const std::string& out_path,
                        const std::string& report_path) {
  SelfsimResult res = poisson_selfsim_iterate(c, q, grid.t_max, grid.h);
  CsvHeader h;
  h["c"] = format_double(c);
  h["q"] = format_double(q);
  h["sup_change"] = format_double(res.sup_change);
  h["iterations"] = std::to_string(res.iterations);
  h["converged"] = res.converged ? "true" : "false";
  write_cdf_csv(out_path.empty() ? "selfsim_cdf.csv" : out_path, res.cdf, h);
  json j = base_report(fnv1a_hex(format_double(c) + "," + format_double(q)),
                       "poisson-selfsim");
  j["c"] = c;
  j["q"] = q;
  j["sup_change"] = res.sup_change;
  j["iterations"] = res.iterations;
  j["converged"] = res.converged;
  emit(j, report_path);
  return kExitOk;
}

int run_verify(const std::string& spec_path, const std::string& density_path,
               double tolerance, const std::string& out_path) {
  ProcessSpec spec = load_process_spec(spec_path);
  GridDensity d = read_density_csv(density_path);
  ResidualReport rep = residual_case_iii(spec.xi, spec.eta, d);
  json j = base_report(spec.hash, "verify");
  j["equation"] = rep.equation;
  j["max_residual"] = rep.max_abs;
  j["tolerance"] = tolerance;
  j["density_rows"] = d.f.size();
  const bool ok = rep.max_abs <= tolerance;
  j["outcome"] = ok ? "pass" : "fail";
  if (!ok) {
    double worst = 0.0, at = 0.0;
    for (std::size_t i = 0; i < rep.residual.size(); ++i)
      if (std::abs(rep.residual[i]) > worst) {
        worst = std::abs(rep.residual[i]);
        at = rep.t[i];
      }
    j["witness"] = at;
  }
  emit(j, out_path);
  return ok ? kExitOk : kExitRejected;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exponential functionals of Levy processes: solvers, class "
               "tests, range checks and Monte Carlo"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("expfunc ") + kVersion);

  std::string spec_path, out_path, density_path, target_csv, samples_path;
  std::string test = "selfdecomposable", mode = "density";
  double tolerance = 1e-4, c_param = 2.0, q_param = 0.5;
  GridArgs grid;
  CMOptions cm;
  SimConfig sim;

  auto* solve =
      app.add_subcommand("solve-density", "Volterra density of the functional");
  solve->add_option("--spec", spec_path, "process spec JSON")->required();
  grid.attach(solve);
  solve->add_option("--out", out_path, "output CSV path");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo oracle");
  simulate->add_option("--spec", spec_path)->required();
  simulate->add_option("--samples", sim.n_samples);
  simulate->add_option("--seed", sim.seed);
  simulate->add_option("--step", sim.diffusion_step);
  simulate->add_option("--shards", sim.shards);
  simulate->add_option("--target-csv", target_csv,
                       "density CSV to score with a KS distance");
  simulate->add_option("--samples-out", samples_path);
  simulate->add_option("--out", out_path, "summary JSON path");

  auto* check_class =
      app.add_subcommand("check-class", "distribution class verdicts");
  check_class->add_option("--spec", spec_path)->required();
  check_class->add_option(
      "--test", test, "selfdecomposable|ggc|bernstein|complete-bernstein");
  check_class->add_option("--order", cm.max_order);
  check_class->add_option("--tolerance", cm.rel_tol);
  check_class->add_option("--out", out_path);

  auto* check_range =
      app.add_subcommand("check-range", "membership in the range of Phi_xi");
  check_range->add_option("--spec", spec_path)->required();
  check_range->add_option("--order", cm.max_order);
  check_range->add_option("--out", out_path);

  auto* cogarch = app.add_subcommand("cogarch", "COGARCH stationary law");
  cogarch->add_option("--spec", spec_path)->required();
  cogarch->add_option("--mode", mode, "density|cdf");
  grid.attach(cogarch);
  cogarch->add_option("--out", out_path);

  auto* selfsim = app.add_subcommand(
      "poisson-selfsim", "fixed point of the Poisson-Poisson CDF relation");
  selfsim->add_option("--c", c_param)->required();
  selfsim->add_option("--q", q_param)->required();
  grid.attach(selfsim);
  selfsim->add_option("--out", out_path, "CDF CSV path");
  selfsim->add_option("--report", density_path, "JSON report path");

  auto* verify = app.add_subcommand(
      "verify", "residual certification of a tabulated density");
  verify->add_option("--spec", spec_path)->required();
  verify->add_option("--density", density_path)->required();
  verify->add_option("--tolerance", tolerance);
  verify->add_option("--out", out_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return run_solve_density(spec_path, grid, out_path);
    if (simulate->parsed())
      return run_simulate(spec_path, sim, target_csv, out_path, samples_path);
    if (check_class->parsed())
      return run_check_class(spec_path, test, cm, out_path);
    if (check_range->parsed()) return run_check_range(spec_path, cm, out_path);
    if (cogarch->parsed()) return run_cogarch(spec_path, mode, grid, out_path);
    if (selfsim->parsed())
      return run_poisson_selfsim(c_param, q_param, grid, out_path,
                                 density_path);
    if (verify->parsed())
      return run_verify(spec_path, density_path, tolerance, out_path);
  } catch (const Error& e) {
    std::cerr << "{\"error\": \"" << e.what() << "\"}\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "{\"error\": \"" << e.what() << "\"}\n";
    return kExitUsage;
  }
  return kExitUsage;
}
