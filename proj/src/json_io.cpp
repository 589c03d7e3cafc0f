#include "expfunc/json_io.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "expfunc/version.hpp"

namespace expfunc {

using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::bad_input, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

JumpLaw parse_jump(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "dirac") return JumpLaw::dirac(j.at("at").get<double>());
  if (type == "exponential")
    return JumpLaw::exponential(j.at("rate").get<double>());
  if (type == "normal_squared") return JumpLaw::normal_squared();
  if (type == "heavy_log_tail") return JumpLaw::heavy_log_tail();
  throw Error(errc::bad_input, "unknown jump law: " + type);
}

LevyMeasure parse_measure(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "zero") return LevyMeasure::zero();
  if (type == "compound_poisson")
    return LevyMeasure::compound_poisson(j.at("rate").get<double>(),
                                         parse_jump(j.at("jump")));
  if (type == "exponential_tail") {
    bool negative = false;
    if (j.contains("side")) negative = j.at("side") == "negative";
    return LevyMeasure::exponential_tail(j.at("k").get<double>(),
                                         j.at("theta").get<double>(),
                                         negative);
  }
  if (type == "tabulated")
    return LevyMeasure::tabulated(j.at("x").get<std::vector<double>>(),
                                  j.at("tail").get<std::vector<double>>());
  if (type == "cogarch_image")
    return LevyMeasure::cogarch_image(j.at("phi").get<double>(),
                                      parse_measure(j.at("base")));
  if (type == "superposition") {
    std::vector<LevyMeasure> parts;
    for (const auto& p : j.at("parts")) parts.push_back(parse_measure(p));
    return LevyMeasure::superpose(std::move(parts));
  }
  throw Error(errc::bad_input, "unknown measure type: " + type);
}

}  // namespace

ProcessSpec parse_process_spec(const std::string& text) {
  const json j = json::parse(text);
  ProcessSpec spec;
  spec.hash = fnv1a_hex(text);
  if (j.contains("cogarch")) {
    const json& c = j.at("cogarch");
    spec.from_cogarch = true;
    spec.cogarch.beta = c.at("beta").get<double>();
    spec.cogarch.eta = c.at("eta").get<double>();
    spec.cogarch.phi = c.at("phi").get<double>();
    spec.cogarch.nu_s = parse_measure(c.at("nuS"));
    auto [xi, eta] = cogarch_to_gou(spec.cogarch);
    spec.xi = xi;
    spec.eta = eta;
    return spec;
  }
  const json& x = j.at("xi");
  spec.xi.gamma = x.at("gamma").get<double>();
  spec.xi.sigma2 = x.at("sigma2").get<double>();
  spec.xi.nu = parse_measure(x.at("nu"));
  const json& e = j.at("eta");
  spec.eta.drift = e.at("drift").get<double>();
  spec.eta.nu = parse_measure(e.at("nu"));
  if (spec.eta.nu.mass_minus() > 0.0)
    throw Error(errc::bad_input, "eta must be a subordinator");
  if (spec.eta.drift < 0.0)
    throw Error(errc::bad_input, "eta drift must be >= 0");
  return spec;
}

ProcessSpec load_process_spec(const std::string& path) {
  return parse_process_spec(slurp(path));
}

LawSpec parse_law_spec(const std::string& text) {
  const json j = json::parse(text);
  const json& l = j.at("law");
  const std::string type = l.at("type").get<std::string>();
  LawSpec spec;
  spec.name = type;
  spec.hash = fnv1a_hex(text);
  if (type == "gamma") {
    const double shape = l.at("shape").get<double>();
    const double rate = l.at("rate").get<double>();
    spec.psi = psi_gamma(shape, rate);
    spec.repr = BernsteinRepr::gamma(shape, rate);
    return spec;
  }
  if (type == "poisson") {
    spec.psi = psi_poisson(l.at("rate").get<double>());
    return spec;
  }
  if (type == "dirac") {
    spec.psi = psi_dirac(l.at("at").get<double>());
    return spec;
  }
  if (type == "inverse_gamma") {
    spec.psi = psi_inverse_gamma(l.at("alpha").get<double>(),
                                 l.at("beta").get<double>());
    return spec;
  }
  if (type == "step_k") {
    const double height = l.at("height").get<double>();
    const double cut = l.at("cut").get<double>();
    const double drift = l.value("drift", 0.0);
    spec.repr = BernsteinRepr::step_k(height, cut, drift);
    spec.psi = spec.repr->laplace_exponent();
    return spec;
  }
  if (type == "stable") {
    spec.psi = psi_stable(l.at("alpha").get<double>(),
                          l.at("scale").get<double>());
    return spec;
  }
  if (type == "bo_atoms") {
    StieltjesRepr rho;
    rho.drift = l.value("drift", 0.0);
    for (const auto& a : l.at("atoms"))
      rho.atoms.emplace_back(a.at("x").get<double>(),
                             a.at("mass").get<double>());
    spec.repr = bo_to_ggc(rho);
    spec.psi = spec.repr->laplace_exponent();
    return spec;
  }
  throw Error(errc::bad_input, "unknown law type: " + type);
}

LawSpec load_law_spec(const std::string& path) {
  return parse_law_spec(slurp(path));
}

LevyMeasure parse_levy_measure_json(const std::string& text) {
  return parse_measure(json::parse(text));
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xF];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf);
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

void write_csv(const std::string& path, const CsvHeader& header,
               const char* columns, const std::vector<double>& t,
               const std::vector<double>& v) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(errc::bad_input, "cannot write " + path);
  out << "# expfunc " << kVersion << "\n";
  for (const auto& [key, val] : header) out << "# " << key << ": " << val << "\n";
  out << columns << "\n";
  for (std::size_t i = 0; i < t.size(); ++i)
    out << format_double(t[i]) << "," << format_double(v[i]) << "\n";
}

}  // namespace

void write_density_csv(const std::string& path, const GridDensity& d,
                       const CsvHeader& header) {
  CsvHeader h = header;
  h["grid_t0"] = format_double(d.t0);
  h["grid_h"] = format_double(d.h);
  h["normalization_mass"] = format_double(d.mass());
  h["tail_mass"] = format_double(d.tail_mass);
  std::vector<double> ts(d.f.size());
  for (std::size_t i = 0; i < d.f.size(); ++i) ts[i] = d.t(i);
  write_csv(path, h, "t,f", ts, d.f);
}

void write_cdf_csv(const std::string& path, const GridCDF& d,
                   const CsvHeader& header) {
  CsvHeader h = header;
  h["grid_t0"] = format_double(d.t0);
  h["grid_h"] = format_double(d.h);
  if (d.atom_mass > 0.0) {
    h["atom_pos"] = format_double(d.atom_pos);
    h["atom_mass"] = format_double(d.atom_mass);
  }
  std::vector<double> ts(d.F.size());
  for (std::size_t i = 0; i < d.F.size(); ++i) ts[i] = d.t(i);
  write_csv(path, h, "t,F", ts, d.F);
}

GridDensity read_density_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::bad_input, "cannot open " + path);
  std::string line;
  std::vector<double> ts, vs;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("t,", 0) == 0) continue;  // column header
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw Error(errc::bad_input, "malformed CSV row: " + line);
    ts.push_back(std::stod(line.substr(0, comma)));
    vs.push_back(std::stod(line.substr(comma + 1)));
  }
  if (ts.size() < 3) throw Error(errc::bad_input, "CSV has too few rows");
  GridDensity d;
  d.t0 = ts.front();
  d.h = ts[1] - ts[0];
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (std::abs(ts[i] - ts[i - 1] - d.h) > 1e-9 * std::max(1.0, d.h))
      throw Error(errc::bad_input, "CSV grid is not uniform");
  }
  d.f = std::move(vs);
  const double m = d.mass();
  d.normalized = std::abs(m - 1.0) <= 1e-6;
  return d;
}

}  // namespace expfunc
