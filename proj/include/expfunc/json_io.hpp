#pragma once

#include <map>
#include <optional>
#include <string>

#include "expfunc/bernstein.hpp"
#include "expfunc/density.hpp"
#include "expfunc/levy.hpp"

namespace expfunc {

// A process-spec document: either an explicit (xi, eta) pair or a COGARCH
// block converted on load.
struct ProcessSpec {
  CharacteristicTriplet xi;
  SubordinatorSpec eta;
  bool from_cogarch = false;
  COGARCHSpec cogarch;
  std::string hash;  // FNV-1a of the document bytes
};

// A law document for the class and range checkers.
struct LawSpec {
  std::string name;
  LaplaceExponent psi;
  std::optional<BernsteinRepr> repr;
  std::string hash;
};

ProcessSpec parse_process_spec(const std::string& text);
ProcessSpec load_process_spec(const std::string& path);
LawSpec parse_law_spec(const std::string& text);
LawSpec load_law_spec(const std::string& path);

LevyMeasure parse_levy_measure_json(const std::string& text);

std::string fnv1a_hex(const std::string& bytes);
std::string format_double(double v);  // shortest round-trip decimal

using CsvHeader = std::map<std::string, std::string>;

void write_density_csv(const std::string& path, const GridDensity& d,
                       const CsvHeader& header);
void write_cdf_csv(const std::string& path, const GridCDF& d,
                   const CsvHeader& header);
GridDensity read_density_csv(const std::string& path);

}  // namespace expfunc
