#pragma once

#include <stdexcept>
#include <string>

namespace expfunc {

// Failure modes with a mathematical meaning. Verdict-style results
// (CMVerdict, RangeVerdict, MonotoneProfile, ...) are returned as values;
// these exceptions signal inputs on which an operation is not defined.
enum class errc {
  small_jumps_not_integrable,
  mean_undefined,
  precondition_violated,
  not_stationary,
  invalid_factor,
  evaluation_failed,
  not_anchored_at_zero,
  density_unavailable,
  k_unavailable,
  not_selfdecomposable_repr,
  log_moment_infinite,
  representation_not_recoverable,
  tail_not_summable,
  integral_diverged,
  singular_at_left_edge,
  edge_condition_violated,
  truncation_budget_exceeded,
  factor_not_compound_poisson,
  zero_gaussian_part,
  drift_compensation_too_small,
  not_cm,
  bad_input,
};

const char* to_string(errc code);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace expfunc
