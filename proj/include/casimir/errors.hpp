#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace casimir {

enum class ErrorCode {
  invalid_argument,
  singular_frequency,
  singular_spectral_point,
  derivative_estimate_failed,
  on_pole,
  limit_not_attained,
  tolerance_not_met,
  extrapolation_unreliable,
  out_of_range,
  winding_ambiguous,
  missed_roots,
  polish_failed,
  contour_degenerate,
  tail_not_converged,
  sum_not_converged,
  series_outside_radius,
};

/// Machine-readable name, e.g. "tolerance-not-met".
std::string_view to_string(ErrorCode code);

/// Exception type thrown by every library operation. `achieved()` carries the
/// error estimate reached before giving up, when one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail,
        std::optional<double> achieved = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<double> achieved() const noexcept { return achieved_; }

 private:
  ErrorCode code_;
  std::optional<double> achieved_;
};

}  // namespace casimir
