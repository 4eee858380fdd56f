#include "casimir/errors.hpp"

namespace casimir {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::singular_frequency: return "singular-frequency";
    case ErrorCode::singular_spectral_point: return "singular-spectral-point";
    case ErrorCode::derivative_estimate_failed: return "derivative-estimate-failed";
    case ErrorCode::on_pole: return "on-pole";
    case ErrorCode::limit_not_attained: return "limit-not-attained";
    case ErrorCode::tolerance_not_met: return "tolerance-not-met";
    case ErrorCode::extrapolation_unreliable: return "extrapolation-unreliable";
    case ErrorCode::out_of_range: return "out-of-range";
    case ErrorCode::winding_ambiguous: return "winding-ambiguous";
    case ErrorCode::missed_roots: return "missed-roots";
    case ErrorCode::polish_failed: return "polish-failed";
    case ErrorCode::contour_degenerate: return "contour-degenerate";
    case ErrorCode::tail_not_converged: return "tail-not-converged";
    case ErrorCode::sum_not_converged: return "sum-not-converged";
    case ErrorCode::series_outside_radius: return "series-outside-radius";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& detail,
             std::optional<double> achieved)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code),
      achieved_(achieved) {}

}  // namespace casimir
