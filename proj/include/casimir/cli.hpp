#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "casimir/errors.hpp"
#include "casimir/spectral.hpp"

// Batch front end. A run is described by flat key=value text, one pair per
// line, `#` starting a comment; command-line pairs override file values.

namespace casimir::cli {

enum class Command { energy, entropy, force, gcurve, modes, nernst, sweep };

struct RunConfig {
  Command command = Command::energy;
  CavityConfig cavity;

  // Thermal state: one of a single tau, an explicit grid, or the schedule
  // tau0 2^{-j}, j < tau_count, which adds an extrapolated tau = 0 row.
  std::optional<double> tau;
  std::vector<double> taus;
  std::optional<double> tau0;
  std::optional<int> tau_count;

  // Channel; absent k means the k-integrated quantity.
  std::optional<Polarization> polarization;
  std::optional<double> k;

  std::optional<double> xi_max;
  int xi_count = 200;

  std::optional<double> re_min, re_max, im_min, im_max;
  int max_count = 50;

  double Lambda = 1.0;

  // sweep: parameter in {L, tau, gamma0, Lambda} over `values`.
  std::string sweep;
  std::vector<double> values;
  std::string quantity = "energy";

  std::optional<double> rel_tol;
  std::optional<double> abs_tol;
  std::string output;

  /// Keys given explicitly, in canonical order; used to echo the config.
  std::vector<std::string> keys;
};

/// Invalid configuration; `key()` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& detail);
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Key=value pairs from text. Throws ConfigError on malformed lines.
std::vector<std::pair<std::string, std::string>> parse_pairs(const std::string& text);

/// Validated RunConfig from key=value text; later pairs override earlier
/// ones. Throws ConfigError for unknown keys, missing required keys and
/// values violating model or grid invariants.
RunConfig parse_config(const std::string& text);
RunConfig parse_config(const std::vector<std::pair<std::string, std::string>>& pairs);

/// The resolved configuration as key=value lines that parse back to an
/// equivalent RunConfig.
std::string to_text(const RunConfig& cfg);

std::string version();

/// Runs the command and writes CSV to `out`, preceded by `#` lines with the
/// version and the resolved configuration. Returns 0 on success, 1 when a
/// tolerance or convergence target is missed, 2 on invalid input; failures
/// write one `error=` line to `err`.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Exit status for a library error.
int exit_code(ErrorCode code);

}  // namespace casimir::cli
