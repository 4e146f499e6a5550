#pragma once

// The experiment kinds behind the `wou` command: each one turns a validated
// configuration into a report of checks against closed-form or oracle targets.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wou/config.hpp"
#include "wou/report.hpp"
#include "wou/spectral_core.hpp"

namespace wou {

/// A module error raised while running an experiment (exit status 3).
class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ParamType { number, count, list };

struct ParamSpec {
  std::string key;
  ParamType type = ParamType::number;
  std::string default_value;
  std::string help;
};

class ExperimentContext;

struct ExperimentKind {
  std::string name;
  std::string summary;
  std::size_t default_modes = 1;
  std::vector<ParamSpec> params;
  std::function<Report(const ExperimentContext&)> run;
};

/// Resolved parameters (file value or default) for one run.
class ExperimentContext {
 public:
  ExperimentContext(const ExperimentConfig& config, const ExperimentKind& kind);

  const Spectrum& spectrum() const { return spectrum_; }
  std::uint64_t seed() const { return seed_; }

  double number(const std::string& key) const;
  std::size_t count(const std::string& key) const;
  std::vector<double> list(const std::string& key) const;

  /// Effective configuration, echoed into the report (no output paths).
  std::map<std::string, std::string> echo() const;

 private:
  const std::string& raw(const std::string& key) const;

  const ExperimentConfig& config_;
  const ExperimentKind& kind_;
  Spectrum spectrum_;
  std::uint64_t seed_;
  std::map<std::string, std::string> values_;
};

const std::vector<ExperimentKind>& experiment_kinds();

/// Throws UsageError for unknown kinds.
const ExperimentKind& find_kind(std::string_view name);

/// Rejects unknown or malformed [params] entries for the config's kind.
void validate_params(const ExperimentConfig& config);

/// Runs the configured experiment. Module input errors come back as
/// ExperimentError prefixed with the kind.
Report run_experiment(const ExperimentConfig& config);

/// A config with only the kind and seed set (all published defaults).
ExperimentConfig default_config(std::string kind, std::uint64_t seed);

}  // namespace wou
