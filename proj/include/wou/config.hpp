#pragma once

// Experiment configuration: an INI file with [experiment], [spectrum] and
// [params] sections. Unknown sections or keys are rejected with their path.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wou/spectral_core.hpp"

namespace wou {

/// Invalid command line or configuration (exit status 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SpectrumConfig {
  std::optional<double> scale;
  std::optional<double> exponent;
  std::optional<std::size_t> modes;
  std::optional<std::vector<double>> values;  // explicit q_1..q_N, overrides the power law

  friend bool operator==(const SpectrumConfig&, const SpectrumConfig&) = default;
};

struct ExperimentConfig {
  std::string kind;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  SpectrumConfig spectrum;
  std::map<std::string, std::string> params;  // kind-specific, validated against the kind

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

constexpr std::uint64_t kDefaultSeed = 42;

/// Parses INI text and validates it against the experiment registry.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical INI text: fixed section order, sorted keys, normalized numbers.
/// parse_config(to_ini(c)) == c for every valid c.
std::string to_ini(const ExperimentConfig& config);

/// Applies WOU_SEED and WOU_OUT_DIR from the environment.
void apply_environment(ExperimentConfig& config);

/// The spectrum requested by the config; `default_modes` applies when no mode count is given.
Spectrum build_spectrum(const SpectrumConfig& config, std::size_t default_modes);

/// Strict value parsers; `path` names the field in error messages.
double parse_number(std::string_view text, const std::string& path);
std::uint64_t parse_count(std::string_view text, const std::string& path);
std::vector<double> parse_list(std::string_view text, const std::string& path);

}  // namespace wou
