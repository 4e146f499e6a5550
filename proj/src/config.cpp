#include "wou/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "wou/experiments.hpp"
#include "wou/report.hpp"

namespace wou {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + format_double(xs[i]);
  return out;
}

}  // namespace

double parse_number(std::string_view text, const std::string& path) {
  text = trim(text);
  double x = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(x)) {
    throw UsageError(path + ": expected a finite number, got '" + std::string(text) + "'");
  }
  return x;
}

std::uint64_t parse_count(std::string_view text, const std::string& path) {
  text = trim(text);
  std::uint64_t n = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), n);
  if (res.ec == std::errc() && res.ptr == text.data() + text.size()) return n;
  // Allow 1e6-style counts when they are exact integers.
  double x = 0.0;
  res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec == std::errc() && res.ptr == text.data() + text.size() && x >= 0.0 && x < 0x1.0p63 &&
      x == std::floor(x)) {
    return static_cast<std::uint64_t>(x);
  }
  throw UsageError(path + ": expected a nonnegative integer, got '" + std::string(text) + "'");
}

std::vector<double> parse_list(std::string_view text, const std::string& path) {
  std::vector<double> out;
  text = trim(text);
  if (text.empty()) throw UsageError(path + ": expected a comma-separated list of numbers");
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? text.size() : comma;
    out.push_back(parse_number(text.substr(start, end - start), path + "[" + std::to_string(out.size()) + "]"));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw UsageError(std::string("config: ") + e.message() + " at line " + std::to_string(e.line()));
  }

  ExperimentConfig cfg;
  bool have_kind = false;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw UsageError(section + ": keys must live inside a section");
    for (const auto& [key, node] : body) {
      const std::string path = section + "." + key;
      const std::string value = node.data();
      if (section == "experiment") {
        if (key == "kind") {
          cfg.kind = std::string(trim(value));
          have_kind = true;
        } else if (key == "seed") {
          cfg.seed = parse_count(value, path);
        } else if (key == "out") {
          cfg.out_dir = std::string(trim(value));
        } else {
          throw UsageError(path + ": unknown key");
        }
      } else if (section == "spectrum") {
        if (key == "scale") {
          cfg.spectrum.scale = parse_number(value, path);
        } else if (key == "exponent") {
          cfg.spectrum.exponent = parse_number(value, path);
        } else if (key == "modes") {
          cfg.spectrum.modes = parse_count(value, path);
        } else if (key == "values") {
          cfg.spectrum.values = parse_list(value, path);
        } else {
          throw UsageError(path + ": unknown key");
        }
      } else if (section == "params") {
        cfg.params[key] = std::string(trim(value));
      } else {
        throw UsageError(section + ": unknown section");
      }
    }
  }
  if (!have_kind || cfg.kind.empty()) throw UsageError("experiment.kind: required");
  validate_params(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("config: cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

std::string to_ini(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "[experiment]\nkind = " << c.kind << '\n';
  if (c.seed) os << "seed = " << *c.seed << '\n';
  if (c.out_dir) os << "out = " << *c.out_dir << '\n';
  const auto& s = c.spectrum;
  if (s.scale || s.exponent || s.modes || s.values) {
    os << "\n[spectrum]\n";
    if (s.exponent) os << "exponent = " << format_double(*s.exponent) << '\n';
    if (s.modes) os << "modes = " << *s.modes << '\n';
    if (s.scale) os << "scale = " << format_double(*s.scale) << '\n';
    if (s.values) os << "values = " << join(*s.values) << '\n';
  }
  if (!c.params.empty()) {
    os << "\n[params]\n";
    for (const auto& [k, v] : c.params) os << k << " = " << v << '\n';
  }
  return os.str();
}

void apply_environment(ExperimentConfig& config) {
  if (const char* seed = std::getenv("WOU_SEED"); seed && *seed) config.seed = parse_count(seed, "WOU_SEED");
  if (const char* out = std::getenv("WOU_OUT_DIR"); out && *out) config.out_dir = out;
}

Spectrum build_spectrum(const SpectrumConfig& config, std::size_t default_modes) {
  try {
    if (config.values) {
      if (config.scale || config.exponent || config.modes) {
        throw UsageError("spectrum.values: cannot be combined with scale, exponent or modes");
      }
      return Spectrum::from_values(*config.values);
    }
    const std::size_t modes = config.modes.value_or(default_modes);
    if (modes == 0) throw UsageError("spectrum.modes: must be positive");
    return Spectrum::power_law(config.scale.value_or(1.0), config.exponent.value_or(2.0), modes);
  } catch (const InputError& e) {
    throw UsageError(std::string("spectrum: ") + e.what());
  }
}

}  // namespace wou
