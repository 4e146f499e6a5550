// wou: run one experiment kind or the whole acceptance suite and write
// CSV / JSON reports (plus gnuplot scripts for sweeps).
//
// Exit status: 0 all checks pass, 1 a check failed, 2 usage error, 3 runtime error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wou/acceptance.hpp"
#include "wou/config.hpp"
#include "wou/experiments.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool timing = false;
  bool print_config = false;
};

void print_summary(const wou::Report& report) {
  std::size_t failed = 0;
  for (const auto& row : report.rows) {
    if (row.verdict == wou::Verdict::fail) {
      ++failed;
      std::cout << "  FAIL " << row.check << ": estimate " << wou::format_double(row.estimate) << ", target "
                << wou::format_double(row.target) << ", tolerance " << wou::format_double(row.tolerance) << '\n';
    }
  }
  std::cout << report.kind << ": " << report.rows.size() << " checks, " << failed << " failed\n";
}

std::filesystem::path resolve_out(const Options& opts, const wou::ExperimentConfig& cfg) {
  // CLI > environment > file > default.
  if (!opts.out_dir.empty()) return opts.out_dir;
  return cfg.out_dir.value_or("results");
}

int run_kind(const std::string& kind, const Options& opts) {
  wou::ExperimentConfig cfg;
  if (!opts.config_path.empty()) {
    cfg = wou::load_config(opts.config_path);
    if (cfg.kind != kind) {
      throw wou::UsageError("experiment.kind: config names '" + cfg.kind + "' but the command is '" + kind + "'");
    }
  } else {
    cfg.kind = kind;
  }
  wou::apply_environment(cfg);
  if (opts.seed) cfg.seed = opts.seed;
  if (opts.print_config) {
    std::cout << wou::to_ini(cfg);
    return kExitPass;
  }

  const auto start = std::chrono::steady_clock::now();
  wou::Report report = wou::run_experiment(cfg);
  if (opts.timing) {
    report.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  const auto dir = resolve_out(opts, cfg);
  wou::write_report_files(report, dir);
  if (!report.sweep) std::cout << "note: " << kind << " has no sweep section; no plot script written\n";
  for (const auto& note : report.notes) std::cout << "note: " << note << '\n';
  print_summary(report);
  return report.passed() ? kExitPass : kExitFail;
}

int run_verify_all(const Options& opts) {
  wou::ExperimentConfig env;
  env.kind = "verify-all";
  wou::apply_environment(env);
  const std::uint64_t seed = opts.seed.value_or(env.seed.value_or(wou::kDefaultSeed));
  const std::filesystem::path dir = !opts.out_dir.empty() ? std::filesystem::path(opts.out_dir)
                                                          : std::filesystem::path(env.out_dir.value_or("results"));

  std::vector<wou::Report> reports;
  for (const auto& kind : wou::acceptance_kinds()) {
    const auto start = std::chrono::steady_clock::now();
    wou::Report report = wou::run_experiment(wou::default_config(kind, seed));
    if (opts.timing) {
      report.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    wou::write_report_files(report, dir);
    reports.push_back(std::move(report));
  }
  const auto outcomes = wou::evaluate_criteria(reports);
  const wou::Report summary = wou::criteria_report(outcomes, seed);
  wou::write_report_files(summary, dir);
  for (const auto& o : outcomes) {
    std::cout << (o.passed() ? "PASS" : "FAIL") << "  criterion " << o.id << ": " << o.title << " (" << o.rows
              << " checks";
    if (o.failures) std::cout << ", " << o.failures << " failed";
    std::cout << ")\n";
    for (const auto& check : o.failed_checks) std::cout << "      " << check << '\n';
  }
  return summary.passed() ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian measures and Ornstein-Uhlenbeck dynamics on Wasserstein space: numerical checks"};
  app.require_subcommand(1);
  Options opts;
  std::string chosen;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", opts.seed, "Master seed (overrides WOU_SEED and the config file)");
    sub->add_option("--out", opts.out_dir, "Output directory (overrides WOU_OUT_DIR and the config file)");
    sub->add_flag("--timing", opts.timing, "Record wall-clock time in the JSON report");
  };
  for (const auto& kind : wou::experiment_kinds()) {
    CLI::App* sub = app.add_subcommand(kind.name, kind.summary);
    sub->add_option("--config", opts.config_path, "INI configuration file")->check(CLI::ExistingFile);
    sub->add_flag("--print-config", opts.print_config, "Print the normalized configuration and exit");
    add_common(sub);
    sub->callback([&chosen, name = kind.name] { chosen = name; });
  }
  CLI::App* verify = app.add_subcommand("verify-all", "Run the acceptance suite with default sizes");
  add_common(verify);
  verify->callback([&chosen] { chosen = "verify-all"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    return chosen == "verify-all" ? run_verify_all(opts) : run_kind(chosen, opts);
  } catch (const wou::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
