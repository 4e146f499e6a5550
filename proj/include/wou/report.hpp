#pragma once

// Experiment reports and their serializations: CSV rows, a JSON document
// (schema_version 1), an optional sweep table and a gnuplot script for it.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wou/common.hpp"

namespace wou {

/// How a row's verdict follows from its numbers.
enum class Relation {
  eq,    // |estimate - target| <= tolerance
  le,    // estimate <= target + tolerance
  ge,    // estimate >= target - tolerance
  lt,    // estimate < target
  gt,    // estimate > target
  info,  // recorded, never asserted
};

const char* to_string(Relation r);
Verdict evaluate(Relation r, double estimate, double target, double tolerance);

struct ReportRow {
  std::string check;
  double estimate = 0.0;
  double std_error = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  Relation relation = Relation::eq;
  Verdict verdict = Verdict::fail;
};

/// Builds a row and computes its verdict from its own fields.
ReportRow make_row(std::string check, double estimate, double std_error, double target, double tolerance,
                   Relation relation);

struct Sweep {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  /// Column plotted on x, the measured column and dashed reference columns.
  std::string x_column;
  std::string y_column;
  std::vector<std::string> reference_columns;
  std::string y_label;
  bool log_y = false;
};

struct Report {
  std::string kind;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> config;  // normalized echo
  std::vector<ReportRow> rows;
  std::optional<Sweep> sweep;
  std::vector<std::string> notes;
  std::optional<double> wall_clock_seconds;

  bool passed() const;
  void add(ReportRow row) { rows.push_back(std::move(row)); }
};

/// Shortest decimal that parses back to the same double (std::to_chars).
std::string format_double(double x);

std::string csv_text(const Report& report);
std::string json_text(const Report& report);
std::string sweep_csv_text(const Sweep& sweep);
std::string plot_script_text(const Report& report, const std::string& sweep_csv_name);

/// Writes via a temporary file and rename, so readers never see partial files.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

void emit_csv(const Report& report, const std::filesystem::path& path);

/// Writes the gnuplot script when the report has a sweep; otherwise returns a
/// notice and writes nothing.
std::optional<std::string> emit_plot_script(const Report& report, const std::filesystem::path& path,
                                            const std::string& sweep_csv_name);

/// <kind>.csv, <kind>.json and, for sweeps, <kind>_sweep.csv and <kind>.gp.
std::vector<std::string> write_report_files(const Report& report, const std::filesystem::path& dir);

}  // namespace wou
