#pragma once

// The acceptance suite: criteria 1-15 evaluated on the rows of the default
// experiment reports. Criterion 16 (byte-identical reruns) needs the CLI
// binary and lives in the acceptance test.

#include <cstdint>
#include <string>
#include <vector>

#include "wou/report.hpp"

namespace wou {

struct Criterion {
  int id = 0;
  std::string title;
  std::string kind;
  std::string row_prefix;  // rows of `kind` whose check starts with this prefix
};

const std::vector<Criterion>& acceptance_criteria();

/// Kinds needed by the criteria, in run order.
std::vector<std::string> acceptance_kinds();

struct CriterionOutcome {
  int id = 0;
  std::string title;
  std::size_t rows = 0;
  std::size_t failures = 0;
  std::vector<std::string> failed_checks;
  bool passed() const { return rows > 0 && failures == 0; }
};

/// Runs the default configuration of every kind the criteria need.
std::vector<Report> run_acceptance_reports(std::uint64_t seed);

std::vector<CriterionOutcome> evaluate_criteria(const std::vector<Report>& reports);

/// Summary report with one row per criterion (estimate = failing rows).
Report criteria_report(const std::vector<CriterionOutcome>& outcomes, std::uint64_t seed);

}  // namespace wou
