#include "wou/acceptance.hpp"

#include <algorithm>
#include <stdexcept>

#include "wou/experiments.hpp"

namespace wou {

const std::vector<Criterion>& acceptance_criteria() {
  static const std::vector<Criterion> criteria = {
      {1, "trace-class gate", "trace", "trace."},
      {2, "exact OU transition", "transition", "transition."},
      {3, "mean-functional projection", "transition", "projection."},
      {4, "geodesic constant speed", "geodesic", "geodesic."},
      {5, "transport oracle agreement", "geodesic", "transport."},
      {6, "derivative chain rule", "derivative", "derivative."},
      {7, "intrinsic Laplacian", "laplacian", "laplacian."},
      {8, "generator", "generator", "generator."},
      {9, "Dirichlet form and integration by parts", "dirichlet", "dirichlet."},
      {10, "log-Sobolev saturation", "lsi", "lsi."},
      {11, "entropy decay", "entropy-decay", "entropy."},
      {12, "hypercontractivity criticality", "hypercontractivity", "hyper."},
      {13, "discrete spectrum", "spectrum", "spectrum."},
      {14, "bounded perturbation", "perturbation", "perturbation."},
      {15, "Bismut normalization", "bismut", "bismut."},
  };
  return criteria;
}

std::vector<std::string> acceptance_kinds() {
  std::vector<std::string> kinds;
  for (const auto& c : acceptance_criteria()) {
    if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end()) kinds.push_back(c.kind);
  }
  return kinds;
}

std::vector<Report> run_acceptance_reports(std::uint64_t seed) {
  std::vector<Report> reports;
  for (const auto& kind : acceptance_kinds()) reports.push_back(run_experiment(default_config(kind, seed)));
  return reports;
}

std::vector<CriterionOutcome> evaluate_criteria(const std::vector<Report>& reports) {
  std::vector<CriterionOutcome> out;
  for (const auto& c : acceptance_criteria()) {
    const auto it = std::find_if(reports.begin(), reports.end(), [&](const Report& r) { return r.kind == c.kind; });
    if (it == reports.end()) throw std::logic_error("acceptance: missing report for " + c.kind);
    CriterionOutcome o{c.id, c.title, 0, 0, {}};
    for (const auto& row : it->rows) {
      if (row.check.rfind(c.row_prefix, 0) != 0) continue;
      ++o.rows;
      if (row.verdict == Verdict::fail) {
        ++o.failures;
        o.failed_checks.push_back(row.check);
      }
    }
    out.push_back(std::move(o));
  }
  return out;
}

Report criteria_report(const std::vector<CriterionOutcome>& outcomes, std::uint64_t seed) {
  Report r;
  r.kind = "verify-all";
  r.seed = seed;
  r.config["experiment.seed"] = std::to_string(seed);
  for (const auto& o : outcomes) {
    // A criterion without rows is a wiring error, reported as a failure.
    const double failing = o.rows == 0 ? 1.0 : static_cast<double>(o.failures);
    r.add(make_row("criterion" + std::to_string(o.id) + ".failing_rows", failing, 0.0, 0.0, 0.0, Relation::eq));
  }
  return r;
}

}  // namespace wou
