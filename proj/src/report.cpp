#include "wou/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace wou {

const char* to_string(Relation r) {
  switch (r) {
    case Relation::eq:
      return "eq";
    case Relation::le:
      return "le";
    case Relation::ge:
      return "ge";
    case Relation::lt:
      return "lt";
    case Relation::gt:
      return "gt";
    case Relation::info:
      return "info";
  }
  return "?";
}

Verdict evaluate(Relation r, double estimate, double target, double tolerance) {
  bool ok = false;
  switch (r) {
    case Relation::eq:
      ok = std::abs(estimate - target) <= tolerance;
      break;
    case Relation::le:
      ok = estimate <= target + tolerance;
      break;
    case Relation::ge:
      ok = estimate >= target - tolerance;
      break;
    case Relation::lt:
      ok = estimate < target;
      break;
    case Relation::gt:
      ok = estimate > target;
      break;
    case Relation::info:
      return Verdict::not_asserted;
  }
  return ok ? Verdict::pass : Verdict::fail;
}

ReportRow make_row(std::string check, double estimate, double std_error, double target, double tolerance,
                   Relation relation) {
  if (check.find_first_of(",\"\n") != std::string::npos) throw std::logic_error("report: bad check name " + check);
  ReportRow row{std::move(check), estimate, std_error, target, tolerance, relation, Verdict::fail};
  row.verdict = evaluate(relation, estimate, target, tolerance);
  return row;
}

bool Report::passed() const {
  for (const auto& r : rows) {
    if (r.verdict == Verdict::fail) return false;
  }
  return true;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string csv_text(const Report& report) {
  std::string out = "check,estimate,stderr,target,tolerance,verdict\n";
  for (const auto& r : report.rows) {
    out += r.check + ',' + format_double(r.estimate) + ',' + format_double(r.std_error) + ',' +
           format_double(r.target) + ',' + format_double(r.tolerance) + ',' + to_string(r.verdict) + '\n';
  }
  return out;
}

namespace {

nlohmann::ordered_json number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);  // JSON has no NaN or infinity
}

}  // namespace

std::string json_text(const Report& report) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = 1;
  doc["kind"] = report.kind;
  doc["seed"] = report.seed;
  doc["config"] = report.config;
  doc["passed"] = report.passed();
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"check", r.check},
                    {"estimate", number(r.estimate)},
                    {"stderr", number(r.std_error)},
                    {"target", number(r.target)},
                    {"tolerance", number(r.tolerance)},
                    {"relation", to_string(r.relation)},
                    {"verdict", to_string(r.verdict)}});
  }
  doc["rows"] = rows;
  if (report.sweep) {
    doc["sweep"] = {{"columns", report.sweep->columns}, {"rows", nlohmann::ordered_json::array()}};
    for (const auto& row : report.sweep->rows) {
      auto vals = nlohmann::ordered_json::array();
      for (double x : row) vals.push_back(number(x));
      doc["sweep"]["rows"].push_back(vals);
    }
  }
  if (!report.notes.empty()) doc["notes"] = report.notes;
  if (report.wall_clock_seconds) doc["wall_clock_seconds"] = *report.wall_clock_seconds;
  return doc.dump(2) + '\n';
}

std::string sweep_csv_text(const Sweep& sweep) {
  std::string out;
  for (std::size_t i = 0; i < sweep.columns.size(); ++i) out += (i ? "," : "") + sweep.columns[i];
  out += '\n';
  for (const auto& row : sweep.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_double(row[i]);
    out += '\n';
  }
  return out;
}

std::string plot_script_text(const Report& report, const std::string& sweep_csv_name) {
  const Sweep& s = *report.sweep;
  const auto column = [&](const std::string& name) {
    for (std::size_t i = 0; i < s.columns.size(); ++i) {
      if (s.columns[i] == name) return i + 1;
    }
    throw std::logic_error("plot script: unknown sweep column " + name);
  };
  std::ostringstream os;
  os << "# " << report.kind << ": regenerate with `gnuplot " << report.kind << ".gp`\n";
  os << "set datafile separator ','\n";
  os << "set key autotitle columnhead\n";
  os << "set terminal pngcairo size 800,600\n";
  os << "set output '" << report.kind << ".png'\n";
  os << "set xlabel '" << s.x_column << "'\n";
  os << "set ylabel '" << s.y_label << "'\n";
  if (s.log_y) os << "set logscale y\n";
  os << "set grid\n";
  os << "plot '" << sweep_csv_name << "' using " << column(s.x_column) << ':' << column(s.y_column)
     << " with linespoints pt 7";
  for (const auto& ref : s.reference_columns) {
    os << ", \\\n     '' using " << column(s.x_column) << ':' << column(ref) << " with lines dt 2";
  }
  os << '\n';
  return os.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  const auto tmp = path.parent_path() / (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void emit_csv(const Report& report, const std::filesystem::path& path) { write_atomic(path, csv_text(report)); }

std::optional<std::string> emit_plot_script(const Report& report, const std::filesystem::path& path,
                                            const std::string& sweep_csv_name) {
  if (!report.sweep) return "report '" + report.kind + "' has no sweep; no plot script written";
  write_atomic(path, plot_script_text(report, sweep_csv_name));
  return std::nullopt;
}

std::vector<std::string> write_report_files(const Report& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  emit_csv(report, dir / (report.kind + ".csv"));
  written.push_back(report.kind + ".csv");
  write_atomic(dir / (report.kind + ".json"), json_text(report));
  written.push_back(report.kind + ".json");
  if (report.sweep) {
    const std::string sweep_name = report.kind + "_sweep.csv";
    write_atomic(dir / sweep_name, sweep_csv_text(*report.sweep));
    written.push_back(sweep_name);
    emit_plot_script(report, dir / (report.kind + ".gp"), sweep_name);
    written.push_back(report.kind + ".gp");
  }
  return written;
}

}  // namespace wou
