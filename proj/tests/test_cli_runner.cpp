#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <doctest.h>
#include <json.hpp>

#include "wou/config.hpp"
#include "wou/experiments.hpp"
#include "wou/report.hpp"

using namespace wou;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("wou_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(WOU_BINARY) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

Report small_report() {
  Report r;
  r.kind = "demo";
  r.seed = 7;
  r.config = {{"experiment.kind", "demo"}};
  r.add(make_row("a.eq", 1.0, 0.1, 1.05, 0.1, Relation::eq));
  r.add(make_row("b.le", 2.0, 0.0, 1.0, 0.5, Relation::le));
  r.add(make_row("c.gt", 0.1, 0.0, 0.0, 0.0, Relation::gt));
  r.add(make_row("d.info", NAN, INFINITY, 0.0, 0.0, Relation::info));
  return r;
}

std::string error_of(const std::string& ini) {
  try {
    parse_config(ini);
  } catch (const UsageError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("csv: header and rows") {
  Report empty;
  empty.kind = "empty";
  CHECK(csv_text(empty) == "check,estimate,stderr,target,tolerance,verdict\n");

  Report one;
  one.kind = "one";
  one.add(make_row("x.y", 0.1, 0.0, 0.1, 0.0, Relation::eq));
  const std::string text = csv_text(one);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(text.find("x.y,0.1,0,0.1,0,pass\n") != std::string::npos);

  CHECK_THROWS_AS(make_row("bad,name", 0, 0, 0, 0, Relation::eq), std::logic_error);
}

TEST_CASE("floats round-trip bit-exactly") {
  for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, -2.5, std::numeric_limits<double>::max()}) {
    const std::string text = format_double(x);
    double back = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    CHECK(back == x);
  }
  CHECK(format_double(NAN) == "nan");
  CHECK(format_double(INFINITY) == "inf");
  CHECK(format_double(-INFINITY) == "-inf");
}

TEST_CASE("verdicts follow from the JSON fields") {
  const Report r = small_report();
  const auto doc = nlohmann::json::parse(json_text(r));
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["kind"] == "demo");
  CHECK_FALSE(doc.contains("wall_clock_seconds"));
  const std::map<std::string, Relation> rel = {{"eq", Relation::eq}, {"le", Relation::le}, {"ge", Relation::ge},
                                               {"lt", Relation::lt}, {"gt", Relation::gt}, {"info", Relation::info}};
  for (const auto& row : doc["rows"]) {
    if (!row["estimate"].is_number()) {
      CHECK(row["verdict"] == "not_asserted");
      continue;
    }
    const Verdict v = evaluate(rel.at(row["relation"].get<std::string>()), row["estimate"].get<double>(),
                               row["target"].get<double>(), row["tolerance"].get<double>());
    CHECK(to_string(v) == row["verdict"].get<std::string>());
  }
  CHECK_FALSE(doc["passed"].get<bool>());  // b.le fails
}

TEST_CASE("plot scripts") {
  const Report entropy = run_experiment(parse_config(
      "[experiment]\nkind = entropy-decay\n[params]\nsamples = 2000\nrelative_tolerance = 1\n"));
  const std::string gp = plot_script_text(entropy, "entropy-decay_sweep.csv");
  CHECK(gp.find("set logscale y") != std::string::npos);
  CHECK(gp.find("entropy-decay_sweep.csv") != std::string::npos);
  CHECK(gp.find("dt 2") != std::string::npos);
  // Data stays in the CSV.
  CHECK(gp.find("$data") == std::string::npos);
  CHECK(gp.find(format_double(entropy.sweep->rows[1][1])) == std::string::npos);

  const Report hyper = run_experiment(parse_config("[experiment]\nkind = hypercontractivity\n[params]\nsamples = 200\n"));
  const std::string hp = plot_script_text(hyper, "hypercontractivity_sweep.csv");
  CHECK(hp.find("set logscale y") == std::string::npos);
  CHECK(hyper.sweep->x_column == "p");
  CHECK(hyper.sweep->rows.size() == 5);

  const fs::path dir = fresh_dir("plot");
  const auto notice = emit_plot_script(small_report(), dir / "demo.gp", "demo_sweep.csv");
  REQUIRE(notice.has_value());
  CHECK_FALSE(fs::exists(dir / "demo.gp"));
}

TEST_CASE("config errors name the field") {
  CHECK(error_of("[experiment]\nkind = trace\n[params]\nfoo = 1\n").find("params.foo") != std::string::npos);
  CHECK(error_of("[experiment]\nkind = trace\n[bogus]\nx = 1\n").find("bogus") != std::string::npos);
  CHECK(error_of("[experiment]\nkind = trace\n[spectrum]\nexponent = abc\n").find("spectrum.exponent") !=
        std::string::npos);
  CHECK(error_of("[experiment]\nkind = lsi\n[params]\ntilts = 0.5,x\n").find("params.tilts[1]") != std::string::npos);
  CHECK(error_of("[experiment]\nkind = nope\n").find("nope") != std::string::npos);
  CHECK(error_of("[spectrum]\nmodes = 3\n").find("experiment.kind") != std::string::npos);
  CHECK(error_of("[experiment]\nkind = sampling\n[params]\nsamples = 2.5\n").find("params.samples") !=
        std::string::npos);
  CHECK(parse_count("1e6", "x") == 1000000);
}

TEST_CASE("config round trip") {
  const std::string ini =
      "[experiment]\nkind = lsi\nseed = 9\nout = /tmp/x\n[spectrum]\nscale = 2\nmodes = 3\n[params]\ntilts = 0.5, 1\n";
  const ExperimentConfig c = parse_config(ini);
  const std::string once = to_ini(c);
  CHECK(parse_config(once) == c);
  CHECK(to_ini(parse_config(once)) == once);
  for (const auto& kind : experiment_kinds()) CHECK(parse_config(to_ini(default_config(kind.name, 3))).kind == kind.name);
}

TEST_CASE("environment overrides the file") {
  ExperimentConfig c = parse_config("[experiment]\nkind = trace\nseed = 5\nout = a\n");
  setenv("WOU_SEED", "77", 1);
  setenv("WOU_OUT_DIR", "b", 1);
  apply_environment(c);
  unsetenv("WOU_SEED");
  unsetenv("WOU_OUT_DIR");
  CHECK(c.seed == 77u);
  CHECK(c.out_dir == "b");
  setenv("WOU_SEED", "x", 1);
  CHECK_THROWS_AS(apply_environment(c), UsageError);
  unsetenv("WOU_SEED");
}

TEST_CASE("runner reproduces the known targets") {
  const Report trace = run_experiment(default_config("trace", 42));
  REQUIRE_FALSE(trace.rows.empty());
  CHECK(trace.rows[0].check == "trace.partial_sum");
  CHECK(trace.rows[0].estimate == doctest::Approx(1.6449).epsilon(1e-4));
  CHECK(trace.passed());

  const Report entropy = run_experiment(parse_config(
      "[experiment]\nkind = entropy-decay\n[params]\ntimes = 0.5\nsamples = 20000\n"));
  CHECK(entropy.rows[0].target == doctest::Approx(0.36788).epsilon(1e-5));
}

TEST_CASE("reports are deterministic across thread counts") {
  const ExperimentConfig cfg = parse_config("[experiment]\nkind = transition\n[params]\nsamples = 5000\n"
                                            "projection_samples = 500\n");
  setenv("WOU_THREADS", "1", 1);
  const std::string a = json_text(run_experiment(cfg));
  setenv("WOU_THREADS", "3", 1);
  const std::string b = json_text(run_experiment(cfg));
  unsetenv("WOU_THREADS");
  CHECK(a == b);
}

TEST_CASE("report files are written atomically") {
  const fs::path dir = fresh_dir("files");
  Report r = small_report();
  r.sweep = Sweep{{"x", "y"}, {{1, 2}, {2, 3}}, "x", "y", {}, "y", false};
  const auto names = write_report_files(r, dir);
  CHECK(names.size() == 4);
  for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() != ".tmp");
  CHECK(slurp(dir / "demo_sweep.csv") == "x,y\n1,2\n2,3\n");
}

TEST_CASE("exit codes") {
  const fs::path dir = fresh_dir("exit");
  const std::string out = " --out " + (dir / "out").string();
  CHECK(run_cli("trace" + out) == 0);
  CHECK(fs::exists(dir / "out" / "trace.csv"));
  CHECK(fs::exists(dir / "out" / "trace.json"));
  CHECK_FALSE(fs::exists(dir / "out" / "trace.gp"));

  const auto harmonic = write_file(dir, "h.ini", "[experiment]\nkind = trace\n[spectrum]\nexponent = 1\nmodes = 1000\n");
  CHECK(run_cli("trace --config " + harmonic.string() + out) == 1);

  const auto unknown = write_file(dir, "u.ini", "[experiment]\nkind = trace\n[params]\nfoo = 1\n");
  CHECK(run_cli("trace --config " + unknown.string() + out) == 2);
  CHECK(run_cli("trace --no-such-flag") == 2);
  CHECK(run_cli("lsi --config " + unknown.string() + out) == 2);

  const auto overflow = write_file(dir, "o.ini", "[experiment]\nkind = entropy-decay\n[params]\nlambda = 100\n");
  CHECK(run_cli("entropy-decay --config " + overflow.string() + out) == 3);

  const auto blocker = write_file(dir, "blocker", "x");
  CHECK(run_cli("trace --out " + blocker.string()) == 3);
}

TEST_CASE("cli output is independent of the output directory") {
  const fs::path dir = fresh_dir("det");
  REQUIRE(run_cli("hypercontractivity --seed 5 --out " + (dir / "a").string()) == 0);
  REQUIRE(run_cli("hypercontractivity --seed 5 --out " + (dir / "b").string()) == 0);
  for (const char* f : {"hypercontractivity.csv", "hypercontractivity.json", "hypercontractivity_sweep.csv",
                        "hypercontractivity.gp"}) {
    CAPTURE(f);
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
  const auto doc = nlohmann::json::parse(slurp(dir / "a" / "hypercontractivity.json"));
  CHECK(doc["seed"] == 5);
}
