#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hlab/runner.hpp"

using namespace hlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hlab_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

template <class F>
ConfigError config_error(F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("no ConfigError");
  return ConfigError("", 0, 0);
}

}  // namespace

TEST_CASE("config text parsing") {
  const auto e = parse_config_text(
      "# comment\n"
      "experiment = \"flat_sanity\"   # trailing\n"
      "\n"
      "[grid]\n"
      "  h = 0.02\n"
      "[tolerance]\n"
      "w_entropy_zero=1e-2\n");
  CHECK(e.at("experiment").value == "flat_sanity");
  CHECK(e.at("experiment").quoted);
  CHECK(e.at("grid.h").value == "0.02");
  CHECK(e.at("grid.h").line == 5);
  CHECK(e.at("grid.h").column == 3);
  CHECK(e.at("tolerance.w_entropy_zero").value == "1e-2");

  const auto c = resolve_config(e);
  CHECK(c.experiment == "flat_sanity");
  CHECK(c.param("grid.h") == 0.02);
  CHECK(c.tolerance("w_entropy_zero") == 1e-2);
  CHECK(c.tolerance("nash_entropy_zero") == 5e-3);
}

TEST_CASE("config errors carry line and column") {
  auto d = config_error([] { parse_config_text("experiment = \"flat_sanity\"\nseed = 1\nseed = 2\n"); });
  CHECK(d.line() == 3);
  CHECK(d.column() == 1);
  CHECK(std::string(d.what()).find("duplicate") != std::string::npos);

  d = config_error([] { parse_config_text("[grid]\nh 0.1\n"); });
  CHECK(d.line() == 2);
  CHECK(d.column() == 3);

  d = config_error([] { parse_config_text("x = \"open\n"); });
  CHECK(d.line() == 1);
  CHECK(d.column() == 5);

  d = config_error([] { resolve_config(parse_config_text("experiment = \"flat_sanity\"\n\n[grid]\n  bogus = 1\n")); });
  CHECK(d.line() == 4);
  CHECK(d.column() == 3);
  CHECK(std::string(d.what()).find("grid.bogus") != std::string::npos);

  d = config_error([] { resolve_config(parse_config_text("experiment = \"nope\"\n")); });
  CHECK(d.line() == 1);
  CHECK(d.column() == 14);

  d = config_error([] { resolve_config(parse_config_text("experiment = flat_sanity\n[tolerance]\nw_entropy_zero = -1\n")); });
  CHECK(d.line() == 3);
  d = config_error([] { resolve_config(parse_config_text("experiment = flat_sanity\n[tolerance]\nnot_a_check = 1\n")); });
  CHECK(d.line() == 3);
  d = config_error([] { resolve_config(parse_config_text("experiment = flat_sanity\n[grid]\nh = 1e-2x\n")); });
  CHECK(d.column() == 5);
  d = config_error([] { resolve_config(parse_config_text("[grid]\nh = 0.1\n")); });
  CHECK(std::string(d.what()).find("experiment") != std::string::npos);
  CHECK_THROWS_AS(resolve_config(parse_config_text("experiment = flat_sanity\nresolution = 0\n")), ConfigError);
  CHECK_THROWS_AS(resolve_config(parse_config_text("experiment = flat_sanity\nseed = -3\n")), ConfigError);
}

TEST_CASE("overrides and hashing") {
  const auto e = parse_config_text("experiment = cylinder_collapse\noutput = a\nseed = 4\n");
  const auto a = resolve_config(e);
  const auto b = resolve_config(e, {std::string("elsewhere"), std::nullopt, std::nullopt});
  CHECK(a.seed == 4);
  CHECK(b.output == "elsewhere");
  CHECK(a.hash() == b.hash());  // output directory is not part of the fingerprint
  const auto c = resolve_config(e, {std::nullopt, 5, 2.0});
  CHECK(c.seed == 5);
  CHECK(c.resolution == 2.0);
  CHECK(c.hash() != a.hash());
  CHECK(default_config("kahler_lyh").canonical() == default_config("kahler_lyh").canonical());
  CHECK(registered_suites().size() == 6);
  for (const char* s : {"flat_sanity", "sphere_full", "hyperbolic_witness", "cylinder_collapse", "kahler_lyh",
                        "subvariety_bezout"})
    CHECK(find_suite(s) != nullptr);
}

TEST_CASE("report emission") {
  const auto dir = scratch_dir("emit_empty");
  const auto cfg = default_config("flat_sanity");
  CHECK_THROWS(emit_report(SuiteResult{}, cfg, dir.string()));
  CHECK_FALSE(fs::exists(dir));

  SuiteResult r;
  InequalityReport c;
  c.check = "demo";
  c.tag = "demo statement";
  c.resolution = "h=1";
  c.tolerance = 1e-3;
  c.add(0.0, 1.0, 0.5);
  c.finalize();
  r.checks.push_back(c);
  Series s{"demo_series", "tau", "V", {1, 2, 3}, {1.0, 0.9, 0.8}, 0.05, "demo", "demo statement"};
  r.series.push_back(s);
  Table t{"demo_table", {"a", "b"}, {{1, 2}, {3, 4}}, "table tag", {"min_margin=0.5"}};
  r.tables.push_back(t);
  const auto out = scratch_dir("emit");
  const auto files = emit_report(r, cfg, out.string());
  CHECK(files.size() == 6);  // check, series csv + svg, table, summary, config
  const std::string csv = slurp(out / "demo.csv");
  CHECK(csv.find("# config_hash: ") != std::string::npos);
  CHECK(csv.find("# seed: 1") != std::string::npos);
  CHECK(csv.find("# tag: demo statement") != std::string::npos);
  CHECK(csv.find("# tolerance: 0.001") != std::string::npos);
  CHECK(csv.find("# grid: h=1") != std::string::npos);
  CHECK(slurp(out / "demo_table.csv").find("# min_margin=0.5\na,b\n") != std::string::npos);
  const std::string svg = slurp(out / "demo_series.svg");
  CHECK(svg.find("<polygon") != std::string::npos);  // tolerance band
  CHECK(svg.find("band: +/- 0.05") != std::string::npos);

  r.tables.push_back(t);
  CHECK_THROWS(emit_report(r, cfg, scratch_dir("emit_dup").string()));
  CHECK_FALSE(fs::exists(scratch_dir("emit_dup")));
  CHECK_THROWS(svg_line_plot(Series{"x", "a", "b", {1, 2}, {1}, 0.0, "", ""}));
}

TEST_CASE("exit codes") {
  SuiteResult r;
  InequalityReport a;
  a.check = "a";
  a.add(0, 0, -1.0);
  a.tolerance = 1e-6;
  a.hypothesis_met = false;
  a.finalize();
  r.checks.push_back(a);
  CHECK(verdict_code(r) == ExitCode::ok);  // hypothesis-not-met is not asserted
  a.hypothesis_met = true;
  a.finalize();
  r.checks.push_back(a);
  CHECK(verdict_code(r) == ExitCode::violation);

  auto cfg = default_config("flat_sanity");
  cfg.params["grid.h"] = -1.0;
  cfg.output = scratch_dir("failure").string();
  std::ostringstream log;
  const auto o = run_experiment(cfg, log);
  CHECK(o.code == ExitCode::failure);
  CHECK_FALSE(o.error.empty());
  CHECK_FALSE(fs::exists(cfg.output));

  // A tightened tolerance turns an equality check into a violation.
  auto tight = default_config("cylinder_collapse");
  tight.tolerances["cylinder_cut_threshold"] = 1e-300;
  tight.output = scratch_dir("tight").string();
  const auto t = run_experiment(tight, log);
  CHECK(t.code == ExitCode::violation);
  CHECK(slurp(fs::path(tight.output) / "summary.csv").find("cylinder_cut_threshold,") != std::string::npos);
}

TEST_CASE("identical configs give byte-identical CSV files") {
  auto cfg = default_config("cylinder_collapse");
  cfg.output = scratch_dir("det_a").string();
  std::ostringstream log;
  const auto a = run_experiment(cfg, log);
  cfg.output = scratch_dir("det_b").string();
  const auto b = run_experiment(cfg, log);
  REQUIRE(a.code == ExitCode::ok);
  REQUIRE(a.files == b.files);
  const fs::path first = fs::temp_directory_path() / "hlab_test_det_a";
  for (const auto& f : a.files) CHECK(slurp(first / f) == slurp(fs::path(cfg.output) / f));
}

TEST_CASE("command line") {
  const std::string bin = HLAB_RUN_PATH;
  const auto dir = scratch_dir("cli");
  fs::create_directories(dir);
  {
    std::ofstream(dir / "dup.conf") << "experiment = \"flat_sanity\"\noutput = \"" << (dir / "dup_out").string()
                                    << "\"\nseed = 1\nseed = 2\n";
  }
  const std::string err = (dir / "err.txt").string();
  int rc = std::system((bin + " run " + (dir / "dup.conf").string() + " > /dev/null 2> " + err).c_str());
  CHECK(WEXITSTATUS(rc) == 2);
  CHECK_FALSE(fs::exists(dir / "dup_out"));
  CHECK(slurp(err).find("line 4, column 1") != std::string::npos);

  {
    std::ofstream(dir / "ok.conf") << "experiment = cylinder_collapse\n";
  }
  rc = std::system((bin + " --out " + (dir / "ok_out").string() + " --seed 9 run " + (dir / "ok.conf").string() +
                    " > " + (dir / "log.txt").string())
                       .c_str());
  CHECK(WEXITSTATUS(rc) == 0);
  CHECK(fs::exists(dir / "ok_out" / "summary.csv"));
  CHECK(slurp(dir / "ok_out" / "summary.csv").find("# seed: 9") != std::string::npos);
  CHECK(slurp(dir / "log.txt").find("worst_margin") != std::string::npos);

  rc = std::system((bin + " list-suites > " + (dir / "list.txt").string()).c_str());
  CHECK(WEXITSTATUS(rc) == 0);
  CHECK(slurp(dir / "list.txt").find("subvariety_bezout") != std::string::npos);
  rc = std::system((bin + " run " + (dir / "missing.conf").string() + " 2> /dev/null").c_str());
  CHECK(WEXITSTATUS(rc) == 2);
}
