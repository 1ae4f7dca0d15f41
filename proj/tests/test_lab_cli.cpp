#include <filesystem>
#include <fstream>
#include <sstream>

#include "bwl/lab/config.hpp"
#include "bwl/lab/experiments.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace bwl;
using namespace bwl::lab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "bwl_lab_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "run.cfg";
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json without_timing(const fs::path& p) {
  auto j = nlohmann::json::parse(slurp(p));
  j.erase("timing");
  return j;
}

const char* kSmallSolve = R"([experiment]
kind = solve
[grid]
n = 1
N = 128
L = 60
[problem]
r = 4
s = 2
p = 2
[data]
profile = gaussian
width = 4
amplitude = 1
[solver]
T = 20
steps = 40
blowup_threshold = 20
[solve]
assert_decay = true
)";

}  // namespace

TEST_CASE("config parsing") {
  const auto c = Config::parse("# comment\n[grid]\nn = 2 ; trailing\nL = 1e2\n[data]\nk = 1, 2,3\nflag = yes\n");
  CHECK(c.get_int("grid", "n") == 2);
  CHECK(c.get_double("grid", "L") == 100.0);
  CHECK(c.get_list("data", "k") == std::vector<double>{1, 2, 3});
  CHECK(c.get_bool("data", "flag", false));
  CHECK(c.get_double("grid", "N", 64.0) == 64.0);
  CHECK_NOTHROW(c.check_consumed());

  CHECK_THROWS_AS(Config::parse("n = 1\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[a]\nx = 1\nx = 2\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[a\nx = 1\n"), ConfigError);
  const auto d = Config::parse("[a]\nx = one\ny = 1\n");
  CHECK_THROWS_AS(d.get_double("a", "x"), ConfigError);
  CHECK_THROWS_AS(d.get_string("a", "missing"), ConfigError);
  try {
    d.check_consumed();
    FAIL("unused keys were not reported");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("a.y") != std::string::npos);
  }
}

TEST_CASE("config hash depends on content, not layout") {
  const auto a = Config::parse("[grid]\nn = 1\nN = 64\n");
  const auto b = Config::parse("# other file\n[grid]\n  N=64\nn =1\n");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);
  auto c = a;
  c.set("grid", "N", "128");
  CHECK(c.hash() != a.hash());
  // Reference FNV-1a 64 values.
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("registry lists the experiment kinds") {
  const auto text = list_experiments();
  for (const char* k : {"partition", "verify-lp-lq", "block-estimate", "paraproduct-residual", "leibniz", "contraction",
                        "solve", "blowup-probe", "sweep-critical", "admissibility"})
    CHECK(text.find(k) != std::string::npos);
  for (const auto& e : experiment_registry()) {
    CHECK_FALSE(e.description.empty());
    CHECK_FALSE(e.anchor.empty());
  }
}

TEST_CASE("successful run writes report, CSV and SVG") {
  const auto dir = scratch("ok");
  const auto cfg = write_config(dir, "[experiment]\nkind = partition\n[grid]\nn = 1\nN = 256\nL = 64\n");
  RunOptions o;
  o.out_dir = dir / "out";
  const auto res = run_file(cfg, o);
  REQUIRE(res.exit_code == kExitOk);
  CHECK(fs::exists(dir / "out" / "report.json"));
  const auto rep = parse_report_json(slurp(dir / "out" / "report.json"));
  CHECK(rep.kind == "partition");
  CHECK(rep.all_pass());
  CHECK(rep.config_hash == Config::load(cfg).hash());
}

TEST_CASE("reports are reproducible apart from timing") {
  const auto dir = scratch("repro");
  const auto cfg = write_config(dir, "[experiment]\nkind = paraproduct-residual\nseed = 5\n[grid]\nn = 1\nN = 128\n"
                                     "L = 40\n[paraproduct]\npairs = 6\n");
  RunOptions a, b;
  a.out_dir = dir / "a";
  b.out_dir = dir / "b";
  b.jobs = 2;
  REQUIRE(run_file(cfg, a).exit_code == kExitOk);
  REQUIRE(run_file(cfg, b).exit_code == kExitOk);
  CHECK(without_timing(dir / "a" / "report.json") == without_timing(dir / "b" / "report.json"));
  CHECK(slurp(dir / "a" / "residuals.csv") == slurp(dir / "b" / "residuals.csv"));

  RunOptions c;
  c.out_dir = dir / "c";
  c.seed = 6;
  REQUIRE(run_file(cfg, c).exit_code == kExitOk);
  CHECK(slurp(dir / "a" / "residuals.csv") != slurp(dir / "c" / "residuals.csv"));
  CHECK(without_timing(dir / "a" / "report.json")["config_hash"] !=
        without_timing(dir / "c" / "report.json")["config_hash"]);
}

TEST_CASE("config errors exit with 2") {
  const auto dir = scratch("config");
  RunOptions o;
  o.out_dir = dir / "out";
  const auto bad_r = write_config(dir, "[experiment]\nkind = admissibility\n[problem]\nn = 1\nr = 2\ns = 5\np = 9\n");
  auto res = run_file(bad_r, o);
  CHECK(res.exit_code == kExitConfig);
  CHECK(res.error.find("r in (2, inf)") != std::string::npos);
  const auto err = nlohmann::json::parse(slurp(dir / "out" / "error.json"));
  CHECK(err["exit_code"] == 2);
  CHECK(err["error"] == "config");

  const auto unused = write_config(dir, "[experiment]\nkind = partition\n[grid]\nn = 1\nN = 64\nL = 10\nLL = 3\n");
  CHECK(run_file(unused, o).exit_code == kExitConfig);
  const auto unknown = write_config(dir, "[experiment]\nkind = nope\n");
  CHECK(run_file(unknown, o).exit_code == kExitConfig);
  CHECK(run_file(dir / "missing.cfg", o).exit_code == kExitConfig);
}

TEST_CASE("inadmissible parameters exit with 3 unless overridden") {
  const auto dir = scratch("admissibility");
  const auto cfg = write_config(dir, kSmallSolve);
  RunOptions o;
  o.out_dir = dir / "out";
  const auto res = run_file(cfg, o);
  CHECK(res.exit_code == kExitAdmissibility);
  CHECK(nlohmann::json::parse(slurp(dir / "out" / "error.json"))["exit_code"] == 3);

  // With the gate lifted, the asserted decay meets a blow-up instead.
  o.override_admissibility = true;
  CHECK(run_file(cfg, o).exit_code == kExitBlowup);
}
