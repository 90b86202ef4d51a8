#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "runutil.hpp"
#include "taylorlp/errors.hpp"

using namespace tlp;
namespace fs = std::filesystem;

namespace {

cli::Ini parse(const std::string& text) {
  std::istringstream in(text);
  return cli::parse_ini(in, "test.ini");
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("tlp_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  fs::path file(const std::string& rel, const std::string& content) const {
    fs::path p = path / rel;
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p;
  }
};

struct RunResult {
  int exit_code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Spawns the installed binary; the tests exercise the process surface (exit
// codes, stderr shape), not just the library.
RunResult run_cli(const TempDir& tmp, const std::string& args) {
  fs::path out = tmp.path / "stdout.txt";
  fs::path err = tmp.path / "stderr.txt";
  std::string cmd = std::string(TAYLORLP_CLI_PATH) + " " + args + " >" + out.string() + " 2>" +
                    err.string();
  int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::map<std::string, std::string> hash_tree(const fs::path& root) {
  std::map<std::string, std::string> h;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file())
      h[fs::relative(e.path(), root).string()] = cli::fnv1a64_hex(slurp(e.path()));
  return h;
}

const char* kSynthIni =
    "[dgp]\n"
    "n_countries = 6\n"
    "n_years = 25\n"
    "seed = 11\n";

std::string analysis_ini(const fs::path& panel) {
  return "[input]\npanel = " + panel.string() +
         "\n\n[outcome.emp]\nwomen = y_women\nmen = y_men\n";
}

}  // namespace

TEST_CASE("ini parsing keeps order and rejects malformed input") {
  cli::Ini ini = parse(
      "# leading comment\n"
      "[input]\n"
      "panel = data.csv   # trailing comment\n"
      "regions = r.csv\n"
      "\n"
      "[taylor]\n"
      "min_obs = 9\n");
  REQUIRE(ini.sections.size() == 2);
  CHECK(ini.sections[0].name == "input");
  CHECK(ini.sections[0].kv[0].first == "panel");
  CHECK(ini.sections[0].kv[0].second == "data.csv");
  CHECK(ini.sections[0].kv[1].first == "regions");
  CHECK(ini.need("taylor", "min_obs") == "9");
  CHECK(ini.get_or("taylor", "absent", "x") == "x");
  CHECK_THROWS_WITH_AS(ini.need("taylor", "absent"), "config: [taylor] missing key 'absent'",
                       Error);

  CHECK_THROWS_AS(parse("key = 1\n"), Error);            // key before any section
  CHECK_THROWS_AS(parse("[a]\nnoequals\n"), Error);      // not key = value
  CHECK_THROWS_AS(parse("[a]\nk = 1\nk = 2\n"), Error);  // duplicate key
  CHECK_THROWS_AS(parse("[a]\n[a]\n"), Error);           // duplicate section
  CHECK_THROWS_AS(parse("[a\nk = 1\n"), Error);          // unterminated header
  CHECK_THROWS_AS(parse("[a]\n= v\n"), Error);           // empty key
  try {
    parse("[a]\nbroken\n");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("test.ini:2") != std::string::npos);
    CHECK(e.cls() == ErrorClass::config);
  }
}

TEST_CASE("scalar conversions are strict") {
  CHECK(cli::to_double("1.5", "w") == 1.5);
  CHECK(cli::to_double("-2e3", "w") == -2000.0);
  CHECK(cli::to_int("42", "w") == 42);
  CHECK(cli::to_u64("18446744073709551615", "w") == 18446744073709551615ull);
  CHECK(cli::to_bool("true", "w"));
  CHECK_FALSE(cli::to_bool("false", "w"));
  CHECK_THROWS_AS(cli::to_double("1.5x", "w"), Error);
  CHECK_THROWS_AS(cli::to_double("", "w"), Error);
  CHECK_THROWS_AS(cli::to_int("4.2", "w"), Error);
  CHECK_THROWS_AS(cli::to_u64("-1", "w"), Error);
  CHECK_THROWS_AS(cli::to_bool("True", "w"), Error);
  CHECK_THROWS_AS(cli::to_bool("1", "w"), Error);
}

TEST_CASE("list, horizon, and irf-map parsing") {
  CHECK(cli::to_list("a, b ,c", "w") == std::vector<std::string>{"a", "b", "c"});
  CHECK_THROWS_AS(cli::to_list("a,,b", "w"), Error);
  CHECK_THROWS_AS(cli::to_list("", "w"), Error);

  CHECK(cli::to_horizons("0..5", "w") == std::vector<int>{0, 1, 2, 3, 4, 5});
  CHECK(cli::to_horizons("0, 2, 7", "w") == std::vector<int>{0, 2, 7});
  CHECK_THROWS_AS(cli::to_horizons("5..0", "w"), Error);
  CHECK_THROWS_AS(cli::to_horizons("a..b", "w"), Error);

  std::map<int, double> irf = cli::to_irf_map("0:0.1, 2:0.5", "w");
  REQUIRE(irf.size() == 2);
  CHECK(irf.at(0) == 0.1);
  CHECK(irf.at(2) == 0.5);
  CHECK_THROWS_AS(cli::to_irf_map("0:1,0:2", "w"), Error);
  CHECK_THROWS_AS(cli::to_irf_map("0=1", "w"), Error);
}

TEST_CASE("schema validation pins sections, keys, and outcome tags") {
  CHECK_NOTHROW(cli::validate_schema(parse("[input]\npanel = p.csv\n")));
  CHECK_NOTHROW(cli::validate_schema(parse("[outcome.emp_15plus]\nwomen = a\nmen = b\n")));
  CHECK_THROWS_AS(cli::validate_schema(parse("[bogus]\nx = 1\n")), Error);
  CHECK_THROWS_AS(cli::validate_schema(parse("[input]\nbogus = 1\n")), Error);
  CHECK_THROWS_AS(cli::validate_schema(parse("[outcome.emp]\nwomen = a\nextra = b\n")), Error);
  CHECK_THROWS_AS(cli::validate_schema(parse("[outcome.bad tag]\nwomen = a\nmen = b\n")), Error);
  CHECK_THROWS_AS(cli::validate_schema(parse("[outcome.]\nwomen = a\nmen = b\n")), Error);
}

TEST_CASE("fnv1a64 matches the published test vectors") {
  CHECK(cli::fnv1a64("") == 14695981039346656037ull);
  CHECK(cli::fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(cli::fnv1a64("foobar") == 0x85944171f73967e8ull);
  CHECK(cli::fnv1a64_hex("") == "0xcbf29ce484222325");
  CHECK(cli::fnv1a64_hex("foobar") == "0x85944171f73967e8");
}

TEST_CASE("stage promotes atomically and cleans up on failure") {
  TempDir tmp;
  fs::path out = tmp.path / "out";
  {
    cli::Stage stage(out);
    stage.add_text("a.txt", "A");
    stage.add_text("sub/b.txt", "B");
    CHECK(stage.artifacts() == std::vector<std::string>{"a.txt", "sub/b.txt"});
    CHECK(fs::exists(out / ".stage/a.txt"));
    CHECK_FALSE(fs::exists(out / "a.txt"));
    stage.promote();
  }
  CHECK(slurp(out / "a.txt") == "A");
  CHECK(slurp(out / "sub/b.txt") == "B");
  CHECK_FALSE(fs::exists(out / ".stage"));

  {
    cli::Stage stage(out);  // abandoned without promote()
    stage.add_text("a.txt", "OVERWRITTEN");
  }
  CHECK(slurp(out / "a.txt") == "A");  // previous artifact untouched
  CHECK_FALSE(fs::exists(out / ".stage"));
}

TEST_CASE("synth is seed-deterministic end to end") {
  TempDir tmp;
  fs::path cfg = tmp.file("synth.ini", kSynthIni);
  std::string base = "synth --config " + cfg.string() + " --out ";

  RunResult r1 = run_cli(tmp, base + (tmp.path / "d1").string());
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r1.err.empty());
  RunResult r2 = run_cli(tmp, base + (tmp.path / "d2").string());
  REQUIRE(r2.exit_code == 0);

  for (const char* f : {"panel.csv", "truth.json", "regions.csv"})
    CHECK(slurp(tmp.path / "d1" / f) == slurp(tmp.path / "d2" / f));

  RunResult r3 = run_cli(tmp, base + (tmp.path / "d3").string() + " --seed 99");
  REQUIRE(r3.exit_code == 0);
  CHECK(slurp(tmp.path / "d1/panel.csv") != slurp(tmp.path / "d3/panel.csv"));

  nlohmann::json m = nlohmann::json::parse(slurp(tmp.path / "d1/manifest.json"));
  CHECK(m["tool"] == "taylorlp");
  CHECK(m["generator"]["seed"] == 11);
  std::set<std::string> listed(m["artifacts"].begin(), m["artifacts"].end());
  CHECK(listed == std::set<std::string>{"manifest.json", "panel.csv", "regions.csv",
                                        "truth.json"});
}

TEST_CASE("lp run produces the documented artifact inventory and full accounting") {
  TempDir tmp;
  fs::path synth_cfg = tmp.file("synth.ini", kSynthIni);
  REQUIRE(run_cli(tmp, "synth --config " + synth_cfg.string() + " --out " +
                           (tmp.path / "data").string())
              .exit_code == 0);

  fs::path cfg = tmp.file("lp.ini", analysis_ini(tmp.path / "data/panel.csv"));
  fs::path out = tmp.path / "run";
  RunResult r = run_cli(tmp, "lp --config " + cfg.string() + " --out " + out.string());
  REQUIRE_MESSAGE(r.exit_code == 0, r.err);

  for (const char* f : {"baseline/emp.csv", "baseline/emp.json", "baseline/emp.svg",
                        "manifest.json"})
    CHECK(fs::exists(out / f));

  nlohmann::json m = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(m["countries"].size() == 6);  // every panel country accounted for
  for (const auto& c : m["countries"]) {
    bool used = c["status"] == "used";
    bool skipped_with_reason = c["status"] == "skipped" && !c["reason"].get<std::string>().empty();
    CHECK((used || skipped_with_reason));
  }
  CHECK(m["inputs"]["panel"]["fnv1a64"] == m["inputs"]["panel"]["fnv1a64_after"]);
  CHECK(m.dump().find("timestamp") == std::string::npos);

  // byte-identical rerun into the same directory
  auto h1 = hash_tree(out);
  RunResult again = run_cli(tmp, "lp --config " + cfg.string() + " --out " + out.string());
  REQUIRE(again.exit_code == 0);
  CHECK(hash_tree(out) == h1);

  // the SVG is self-contained deterministic XML
  std::string svg = slurp(out / "baseline/emp.svg");
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("version=\"1.1\"") != std::string::npos);
}

TEST_CASE("error classes map to exit codes and single-line diagnostics") {
  TempDir tmp;
  fs::path bad = tmp.file("bad.ini", "[bogus]\nx = 1\n");
  RunResult r = run_cli(tmp, "lp --config " + bad.string() + " --out " +
                                 (tmp.path / "o1").string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.rfind("config_error: ", 0) == 0);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  CHECK_FALSE(fs::exists(tmp.path / "o1"));

  fs::path missing = tmp.file("missing.ini",
                              "[input]\npanel = nope.csv\n[outcome.e]\nwomen = a\nmen = b\n");
  r = run_cli(tmp, "lp --config " + missing.string() + " --out " + (tmp.path / "o2").string());
  CHECK(r.exit_code == 5);
  CHECK(r.err.rfind("io_error: ", 0) == 0);

  fs::path panel = tmp.file("tiny.csv",
                            "country,year,i,g,g_forecast,pi,pi_forecast,f,y_women,y_men\n"
                            "A,2000,1,2,3,4,5,6,7,8\n"
                            "A,2001,1,2,3,4,5,6,7,8\n");
  fs::path est = tmp.file("est.ini", analysis_ini(panel));
  r = run_cli(tmp, "lp --config " + est.string() + " --out " + (tmp.path / "o3").string());
  CHECK(r.exit_code == 4);
  CHECK(r.err.rfind("estimation_error: ", 0) == 0);
  CHECK_FALSE(fs::exists(tmp.path / "o3"));

  // regime command without its selector
  fs::path noreg = tmp.file("noreg.ini", analysis_ini(panel));
  r = run_cli(tmp, "regimed --config " + noreg.string() + " --out " + (tmp.path / "o4").string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("run must include 'regimed'") != std::string::npos);
}

TEST_CASE("plot renders an irf csv round-tripped through the lp command") {
  TempDir tmp;
  fs::path synth_cfg = tmp.file("synth.ini", kSynthIni);
  REQUIRE(run_cli(tmp, "synth --config " + synth_cfg.string() + " --out " +
                           (tmp.path / "data").string())
              .exit_code == 0);
  fs::path cfg = tmp.file("lp.ini", analysis_ini(tmp.path / "data/panel.csv"));
  REQUIRE(run_cli(tmp, "lp --config " + cfg.string() + " --out " +
                           (tmp.path / "run").string())
              .exit_code == 0);

  fs::path pcfg = tmp.file("plot.ini", "[plot]\ninput = " +
                                           (tmp.path / "run/baseline/emp.csv").string() +
                                           "\ntitle = demo\n");
  RunResult r = run_cli(tmp, "plot --config " + pcfg.string() + " --out " +
                                 (tmp.path / "fig").string());
  REQUIRE_MESSAGE(r.exit_code == 0, r.err);
  std::string svg = slurp(tmp.path / "fig/emp.svg");
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("demo") != std::string::npos);
  nlohmann::json m = nlohmann::json::parse(slurp(tmp.path / "fig/manifest.json"));
  CHECK(m["plot"]["labels"] == 3);
}
