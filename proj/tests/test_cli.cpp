// Subprocess tests for the command-line tool: exit codes, the report
// envelope, file side effects, and cross-format consistency.  Each test
// shells out to the built binary; its path is injected by the build as
// ETALAB_CLI_PATH.
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#ifdef __unix__
#include <sys/wait.h>
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int rc = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "etalab_cli_tests";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  fs::path out = scratch_dir() / ("stdout" + std::to_string(counter) + ".txt");
  fs::path err = scratch_dir() / ("stderr" + std::to_string(counter) + ".txt");
  ++counter;
  std::string cmd = std::string("\"") + ETALAB_CLI_PATH + "\" " + args + " > \"" + out.string() +
                    "\" 2> \"" + err.string() + "\"";
  int status = std::system(cmd.c_str());
  RunResult r;
#ifdef __unix__
  if (WIFEXITED(status)) r.rc = WEXITSTATUS(status);
#else
  r.rc = status;
#endif
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

// Splits on the exact ", " separator the CSV writer uses.
std::vector<std::string> csv_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = line.find(", ", pos);
    if (next == std::string::npos) {
      cells.push_back(line.substr(pos));
      return cells;
    }
    cells.push_back(line.substr(pos, next - pos));
    pos = next + 2;
  }
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

const char* kScalarOp = "--op comp=1,c=0.3,theta=0.25";

}  // namespace

TEST_CASE("selftest passes and emits the versioned envelope") {
  RunResult r = run_cli("selftest");
  REQUIRE(r.rc == 0);
  json env = json::parse(r.out);
  CHECK(env["schema"] == "etalab/1");
  CHECK(env["tool"]["name"] == "etalab");
  CHECK(env["tool"]["version"] == "1.0.0");
  REQUIRE(env["result"]["all_ok"] == true);
  for (const auto& chk : env["result"]["checks"]) CHECK(chk["ok"] == true);
  CHECK(env["diagnostics"]["flagged"] == false);
  CHECK(env["diagnostics"]["wall_ms"].get<double>() >= 0.0);
}

TEST_CASE("eta run: value, config echo, and timing kept out of the result") {
  RunResult r = run_cli(std::string("eta ") + kScalarOp + " --cover n=2 --class 1");
  REQUIRE(r.rc == 0);
  json env = json::parse(r.out);
  const json& res = env["result"];
  CHECK(res["value"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(std::fabs(res["value_im"].get<double>()) < 1e-8);
  CHECK(res["flagged"] == false);
  CHECK(res["total_error"].get<double>() < 1e-6);
  // wall-clock time lives in diagnostics only, so results stay comparable
  CHECK(!res.contains("wall_ms"));
  CHECK(env["config"]["class"] == 1);
  CHECK(env["config"]["subcommand"] == "eta");
}

TEST_CASE("identical configs produce identical result and config objects") {
  const std::string args = std::string("eta ") + kScalarOp + " --cover n=3 --class 2";
  RunResult a = run_cli(args);
  RunResult b = run_cli(args);
  REQUIRE(a.rc == 0);
  REQUIRE(b.rc == 0);
  json ea = json::parse(a.out);
  json eb = json::parse(b.out);
  CHECK(ea["result"] == eb["result"]);
  CHECK(ea["config"] == eb["config"]);
}

TEST_CASE("--json writes the exact stdout envelope to the requested path") {
  fs::path target = scratch_dir() / "eta_report.json";
  fs::remove(target);
  RunResult r =
      run_cli(std::string("eta ") + kScalarOp + " --cover n=2 --class 1 --json \"" +
              target.string() + "\"");
  REQUIRE(r.rc == 0);
  REQUIRE(fs::exists(target));
  CHECK(slurp(target) == r.out);
}

TEST_CASE("malformed operator spec: exit 2 and no report file is left behind") {
  fs::path target = scratch_dir() / "never_written.json";
  fs::remove(target);
  RunResult r = run_cli("eta --op comp=3,m=1 --cover n=2 --class 1 --json \"" +
                        target.string() + "\"");
  CHECK(r.rc == 2);
  CHECK(!fs::exists(target));
  CHECK(r.err.find("error:") != std::string::npos);
  CHECK(r.err.find("comp must be 1 or 2") != std::string::npos);
}

TEST_CASE("1-component line request is refused as a precondition failure") {
  RunResult r = run_cli(std::string("eta ") + kScalarOp + " --cover line --class 1");
  CHECK(r.rc == 3);
  CHECK(r.err.find("line cover gapless for this family") != std::string::npos);
}

TEST_CASE("--csv outside converge: exit 2 and no file") {
  fs::path target = scratch_dir() / "never_written.csv";
  fs::remove(target);
  RunResult r = run_cli(std::string("eta ") + kScalarOp +
                        " --cover n=2 --class 1 --csv \"" + target.string() + "\"");
  CHECK(r.rc == 2);
  CHECK(!fs::exists(target));
  CHECK(r.err.find("converge") != std::string::npos);
}

TEST_CASE("unknown subcommand exits 2") {
  RunResult r = run_cli("frobnicate");
  CHECK(r.rc == 2);
}

TEST_CASE("exhausted search budget exits 4") {
  RunResult r = run_cli("group constants --group f2 --radius 30 --max-states 200000");
  CHECK(r.rc == 4);
  CHECK(r.err.find("budget") != std::string::npos);
}

TEST_CASE("converge CSV mirrors the JSON rows cell for cell") {
  fs::path target = scratch_dir() / "tower.csv";
  fs::remove(target);
  RunResult r = run_cli(std::string("converge ") + kScalarOp +
                        " --tower 2,4 --class 1 --csv \"" + target.string() + "\"");
  REQUIRE(r.rc == 0);
  json env = json::parse(r.out);
  const json& res = env["result"];
  REQUIRE(res["rows"].size() == 2);
  // no spectral gap certificate for a 1-component family, so no line column
  CHECK(res["line"].is_null());

  std::vector<std::string> lines = split_lines(slurp(target));
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "n, eta_n, quad_err, tail_bound, trunc_bound, eta_line, abs_diff");
  for (std::size_t i = 0; i < 2; ++i) {
    std::vector<std::string> cells = csv_cells(lines[i + 1]);
    REQUIRE(cells.size() == 7);
    const json& row = res["rows"][i];
    CHECK(cells[0] == std::to_string(row["n"].get<int>()));
    // the CSV writer serializes numbers with the same dump routine as the
    // JSON envelope, so the cells must match the JSON values byte for byte
    CHECK(cells[1] == json(row["eta"]["value"].get<double>()).dump());
    CHECK(cells[2] == json(row["eta"]["quad_err"].get<double>()).dump());
    CHECK(cells[3] == json(row["eta"]["tail_bound"].get<double>()).dump());
    CHECK(cells[4] == json(row["eta"]["trunc_bound"].get<double>()).dump());
    CHECK(cells[5].empty());
    CHECK(cells[6].empty());
  }
  CHECK(res["rows"][0]["eta"]["value"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(res["rows"][1]["eta"]["value"].get<double>() == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("worker-thread count does not change the result object") {
  const std::string base = std::string("converge ") + kScalarOp + " --tower 2,4 --class 1";
  RunResult one = run_cli(base + " --threads 1");
  RunResult four = run_cli(base + " --threads 4");
  REQUIRE(one.rc == 0);
  REQUIRE(four.rc == 0);
  CHECK(json::parse(one.out)["result"] == json::parse(four.out)["result"]);
}

TEST_CASE("the separation subcommand accepts both spellings") {
  const std::string tail = " --group sl2z --tower psi --class x --cap 6";
  RunResult canonical = run_cli("group seprate" + tail);
  RunResult alias = run_cli("group separate" + tail);
  REQUIRE(canonical.rc == 0);
  REQUIRE(alias.rc == 0);
  json a = json::parse(canonical.out);
  json b = json::parse(alias.out);
  CHECK(a["result"] == b["result"]);
  CHECK(a["config"] == b["config"]);
  CHECK(a["result"]["rate"].get<double>() == 0.0);
}

TEST_CASE("spectrum on the line reports certified and grid gaps") {
  RunResult r =
      run_cli("spectrum --op comp=2,m=1,c=0.3,theta=0.25,v=0.2cos1 --cover line");
  REQUIRE(r.rc == 0);
  json env = json::parse(r.out);
  CHECK(env["result"]["certified_gap"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(env["result"]["grid_gap"].get<double>() ==
        doctest::Approx(0.6989876029357015).epsilon(1e-9));
}
