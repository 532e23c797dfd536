#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

#include "csb/run_log.hpp"

namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

CmdResult run_cli(const std::string& args) {
  const std::string cmd = std::string(CSB_CLI_PATH) + " " + args + " 2>&1";
  std::array<char, 4096> buf{};
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buf.data(), buf.size(), pipe) != nullptr) out += buf.data();
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("csb_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

int count_occurrences(const std::string& hay, const std::string& needle) {
  int n = 0;
  for (std::size_t pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + needle.size()))
    ++n;
  return n;
}

void write_genome(const fs::path& p, double dv0) {
  std::ofstream out(p);
  out << "{\"format_version\":1,\"algorithm\":\"ga\",\"seed\":1,"
         "\"fitness\":3.0,\"cost_keur\":100.0,\"s_max\":1.0,\"genes\":["
      << dv0
      << ",1.0,1.0,1.0,1.0,1.0,1.0,1.0,1.0,"
         "500,500,500,500,1.0,30,1.0,1.0,10,10,5,1.5,4.0]}";
}

}  // namespace

TEST_CASE("run twice with the same seed produces byte-identical artifacts") {
  TempDir a, b;
  const std::string common =
      "run --algo cmaes --runs 1 --seed 42 --generations 3 --threads 1 --out ";
  CHECK(run_cli(common + a.path.string()).exit_code == 0);
  CHECK(run_cli(common + b.path.string()).exit_code == 0);

  CHECK(slurp(a.path / "runs/cmaes/42000.csv") ==
        slurp(b.path / "runs/cmaes/42000.csv"));
  CHECK(slurp(a.path / "best/42000.json") == slurp(b.path / "best/42000.json"));
  CHECK(slurp(a.path / "summary.json") == slurp(b.path / "summary.json"));
}

TEST_CASE("GA run writes the expected row count and budget") {
  TempDir t;
  const CmdResult r = run_cli(
      "run --algo ga --runs 1 --seed 7 --generations 10 --pop-size 4 --out " +
      t.path.string());
  CHECK(r.exit_code == 0);
  const std::string csv = slurp(t.path / "runs/ga/7000.csv");
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  CHECK(line == "generation,evals_used,best_fitness,best_cost,best_s");
  int rows = 0;
  std::string last;
  while (std::getline(is, line))
    if (!line.empty()) {
      ++rows;
      last = line;
    }
  CHECK(rows == 10);
  CHECK(last.substr(0, 5) == "9,40,");  // final generation, 40 evaluations
}

TEST_CASE("missing domains file fails with a diagnostic naming the path") {
  const CmdResult r =
      run_cli("run --algo ga --domains /nonexistent/doms.json --out /tmp/x");
  CHECK(r.exit_code == 3);
  CHECK(r.output.find("/nonexistent/doms.json") != std::string::npos);
}

TEST_CASE("validate-config accepts exactly what run accepts") {
  CHECK(run_cli("validate-config --algo ga").exit_code == 0);
  CHECK(run_cli("validate-config --algo cmaes --mu 10 --lambda 30").exit_code ==
        0);
  // Invalid: mu > lambda.
  const CmdResult bad = run_cli("validate-config --algo cmaes --mu 60");
  CHECK(bad.exit_code == 2);
  // Unknown algorithm.
  CHECK(run_cli("validate-config --algo annealing").exit_code == 2);
  // Bad rate range via run must also be 2 on the shared path.
  CHECK(run_cli("validate-config --algo ga --pop-size 0").exit_code == 2);
}

TEST_CASE("export-geometry renders the expected cable fan") {
  TempDir t;
  write_genome(t.path / "g3.json", 3.0);
  const fs::path svg = t.path / "bridge.svg";
  const CmdResult r = run_cli("export-geometry " + (t.path / "g3.json").string() +
                              " --format svg --out " + svg.string());
  CHECK(r.exit_code == 0);
  const std::string body = slurp(svg);
  // 3 stays per half-span, two fans per tower, two towers.
  CHECK(count_occurrences(body, "class=\"cable\"") == 12);
  CHECK(count_occurrences(body, "class=\"tower\"") == 2);
  CHECK(body.find("50 m") != std::string::npos);

  // Determinism: identical bytes on re-export.
  const fs::path svg2 = t.path / "bridge2.svg";
  run_cli("export-geometry " + (t.path / "g3.json").string() +
          " --format svg --out " + svg2.string());
  CHECK(slurp(svg) == slurp(svg2));

  // CSV variant lists nodes and members.
  const fs::path csv = t.path / "bridge.csv";
  CHECK(run_cli("export-geometry " + (t.path / "g3.json").string() +
                " --format csv --out " + csv.string())
            .exit_code == 0);
  const std::string table = slurp(csv);
  CHECK(table.find("node,0,0,") != std::string::npos);
  CHECK(count_occurrences(table, "member,0,cable,") == 12);
}

TEST_CASE("out-of-domain genomes are rejected with a per-gene diagnostic") {
  TempDir t;
  write_genome(t.path / "bad.json", 9.5);  // DV0 outside [3, 7]
  const CmdResult r = run_cli("export-geometry " + (t.path / "bad.json").string() +
                              " --format svg --out " + (t.path / "x.svg").string());
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("gene 0") != std::string::npos);
  CHECK(r.output.find("cable_count") != std::string::npos);
}

TEST_CASE("stats and compare work on run directories") {
  TempDir a, b;
  CHECK(run_cli("run --algo ga --runs 2 --seed 3 --generations 5 --pop-size 4 "
                "--threads 1 --out " +
                a.path.string())
            .exit_code == 0);
  CHECK(run_cli("run --algo cmaes --runs 2 --seed 4 --generations 2 "
                "--threads 1 --out " +
                b.path.string())
            .exit_code == 0);

  const CmdResult stats =
      run_cli("stats " + a.path.string() + " --skip-first 2");
  CHECK(stats.exit_code == 0);
  CHECK(fs::exists(a.path / "mean_curve.csv"));
  CHECK(fs::exists(a.path / "finals.csv"));
  const std::string curve = slurp(a.path / "mean_curve.csv");
  CHECK(curve.find("\n2,") != std::string::npos);
  CHECK(curve.find("\n1,") == std::string::npos);

  const CmdResult cmp = run_cli("compare " + b.path.string() + " " +
                                a.path.string() + " --json " +
                                (a.path / "cmp.json").string());
  CHECK(cmp.exit_code == 0);
  CHECK(cmp.output.find("Rank tests") != std::string::npos);
  CHECK(fs::exists(a.path / "cmp.json"));

  // Comparing against a directory without runs reports incomplete data.
  TempDir empty;
  CHECK(run_cli("compare " + a.path.string() + " " + empty.path.string())
            .exit_code == 4);
}

TEST_CASE("cmaes snapshots are written when requested") {
  TempDir t;
  const CmdResult r = run_cli(
      "run --algo cmaes --runs 1 --seed 9 --generations 4 --snapshot-every 2 "
      "--threads 1 --out " +
      t.path.string());
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(t.path / "snapshots/9000_gen2.json"));
  CHECK(fs::exists(t.path / "snapshots/9000_gen4.json"));
  const std::string snap = slurp(t.path / "snapshots/9000_gen2.json");
  CHECK(snap.find("\"covariance_row_major\"") != std::string::npos);
  CHECK(snap.find("\"rng_state\"") != std::string::npos);
}
