#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "bopp/io.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("bopp_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI with stdout captured to a file in dir.
Run cli(const TempDir& dir, const std::string& args) {
  const std::string log = dir / "stdout.txt";
  const std::string cmd = std::string(BOPP_CLI_PATH) + " " + args + " > " + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write(const std::string& p, const std::string& text) { std::ofstream(p) << text; }

bool contains(const std::string& s, const std::string& needle) { return s.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("capacity of the unit ball") {
  TempDir t;
  const Run r = cli(t, "--command capacity --out " + (t / "o"));
  CHECK(r.code == 0);
  CHECK(contains(r.out, "capacity 3.1415926535897931"));
  CHECK(contains(slurp(t / "o/summary.csv"), "capacity,3.1415926535897931"));
  CHECK(fs::exists(t / "o/report.txt"));
}

TEST_CASE("transfer-check with defaults") {
  TempDir t;
  const Run r = cli(t, "--command transfer-check --out " + (t / "o"));
  CHECK(r.code == 0);
  const std::string csv = slurp(t / "o/summary.csv");
  for (int k = 0; k < 3; ++k) {
    const std::string key = "eigenvalue_" + std::to_string(k) + ",";
    const auto at = csv.find(key);
    REQUIRE(at != std::string::npos);
    const double lam = std::stod(csv.substr(at + key.size()));
    CHECK(std::abs(lam - (k + 0.5)) <= 1e-6);
  }
  CHECK(contains(csv, "residual_2_2,"));
  CHECK(contains(csv, "max_residual,"));
}

TEST_CASE("invalid configurations exit with 2") {
  TempDir t;
  write(t / "missing.cfg", "command = capacity\nomega_file = " + (t / "nope.csv") + "\n");
  Run r = cli(t, "--config " + (t / "missing.cfg") + " --out " + (t / "o"));
  CHECK(r.code == 2);
  CHECK(contains(r.out, "missing file"));

  write(t / "key.cfg", "command = capacity\nbogus = 1\n");
  CHECK(cli(t, "--config " + (t / "key.cfg") + " --out " + (t / "o")).code == 2);
  CHECK(cli(t, "--command frobnicate --out " + (t / "o")).code == 2);
  CHECK(cli(t, "--out " + (t / "o")).code == 2);
  CHECK(cli(t, "--command acceptance --only nosuch --out " + (t / "o")).code == 2);
  CHECK(cli(t, "--command acceptance --tol nosuch=1 --out " + (t / "o")).code == 2);
  CHECK(cli(t, "--command acceptance --tol moyal=-1 --out " + (t / "o")).code == 2);
  CHECK(cli(t, "--config " + (t / "absent.cfg")).code == 2);
}

TEST_CASE("flags override the config file") {
  TempDir t;
  write(t / "c.cfg", "# a comment\ncommand = spectrum\nM_scale = 2\npoints = 32\n");
  const Run r = cli(t, "--config " + (t / "c.cfg") + " --command capacity --out " + (t / "o"));
  CHECK(r.code == 0);
  CHECK(contains(r.out, "capacity 1.5707963267948966"));
}

TEST_CASE("acceptance filter and forced failure") {
  TempDir t;
  Run r = cli(t, "--command acceptance --only moyal --out " + (t / "o"));
  CHECK(r.code == 0);
  CHECK(contains(r.out, "moyal"));
  CHECK_FALSE(contains(r.out, "involution"));
  CHECK(contains(r.out, "acceptance: all criteria pass"));

  // The involution residual sits at ~4e-16, so only a tolerance below round-off fails it.
  r = cli(t, "--command acceptance --only involution --tol involution=1e-17 --out " + (t / "f"));
  CHECK(r.code == 3);
  CHECK(contains(r.out, "[FAIL]"));
  CHECK(contains(r.out, "acceptance: FAILED"));
  CHECK(contains(slurp(t / "f/summary.csv"), "criterion_1,fail"));
}

TEST_CASE("certify-concentration verdicts") {
  TempDir t;
  CHECK(cli(t, "--command certify-concentration --out " + (t / "a")).code == 0);
  const Run r = cli(t, "--command certify-concentration --M_scale 2 --out " + (t / "b"));
  CHECK(r.code == 2);  // unknown flag
  write(t / "tight.cfg", "command = certify-concentration\nconcentration = 2\nM_scale = 2\n");
  const Run v = cli(t, "--config " + (t / "tight.cfg") + " --out " + (t / "c"));
  CHECK(v.code == 3);
  CHECK(contains(v.out, "VIOLATES"));
}

TEST_CASE("artifacts are deterministic and round-trip bit-exactly") {
  TempDir t;
  write(t / "t.cfg", "points = 32\n");
  REQUIRE(cli(t, "--config " + (t / "t.cfg") + " --command transform --seed 7 --out " + (t / "a")).code == 0);
  REQUIRE(cli(t, "--config " + (t / "t.cfg") + " --command transform --seed 7 --out " + (t / "b")).code == 0);
  REQUIRE(cli(t, "--config " + (t / "t.cfg") + " --command spectrum --out " + (t / "s")).code == 0);
  int seen = 0;
  for (const std::string dir : {"a", "s"})
    for (const auto& e : fs::directory_iterator(t / dir)) {
      if (e.path().extension() != ".pswc") continue;
      ++seen;
      const std::string p = e.path().string();
      const bopp::ArrayRecord rec = bopp::read_pswc(p);
      const std::string again = t / "again.pswc";
      bopp::write_pswc(again, rec);
      CHECK(slurp(again) == slurp(p));
      if (dir == "a") CHECK(slurp(p) == slurp(t / ("b/" + e.path().filename().string())));
    }
  CHECK(seen >= 7);
}
