#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bhlab/cli.hpp"
#include "bhlab/errors.hpp"
#include "doctest.h"

using namespace bhlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bhlab_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(std::vector<std::string> args, const fs::path& dir) {
  args.push_back("--output-dir=" + dir.string());
  std::ostringstream out, err;
  return cli::run(args, out, err);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("number parsing") {
  CHECK(cli::parse_real("1/64") == 1.0 / 64);
  CHECK(cli::parse_real("-0.5") == -0.5);
  CHECK(std::isinf(cli::parse_real("inf")));
  CHECK(cli::parse_real_list("1,0.1,0") == std::vector<double>{1, 0.1, 0});
  CHECK_THROWS_AS(cli::parse_real("1/0"), ConfigError);
  CHECK_THROWS_AS(cli::parse_real("0.5x"), ConfigError);
  CHECK_THROWS_AS(cli::parse_real(""), ConfigError);
}

TEST_CASE("config file reader and hash") {
  const auto dir = scratch("config");
  {
    std::ofstream f(dir / "c.cfg");
    f << "# comment\n\n a = 0.5 \nslope_tol=0.2\n";
  }
  const auto m = cli::read_config((dir / "c.cfg").string());
  REQUIRE(m.size() == 2);
  CHECK(m.at("a") == "0.5");
  CHECK(m.at("slope-tol") == "0.2");
  CHECK(cli::config_hash(m) == cli::config_hash(m));
  auto m2 = m;
  m2["a"] = "0.25";
  CHECK(cli::config_hash(m2) != cli::config_hash(m));
  CHECK(cli::config_hash(m).size() == 16);
  {
    std::ofstream f(dir / "bad.cfg");
    f << "novalue\n";
  }
  CHECK_THROWS_AS(cli::read_config((dir / "bad.cfg").string()), ConfigError);
  CHECK_THROWS_AS(cli::read_config((dir / "missing.cfg").string()), ConfigError);
}

TEST_CASE("usage errors exit with 2") {
  const auto dir = scratch("usage");
  CHECK(run({}, dir) == cli::kUsage);
  CHECK(run({"frobnicate"}, dir) == cli::kUsage);
  CHECK(run({"eigen", "--bogus", "1"}, dir) == cli::kUsage);
  CHECK(run({"eigen", "--h", "abc"}, dir) == cli::kUsage);
  CHECK(run({"solve", "--a", "-1.5"}, dir) == cli::kUsage);
  CHECK(run({"eigen", "--a", "1.2"}, dir) == cli::kUsage);
  CHECK(run({"eigen", "--config", (dir / "none.cfg").string()}, dir) == cli::kUsage);
}

TEST_CASE("eigen writes a headed CSV") {
  const auto dir = scratch("eigen");
  CHECK(run({"eigen", "--a", "0.5", "--h", "1/16", "--tol", "0.1"}, dir) == cli::kPass);
  const std::string s = slurp(dir / "eigen.csv");
  CHECK(s.rfind("# bhlab ", 0) == 0);
  for (const char* key : {"# command=eigen", "# config_hash=", "# grid=", "# tolerances=", "# verdict=pass",
                          "quotient_id,a,eps_or_r,h,lambda,residual\n"})
    CHECK(s.find(key) != std::string::npos);
  // An impossible tolerance turns the same run into a failed check.
  CHECK(run({"eigen", "--a", "0.5", "--h", "1/16", "--tol", "1e-9"}, dir) == cli::kFail);
}

TEST_CASE("flags override the config file") {
  const auto dir = scratch("override");
  {
    std::ofstream f(dir / "c.cfg");
    f << "a=0\nh=1/16\ntol=1e-9\n";
  }
  const std::string cfg = "--config=" + (dir / "c.cfg").string();
  CHECK(run({"eigen", cfg}, dir) == cli::kFail);
  CHECK(run({"eigen", cfg, "--tol", "0.1"}, dir) == cli::kPass);
  {
    std::ofstream f(dir / "bad.cfg");
    f << "nonsense=1\n";
  }
  CHECK(run({"eigen", "--config", (dir / "bad.cfg").string()}, dir) == cli::kUsage);
}

TEST_CASE("sweep with a = 0 is exactly uniform and deterministic") {
  const auto d1 = scratch("sweep1"), d2 = scratch("sweep2");
  const std::vector<std::string> args{"sweep", "--a", "0", "--h", "1/16"};
  CHECK(run(args, d1) == cli::kPass);
  CHECK(run(args, d2) == cli::kPass);
  CHECK(slurp(d1 / "sweep_verdict.txt").find("# uniformity_ratio=1 ") != std::string::npos);
  for (const char* f : {"sweep.csv", "sweep_plot.dat", "sweep_verdict.txt"}) CHECK(slurp(d1 / f) == slurp(d2 / f));
}

TEST_CASE("report merges verdicts") {
  const auto dir = scratch("report");
  CHECK(run({"report"}, dir) == cli::kFail);  // nothing to merge
  CHECK(run({"eigen", "--h", "1/16", "--tol", "0.1"}, dir) == cli::kPass);
  CHECK(run({"report"}, dir) == cli::kPass);
  CHECK(slurp(dir / "summary.csv").find("eigen.csv,pass") != std::string::npos);
  CHECK(run({"report", "--inputs", (dir / "eigen.csv").string() + "," + (dir / "gone.csv").string()}, dir) == cli::kFail);
}

}  // TEST_SUITE
