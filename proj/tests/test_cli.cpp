#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tsmpc_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

Result run(const std::string& args, const fs::path& dir) {
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string(TSMPC_CLI_PATH) + " " + args + " --out " + dir.string() + " > " +
                          (dir / "stdout.txt").string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "input.cfg";
  std::ofstream(p) << text;
  return p;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

const std::string kConfigs = TSMPC_CONFIG_DIR;

TEST(Cli, SimulateWritesFiles) {
  const fs::path d = scratch("simulate");
  ASSERT_EQ(run("simulate --config " + kConfigs + "/default.cfg", d).code, 0);
  for (const char* f : {"trace.csv", "summary.txt", "plot.gp", "manifest.cfg"}) EXPECT_TRUE(fs::exists(d / f)) << f;
  const auto rows = lines(slurp(d / "trace.csv"));
  ASSERT_EQ(rows.size(), 1001u);
  EXPECT_EQ(rows[0], "step,time_s,theta,omega,current,u,err_norm,err_theta,stage_cost,solver_iters,pg_norm");
  EXPECT_NE(slurp(d / "summary.txt").find("rate_per_s="), std::string::npos);
}

TEST(Cli, NegativeDeltaRejected) {
  const fs::path d = scratch("negdelta");
  const Result r = run("simulate --delta -1", d);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("delta must be positive"), std::string::npos) << r.err;
}

TEST(Cli, InvalidStrategyListsValues) {
  const fs::path d = scratch("strategy");
  const Result r = run("simulate --strategy best", d);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("proposed|subopt-full|opt-full"), std::string::npos) << r.err;
}

TEST(Cli, UnknownKeyRejected) {
  const fs::path d = scratch("unknownkey");
  const fs::path cfg = write_config(d, "[solver]\nstepsize = 2\n");
  const Result r = run("simulate --config " + cfg.string(), d);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("stepsize"), std::string::npos) << r.err;
}

TEST(Cli, EquilibriumTraceIsZero) {
  const fs::path d = scratch("equilibrium");
  const fs::path cfg = write_config(d, "[sim]\nx0 = 0, 0\nduration_s = 1\n");
  ASSERT_EQ(run("simulate --config " + cfg.string(), d).code, 0);
  const auto rows = lines(slurp(d / "trace.csv"));
  ASSERT_EQ(rows.size(), 101u);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    std::istringstream in(rows[k]);
    std::string cell;
    std::getline(in, cell, ',');
    std::getline(in, cell, ',');
    while (std::getline(in, cell, ',')) EXPECT_EQ(cell, "0") << rows[k];
  }
}

TEST(Cli, ManifestReproducesTrace) {
  const fs::path a = scratch("manifest_a"), b = scratch("manifest_b");
  const fs::path cfg = write_config(a, "[sim]\ndelta = 0.1\nduration_s = 5\nx0 = 0.7, 0.2\n");
  ASSERT_EQ(run("simulate --config " + cfg.string(), a).code, 0);
  ASSERT_EQ(run("simulate --config " + (a / "manifest.cfg").string(), b).code, 0);
  EXPECT_EQ(slurp(a / "trace.csv"), slurp(b / "trace.csv"));
  EXPECT_FALSE(slurp(a / "trace.csv").empty());
}

TEST(Cli, SweepNineRows) {
  const fs::path d = scratch("sweep");
  ASSERT_EQ(run("sweep --deltas 0.01,0.1,0.2", d).code, 0);
  const auto rows = lines(slurp(d / "comparison.csv"));
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_EQ(rows[0], "delta,plant,solver,final_err_theta,rate_per_s,r2,mean_iters,diverged");
}

TEST(Cli, SweepEquilibriumRowsZero) {
  const fs::path d = scratch("sweep_eq");
  const fs::path cfg = write_config(d, "[sim]\nx0 = 0, 0\nduration_s = 1\n");
  ASSERT_EQ(run("sweep --config " + cfg.string() + " --deltas 0.01", d).code, 0);
  const auto rows = lines(slurp(d / "comparison.csv"));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1], "0.01,full_order,suboptimal,0,0,0,0,0");
  EXPECT_EQ(rows[2], "0.01,reduced_order,suboptimal,0,0,0,0,0");
  EXPECT_EQ(rows[3], "0.01,reduced_order,optimal,0,0,0,0,0");
}

TEST(Cli, MalformedDeltas) {
  const fs::path d = scratch("malformed");
  const Result r = run("sweep --deltas 0.01,,0.1", d);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("position 2"), std::string::npos) << r.err;
}

TEST(Cli, CompareWritesTracesAndOrdering) {
  const fs::path d = scratch("compare");
  const fs::path cfg = write_config(d, "[sim]\nduration_s = 2\n");
  ASSERT_EQ(run("compare --config " + cfg.string() + " --deltas 0.1,0.2", d).code, 0);
  EXPECT_EQ(lines(slurp(d / "comparison.csv")).size(), 7u);
  EXPECT_TRUE(fs::exists(d / "trace_delta0.10000000000000001_proposed.csv"));
  EXPECT_TRUE(fs::exists(d / "plot.gp"));
  EXPECT_NE(slurp(d / "summary.txt").find("smallest"), std::string::npos);
}

TEST(Cli, CertifyPendulumDefaults) {
  const fs::path d = scratch("certify");
  ASSERT_EQ(run("certify", d).code, 0);
  const std::string txt = slurp(d / "certificate.txt");
  const auto pos = txt.find("\ndelta_bar = ");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_GT(std::stod(txt.substr(pos + 13)), 0.0);
  EXPECT_TRUE(fs::exists(d / "certificate.json"));
}

TEST(Cli, CertifyBoundaryInductanceFails) {
  const fs::path d = scratch("certify_lt");
  const Result r = run("certify --config " + kConfigs + "/pendulum_lt03.cfg", d);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(slurp(d / "stdout.txt").find("FAIL assumption2.decrease"), std::string::npos);
  EXPECT_NE(slurp(d / "certificate.txt").find("delta_bar = none"), std::string::npos);
}

TEST(Cli, CertifyLinearPasses) {
  const fs::path d = scratch("certify_lin");
  EXPECT_EQ(run("certify --config " + kConfigs + "/linear_certify.cfg", d).code, 0);
  EXPECT_NE(slurp(d / "certificate.txt").find("result = PASS"), std::string::npos);
}

TEST(Cli, DivergenceExitCode) {
  const fs::path d = scratch("diverge");
  const fs::path cfg = write_config(d, "[pendulum]\nL_tilde = 0.1\n[sim]\ndelta = 0.1\nduration_s = 100\nxi0 = 1\n");
  EXPECT_EQ(run("simulate --config " + cfg.string(), d).code, 3);
}

TEST(Cli, NoSubcommandIsUsageError) {
  const fs::path d = scratch("usage");
  EXPECT_EQ(std::system((std::string(TSMPC_CLI_PATH) + " > /dev/null 2>&1").c_str()) != 0, true);
  EXPECT_EQ(run("frobnicate", d).code, 1);
}

}  // namespace
