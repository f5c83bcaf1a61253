#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vhpf/vhpf.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result cli(const std::string& args) {
  const std::string cmd = std::string(VHPF_CLI) + " " + args + " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "vhpf_cli_tests" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::string scenario_file(const std::string& name) { return std::string(VHPF_SCENARIO_DIR) + "/" + name; }

}  // namespace

TEST(Cli, RunExchangeWritesBundle) {
  const auto dir = scratch("case1");
  const auto r = cli("run case1 --out " + dir.string());
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("CONVERGED"), std::string::npos);
  for (const char* f : {"trajectory.csv", "events.json", "metrics.json", "trajectory.svg"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  std::istringstream csv(slurp(dir / "trajectory.csv"));
  const auto table = vhpf::read_trajectory_csv(csv);
  std::set<int> ids;
  for (const auto& row : table.rows) ids.insert(row.agent_id);
  EXPECT_EQ(ids, (std::set<int>{1, 2}));
}

TEST(Cli, OutputsAreByteIdentical) {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  ASSERT_EQ(cli("run case4 --out " + a.string()).code, 0);
  ASSERT_EQ(cli("run case4 --out " + b.string()).code, 0);
  for (const char* f : {"trajectory.csv", "events.json", "metrics.json", "trajectory.svg"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(Cli, ExitCodesFollowOutcome) {
  EXPECT_EQ(cli("run case8_tight --out " + scratch("case8").string()).code, 2);
  EXPECT_EQ(cli("run " + scenario_file("demo_collision.json") + " --out " + scratch("col").string()).code, 3);
  EXPECT_EQ(cli("run " + scenario_file("demo_timeout.json") + " --out " + scratch("tmo").string()).code, 4);
  EXPECT_EQ(cli("run nosuch").code, 5);
  EXPECT_EQ(cli("run case1 --dt -1").code, 5);
  EXPECT_EQ(cli("run case1 --integrator leapfrog").code, 5);
  EXPECT_EQ(cli("frobnicate").code, 5);
}

TEST(Cli, UnwritableOutputIsAnIoError) {
  const auto dir = scratch("blocked");
  std::ofstream(dir / "file") << "x";
  EXPECT_EQ(cli("run case1 --tmax 0.5 --out " + (dir / "file" / "sub").string()).code, 1);
}

TEST(Cli, OverridesReachTheRun) {
  const auto dir = scratch("override");
  EXPECT_EQ(cli("run case1 --no-crf --out " + dir.string()).code, 3);
  const auto dir2 = scratch("override2");
  EXPECT_EQ(cli("run case1 --tmax 1 --integrator euler --dt 0.05 --out " + dir2.string()).code, 4);
  const std::string csv = slurp(dir2 / "trajectory.csv");
  EXPECT_EQ(lines(csv), 1u + 2u * 21u);
}

TEST(Cli, SweepSingleRowMatchesRun) {
  const auto dir = scratch("sweep1");
  const auto r = cli("sweep-delta case1 --profiles linear --deltas 1.5 --out " + dir.string());
  ASSERT_EQ(r.code, 0);
  const std::string csv = slurp(dir / "sweep_delta.csv");
  EXPECT_EQ(lines(csv), 2u);
  auto spec = vhpf::builtin("case1");
  spec.profile.kind = vhpf::ProfileKind::Linear;
  const auto run = vhpf::run(spec);
  const double kappa = std::max(run.metrics.kappa_max[0], run.metrics.kappa_max[1]);
  EXPECT_EQ(csv, "profile,delta,kappa_max\nlinear,1.5," + vhpf::format_double(kappa) + "\n");
}

TEST(Cli, SweepRowsAreSorted) {
  const auto dir = scratch("sweep2");
  ASSERT_EQ(cli("sweep-delta case1 --profiles sin,exp --deltas 2.0,1.0 --out " + dir.string()).code, 0);
  std::istringstream in(slurp(dir / "sweep_delta.csv"));
  std::string line;
  std::vector<std::string> keys;
  std::getline(in, line);
  while (std::getline(in, line)) keys.push_back(line.substr(0, line.find(',', line.find(',') + 1)));
  EXPECT_EQ(keys, (std::vector<std::string>{"exp,1", "exp,2", "sin,1", "sin,2"}));
}

TEST(Cli, SweepRejectsBadInput) {
  EXPECT_EQ(cli("sweep-delta case1 --deltas \"\" --out " + scratch("s3").string()).code, 5);
  EXPECT_EQ(cli("sweep-delta case1 --deltas 1,x").code, 5);
  EXPECT_EQ(cli("sweep-delta case4 --deltas 1").code, 5);
  EXPECT_EQ(cli("sweep-delta case1 --profiles cubic --deltas 1").code, 5);
}

TEST(Cli, PlotIsDeterministicAndStructural) {
  const auto dir = scratch("plot");
  ASSERT_EQ(cli("run case1 --out " + dir.string()).code, 0);
  const auto csv = (dir / "trajectory.csv").string();
  ASSERT_EQ(cli("plot " + csv + " case1 --out " + (dir / "a.svg").string()).code, 0);
  ASSERT_EQ(cli("plot " + csv + " case1 --out " + (dir / "b.svg").string()).code, 0);
  const std::string a = slurp(dir / "a.svg");
  EXPECT_EQ(a, slurp(dir / "b.svg"));
  std::size_t polylines = 0;
  for (auto p = a.find("<polyline"); p != std::string::npos; p = a.find("<polyline", p + 1)) ++polylines;
  EXPECT_EQ(polylines, 2u);
  EXPECT_EQ(a, slurp(dir / "trajectory.svg"));
}

TEST(Cli, PlotHeaderOnlyAndMalformed) {
  const auto dir = scratch("plot2");
  std::ofstream(dir / "empty.csv") << vhpf::trajectory_header(2) << "\n";
  std::ofstream(dir / "bad.csv") << "t,agent_id,x,y,ux,uy,sigma_activity\n0,1,zz,0,0,0,0\n";
  ASSERT_EQ(cli("plot " + (dir / "empty.csv").string() + " case1 --out " + (dir / "e.svg").string()).code, 0);
  EXPECT_EQ(slurp(dir / "e.svg").find("<polyline"), std::string::npos);
  EXPECT_EQ(cli("plot " + (dir / "bad.csv").string() + " case1 --out " + (dir / "x.svg").string()).code, 5);
  EXPECT_EQ(cli("plot " + (dir / "missing.csv").string() + " case1").code, 1);
}

TEST(Cli, AuditExportAndList) {
  const auto audit = cli("audit case8_tight");
  EXPECT_EQ(audit.code, 0);
  EXPECT_NE(audit.out.find("violating"), std::string::npos);
  EXPECT_EQ(cli("audit case1").code, 0);

  const auto exp = cli("export case1");
  EXPECT_EQ(exp.code, 0);
  EXPECT_EQ(exp.out, vhpf::serialize(vhpf::builtin("case1")));

  const auto list = cli("list");
  EXPECT_EQ(list.code, 0);
  EXPECT_EQ(lines(list.out), vhpf::builtin_names().size());
}

TEST(Cli, ShippedScenarioFilesRun) {
  const auto dir = scratch("file");
  EXPECT_EQ(cli("run " + scenario_file("case1.json") + " --out " + dir.string()).code, 0);
}
