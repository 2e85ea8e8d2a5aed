#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>

#include "support.hpp"

using namespace linlat;
using namespace linlat::testing;

namespace {

struct CliRun {
  int status = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(LINLAT_CLI) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int raw = pclose(p);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string uav() { return "--scenario " + source_path("scenarios/uav.json"); }

std::string write_temp(const std::string& name, const json& j) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << j.dump();
  return path;
}

}  // namespace

TEST(Cli, RankEmitsTenVariants) {
  const CliRun r = run(uav() + " rank --new-task x1");
  ASSERT_EQ(r.status, 0);
  const json j = json::parse(r.out);
  ASSERT_EQ(j.at("variants").size(), 10u);
  std::set<std::string> top;
  for (const json& v : j.at("variants")) {
    if (v.at("value") == json::array({"T"})) top.insert(v.at("id"));
  }
  EXPECT_EQ(top, (std::set<std::string>{"2v", "6v", "7v", "8v", "9v"}));
}

TEST(Cli, LatticeBuildWritesDot) {
  const std::string dot = ::testing::TempDir() + "uav.dot";
  const CliRun r = run(uav() + " lattice build --dot " + dot);
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(json::parse(r.out).at("elements").size(), 18u);
  std::ifstream in(dot);
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first.rfind("digraph", 0), 0u);
}

TEST(Cli, LatticeBuildOnOneTask) {
  const std::string path = write_temp("one.json", {{"version", 1}, {"tasks", {{{"name", "a"}, {"actions", {"fly"}}}}}});
  const CliRun r = run("--scenario " + path + " lattice build");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(json::parse(r.out).at("elements").size(), 2u);
}

TEST(Cli, PhaseSynthValidatesAndProposes) {
  const CliRun r = run(uav() + " phase synth --propose --limit 3");
  ASSERT_EQ(r.status, 0);
  const json j = json::parse(r.out);
  EXPECT_TRUE(j.at("pinned"));
  EXPECT_EQ(j.at("phase").at("nonFacts").size(), 6u);
  EXPECT_EQ(j.at("candidates").size(), 3u);
  EXPECT_EQ(j.at("minNonFactCount"), 6);
  EXPECT_FALSE(j.at("pinnedRank").is_null());
}

TEST(Cli, MultSolveEmitsTable) {
  const CliRun r = run(uav() + " mult solve");
  ASSERT_EQ(r.status, 0);
  const json j = json::parse(r.out);
  EXPECT_EQ(j.at("solutionCount"), 62208u);
  EXPECT_EQ(j.at("pairs").size(), 15u);
}

TEST(Cli, RelaxedUnitFlag) {
  const CliRun strict = run(uav() + " --strict-unit=true mult solve");
  const CliRun relaxed = run(uav() + " --strict-unit=false mult solve");
  ASSERT_EQ(strict.status, 0);
  ASSERT_EQ(relaxed.status, 0);
  EXPECT_GE(json::parse(relaxed.out).at("solutionCount").get<std::size_t>(),
            json::parse(strict.out).at("solutionCount").get<std::size_t>());
}

TEST(Cli, VerifySampleIsSeeded) {
  const CliRun a = run(uav() + " verify --sample 20 --seed 7");
  const CliRun b = run(uav() + " verify --sample 20 --seed 7");
  ASSERT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  const json j = json::parse(a.out);
  EXPECT_EQ(j.at("tables"), 20);
  EXPECT_FALSE(j.at("laws").empty());
}

TEST(Cli, VerifyPinnedTable) {
  json table = table_to_json(uav_pipeline().table());
  for (json& p : table["pairs"]) p["values"] = json::array({p["values"][0]});
  const CliRun r = run(uav() + " verify --table " + write_temp("pinned.json", table));
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(json::parse(r.out).at("tables"), 1);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run(uav() + " rank --new-task U12").status, 1);
  EXPECT_EQ(run("--scenario /nonexistent.json lattice build").status, 2);
  EXPECT_EQ(run(uav() + " frobnicate").status, 2);
  EXPECT_EQ(run(uav() + " rank").status, 2);
  EXPECT_EQ(run(uav() + " --policy nonsense rank --new-task x1").status, 2);
  const std::string bad = ::testing::TempDir() + "bad.json";
  std::ofstream(bad) << "{";
  EXPECT_EQ(run("--scenario " + bad + " lattice build").status, 2);
}

TEST(Cli, DefaultPolicyGeneratesMore) {
  const CliRun r = run(uav() + " --policy default rank --new-task x1");
  ASSERT_EQ(r.status, 0);
  EXPECT_GT(json::parse(r.out).at("variants").size(), 10u);
}
