#include <gtest/gtest.h>

#include <fstream>

#include "support.hpp"

using namespace linlat;
using namespace linlat::testing;

TEST(Scenario, UavFixtureLoads) {
  const Scenario& s = uav_scenario();
  EXPECT_EQ(s.version, 1);
  EXPECT_EQ(s.tasks.size(), 4u);
  EXPECT_EQ(s.agents.size(), 3u);
  ASSERT_TRUE(s.candidates.has_value());
  EXPECT_EQ(s.candidates->new_task, "x1");
  EXPECT_EQ(s.candidates->variants.size(), 10u);
  EXPECT_TRUE(s.phase.has_value());
  EXPECT_FALSE(s.table.has_value());
}

TEST(Scenario, DocumentRoundTrip) {
  const json once = scenario_to_json(uav_scenario());
  const json twice = scenario_to_json(scenario_from_json(once));
  EXPECT_EQ(once, twice);
}

TEST(Scenario, LatticeRoundTrip) {
  const json j = lattice_to_json(*uav_lattice());
  EXPECT_EQ(j.at("elements").size(), 18u);
  EXPECT_EQ(j.at("edges").size(), 35u);
  const TaskLattice back = lattice_from_json(j);
  EXPECT_TRUE(back == *uav_lattice());
  EXPECT_EQ(lattice_to_json(back), j);
}

TEST(Scenario, PhaseRoundTrip) {
  const json j = phase_to_json(uav_phase());
  const PhaseStructure back = phase_from_json(j, uav_lattice());
  EXPECT_TRUE(back == uav_phase());
  EXPECT_EQ(phase_to_json(back), j);
}

TEST(Scenario, PhaseNeedsEveryDual) {
  json j = *uav_scenario().phase;
  j["dual"].erase("U12e");
  try {
    (void)phase_from_json(j, uav_lattice());
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidDuality);
  }
  json wrong_unit = *uav_scenario().phase;
  wrong_unit["unit"] = "T";
  EXPECT_THROW((void)phase_from_json(wrong_unit, uav_lattice()), DomainError);
}

TEST(Scenario, TableRoundTripWithSolutions) {
  const AdmissibleTable& t = uav_pipeline().table();
  const json j = table_to_json(t, true);
  EXPECT_EQ(j.at("solutionCount"), 62208u);
  const AdmissibleTable back = table_from_json(j, t.layout);
  EXPECT_EQ(back.solutions, t.solutions);
  EXPECT_EQ(back.per_pair, t.per_pair);
}

TEST(Scenario, PinnedTableExpandsToCombinations) {
  const AdmissibleTable& t = uav_pipeline().table();
  const AdmissibleTable back = table_from_json(table_to_json(t), t.layout);
  std::size_t product = 1;
  for (const auto& v : t.per_pair) product *= v.size();
  EXPECT_EQ(back.solution_count(), product);
  EXPECT_EQ(back.per_pair, t.per_pair);
  EXPECT_GE(back.solution_count(), t.solution_count());
}

TEST(Scenario, PinnedTableDrivesThePipeline) {
  Scenario s = uav_scenario();
  json table = table_to_json(uav_pipeline().table());
  // Pin every pair to the first value of its admissible set.
  for (json& p : table["pairs"]) p["values"] = json::array({p["values"][0]});
  s.table = table;
  const Pipeline p = build_pipeline(s);
  EXPECT_EQ(p.table().solution_count(), 1u);
  EXPECT_FALSE(p.constraints.has_value());
}

TEST(Scenario, StateRoundTrip) {
  const TaskLattice& L = *uav_lattice();
  const json st = state_to_json(uav_pipeline().state, L);
  EXPECT_EQ(st.at("expression"), "C2e * x3");
  json doc = scenario_to_json(uav_scenario());
  doc["agents"] = st.at("agents");
  const Scenario s = scenario_from_json(doc);
  EXPECT_EQ(state_from_specs(s.agents, L), uav_pipeline().state);
}

TEST(Scenario, UnpinnedPhaseUsesBestProposal) {
  Scenario s = uav_scenario();
  s.phase.reset();
  s.candidates.reset();
  const std::shared_ptr<const TaskLattice> L = build_lattice(s);
  const PhaseStructure best = propose_bottom(L).front().structure;
  EXPECT_EQ(best.non_facts().size(), 6u);
}

TEST(Scenario, MalformedDocumentsAreParseErrors) {
  EXPECT_THROW(scenario_from_json(json::array()), ParseError);
  EXPECT_THROW(scenario_from_json(json{{"version", 1}}), ParseError);
  EXPECT_THROW(scenario_from_json(json{{"version", 7}, {"tasks", json::array()}}), ParseError);
  EXPECT_THROW(scenario_from_json(json{{"tasks", {{{"name", "a"}}}}}), ParseError);
  json bad_kind = scenario_to_json(uav_scenario());
  bad_kind["agents"][0]["kind"] = "robot";
  EXPECT_THROW(scenario_from_json(bad_kind), ParseError);
  EXPECT_THROW(load_scenario("/nonexistent/file.json"), ParseError);

  const std::string path = ::testing::TempDir() + "broken.json";
  std::ofstream(path) << "{ not json";
  EXPECT_THROW(load_scenario(path), ParseError);
}

TEST(Scenario, ReferentialErrorsAreDomainErrors) {
  Scenario s = uav_scenario();
  s.agents[0].active = "zz";
  EXPECT_THROW(build_pipeline(s), DomainError);
  Scenario dup = uav_scenario();
  dup.agents[1].id = dup.agents[0].id;
  EXPECT_THROW(build_pipeline(dup), DomainError);
}
