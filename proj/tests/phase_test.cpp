#include <gtest/gtest.h>

#include "support.hpp"

using namespace linlat;
using namespace linlat::testing;

namespace {

std::vector<std::string> L_(const std::vector<ElementId>& xs) { return labels(*uav_lattice(), xs); }

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST(Phase, UavDualPairs) {
  const PhaseStructure& ps = uav_phase();
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"x3", "U12"}, {"U1d", "U23"}, {"x1", "U23e"}, {"x2", "U13"}, {"d", "U123"}, {"T", "0"}};
  for (auto [a, b] : pairs) {
    EXPECT_EQ(ps.dual(id(a)), id(b)) << a;
    EXPECT_EQ(ps.dual(id(b)), id(a)) << b;
  }
  EXPECT_EQ(ps.bottom(), id("x3"));
  EXPECT_EQ(ps.unit(), id("U12"));
  EXPECT_FALSE(ps.classical());
}

TEST(Phase, UavFactsAndPartition) {
  const PhaseStructure& ps = uav_phase();
  EXPECT_EQ(ps.facts().size(), 12u);
  EXPECT_EQ(L_(ps.non_facts()), sorted({"C1e", "C2e", "C3e", "U12e", "U13e", "e"}));
  EXPECT_EQ(L_(ps.open_facts()), sorted({"0", "d", "x1", "x2", "U1d", "U12"}));
  EXPECT_EQ(L_(ps.closed_facts()), sorted({"x3", "U13", "U23", "U123", "U23e", "T"}));
  EXPECT_EQ(ps.fact_closure(id("e")), id("U23e"));
  EXPECT_EQ(ps.fact_closure(id("C1e")), id("T"));
}

TEST(Phase, Exponentials) {
  const PhaseStructure& ps = uav_phase();
  EXPECT_EQ(ps.of_course(id("T")), id("U12"));
  EXPECT_EQ(ps.of_course(id("U23e")), id("x2"));
  EXPECT_EQ(ps.of_course(id("x3")), id("d"));
  EXPECT_EQ(ps.why_not(id("x1")), id("U13"));
  EXPECT_EQ(ps.why_not(id("0")), id("x3"));
  EXPECT_EQ(ps.why_not(id("T")), id("T"));
}

TEST(Phase, Validity) {
  const PhaseStructure& ps = uav_phase();
  EXPECT_EQ(ps.validity(id("T")), Validity::Valid);
  EXPECT_EQ(ps.validity(id("U12")), Validity::Valid);
  EXPECT_EQ(ps.validity(id("U123")), Validity::Valid);
  EXPECT_EQ(ps.validity(id("x3")), Validity::False);
  EXPECT_EQ(ps.validity(id("0")), Validity::False);
  EXPECT_EQ(ps.validity(id("x1")), Validity::Indeterminate);
  EXPECT_THROW((void)ps.validity(id("e")), DomainError);
}

TEST(Phase, ProposeBottomFindsUavStructureAtMinimum) {
  const std::vector<BottomCandidate> cands = propose_bottom(uav_lattice());
  ASSERT_FALSE(cands.empty());
  EXPECT_EQ(cands.size(), 1053u);
  EXPECT_EQ(cands.front().non_fact_count, 6u);
  std::size_t at_min = 0;
  bool found = false;
  for (const BottomCandidate& c : cands) {
    if (c.non_fact_count != 6) continue;
    ++at_min;
    found = found || c.structure == uav_phase();
  }
  EXPECT_EQ(at_min, 30u);
  EXPECT_TRUE(found);
  for (std::size_t i = 1; i < cands.size(); ++i) EXPECT_LE(cands[i - 1].non_fact_count, cands[i].non_fact_count);
}

TEST(Phase, ProposeBottomRespectsSizeGuard) {
  ProposeOptions o;
  o.max_elements = 4;
  try {
    (void)propose_bottom(uav_lattice(), o);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_EQ(e.code(), ErrorCode::SearchTooLarge);
  }
}

TEST(Phase, EveryProposedCandidateReclassifies) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const RandomCase rc = random_case(seed);
    for (const BottomCandidate& c : propose_bottom(rc.lattice)) {
      const PhaseStructure again =
          PhaseStructure::classify(rc.lattice, c.structure.bottom(), c.structure.duality());
      EXPECT_TRUE(again == c.structure);
      EXPECT_EQ(again.non_facts().size(), c.non_fact_count);
    }
  }
}

TEST(Phase, ClassicalBottomIsZero) {
  auto L = std::make_shared<const TaskLattice>(TaskLattice::build(std::vector<TaskSpec>{{"a", {"p"}}, {"b", {"q"}}}, {}));
  const ElementId a = L->by_name("a"), b = L->by_name("b");
  DualityAssignment d{std::vector<ElementId>(L->size())};
  d.dual[L->bottom().value] = L->top();
  d.dual[L->top().value] = L->bottom();
  d.dual[a.value] = b;
  d.dual[b.value] = a;
  const PhaseStructure ps = PhaseStructure::classify(L, L->bottom(), d);
  EXPECT_TRUE(ps.classical());
  EXPECT_EQ(ps.unit(), L->top());
  EXPECT_TRUE(ps.non_facts().empty());
}

TEST(Phase, InvalidDualityIsRejected) {
  DualityAssignment d = uav_phase().duality();
  d.dual[id("x2").value] = id("x2");
  try {
    (void)PhaseStructure::classify(uav_lattice(), id("x3"), d);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidDuality);
  }
  DualityAssignment shortd{{ElementId{0}}};
  EXPECT_THROW((void)PhaseStructure::classify(uav_lattice(), id("x3"), shortd), DomainError);
}
