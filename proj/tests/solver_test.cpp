#include <gtest/gtest.h>

#include "support.hpp"

using namespace linlat;
using namespace linlat::testing;

namespace {

std::vector<std::string> pair_values(const AdmissibleTable& t, const std::string& a, const std::string& b) {
  return labels(*uav_lattice(), t.values(id(a), id(b)));
}

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST(Layout, PairIndexIsSymmetricAndDense) {
  const ProductLayout layout(uav_lattice());
  EXPECT_EQ(layout.atoms().size(), 5u);
  EXPECT_EQ(layout.pair_count(), 15u);
  std::set<std::size_t> seen;
  for (ElementId a : layout.atoms()) {
    for (ElementId b : layout.atoms()) {
      EXPECT_EQ(layout.pair_index(a, b), layout.pair_index(b, a));
      seen.insert(layout.pair_index(a, b));
    }
  }
  EXPECT_EQ(seen.size(), 15u);
  for (std::size_t k = 0; k < layout.pair_count(); ++k) {
    auto [a, b] = layout.pair(k);
    EXPECT_EQ(layout.pair_index(a, b), k);
  }
  EXPECT_THROW((void)layout.pair_index(id("U12"), id("x1")), DomainError);
}

TEST(Layout, MultiplyDistributesOverCanonicalDecomposition) {
  const ProductLayout layout(uav_lattice());
  const Assignment& a = uav_pipeline().table().solutions.front();
  const TaskLattice& L = *uav_lattice();
  const ElementId lhs = layout.multiply(id("U1d"), id("x3"), a);
  const ElementId rhs = L.join(layout.multiply(id("x1"), id("x3"), a), layout.multiply(id("d"), id("x3"), a));
  EXPECT_EQ(lhs, rhs);
  EXPECT_EQ(layout.multiply(L.bottom(), id("T"), a), L.bottom());
}

TEST(Constraints, UavFamilyCountAndPrinting) {
  const ConstraintSet cs = generate_constraints(uav_phase());
  EXPECT_EQ(cs.constraints.size(), 380u);
  std::set<std::string> prefixes;
  for (const Constraint& c : cs.constraints) prefixes.insert(c.origin.substr(0, c.origin.find(':')));
  EXPECT_EQ(prefixes, (std::set<std::string>{"annihilation", "congruence", "negation", "residual", "unit"}));
  bool printed = false;
  for (const Constraint& c : cs.constraints) {
    const std::string s = to_string(c, cs.layout);
    EXPECT_FALSE(s.empty());
    printed = printed || s.find("<=") != std::string::npos;
  }
  EXPECT_TRUE(printed);
}

TEST(Solver, UavAdmissibleSets) {
  const AdmissibleTable& t = uav_pipeline().table();
  EXPECT_EQ(t.solution_count(), 62208u);
  EXPECT_EQ(pair_values(t, "x1", "x1"), sorted({"x1"}));
  EXPECT_EQ(pair_values(t, "x1", "x2"), sorted({"0"}));
  EXPECT_EQ(pair_values(t, "x1", "x3"), sorted({"0"}));
  EXPECT_EQ(pair_values(t, "x1", "e"), sorted({"0"}));
  EXPECT_EQ(pair_values(t, "x2", "x2"), sorted({"x2"}));
  EXPECT_EQ(pair_values(t, "x2", "x3"), sorted({"x3"}));
  EXPECT_EQ(pair_values(t, "x2", "e"), sorted({"e"}));
  EXPECT_EQ(pair_values(t, "x1", "d"), sorted({"0", "d"}));
  EXPECT_EQ(pair_values(t, "x2", "d"), sorted({"0", "d"}));
  // x3 itself is not admissible under residual maximality.
  EXPECT_EQ(pair_values(t, "x3", "x3"), sorted({"e", "x2", "U23", "C2e", "C3e", "U23e"}));
  EXPECT_EQ(pair_values(t, "x3", "e"), sorted({"e", "C2e", "C3e", "U23e"}));
  EXPECT_EQ(pair_values(t, "x3", "d"), sorted({"x3", "d", "0"}));
  EXPECT_EQ(pair_values(t, "d", "e"), sorted({"U23e", "C2e", "C3e", "e"}));
  EXPECT_EQ(pair_values(t, "e", "e"), sorted({"e", "C2e", "C3e", "U23e"}));
  EXPECT_EQ(t.values(id("d"), id("d")).size(), 18u);
}

TEST(Solver, CoupledMoveProducts) {
  // x1*d + x2*d = d holds in every solution.
  const AdmissibleTable& t = uav_pipeline().table();
  const TaskLattice& L = *uav_lattice();
  const std::size_t k1 = t.layout.pair_index(id("x1"), id("d"));
  const std::size_t k2 = t.layout.pair_index(id("x2"), id("d"));
  for (const Assignment& a : t.solutions) EXPECT_EQ(L.join(a[k1], a[k2]), id("d"));
}

TEST(Solver, EverySolutionSatisfiesEveryConstraint) {
  const ConstraintSet cs = generate_constraints(uav_phase());
  const AdmissibleTable& t = uav_pipeline().table();
  for (std::size_t i = 0; i < t.solutions.size(); i += 97) {
    for (const Constraint& c : cs.constraints) ASSERT_TRUE(satisfied(c, cs.phase, t.solutions[i])) << c.origin;
  }
}

TEST(Solver, RelaxedUnitAdmitsMoreTables) {
  ConstraintOptions o;
  o.strict_unit = false;
  const ConstraintSet cs = generate_constraints(uav_phase(), o);
  const std::vector<Assignment> relaxed = enumerate_solutions(cs);
  EXPECT_GE(relaxed.size(), uav_pipeline().table().solution_count());
  const std::set<Assignment> all(relaxed.begin(), relaxed.end());
  for (std::size_t i = 0; i < uav_pipeline().table().solutions.size(); i += 101)
    EXPECT_TRUE(all.count(uav_pipeline().table().solutions[i]));
}

TEST(Solver, MatchesBruteForceOnRandomScenarios) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const RandomCase rc = random_case(seed);
    const ConstraintSet cs = generate_constraints(rc.phase);
    EXPECT_EQ(enumerate_solutions(cs), brute_tables(cs)) << "seed " << seed;
  }
}

TEST(Solver, PropagationDoesNotChangeSolutions) {
  SolveOptions off;
  off.propagate = false;
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const RandomCase rc = random_case(seed);
    const ConstraintSet cs = generate_constraints(rc.phase);
    EXPECT_EQ(enumerate_solutions(cs), enumerate_solutions(cs, off)) << "seed " << seed;
  }
}

TEST(Solver, InconsistentSystemReportsConflict) {
  ConstraintSet cs = generate_constraints(uav_phase());
  const ProductLayout& layout = cs.layout;
  const std::size_t k = layout.pair_index(id("x1"), id("x1"));
  Constraint bad;
  bad.kind = ConstraintKind::Eq;
  bad.lhs = {id("x1"), id("x1"), {k}};
  bad.target = id("0");
  bad.origin = "test: x1x1 = 0";
  cs.constraints.push_back(bad);
  EXPECT_TRUE(enumerate_solutions(cs).empty());
  try {
    (void)solve(cs);
    FAIL();
  } catch (const InconsistentSystem& e) {
    EXPECT_EQ(e.code(), ErrorCode::Inconsistent);
    ASSERT_FALSE(e.conflict().empty());
    EXPECT_LT(e.conflict().size(), cs.constraints.size());
    bool has_bad = false;
    for (const Constraint& c : e.conflict()) has_bad = has_bad || c.origin == bad.origin;
    EXPECT_TRUE(has_bad);
  }
}

TEST(Solver, SolutionCapThrows) {
  SolveOptions o;
  o.max_solutions = 10;
  try {
    (void)enumerate_solutions(generate_constraints(uav_phase()), o);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooManySolutions);
  }
}

TEST(Solver, FromSolutionsBuildsSortedSets) {
  const ProductLayout layout(uav_lattice());
  Assignment a(layout.pair_count(), id("0"));
  Assignment b = a;
  b[0] = id("T");
  const AdmissibleTable t = AdmissibleTable::from_solutions(layout, {b, a});
  EXPECT_EQ(t.solutions.front(), a);
  EXPECT_EQ(t.per_pair[0], (std::vector<ElementId>{id("0"), id("T")}));
  EXPECT_EQ(t.per_pair[1], (std::vector<ElementId>{id("0")}));
}
