#pragma once

// Shared fixtures and brute-force oracles for the tests.

#include <algorithm>
#include <iterator>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "linlat/linlat.hpp"

namespace linlat::testing {

inline std::string source_path(const std::string& rel) { return std::string(LINLAT_SOURCE_DIR) + "/" + rel; }

inline const Scenario& uav_scenario() {
  static const Scenario s = load_scenario(source_path("scenarios/uav.json"));
  return s;
}

inline std::shared_ptr<const TaskLattice> uav_lattice() {
  static const auto L = build_lattice(uav_scenario());
  return L;
}

inline const PhaseStructure& uav_phase() {
  static const PhaseStructure ps = phase_from_json(*uav_scenario().phase, uav_lattice());
  return ps;
}

/// Solved once per test binary; about a second.
inline const Pipeline& uav_pipeline() {
  static const Pipeline p = build_pipeline(uav_scenario());
  return p;
}

inline ElementId id(const std::string& name) { return uav_lattice()->by_name(name); }

inline std::vector<std::string> labels(const TaskLattice& L, const std::vector<ElementId>& xs) {
  std::vector<std::string> out;
  for (ElementId x : xs) out.push_back(L.label(x));
  std::sort(out.begin(), out.end());
  return out;
}

// --- oracles -------------------------------------------------------------

using ActionSet = std::set<std::string>;

/// Sets closed under union and intersection form a distributive lattice, so
/// every element is a union of intersections of tasks. Enumerates exactly
/// that, the empty set included.
inline std::set<ActionSet> brute_closure(const std::vector<TaskSpec>& tasks) {
  const std::size_t n = tasks.size();
  std::vector<ActionSet> meets;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    std::optional<ActionSet> m;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask >> i & 1)) continue;
      const ActionSet t(tasks[i].actions.begin(), tasks[i].actions.end());
      if (!m) {
        m = t;
        continue;
      }
      ActionSet both;
      std::set_intersection(m->begin(), m->end(), t.begin(), t.end(), std::inserter(both, both.end()));
      m = both;
    }
    meets.push_back(*m);
  }
  std::set<ActionSet> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << meets.size()); ++mask) {
    ActionSet u;
    for (std::size_t i = 0; i < meets.size(); ++i) {
      if (mask >> i & 1) u.insert(meets[i].begin(), meets[i].end());
    }
    out.insert(u);
  }
  return out;
}

inline bool strict_subset(const ActionSet& a, const ActionSet& b) {
  return a.size() < b.size() && std::includes(b.begin(), b.end(), a.begin(), a.end());
}

/// Pairs a < b with nothing strictly between, by set inclusion.
inline std::set<std::pair<ActionSet, ActionSet>> transitive_reduction(const std::set<ActionSet>& sets) {
  std::set<std::pair<ActionSet, ActionSet>> out;
  for (const ActionSet& a : sets) {
    for (const ActionSet& b : sets) {
      if (!strict_subset(a, b)) continue;
      bool between = false;
      for (const ActionSet& c : sets) between = between || (strict_subset(a, c) && strict_subset(c, b));
      if (!between) out.insert({a, b});
    }
  }
  return out;
}

inline ActionSet actions_of(const TaskLattice& L, ElementId x) {
  const auto& a = L.element(x).actions;
  return ActionSet(a.begin(), a.end());
}

/// Every assignment in |L|^pairs that satisfies all constraints, sorted.
inline std::vector<Assignment> brute_tables(const ConstraintSet& cs) {
  const std::size_t n = cs.layout.lattice().size();
  const std::size_t k = cs.layout.pair_count();
  std::vector<Assignment> out;
  Assignment a(k, ElementId{0});
  while (true) {
    bool ok = true;
    for (const Constraint& c : cs.constraints) {
      if (!satisfied(c, cs.phase, a)) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(a);
    std::size_t i = 0;
    while (i < k && a[i].value + 1 == n) a[i++] = ElementId{0};
    if (i == k) break;
    a[i].value += 1;
  }
  std::sort(out.begin(), out.end());
  return out;
}

// --- random scenarios ----------------------------------------------------

struct RandomCase {
  std::vector<TaskSpec> tasks;
  std::shared_ptr<const TaskLattice> lattice;
  PhaseStructure phase;
};

/// 1 to 3 generators (mostly 3) over four actions. Draws are repeated until
/// the lattice has at most 8 elements and 3 join-irreducibles. The phase is
/// picked from propose_bottom.
inline RandomCase random_case(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> pool = {"a", "b", "c", "d"};
  // Weighted toward three generators, which give the larger lattices.
  std::discrete_distribution<int> count({0, 1, 2, 6});
  std::uniform_int_distribution<int> mask(1, 15);
  while (true) {
    std::vector<TaskSpec> tasks;
    std::set<int> used;
    const int want = count(rng);
    while (static_cast<int>(tasks.size()) < want) {
      const int m = mask(rng);
      if (!used.insert(m).second) continue;
      TaskSpec t{"t" + std::to_string(tasks.size() + 1), {}};
      for (int i = 0; i < 4; ++i) {
        if (m >> i & 1) t.actions.push_back(pool[i]);
      }
      tasks.push_back(std::move(t));
    }
    auto L = std::make_shared<const TaskLattice>(TaskLattice::build(tasks, {}));
    if (L->size() > 8 || L->join_irreducibles().size() > 3) continue;
    std::vector<BottomCandidate> cands = propose_bottom(L);
    std::uniform_int_distribution<std::size_t> pick(0, cands.size() - 1);
    PhaseStructure ps = cands[pick(rng)].structure;
    return {std::move(tasks), std::move(L), std::move(ps)};
  }
}

}  // namespace linlat::testing
