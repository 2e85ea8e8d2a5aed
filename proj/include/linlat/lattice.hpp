#pragma once

// Finite task lattices: closures of task action sets under union and
// intersection, ordered by inclusion.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "linlat/error.hpp"

namespace linlat {

/// Index of an element inside one TaskLattice. Ids follow the lexicographic
/// order of the elements' sorted action lists, so the empty set is always 0.
struct ElementId {
  std::uint32_t value = 0;

  constexpr ElementId() = default;
  constexpr explicit ElementId(std::uint32_t v) : value(v) {}

  friend constexpr auto operator<=>(ElementId, ElementId) = default;
};

struct TaskSpec {
  std::string name;
  std::vector<std::string> actions;
};

/// Optional display name for a non-generator element, identified by its
/// action set (e.g. "d" for the shared {move} action).
struct ElementName {
  std::string name;
  std::vector<std::string> actions;
};

struct LatticeElement {
  ElementId id;
  std::vector<std::string> actions;  // sorted, unique
  std::optional<std::string> name;
};

class TaskLattice {
 public:
  static TaskLattice build(std::span<const TaskSpec> tasks,
                           std::span<const ElementName> names = {});

  std::size_t size() const { return elements_.size(); }
  std::span<const LatticeElement> elements() const { return elements_; }
  const LatticeElement& element(ElementId x) const {
    check(x);
    return elements_[x.value];
  }
  std::vector<ElementId> ids() const {
    std::vector<ElementId> out;
    out.reserve(size());
    for (std::uint32_t i = 0; i < size(); ++i) out.emplace_back(i);
    return out;
  }

  ElementId bottom() const { return ElementId{0}; }
  ElementId top() const { return top_; }

  bool contains(ElementId x) const { return x.value < elements_.size(); }
  void check(ElementId x) const {
    if (!contains(x))
      throw DomainError(ErrorCode::ForeignElement,
                        "element id " + std::to_string(x.value) + " is not in the lattice");
  }

  bool leq(ElementId a, ElementId b) const {
    check(a);
    check(b);
    return leq_[index(a, b)] != 0;
  }
  ElementId join(ElementId a, ElementId b) const {
    check(a);
    check(b);
    return join_[index(a, b)];
  }
  ElementId meet(ElementId a, ElementId b) const {
    check(a);
    check(b);
    return meet_[index(a, b)];
  }
  ElementId join_all(std::span<const ElementId> xs) const {
    ElementId r = bottom();
    for (ElementId x : xs) r = join(r, x);
    return r;
  }
  ElementId meet_all(std::span<const ElementId> xs) const {
    ElementId r = top();
    for (ElementId x : xs) r = meet(r, x);
    return r;
  }

  std::span<const ElementId> generators() const { return generators_; }
  std::span<const ElementId> join_irreducibles() const { return join_irreducibles_; }
  bool is_join_irreducible(ElementId x) const {
    return std::binary_search(join_irreducibles_.begin(), join_irreducibles_.end(), x);
  }
  std::span<const ElementId> lower_covers(ElementId x) const {
    check(x);
    return lower_covers_[x.value];
  }
  std::vector<std::pair<ElementId, ElementId>> cover_edges() const;

  /// Maximal join-irreducibles below x. Their join is x; for 0 it is empty.
  std::span<const ElementId> canonical_decomposition(ElementId x) const {
    check(x);
    return decomposition_[x.value];
  }

  /// Greatest z with meet(x, z) = 0. Throws NonUniqueNegation listing every
  /// maximal candidate when there is more than one.
  ElementId negation(ElementId x) const;

  /// Length of the longest chain from 0 up to x.
  int rank(ElementId x) const {
    check(x);
    return rank_[x.value];
  }

  std::string label(ElementId x) const;
  std::optional<ElementId> find(std::string_view name) const;
  ElementId by_name(std::string_view name) const;
  std::optional<ElementId> find_actions(std::vector<std::string> actions) const;

  bool operator==(const TaskLattice& other) const {
    if (elements_.size() != other.elements_.size() || generators_ != other.generators_)
      return false;
    for (std::size_t i = 0; i < elements_.size(); ++i) {
      if (elements_[i].actions != other.elements_[i].actions ||
          elements_[i].name != other.elements_[i].name)
        return false;
    }
    return true;
  }

 private:
  std::size_t index(ElementId a, ElementId b) const { return a.value * elements_.size() + b.value; }
  void derive_tables();

  std::vector<LatticeElement> elements_;
  ElementId top_;
  std::vector<ElementId> generators_;
  std::vector<char> leq_;
  std::vector<ElementId> join_;
  std::vector<ElementId> meet_;
  std::vector<std::vector<ElementId>> lower_covers_;
  std::vector<ElementId> join_irreducibles_;
  std::vector<std::vector<ElementId>> decomposition_;
  std::vector<int> rank_;
  std::map<std::string, ElementId, std::less<>> by_name_;
};

/// Hasse diagram (cover edges only) in DOT, lower element -> upper element.
std::string export_dot(const TaskLattice& lattice);

// ---------------------------------------------------------------------------

namespace detail {

using ActionSet = std::vector<std::uint32_t>;

inline ActionSet set_union(const ActionSet& a, const ActionSet& b) {
  ActionSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline ActionSet set_intersection(const ActionSet& a, const ActionSet& b) {
  ActionSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline std::vector<std::string> normalized(std::vector<std::string> actions) {
  std::sort(actions.begin(), actions.end());
  actions.erase(std::unique(actions.begin(), actions.end()), actions.end());
  return actions;
}

}  // namespace detail

inline TaskLattice TaskLattice::build(std::span<const TaskSpec> tasks,
                                      std::span<const ElementName> names) {
  if (tasks.empty()) throw DomainError(ErrorCode::NoTasks, "at least one task is required");

  std::set<std::string> task_names;
  std::set<std::string> all_actions;
  for (const TaskSpec& t : tasks) {
    if (t.name.empty()) throw DomainError(ErrorCode::InvalidScenario, "task with empty name");
    if (!task_names.insert(t.name).second)
      throw DomainError(ErrorCode::DuplicateTask, "task name '" + t.name + "' is used twice");
    if (t.actions.empty())
      throw DomainError(ErrorCode::EmptyActionSet, "task '" + t.name + "' has no actions");
    for (const std::string& a : t.actions) {
      if (a.empty())
        throw DomainError(ErrorCode::InvalidScenario, "task '" + t.name + "' has an empty action label");
      all_actions.insert(a);
    }
  }
  const std::vector<std::string> action_names(all_actions.begin(), all_actions.end());
  auto encode = [&](const std::vector<std::string>& actions) {
    detail::ActionSet s;
    for (const std::string& a : detail::normalized(actions)) {
      auto it = std::lower_bound(action_names.begin(), action_names.end(), a);
      if (it == action_names.end() || *it != a)
        throw DomainError(ErrorCode::UnknownName, "action '" + a + "' belongs to no task");
      s.push_back(static_cast<std::uint32_t>(it - action_names.begin()));
    }
    return s;
  };

  std::vector<detail::ActionSet> generator_sets;
  std::set<detail::ActionSet> family{detail::ActionSet{}};
  detail::ActionSet full;
  for (const TaskSpec& t : tasks) {
    detail::ActionSet s = encode(t.actions);
    for (std::size_t i = 0; i < generator_sets.size(); ++i) {
      if (generator_sets[i] == s)
        throw DomainError(ErrorCode::DuplicateTask, "tasks '" + tasks[i].name + "' and '" +
                                                        t.name + "' have identical action sets");
    }
    generator_sets.push_back(s);
    family.insert(s);
    full = detail::set_union(full, s);
  }
  family.insert(full);

  // Pairwise union/intersection to a fixpoint.
  std::vector<detail::ActionSet> pending(family.begin(), family.end());
  std::vector<detail::ActionSet> current = pending;
  while (!pending.empty()) {
    std::vector<detail::ActionSet> fresh;
    for (const auto& a : pending) {
      for (const auto& b : current) {
        for (auto c : {detail::set_union(a, b), detail::set_intersection(a, b)}) {
          if (family.insert(c).second) fresh.push_back(std::move(c));
        }
      }
    }
    current.insert(current.end(), fresh.begin(), fresh.end());
    pending = std::move(fresh);
  }

  TaskLattice lat;
  std::map<detail::ActionSet, ElementId> id_of;
  for (const auto& s : family) {  // std::set order == lexicographic order of action lists
    ElementId id{static_cast<std::uint32_t>(lat.elements_.size())};
    id_of.emplace(s, id);
    LatticeElement el;
    el.id = id;
    for (std::uint32_t a : s) el.actions.push_back(action_names[a]);
    lat.elements_.push_back(std::move(el));
  }
  lat.top_ = id_of.at(full);

  auto assign_name = [&](ElementId id, const std::string& name) {
    if (name.empty()) throw DomainError(ErrorCode::InvalidScenario, "empty element name");
    auto [it, inserted] = lat.by_name_.emplace(name, id);
    if (!inserted && it->second != id)
      throw DomainError(ErrorCode::DuplicateTask, "name '" + name + "' denotes two elements");
    LatticeElement& el = lat.elements_[id.value];
    if (el.name && *el.name != name)
      throw DomainError(ErrorCode::InvalidScenario,
                        "element " + lat.label(id) + " is named both '" + *el.name + "' and '" + name + "'");
    el.name = name;
  };
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    ElementId id = id_of.at(generator_sets[i]);
    lat.generators_.push_back(id);
    assign_name(id, tasks[i].name);
  }
  for (const ElementName& n : names) {
    auto it = id_of.find(encode(n.actions));
    if (it == id_of.end())
      throw DomainError(ErrorCode::UnknownName,
                        "named set '" + n.name + "' is not an element of the lattice");
    assign_name(it->second, n.name);
  }
  if (!lat.elements_[0].name && !lat.by_name_.contains("0")) assign_name(lat.bottom(), "0");
  if (!lat.elements_[lat.top_.value].name && !lat.by_name_.contains("T")) assign_name(lat.top_, "T");
  std::sort(lat.generators_.begin(), lat.generators_.end());

  // Order and operation tables.
  const std::size_t n = lat.elements_.size();
  std::vector<detail::ActionSet> sets(family.begin(), family.end());
  lat.leq_.assign(n * n, 0);
  lat.join_.assign(n * n, ElementId{});
  lat.meet_.assign(n * n, ElementId{});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      lat.leq_[i * n + j] = std::includes(sets[j].begin(), sets[j].end(), sets[i].begin(), sets[i].end());
      lat.join_[i * n + j] = id_of.at(detail::set_union(sets[i], sets[j]));
      lat.meet_[i * n + j] = id_of.at(detail::set_intersection(sets[i], sets[j]));
    }
  }
  lat.derive_tables();
  return lat;
}

inline void TaskLattice::derive_tables() {
  const std::size_t n = elements_.size();
  lower_covers_.assign(n, {});
  for (std::uint32_t x = 0; x < n; ++x) {
    for (std::uint32_t y = 0; y < n; ++y) {
      if (x == y || !leq_[y * n + x]) continue;
      bool cover = true;
      for (std::uint32_t z = 0; z < n && cover; ++z) {
        if (z != x && z != y && leq_[y * n + z] && leq_[z * n + x]) cover = false;
      }
      if (cover) lower_covers_[x].emplace_back(y);
    }
  }

  join_irreducibles_.clear();
  for (std::uint32_t x = 0; x < n; ++x) {
    if (lower_covers_[x].size() == 1) join_irreducibles_.emplace_back(x);
  }

  decomposition_.assign(n, {});
  for (std::uint32_t x = 0; x < n; ++x) {
    for (ElementId a : join_irreducibles_) {
      if (!leq_[a.value * n + x]) continue;
      bool maximal = true;
      for (ElementId b : join_irreducibles_) {
        if (b != a && leq_[b.value * n + x] && leq_[a.value * n + b.value]) maximal = false;
      }
      if (maximal) decomposition_[x].push_back(a);
    }
  }

  // Action-set size grows along every chain, so processing by size is a
  // topological order for the longest-chain recursion.
  std::vector<std::uint32_t> order(n);
  for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return elements_[a].actions.size() < elements_[b].actions.size();
  });
  rank_.assign(n, 0);
  for (std::uint32_t x : order) {
    for (ElementId y : lower_covers_[x]) rank_[x] = std::max(rank_[x], rank_[y.value] + 1);
  }
}

inline std::vector<std::pair<ElementId, ElementId>> TaskLattice::cover_edges() const {
  std::vector<std::pair<ElementId, ElementId>> edges;
  for (std::uint32_t x = 0; x < elements_.size(); ++x) {
    for (ElementId y : lower_covers_[x]) edges.emplace_back(y, ElementId{x});
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

inline ElementId TaskLattice::negation(ElementId x) const {
  check(x);
  std::vector<ElementId> disjoint;
  for (std::uint32_t z = 0; z < elements_.size(); ++z) {
    if (meet(x, ElementId{z}) == bottom()) disjoint.emplace_back(z);
  }
  std::vector<ElementId> maximal;
  for (ElementId z : disjoint) {
    bool is_max = std::none_of(disjoint.begin(), disjoint.end(),
                               [&](ElementId w) { return w != z && leq(z, w); });
    if (is_max) maximal.push_back(z);
  }
  if (maximal.size() != 1) {
    std::vector<std::string> labels;
    for (ElementId z : maximal) labels.push_back(label(z));
    throw DomainError(ErrorCode::NonUniqueNegation,
                      "negation of " + label(x) + " has maximal candidates {" + join_strings(labels, ", ") + "}");
  }
  return maximal.front();
}

inline std::string TaskLattice::label(ElementId x) const {
  const LatticeElement& el = element(x);
  if (el.name) return *el.name;
  return "{" + join_strings(el.actions, ",") + "}";
}

inline std::optional<ElementId> TaskLattice::find(std::string_view name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

inline ElementId TaskLattice::by_name(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw DomainError(ErrorCode::UnknownName, "no lattice element named '" + std::string(name) + "'");
}

inline std::optional<ElementId> TaskLattice::find_actions(std::vector<std::string> actions) const {
  actions = detail::normalized(std::move(actions));
  auto it = std::lower_bound(elements_.begin(), elements_.end(), actions,
                             [](const LatticeElement& el, const std::vector<std::string>& key) {
                               return el.actions < key;
                             });
  if (it == elements_.end() || it->actions != actions) return std::nullopt;
  return it->id;
}

inline std::string export_dot(const TaskLattice& lattice) {
  auto quoted = [](const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out + "\"";
  };
  std::string out = "digraph lattice {\n  rankdir=BT;\n";
  for (const LatticeElement& el : lattice.elements()) {
    out += "  n" + std::to_string(el.id.value) + " [label=" + quoted(lattice.label(el.id)) + "];\n";
  }
  for (auto [lo, hi] : lattice.cover_edges()) {
    out += "  n" + std::to_string(lo.value) + " -> n" + std::to_string(hi.value) + ";\n";
  }
  out += "}\n";
  return out;
}

}  // namespace linlat
