#pragma once

// Finite-domain solver for the pair-product constraint system: interval
// propagation on the lattice order plus depth-first enumeration.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "linlat/constraints.hpp"
#include "linlat/error.hpp"

namespace linlat {

struct SolveOptions {
  bool propagate = true;
  std::size_t max_solutions = 2'000'000;
  // Greedy shrinking of the constraint list when the system has no solution.
  bool explain_conflicts = true;
};

/// Per-pair value sets plus every full assignment that produced them.
struct AdmissibleTable {
  ProductLayout layout;
  std::vector<std::vector<ElementId>> per_pair;  // indexed like Assignment, ids ascending
  std::vector<Assignment> solutions;             // lexicographically sorted

  std::size_t solution_count() const { return solutions.size(); }
  const std::vector<ElementId>& values(ElementId a, ElementId b) const {
    return per_pair.at(layout.pair_index(a, b));
  }

  static AdmissibleTable from_solutions(ProductLayout layout, std::vector<Assignment> solutions);
};

class InconsistentSystem : public DomainError {
 public:
  InconsistentSystem(const std::string& what, std::vector<Constraint> conflict)
      : DomainError(ErrorCode::Inconsistent, what), conflict_(std::move(conflict)) {}
  const std::vector<Constraint>& conflict() const { return conflict_; }

 private:
  std::vector<Constraint> conflict_;
};

/// All solutions, possibly none. Throws TooManySolutions past the cap.
std::vector<Assignment> enumerate_solutions(const ConstraintSet& cs, const SolveOptions& options = {});

/// Like enumerate_solutions but an empty result is an InconsistentSystem error.
AdmissibleTable solve(const ConstraintSet& cs, const SolveOptions& options = {});

// ---------------------------------------------------------------------------

namespace detail {

using Mask = std::uint64_t;

class Search {
 public:
  Search(const ConstraintSet& cs, std::vector<const Constraint*> active, const SolveOptions& options)
      : ps_(cs.phase), L_(cs.phase.lattice()), active_(std::move(active)), options_(options) {
    if (L_.size() > 64)
      throw DomainError(ErrorCode::SearchTooLarge, "solver supports lattices of at most 64 elements");
    n_ = L_.size();
    vars_ = cs.layout.pair_count();
    full_ = n_ == 64 ? ~Mask{0} : (Mask{1} << n_) - 1;
    watchers_.assign(vars_, {});
    for (std::size_t k = 0; k < active_.size(); ++k) {
      for (std::size_t s : active_[k]->scope()) watchers_[s].push_back(k);
    }
    for (std::uint32_t v = 0; v < n_; ++v) value_order_.emplace_back(v);
    std::stable_sort(value_order_.begin(), value_order_.end(),
                     [&](ElementId a, ElementId b) { return L_.rank(a) < L_.rank(b); });
  }

  // stop_after = 0 means unlimited.
  std::vector<Assignment> run(std::size_t stop_after) {
    stop_after_ = stop_after;
    solutions_.clear();
    for (const Constraint* c : active_) {
      if (c->scope().empty() && !satisfied(*c, ps_, {})) return {};
    }
    std::vector<Mask> dom(vars_, full_);
    if (options_.propagate) {
      std::vector<std::size_t> all(active_.size());
      for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
      if (!propagate(dom, all)) return {};
    }
    dfs(dom);
    return std::move(solutions_);
  }

 private:
  ElementId glb(Mask m) const {
    ElementId r = L_.top();
    for (; m; m &= m - 1) r = L_.meet(r, ElementId{static_cast<std::uint32_t>(std::countr_zero(m))});
    return r;
  }
  ElementId lub(Mask m) const {
    ElementId r = L_.bottom();
    for (; m; m &= m - 1) r = L_.join(r, ElementId{static_cast<std::uint32_t>(std::countr_zero(m))});
    return r;
  }

  struct Interval {
    ElementId lo, hi;
  };

  // Bounds of a term with slot `fixed` pinned to value v (fixed may be none).
  Interval bounds(const ProductTerm& t, const std::vector<ElementId>& lo, const std::vector<ElementId>& hi,
                  std::size_t fixed, ElementId v) const {
    Interval r{L_.bottom(), L_.bottom()};
    for (std::size_t s : t.slots) {
      r.lo = L_.join(r.lo, s == fixed ? v : lo[s]);
      r.hi = L_.join(r.hi, s == fixed ? v : hi[s]);
    }
    return r;
  }

  bool feasible(const Constraint& c, Interval a, Interval b) const {
    switch (c.kind) {
      case ConstraintKind::Leq: return L_.leq(a.lo, c.target);
      case ConstraintKind::Eq: return L_.leq(a.lo, c.target) && L_.leq(c.target, a.hi);
      case ConstraintKind::NotLeq: return !L_.leq(a.hi, c.target);
      case ConstraintKind::DualEq:
        return L_.leq(ps_.dual(a.hi), c.target) && L_.leq(c.target, ps_.dual(a.lo));
      case ConstraintKind::SameDual:
        return L_.leq(ps_.dual(a.hi), ps_.dual(b.lo)) && L_.leq(ps_.dual(b.hi), ps_.dual(a.lo));
    }
    return false;
  }

  // Revise every domain in the constraint's scope; report changed slots.
  bool revise(const Constraint& c, std::vector<Mask>& dom, std::vector<std::size_t>& changed) const {
    std::vector<ElementId> lo(vars_), hi(vars_);
    const std::vector<std::size_t> scope = c.scope();
    for (std::size_t s : scope) {
      lo[s] = glb(dom[s]);
      hi[s] = lub(dom[s]);
    }
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    if (!feasible(c, bounds(c.lhs, lo, hi, none, {}), bounds(c.rhs, lo, hi, none, {}))) return false;
    for (std::size_t s : scope) {
      Mask keep = 0;
      for (Mask m = dom[s]; m; m &= m - 1) {
        ElementId v{static_cast<std::uint32_t>(std::countr_zero(m))};
        if (feasible(c, bounds(c.lhs, lo, hi, s, v), bounds(c.rhs, lo, hi, s, v))) keep |= Mask{1} << v.value;
      }
      if (keep == 0) return false;
      if (keep != dom[s]) {
        dom[s] = keep;
        lo[s] = glb(keep);
        hi[s] = lub(keep);
        changed.push_back(s);
      }
    }
    return true;
  }

  bool propagate(std::vector<Mask>& dom, std::vector<std::size_t> queue) const {
    std::vector<char> queued(active_.size(), 0);
    for (std::size_t k : queue) queued[k] = 1;
    std::deque<std::size_t> q(queue.begin(), queue.end());
    std::vector<std::size_t> changed;
    while (!q.empty()) {
      const std::size_t k = q.front();
      q.pop_front();
      queued[k] = 0;
      changed.clear();
      if (!revise(*active_[k], dom, changed)) return false;
      for (std::size_t s : changed) {
        for (std::size_t w : watchers_[s]) {
          if (!queued[w]) {
            queued[w] = 1;
            q.push_back(w);
          }
        }
      }
    }
    return true;
  }

  // Without propagation: check constraints whose whole scope is decided.
  bool forward_check(const std::vector<Mask>& dom, std::size_t var) const {
    Assignment a(vars_, L_.bottom());
    for (std::size_t k : watchers_[var]) {
      const Constraint& c = *active_[k];
      bool decided = true;
      for (std::size_t s : c.scope()) {
        if (std::popcount(dom[s]) != 1) {
          decided = false;
          break;
        }
        a[s] = ElementId{static_cast<std::uint32_t>(std::countr_zero(dom[s]))};
      }
      if (decided && !satisfied(c, ps_, a)) return false;
    }
    return true;
  }

  void dfs(std::vector<Mask>& dom) {
    if (stop_after_ != 0 && solutions_.size() >= stop_after_) return;
    std::size_t pick = vars_;
    int best = 65;
    for (std::size_t s = 0; s < vars_; ++s) {
      const int size = std::popcount(dom[s]);
      if (size > 1 && size < best) {
        best = size;
        pick = s;
      }
    }
    if (pick == vars_) {
      Assignment a(vars_);
      for (std::size_t s = 0; s < vars_; ++s) a[s] = ElementId{static_cast<std::uint32_t>(std::countr_zero(dom[s]))};
      if (solutions_.size() >= options_.max_solutions)
        throw DomainError(ErrorCode::TooManySolutions,
                          "more than " + std::to_string(options_.max_solutions) + " admissible tables");
      solutions_.push_back(std::move(a));
      return;
    }
    for (ElementId v : value_order_) {
      const Mask bit = Mask{1} << v.value;
      if (!(dom[pick] & bit)) continue;
      std::vector<Mask> next = dom;
      next[pick] = bit;
      const bool ok = options_.propagate ? propagate(next, watchers_[pick]) : forward_check(next, pick);
      if (ok) dfs(next);
      if (stop_after_ != 0 && solutions_.size() >= stop_after_) return;
    }
  }

  const PhaseStructure& ps_;
  const TaskLattice& L_;
  std::vector<const Constraint*> active_;
  SolveOptions options_;
  std::size_t n_ = 0;
  std::size_t vars_ = 0;
  Mask full_ = 0;
  std::vector<std::vector<std::size_t>> watchers_;
  std::vector<ElementId> value_order_;
  std::size_t stop_after_ = 0;
  std::vector<Assignment> solutions_;
};

inline std::vector<const Constraint*> pointers(const std::vector<Constraint>& cs) {
  std::vector<const Constraint*> out;
  for (const Constraint& c : cs) out.push_back(&c);
  return out;
}

}  // namespace detail

inline AdmissibleTable AdmissibleTable::from_solutions(ProductLayout layout, std::vector<Assignment> solutions) {
  AdmissibleTable t;
  t.per_pair.assign(layout.pair_count(), {});
  std::sort(solutions.begin(), solutions.end());
  solutions.erase(std::unique(solutions.begin(), solutions.end()), solutions.end());
  for (std::size_t k = 0; k < layout.pair_count(); ++k) {
    std::vector<ElementId>& vals = t.per_pair[k];
    for (const Assignment& a : solutions) vals.push_back(a.at(k));
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  }
  t.layout = std::move(layout);
  t.solutions = std::move(solutions);
  return t;
}

inline std::vector<Assignment> enumerate_solutions(const ConstraintSet& cs, const SolveOptions& options) {
  detail::Search search(cs, detail::pointers(cs.constraints), options);
  std::vector<Assignment> out = search.run(0);
  std::sort(out.begin(), out.end());
  return out;
}

inline AdmissibleTable solve(const ConstraintSet& cs, const SolveOptions& options) {
  std::vector<Assignment> solutions = enumerate_solutions(cs, options);
  if (solutions.empty()) {
    std::vector<const Constraint*> core = detail::pointers(cs.constraints);
    if (options.explain_conflicts) {
      // Drop each constraint whose removal keeps the rest unsatisfiable.
      SolveOptions probe = options;
      probe.max_solutions = static_cast<std::size_t>(-1);
      for (std::size_t i = core.size(); i-- > 0;) {
        std::vector<const Constraint*> trial = core;
        trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
        if (detail::Search(cs, trial, probe).run(1).empty()) core = std::move(trial);
      }
    }
    std::vector<Constraint> conflict;
    std::vector<std::string> lines;
    for (const Constraint* c : core) {
      conflict.push_back(*c);
      lines.push_back(to_string(*c, cs.layout) + " [" + c->origin + "]");
    }
    throw InconsistentSystem("no admissible table; conflicting constraints: " + join_strings(lines, "; "),
                             std::move(conflict));
  }
  return AdmissibleTable::from_solutions(cs.layout, std::move(solutions));
}

}  // namespace linlat
