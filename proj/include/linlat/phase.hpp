#pragma once

// Phase structures on a task lattice: a bottom fact, a duality map, the
// fact/non-fact split and the open/closed classes of facts.

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "linlat/error.hpp"
#include "linlat/lattice.hpp"

namespace linlat {

/// dual[x.value] is the dual of x. Must be total over the lattice.
struct DualityAssignment {
  std::vector<ElementId> dual;

  bool operator==(const DualityAssignment&) const = default;
};

enum class Validity { Valid, False, Indeterminate };

constexpr std::string_view to_string(Validity v) {
  switch (v) {
    case Validity::Valid: return "valid";
    case Validity::False: return "false";
    case Validity::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

class PhaseStructure {
 public:
  /// Validates the duality and derives facts and open/closed classes.
  /// Throws InvalidDuality naming the first violated law.
  static PhaseStructure classify(std::shared_ptr<const TaskLattice> lattice, ElementId bottom,
                                 DualityAssignment duality);

  const TaskLattice& lattice() const { return *lattice_; }
  const std::shared_ptr<const TaskLattice>& lattice_ptr() const { return lattice_; }

  ElementId bottom() const { return bottom_; }
  ElementId unit() const { return unit_; }
  /// bottom = 0: the Boolean-style degenerate case where every fact is both
  /// open and closed.
  bool classical() const { return classical_; }

  const DualityAssignment& duality() const { return duality_; }
  ElementId dual(ElementId x) const {
    lattice_->check(x);
    return duality_.dual[x.value];
  }
  ElementId fact_closure(ElementId x) const { return dual(dual(x)); }

  bool is_fact(ElementId x) const { return fact_closure(x) == x; }
  bool is_open(ElementId x) const { return std::binary_search(open_.begin(), open_.end(), x); }
  bool is_closed(ElementId x) const { return std::binary_search(closed_.begin(), closed_.end(), x); }

  const std::vector<ElementId>& facts() const { return facts_; }
  const std::vector<ElementId>& non_facts() const { return non_facts_; }
  const std::vector<ElementId>& open_facts() const { return open_; }
  const std::vector<ElementId>& closed_facts() const { return closed_; }

  /// Greatest open fact below x (!x).
  ElementId of_course(ElementId x) const;
  /// Least closed fact above x (?x).
  ElementId why_not(ElementId x) const;
  Validity validity(ElementId fact) const;

  bool operator==(const PhaseStructure& other) const {
    return bottom_ == other.bottom_ && duality_ == other.duality_ &&
           (lattice_ == other.lattice_ || *lattice_ == *other.lattice_);
  }

 private:
  std::shared_ptr<const TaskLattice> lattice_;
  ElementId bottom_;
  ElementId unit_;
  bool classical_ = false;
  DualityAssignment duality_;
  std::vector<ElementId> facts_;
  std::vector<ElementId> non_facts_;
  std::vector<ElementId> open_;
  std::vector<ElementId> closed_;
};

struct BottomCandidate {
  PhaseStructure structure;
  std::size_t non_fact_count = 0;
};

struct ProposeOptions {
  // The search walks all meet-closed subsets, so it is exponential in size.
  std::size_t max_elements = 24;
  bool include_classical = true;
};

/// Every consistent (bottom, duality) pair, fewest non-facts first.
/// Non-fact duals are forced: dual(x) = dual(least fact above x).
std::vector<BottomCandidate> propose_bottom(std::shared_ptr<const TaskLattice> lattice,
                                            const ProposeOptions& options = {});

// ---------------------------------------------------------------------------

inline PhaseStructure PhaseStructure::classify(std::shared_ptr<const TaskLattice> lattice,
                                               ElementId bottom, DualityAssignment duality) {
  if (!lattice) throw DomainError(ErrorCode::InvalidDuality, "no lattice");
  const TaskLattice& L = *lattice;
  auto fail = [&](const std::string& law, const std::string& detail) {
    throw DomainError(ErrorCode::InvalidDuality, law + ": " + detail);
  };
  if (!L.contains(bottom)) fail("bounds", "bottom fact is not a lattice element");
  if (duality.dual.size() != L.size())
    fail("totality", "dual map has " + std::to_string(duality.dual.size()) + " entries for " +
                         std::to_string(L.size()) + " elements");
  for (ElementId y : duality.dual) {
    if (!L.contains(y)) fail("totality", "dual map refers to element " + std::to_string(y.value));
  }
  auto d = [&](ElementId x) { return duality.dual[x.value]; };
  const std::vector<ElementId> all = L.ids();

  if (d(L.top()) != L.bottom()) fail("bounds", "dual(T) must be 0");
  if (d(L.bottom()) != L.top()) fail("bounds", "dual(0) must be T");
  for (ElementId x : all) {
    if (d(d(d(x))) != d(x)) fail("fact-valued", "dual(" + L.label(x) + ") is not a fact");
    if (!L.leq(x, d(d(x)))) fail("extensive", L.label(x) + " is not below its double dual");
  }
  for (ElementId x : all) {
    for (ElementId y : all) {
      if (L.leq(x, y) && !L.leq(d(y), d(x)))
        fail("antitone", L.label(x) + " <= " + L.label(y) + " but their duals are not reversed");
      if (d(L.join(x, y)) != L.meet(d(x), d(y)))
        fail("de-morgan", "dual(" + L.label(x) + " + " + L.label(y) + ") is not the meet of the duals");
    }
  }

  PhaseStructure ps;
  ps.lattice_ = std::move(lattice);
  ps.bottom_ = bottom;
  ps.duality_ = duality;
  for (ElementId x : all) (d(d(x)) == x ? ps.facts_ : ps.non_facts_).push_back(x);
  if (!ps.is_fact(bottom)) fail("bounds", "bottom " + L.label(bottom) + " is not a fact");
  ps.unit_ = d(bottom);
  ps.classical_ = bottom == L.bottom();

  for (ElementId f : ps.facts_) {
    const bool open = L.leq(f, ps.unit_);
    const bool closed = L.leq(bottom, f);
    if (!ps.classical_ && open == closed)
      fail("partition", L.label(f) + (open ? " is both open and closed" : " is neither open nor closed"));
    if (open || ps.classical_) ps.open_.push_back(f);
    if (closed || ps.classical_) ps.closed_.push_back(f);
  }
  for (ElementId f : ps.open_) {
    if (!ps.is_closed(d(f))) fail("partition", "dual of open fact " + L.label(f) + " is not closed");
  }
  for (ElementId a : ps.closed_) {
    for (ElementId b : ps.closed_) {
      if (!ps.is_closed(L.meet(a, b)))
        fail("partition", "closed facts not closed under meet at " + L.label(a) + ", " + L.label(b));
    }
  }
  return ps;
}

inline ElementId PhaseStructure::of_course(ElementId x) const {
  lattice_->check(x);
  std::vector<ElementId> below;
  for (ElementId o : open_) {
    if (lattice_->leq(o, x)) below.push_back(o);
  }
  std::vector<ElementId> maximal;
  for (ElementId o : below) {
    if (std::none_of(below.begin(), below.end(), [&](ElementId p) { return p != o && lattice_->leq(o, p); }))
      maximal.push_back(o);
  }
  if (maximal.size() != 1) {
    std::vector<std::string> labels;
    for (ElementId o : maximal) labels.push_back(lattice_->label(o));
    throw DomainError(ErrorCode::NonUniqueExponential, "!" + lattice_->label(x) +
                                                          " has maximal open facts {" + join_strings(labels, ", ") + "}");
  }
  return maximal.front();
}

inline ElementId PhaseStructure::why_not(ElementId x) const {
  lattice_->check(x);
  ElementId r = lattice_->top();
  for (ElementId c : closed_) {
    if (lattice_->leq(x, c)) r = lattice_->meet(r, c);
  }
  return r;
}

inline Validity PhaseStructure::validity(ElementId fact) const {
  if (!is_fact(fact))
    throw DomainError(ErrorCode::NonFact, lattice_->label(fact) + " is not a fact");
  if (lattice_->leq(unit_, fact)) return Validity::Valid;
  if (lattice_->leq(fact, bottom_)) return Validity::False;
  return Validity::Indeterminate;
}

namespace detail {

// Order-reversing involutions of the subposet F (given sorted by size).
inline void anti_involutions(const TaskLattice& L, const std::vector<ElementId>& F,
                             std::vector<std::vector<std::pair<ElementId, ElementId>>>& out) {
  std::vector<std::optional<ElementId>> m(L.size());
  std::vector<std::pair<ElementId, ElementId>> assigned;
  auto consistent = [&](ElementId a, ElementId b) {
    // a -> b, b -> a against every assigned c -> m(c)
    for (auto [c, mc] : assigned) {
      if (L.leq(a, c) != L.leq(mc, b)) return false;
      if (L.leq(c, a) != L.leq(b, mc)) return false;
      if (L.leq(b, c) != L.leq(mc, a)) return false;
      if (L.leq(c, b) != L.leq(a, mc)) return false;
    }
    return true;
  };
  auto rec = [&](auto&& self, std::size_t k) -> void {
    if (k == F.size()) {
      out.push_back(assigned);
      return;
    }
    ElementId a = F[k];
    if (m[a.value]) {
      self(self, k + 1);
      return;
    }
    for (ElementId b : F) {
      if (m[b.value]) continue;
      if (!consistent(a, b)) continue;
      m[a.value] = b;
      m[b.value] = a;
      assigned.emplace_back(a, b);
      if (a != b) assigned.emplace_back(b, a);
      self(self, k + 1);
      assigned.pop_back();
      if (a != b) assigned.pop_back();
      m[a.value].reset();
      m[b.value].reset();
    }
  };
  rec(rec, 0);
}

}  // namespace detail

inline std::vector<BottomCandidate> propose_bottom(std::shared_ptr<const TaskLattice> lattice,
                                                   const ProposeOptions& options) {
  const TaskLattice& L = *lattice;
  if (L.size() > options.max_elements)
    throw DomainError(ErrorCode::SearchTooLarge, "propose_bottom is limited to " +
                                                     std::to_string(options.max_elements) + " elements, lattice has " +
                                                     std::to_string(L.size()));
  // By size, a meet of an element with an earlier one is decided before it.
  std::vector<ElementId> order = L.ids();
  std::stable_sort(order.begin(), order.end(), [&](ElementId a, ElementId b) {
    return L.element(a).actions.size() < L.element(b).actions.size();
  });

  std::vector<BottomCandidate> out;
  std::vector<char> in(L.size(), 0);
  std::vector<ElementId> F;

  auto emit = [&]() {
    std::vector<std::vector<std::pair<ElementId, ElementId>>> maps;
    detail::anti_involutions(L, F, maps);
    for (const auto& pairs : maps) {
      std::vector<ElementId> on_facts(L.size());
      for (auto [a, b] : pairs) on_facts[a.value] = b;
      DualityAssignment duality;
      duality.dual.resize(L.size());
      for (ElementId x : L.ids()) {
        ElementId closure = L.top();
        for (ElementId f : F) {
          if (L.leq(x, f)) closure = L.meet(closure, f);
        }
        duality.dual[x.value] = on_facts[closure.value];
      }
      for (ElementId b : F) {
        if (b == L.bottom() && !options.include_classical) continue;
        const ElementId unit = on_facts[b.value];
        if (b != L.bottom()) {
          bool ok = std::all_of(F.begin(), F.end(),
                                [&](ElementId f) { return L.leq(f, unit) != L.leq(b, f); });
          if (!ok) continue;
        }
        out.push_back({PhaseStructure::classify(lattice, b, duality), L.size() - F.size()});
      }
    }
  };

  auto rec = [&](auto&& self, std::size_t k) -> void {
    if (k == order.size()) {
      emit();
      return;
    }
    ElementId a = order[k];
    const bool forced = a == L.bottom() || a == L.top();
    bool closed = true;
    for (ElementId f : F) {
      if (!in[L.meet(a, f).value] && L.meet(a, f) != a) {
        closed = false;
        break;
      }
    }
    if (closed) {
      in[a.value] = 1;
      F.push_back(a);
      self(self, k + 1);
      F.pop_back();
      in[a.value] = 0;
    }
    if (!forced) self(self, k + 1);
  };
  rec(rec, 0);

  if (out.empty())
    throw DomainError(ErrorCode::NoConsistentStructure, "no bottom admits mutually dual open and closed classes");
  std::stable_sort(out.begin(), out.end(), [](const BottomCandidate& a, const BottomCandidate& b) {
    if (a.non_fact_count != b.non_fact_count) return a.non_fact_count < b.non_fact_count;
    if (a.structure.classical() != b.structure.classical()) return !a.structure.classical();
    if (a.structure.bottom() != b.structure.bottom()) return a.structure.bottom() < b.structure.bottom();
    return a.structure.duality().dual < b.structure.duality().dual;
  });
  return out;
}

}  // namespace linlat
