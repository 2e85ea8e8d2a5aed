#pragma once

// Re-checking a single full table, and the algebraic law suite.

#include <algorithm>
#include <string>
#include <vector>

#include "linlat/constraints.hpp"
#include "linlat/phase.hpp"
#include "linlat/product.hpp"

namespace linlat {

struct CheckResult {
  explicit CheckResult(std::string n, bool enforced_ = true) : name(std::move(n)), enforced(enforced_) {}

  std::string name;
  bool enforced = true;
  std::size_t checked = 0;
  std::size_t violation_count = 0;
  std::vector<std::string> violations;  // first few, human readable

  bool passed() const { return violation_count == 0; }
  void fail(std::string message) {
    if (violations.size() < 8) violations.push_back(std::move(message));
    ++violation_count;
  }
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  /// True when every enforced check passed.
  bool ok() const {
    for (const CheckResult& c : checks) {
      if (c.enforced && !c.passed()) return false;
    }
    return true;
  }
  const CheckResult* find(std::string_view name) const {
    for (const CheckResult& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
};

/// x -o y read through duals: dual(x * dual(y)).
inline ElementId implication(const PhaseStructure& ps, const ProductLayout& layout, const Assignment& a,
                             ElementId x, ElementId y) {
  return ps.dual(layout.multiply(x, ps.dual(y), a));
}

/// Join of every z with x*z <= y.
inline ElementId residual_of(const ProductLayout& layout, const Assignment& a, ElementId x, ElementId y) {
  const TaskLattice& L = layout.lattice();
  ElementId r = L.bottom();
  for (ElementId z : L.ids()) {
    if (L.leq(layout.multiply(x, z, a), y)) r = L.join(r, z);
  }
  return r;
}

/// Constraint families, meet distribution and residual consistency are
/// enforced; associativity is only reported.
VerifyReport verify_table(const PhaseStructure& ps, const ProductLayout& layout, const Assignment& a,
                          const ConstraintOptions& options = {});

/// Laws that do not depend on the multiplication.
std::vector<CheckResult> check_phase_laws(const PhaseStructure& ps);

/// Full law suite for one table.
std::vector<CheckResult> check_laws(const PhaseStructure& ps, const ProductLayout& layout, const Assignment& a);

/// One check summed over many tables.
struct CheckTally {
  CheckResult total;
  std::size_t tables = 0;
  std::size_t failing_tables = 0;
};

/// Adds one table's results, matching by name.
void tally(std::vector<CheckTally>& into, const std::vector<CheckResult>& checks);

// ---------------------------------------------------------------------------

namespace detail {

// Full n x n product table, so the law loops are lookups.
class Products {
 public:
  Products(const ProductLayout& layout, const Assignment& a) : n_(layout.lattice().size()), t_(n_ * n_) {
    for (ElementId x : layout.lattice().ids()) {
      for (ElementId y : layout.lattice().ids()) t_[x.value * n_ + y.value] = layout.multiply(x, y, a);
    }
  }
  ElementId operator()(ElementId x, ElementId y) const { return t_[x.value * n_ + y.value]; }

 private:
  std::size_t n_;
  std::vector<ElementId> t_;
};

inline ElementId residual_of(const TaskLattice& L, const Products& mul, ElementId x, ElementId y) {
  ElementId r = L.bottom();
  for (ElementId z : L.ids()) {
    if (L.leq(mul(x, z), y)) r = L.join(r, z);
  }
  return r;
}

inline void check_meet_distribution(CheckResult& r, const PhaseStructure& ps, const Products& mul) {
  const TaskLattice& L = ps.lattice();
  auto imply = [&](ElementId x, ElementId y) { return ps.dual(mul(x, ps.dual(y))); };
  for (ElementId x : ps.facts()) {
    std::vector<ElementId> imp(L.size());
    for (ElementId b : ps.facts()) imp[b.value] = imply(x, b);
    for (ElementId b : ps.facts()) {
      for (ElementId c : ps.facts()) {
        ++r.checked;
        const ElementId lhs = imply(x, L.meet(b, c));
        const ElementId rhs = L.meet(imp[b.value], imp[c.value]);
        if (lhs != rhs)
          r.fail(L.label(x) + " -o (" + L.label(b) + " & " + L.label(c) + ") = " + L.label(lhs) + " but meet is " +
                 L.label(rhs));
      }
    }
  }
}

inline void check_residual_dual(CheckResult& r, const PhaseStructure& ps, const Products& mul) {
  const TaskLattice& L = ps.lattice();
  for (ElementId x : ps.facts()) {
    ++r.checked;
    const ElementId res = residual_of(L, mul, x, ps.bottom());
    if (res != ps.dual(x))
      r.fail("residual(" + L.label(x) + ", bottom) = " + L.label(res) + " but dual is " + L.label(ps.dual(x)));
  }
}

}  // namespace detail

inline VerifyReport verify_table(const PhaseStructure& ps, const ProductLayout& layout, const Assignment& a,
                                 const ConstraintOptions& options) {
  const TaskLattice& L = ps.lattice();
  VerifyReport report;
  if (a.size() != layout.pair_count())
    throw DomainError(ErrorCode::InvalidScenario, "table has " + std::to_string(a.size()) + " entries, expected " +
                                                      std::to_string(layout.pair_count()));
  for (ElementId v : a) L.check(v);

  // The residual family is re-checked below in its direct form.
  ConstraintOptions families = options;
  families.residual_maximality = false;
  const ConstraintSet cs = generate_constraints(ps, families);
  const char* names[] = {"annihilation", "unit", "congruence", "negation"};
  for (const char* name : names) {
    CheckResult r{name};
    const std::string prefix = std::string(name) + ":";
    for (const Constraint& c : cs.constraints) {
      if (c.origin.rfind(prefix, 0) != 0) continue;
      ++r.checked;
      if (!satisfied(c, ps, a)) r.fail(to_string(c, layout) + " [" + c.origin + "]");
    }
    report.checks.push_back(std::move(r));
  }

  const detail::Products mul(layout, a);
  CheckResult dist{"meet-distribution"};
  detail::check_meet_distribution(dist, ps, mul);
  report.checks.push_back(std::move(dist));

  CheckResult res{"residual"};
  detail::check_residual_dual(res, ps, mul);
  report.checks.push_back(std::move(res));

  CheckResult assoc{"associativity", false};
  for (ElementId x : L.ids()) {
    for (ElementId y : L.ids()) {
      const ElementId xy = mul(x, y);
      for (ElementId z : L.ids()) {
        ++assoc.checked;
        const ElementId l = mul(xy, z);
        const ElementId r = mul(x, mul(y, z));
        if (l != r)
          assoc.fail("(" + L.label(x) + "*" + L.label(y) + ")*" + L.label(z) + " = " + L.label(l) + " but " +
                     L.label(x) + "*(" + L.label(y) + "*" + L.label(z) + ") = " + L.label(r));
      }
    }
  }
  report.checks.push_back(std::move(assoc));
  return report;
}

inline std::vector<CheckResult> check_phase_laws(const PhaseStructure& ps) {
  const TaskLattice& L = ps.lattice();
  std::vector<CheckResult> out;

  CheckResult inv{"dual-involution"};
  for (ElementId f : ps.facts()) {
    ++inv.checked;
    if (ps.dual(ps.dual(f)) != f) inv.fail("dual(dual(" + L.label(f) + ")) != " + L.label(f));
  }
  out.push_back(std::move(inv));

  CheckResult dm{"de-morgan"};
  for (ElementId x : L.ids()) {
    for (ElementId y : L.ids()) {
      ++dm.checked;
      if (ps.dual(L.join(x, y)) != L.meet(ps.dual(x), ps.dual(y)))
        dm.fail("dual(" + L.label(x) + " + " + L.label(y) + ") != meet of duals");
    }
  }
  out.push_back(std::move(dm));

  CheckResult ex{"exponentials"};
  for (ElementId x : L.ids()) {
    ++ex.checked;
    const ElementId bang = ps.of_course(x);
    const ElementId quest = ps.why_not(x);
    if (ps.of_course(bang) != bang) ex.fail("!!" + L.label(x) + " != !" + L.label(x));
    if (ps.why_not(quest) != quest) ex.fail("??" + L.label(x) + " != ?" + L.label(x));
    if (!L.leq(bang, x) || !L.leq(x, quest)) ex.fail("!x <= x <= ?x fails at " + L.label(x));
    if (ps.is_fact(x)) {
      if (ps.dual(bang) != ps.why_not(ps.dual(x))) ex.fail("dual(!" + L.label(x) + ") != ?dual(" + L.label(x) + ")");
      if (ps.dual(quest) != ps.of_course(ps.dual(x))) ex.fail("dual(?" + L.label(x) + ") != !dual(" + L.label(x) + ")");
    }
  }
  out.push_back(std::move(ex));
  return out;
}

inline std::vector<CheckResult> check_laws(const PhaseStructure& ps, const ProductLayout& layout, const Assignment& a) {
  const TaskLattice& L = ps.lattice();
  std::vector<CheckResult> out = check_phase_laws(ps);
  const detail::Products mul(layout, a);

  CheckResult adj{"adjunction"};
  for (ElementId x : L.ids()) {
    for (ElementId y : ps.facts()) {
      const ElementId r = detail::residual_of(L, mul, x, y);
      for (ElementId z : L.ids()) {
        ++adj.checked;
        const bool below = L.leq(mul(x, z), y);
        if (below != L.leq(z, r))
          adj.fail(L.label(x) + "*" + L.label(z) + (below ? " <= " : " !<= ") + L.label(y) + " but " + L.label(z) +
                   (below ? " !<= " : " <= ") + "residual " + L.label(r));
      }
    }
  }
  out.push_back(std::move(adj));

  CheckResult tp{"tensor-par-duality"};
  for (ElementId x : L.ids()) {
    for (ElementId y : L.ids()) {
      ++tp.checked;
      const ElementId tensor = ps.fact_closure(mul(x, y));
      const ElementId par = ps.dual(mul(ps.fact_closure(x), ps.fact_closure(y)));
      if (ps.dual(tensor) != par)
        tp.fail("dual(" + L.label(x) + " (x) " + L.label(y) + ") = " + L.label(ps.dual(tensor)) +
                " but par of duals is " + L.label(par));
    }
  }
  out.push_back(std::move(tp));

  CheckResult dist{"meet-distribution"};
  detail::check_meet_distribution(dist, ps, mul);
  out.push_back(std::move(dist));

  CheckResult res{"residual-dual"};
  detail::check_residual_dual(res, ps, mul);
  out.push_back(std::move(res));
  return out;
}

inline void tally(std::vector<CheckTally>& into, const std::vector<CheckResult>& checks) {
  for (const CheckResult& c : checks) {
    auto it = std::find_if(into.begin(), into.end(), [&](const CheckTally& t) { return t.total.name == c.name; });
    if (it == into.end()) {
      into.push_back({CheckResult{c.name, c.enforced}, 0, 0});
      it = into.end() - 1;
    }
    ++it->tables;
    it->total.checked += c.checked;
    if (c.passed()) continue;
    ++it->failing_tables;
    it->total.violation_count += c.violation_count;
    for (const std::string& v : c.violations) {
      if (it->total.violations.size() < 8) it->total.violations.push_back(v);
    }
  }
}

}  // namespace linlat
