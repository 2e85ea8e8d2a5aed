#pragma once

// Constraint system over the unknown join-irreducible pair products.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "linlat/error.hpp"
#include "linlat/lattice.hpp"
#include "linlat/phase.hpp"
#include "linlat/product.hpp"

namespace linlat {

enum class ConstraintKind {
  Leq,       // lhs <= target
  Eq,        // lhs = target
  DualEq,    // dual(lhs) = target
  SameDual,  // dual(lhs) = dual(rhs)
  NotLeq,    // lhs is not below target
};

/// A product term X*Y, stored both as the factors (for display) and as the
/// set of pair slots whose join it evaluates to.
struct ProductTerm {
  ElementId x;
  ElementId y;
  std::vector<std::size_t> slots;
};

struct Constraint {
  ConstraintKind kind = ConstraintKind::Leq;
  ProductTerm lhs;
  ProductTerm rhs;  // SameDual only
  ElementId target;
  std::string origin;

  /// Union of the slots of both sides.
  std::vector<std::size_t> scope() const {
    std::vector<std::size_t> out = lhs.slots;
    out.insert(out.end(), rhs.slots.begin(), rhs.slots.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

struct ConstraintOptions {
  // I*Y = Y literally; otherwise only dual(I*Y) = dual(Y).
  bool strict_unit = true;
  // Apply the unit law to every element rather than to facts only.
  bool unit_on_all_elements = true;
  // dual(X*B) = neg(X) for every fact X (false: open facts only).
  bool negation_on_all_facts = true;
  // dual(X) is the greatest Z with X*Z <= bottom, so anything not below
  // dual(X) must push the product out of bottom.
  bool residual_maximality = true;
};

struct ConstraintSet {
  PhaseStructure phase;
  ProductLayout layout;
  std::vector<Constraint> constraints;
};

ConstraintSet generate_constraints(const PhaseStructure& ps, const ConstraintOptions& options = {});

ElementId evaluate_term(const ProductTerm& term, const TaskLattice& lattice, std::span<const ElementId> assignment);
bool satisfied(const Constraint& c, const PhaseStructure& ps, std::span<const ElementId> assignment);
std::string to_string(const Constraint& c, const ProductLayout& layout);

// ---------------------------------------------------------------------------

inline ElementId evaluate_term(const ProductTerm& term, const TaskLattice& lattice,
                               std::span<const ElementId> assignment) {
  ElementId r = lattice.bottom();
  for (std::size_t s : term.slots) r = lattice.join(r, assignment[s]);
  return r;
}

inline bool satisfied(const Constraint& c, const PhaseStructure& ps, std::span<const ElementId> assignment) {
  const TaskLattice& L = ps.lattice();
  const ElementId v = evaluate_term(c.lhs, L, assignment);
  switch (c.kind) {
    case ConstraintKind::Leq: return L.leq(v, c.target);
    case ConstraintKind::Eq: return v == c.target;
    case ConstraintKind::DualEq: return ps.dual(v) == c.target;
    case ConstraintKind::SameDual: return ps.dual(v) == ps.dual(evaluate_term(c.rhs, L, assignment));
    case ConstraintKind::NotLeq: return !L.leq(v, c.target);
  }
  return false;
}

inline ConstraintSet generate_constraints(const PhaseStructure& ps, const ConstraintOptions& options) {
  const TaskLattice& L = ps.lattice();
  ConstraintSet cs{ps, ProductLayout(ps.lattice_ptr()), {}};
  const ProductLayout& layout = cs.layout;
  const std::vector<ElementId> all = L.ids();

  using Key = std::tuple<int, std::vector<std::size_t>, std::vector<std::size_t>, std::uint32_t>;
  std::set<Key> seen;
  const Assignment none;
  auto term = [&](ElementId x, ElementId y) { return ProductTerm{x, y, layout.unknowns(x, y)}; };
  auto add = [&](ConstraintKind kind, ProductTerm lhs, ProductTerm rhs, ElementId target, std::string origin) {
    if (kind == ConstraintKind::SameDual) {
      if (lhs.slots == rhs.slots) return;
      if (rhs.slots < lhs.slots) std::swap(lhs, rhs);
    }
    Constraint c{kind, std::move(lhs), std::move(rhs), target, std::move(origin)};
    // Constant constraints that already hold carry no information.
    if (c.scope().empty() && satisfied(c, ps, none)) return;
    Key key{static_cast<int>(kind), c.lhs.slots, c.rhs.slots, target.value};
    if (!seen.insert(key).second) return;
    cs.constraints.push_back(std::move(c));
  };

  for (ElementId x : ps.facts()) {
    add(ConstraintKind::Leq, term(x, ps.dual(x)), {}, ps.bottom(),
        "annihilation: " + L.label(x) + " * dual(" + L.label(x) + ") <= bottom");
  }

  const std::vector<ElementId>& unit_scope = options.unit_on_all_elements ? all : ps.facts();
  for (ElementId y : unit_scope) {
    if (options.strict_unit)
      add(ConstraintKind::Eq, term(ps.unit(), y), {}, y, "unit: I * " + L.label(y) + " = " + L.label(y));
    else
      add(ConstraintKind::DualEq, term(ps.unit(), y), {}, ps.dual(y),
          "unit: dual(I * " + L.label(y) + ") = dual(" + L.label(y) + ")");
  }

  for (ElementId b : all) {
    for (ElementId c : all) {
      if (!(b < c) || ps.dual(b) != ps.dual(c)) continue;
      for (ElementId x : all) {
        add(ConstraintKind::SameDual, term(x, b), term(x, c), L.bottom(),
            "congruence: dual(" + L.label(b) + ") = dual(" + L.label(c) + ") under " + L.label(x));
      }
    }
  }

  const std::vector<ElementId>& negation_scope = options.negation_on_all_facts ? ps.facts() : ps.open_facts();
  for (ElementId g : negation_scope) {
    std::vector<ElementId> annihilated;
    for (ElementId b : all) {
      if (ps.dual(b) == L.bottom()) annihilated.push_back(b);
    }
    if (annihilated.empty()) continue;
    ElementId neg;
    try {
      neg = L.negation(g);
    } catch (const DomainError& e) {
      throw DomainError(ErrorCode::MissingNegation, "negation of fact " + L.label(g) + " is undefined (" + e.what() + ")");
    }
    for (ElementId b : annihilated) {
      add(ConstraintKind::DualEq, term(g, b), {}, neg,
          "negation: dual(" + L.label(g) + " * " + L.label(b) + ") = neg(" + L.label(g) + ")");
    }
  }

  if (options.residual_maximality) {
    for (ElementId x : ps.facts()) {
      for (ElementId z : all) {
        if (L.leq(z, ps.dual(x))) continue;
        add(ConstraintKind::NotLeq, term(x, z), {}, ps.bottom(),
            "residual: " + L.label(x) + " * " + L.label(z) + " not <= bottom");
      }
    }
  }
  return cs;
}

inline std::string to_string(const Constraint& c, const ProductLayout& layout) {
  const TaskLattice& L = layout.lattice();
  auto expr = [&](const ProductTerm& t) {
    if (t.slots.empty()) return std::string("0");
    // Factor order follows the term, so x1*U23e prints as x1x3 + x1x2 + x1e.
    std::vector<std::string> parts;
    std::set<std::size_t> printed;
    for (ElementId a : L.canonical_decomposition(t.x)) {
      for (ElementId b : L.canonical_decomposition(t.y)) {
        if (printed.insert(layout.pair_index(a, b)).second) parts.push_back(L.label(a) + L.label(b));
      }
    }
    return join_strings(parts, " + ");
  };
  switch (c.kind) {
    case ConstraintKind::Leq: return expr(c.lhs) + " <= " + L.label(c.target);
    case ConstraintKind::Eq: return expr(c.lhs) + " = " + L.label(c.target);
    case ConstraintKind::DualEq: return "dual(" + expr(c.lhs) + ") = " + L.label(c.target);
    case ConstraintKind::SameDual: return "dual(" + expr(c.lhs) + ") = dual(" + expr(c.rhs) + ")";
    case ConstraintKind::NotLeq: return expr(c.lhs) + " !<= " + L.label(c.target);
  }
  return {};
}

}  // namespace linlat
