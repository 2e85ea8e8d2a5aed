#pragma once

// Linear connectives evaluated over every admissible table at once.

#include <algorithm>
#include <cctype>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "linlat/error.hpp"
#include "linlat/lattice.hpp"
#include "linlat/phase.hpp"
#include "linlat/solver.hpp"

namespace linlat {

/// Possible results across table solutions, ids ascending.
class ValueSet {
 public:
  ValueSet() = default;
  explicit ValueSet(std::vector<ElementId> values) : values_(std::move(values)) {
    std::sort(values_.begin(), values_.end());
    values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
  }
  static ValueSet single(ElementId x) { return ValueSet({x}); }

  const std::vector<ElementId>& values() const { return values_; }
  bool determinate() const { return values_.size() == 1; }
  bool empty() const { return values_.empty(); }
  bool contains(ElementId x) const { return std::binary_search(values_.begin(), values_.end(), x); }

  bool operator==(const ValueSet&) const = default;

 private:
  std::vector<ElementId> values_;
};

/// Multiset of per-process elements, kept sorted.
struct StateExpression {
  std::vector<ElementId> processes;

  StateExpression() = default;
  explicit StateExpression(std::vector<ElementId> ps) : processes(std::move(ps)) {
    std::sort(processes.begin(), processes.end());
  }
  bool operator==(const StateExpression&) const = default;
};

/// Parsed text expression: each term keeps its atoms in written order.
struct ParsedExpression {
  std::vector<std::vector<ElementId>> terms;

  StateExpression state(const TaskLattice& lattice) const {
    std::vector<ElementId> ps;
    for (const auto& t : terms) ps.push_back(lattice.join_all(t));
    return StateExpression(std::move(ps));
  }
};

/// expr := term ('*' term)* ; term := atom | '(' atom ('+' atom)* ')'
ParsedExpression parse_expression(std::string_view text, const TaskLattice& lattice);
std::string format_expression(const StateExpression& e, const TaskLattice& lattice);

class LinearEngine {
 public:
  LinearEngine(PhaseStructure phase, AdmissibleTable table)
      : phase_(std::move(phase)), table_(std::move(table)) {
    if (table_.solutions.empty())
      throw DomainError(ErrorCode::Inconsistent, "engine needs at least one table solution");
  }

  const PhaseStructure& phase() const { return phase_; }
  const AdmissibleTable& table() const { return table_; }
  const TaskLattice& lattice() const { return phase_.lattice(); }

  ElementId dual(ElementId x) const { return phase_.dual(x); }
  ElementId fact_closure(ElementId x) const { return phase_.fact_closure(x); }
  ElementId plus(ElementId x, ElementId y) const { return fact_closure(lattice().join(x, y)); }
  ElementId with(ElementId x, ElementId y) const { return lattice().meet(x, y); }

  ValueSet multiply(ElementId x, ElementId y) const {
    return collect([&](const Assignment& a) { return product(x, y, a); });
  }
  ValueSet tensor(ElementId x, ElementId y) const {
    return collect([&](const Assignment& a) { return fact_closure(product(x, y, a)); });
  }
  ValueSet par(ElementId x, ElementId y) const {
    return collect([&](const Assignment& a) { return dual(product(dual(x), dual(y), a)); });
  }
  ValueSet residual(ElementId x, ElementId target) const {
    return collect([&](const Assignment& a) { return residual(x, target, a); });
  }
  ValueSet raw_product(const StateExpression& e) const {
    return collect([&](const Assignment& a) { return raw_product(e, a); });
  }
  ValueSet linear_implies(const StateExpression& src, const StateExpression& tgt) const {
    return collect([&](const Assignment& a) { return linear_implies(src, tgt, a); });
  }

  // Single-solution forms.
  ElementId product(ElementId x, ElementId y, const Assignment& a) const {
    return table_.layout.multiply(x, y, a);
  }
  ElementId residual(ElementId x, ElementId target, const Assignment& a) const {
    const TaskLattice& L = lattice();
    ElementId r = L.bottom();
    for (ElementId z : L.ids()) {
      if (L.leq(product(x, z, a), target)) r = L.join(r, z);
    }
    return r;
  }
  /// Left fold in sorted order. An empty state is the unit I.
  ElementId raw_product(const StateExpression& e, const Assignment& a) const {
    if (e.processes.empty()) return phase_.unit();
    ElementId r = e.processes.front();
    for (std::size_t i = 1; i < e.processes.size(); ++i) r = product(r, e.processes[i], a);
    return r;
  }
  ElementId linear_implies(const StateExpression& src, const StateExpression& tgt, const Assignment& a) const {
    return dual(product(fact_closure(raw_product(src, a)), dual(raw_product(tgt, a)), a));
  }

  template <class F>
  ValueSet collect(F&& f) const {
    std::vector<char> seen(lattice().size(), 0);
    std::vector<ElementId> out;
    for (const Assignment& a : table_.solutions) {
      ElementId v = f(a);
      if (!seen[v.value]) {
        seen[v.value] = 1;
        out.push_back(v);
      }
    }
    return ValueSet(std::move(out));
  }

 private:
  PhaseStructure phase_;
  AdmissibleTable table_;
};

// ---------------------------------------------------------------------------

inline ParsedExpression parse_expression(std::string_view text, const TaskLattice& lattice) {
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto error = [&](const std::string& what) -> ParseError {
    return ParseError("expression '" + std::string(text) + "' at offset " + std::to_string(pos) + ": " + what);
  };
  auto atom = [&]() {
    skip();
    std::size_t start = pos;
    while (pos < text.size()) {
      const char c = text[pos];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '*' || c == '+' || c == '(' || c == ')') break;
      ++pos;
    }
    if (pos == start) throw error("expected an element name");
    return lattice.by_name(text.substr(start, pos - start));
  };
  auto term = [&]() {
    skip();
    std::vector<ElementId> atoms;
    if (pos < text.size() && text[pos] == '(') {
      ++pos;
      atoms.push_back(atom());
      skip();
      while (pos < text.size() && text[pos] == '+') {
        ++pos;
        atoms.push_back(atom());
        skip();
      }
      if (pos >= text.size() || text[pos] != ')') throw error("expected ')'");
      ++pos;
    } else {
      atoms.push_back(atom());
    }
    return atoms;
  };

  ParsedExpression out;
  out.terms.push_back(term());
  skip();
  while (pos < text.size() && text[pos] == '*') {
    ++pos;
    out.terms.push_back(term());
    skip();
  }
  if (pos != text.size()) throw error("unexpected character '" + std::string(1, text[pos]) + "'");
  return out;
}

inline std::string format_expression(const StateExpression& e, const TaskLattice& lattice) {
  if (e.processes.empty()) return "I";
  std::vector<std::string> parts;
  for (ElementId p : e.processes) parts.push_back(lattice.label(p));
  return join_strings(parts, " * ");
}

}  // namespace linlat
