#pragma once

// The derived multiplication: a commutative product fixed by its values on
// pairs of join-irreducibles and extended through canonical decompositions.

#include <algorithm>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "linlat/error.hpp"
#include "linlat/lattice.hpp"

namespace linlat {

/// One value per unordered join-irreducible pair, indexed by ProductLayout.
using Assignment = std::vector<ElementId>;

class ProductLayout {
 public:
  ProductLayout() = default;
  explicit ProductLayout(std::shared_ptr<const TaskLattice> lattice) : lattice_(std::move(lattice)) {
    auto jis = lattice_->join_irreducibles();
    atoms_.assign(jis.begin(), jis.end());
    slot_.assign(lattice_->size(), -1);
    for (std::size_t i = 0; i < atoms_.size(); ++i) slot_[atoms_[i].value] = static_cast<int>(i);
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      for (std::size_t j = i; j < atoms_.size(); ++j) pairs_.emplace_back(atoms_[i], atoms_[j]);
    }
  }

  const TaskLattice& lattice() const { return *lattice_; }
  const std::shared_ptr<const TaskLattice>& lattice_ptr() const { return lattice_; }
  std::span<const ElementId> atoms() const { return atoms_; }
  std::size_t pair_count() const { return pairs_.size(); }
  std::pair<ElementId, ElementId> pair(std::size_t k) const { return pairs_.at(k); }

  std::size_t pair_index(ElementId a, ElementId b) const {
    int i = slot(a);
    int j = slot(b);
    if (i > j) std::swap(i, j);
    const int k = static_cast<int>(atoms_.size());
    // rows 0..i-1 hold k, k-1, ... entries
    return static_cast<std::size_t>(i * k - i * (i - 1) / 2 + (j - i));
  }

  /// Pair slots touched by x*y, sorted and unique.
  std::vector<std::size_t> unknowns(ElementId x, ElementId y) const {
    std::vector<std::size_t> out;
    for (ElementId a : lattice_->canonical_decomposition(x)) {
      for (ElementId b : lattice_->canonical_decomposition(y)) out.push_back(pair_index(a, b));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  ElementId multiply(ElementId x, ElementId y, std::span<const ElementId> assignment) const {
    ElementId r = lattice_->bottom();
    for (ElementId a : lattice_->canonical_decomposition(x)) {
      for (ElementId b : lattice_->canonical_decomposition(y)) r = lattice_->join(r, assignment[pair_index(a, b)]);
    }
    return r;
  }

  std::string pair_label(std::size_t k) const {
    auto [a, b] = pair(k);
    return lattice_->label(a) + lattice_->label(b);
  }

 private:
  int slot(ElementId a) const {
    lattice_->check(a);
    int s = slot_[a.value];
    if (s < 0)
      throw DomainError(ErrorCode::ForeignElement, lattice_->label(a) + " is not join-irreducible");
    return s;
  }

  std::shared_ptr<const TaskLattice> lattice_;
  std::vector<ElementId> atoms_;
  std::vector<int> slot_;
  std::vector<std::pair<ElementId, ElementId>> pairs_;
};

}  // namespace linlat
