#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qgal/pcnf.hpp"

namespace qgal {

/// Constant-time quantifier and level lookup over a prefix.
///
/// Levels are 1-based positions in the merged prefix, so adjacent blocks with
/// the same quantifier share a level. Variables not bound by the prefix are
/// treated as outermost existentials and get level 0.
///
/// The index also fixes a total order on variables (level first, then the
/// position inside the block). Certificate extraction relies on it to keep
/// function dependencies acyclic.
class PrefixIndex {
 public:
  PrefixIndex() = default;
  PrefixIndex(const Prefix& prefix, Var max_var);
  explicit PrefixIndex(const Pcnf& f) : PrefixIndex(f.prefix, f.effective_max_var()) {}

  Var max_var() const { return static_cast<Var>(level_.size()) - 1; }

  bool is_bound(Var v) const { return v < bound_.size() && bound_[v]; }
  bool is_existential(Var v) const { return !is_universal(v); }
  bool is_universal(Var v) const { return v < universal_.size() && universal_[v]; }
  Quantifier quantifier(Var v) const {
    return is_universal(v) ? Quantifier::Forall : Quantifier::Exists;
  }
  std::uint32_t level(Var v) const { return v < level_.size() ? level_[v] : 0; }
  /// Position in the total variable order; unbound variables come first.
  std::uint64_t order(Var v) const { return v < order_.size() ? order_[v] : v; }

  std::uint32_t num_levels() const { return num_levels_; }
  Quantifier level_quantifier(std::uint32_t level) const;
  /// Variables of each merged level, index 0 holds nothing.
  const std::vector<std::vector<Var>>& levels() const { return vars_by_level_; }

  /// Largest level of an existential literal in the clause, 0 if none.
  std::uint32_t max_existential_level(std::span<const Literal> lits) const;
  /// Largest level of a universal literal in the cube, 0 if none.
  std::uint32_t max_universal_level(std::span<const Literal> lits) const;

 private:
  std::vector<std::uint32_t> level_;
  std::vector<std::uint64_t> order_;
  std::vector<bool> universal_;
  std::vector<bool> bound_;
  std::vector<Quantifier> level_quantifiers_;
  std::vector<std::vector<Var>> vars_by_level_;
  std::uint32_t num_levels_ = 0;
};

/// Removes every universal literal whose level exceeds the level of all
/// existential literals in the clause. Literal order is preserved.
Clause universal_reduce(const Clause& clause, const PrefixIndex& index);

/// Dual of universal reduction on cubes: drops existential literals quantified
/// to the right of every universal literal.
Cube existential_reduce(const Cube& cube, const PrefixIndex& index);

}  // namespace qgal
