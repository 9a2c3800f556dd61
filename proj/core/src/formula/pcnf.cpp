#include "qgal/pcnf.hpp"

#include <algorithm>
#include <unordered_set>

#include "qgal/prefix_index.hpp"

namespace qgal {

Var Pcnf::effective_max_var() const {
  Var m = max_var;
  for (const auto& block : prefix)
    for (Var v : block.variables) m = std::max(m, v);
  for (const auto& clause : matrix)
    for (Literal l : clause) m = std::max(m, l.var());
  return m;
}

Prefix merge_adjacent_blocks(const Prefix& prefix) {
  Prefix merged;
  for (const auto& block : prefix) {
    if (block.variables.empty()) continue;
    if (!merged.empty() && merged.back().quantifier == block.quantifier) {
      auto& vars = merged.back().variables;
      vars.insert(vars.end(), block.variables.begin(), block.variables.end());
    } else {
      merged.push_back(block);
    }
  }
  return merged;
}

bool is_tautology(const Clause& clause) {
  std::unordered_set<std::int32_t> seen;
  seen.reserve(clause.size() * 2);
  for (Literal l : clause) {
    if (seen.count(-l.dimacs())) return true;
    seen.insert(l.dimacs());
  }
  return false;
}

std::string to_string(const Clause& clause) {
  std::string out = "(";
  for (std::size_t i = 0; i < clause.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(clause[i].dimacs());
  }
  out += ')';
  return out;
}

PrefixIndex::PrefixIndex(const Prefix& prefix, Var max_var) {
  Var top = max_var;
  for (const auto& block : prefix)
    for (Var v : block.variables) top = std::max(top, v);
  level_.assign(top + 1, 0);
  order_.assign(top + 1, 0);
  universal_.assign(top + 1, false);
  bound_.assign(top + 1, false);
  vars_by_level_.emplace_back();
  level_quantifiers_.push_back(Quantifier::Exists);

  std::uint64_t position = top + 1;  // unbound variables order by id below this
  for (const auto& block : merge_adjacent_blocks(prefix)) {
    ++num_levels_;
    level_quantifiers_.push_back(block.quantifier);
    vars_by_level_.emplace_back();
    for (Var v : block.variables) {
      if (v == 0) throw FormulaError("variable 0 in quantifier prefix");
      if (bound_[v])
        throw FormulaError("variable " + std::to_string(v) + " quantified twice");
      bound_[v] = true;
      level_[v] = num_levels_;
      universal_[v] = block.quantifier == Quantifier::Forall;
      order_[v] = position++;
      vars_by_level_.back().push_back(v);
    }
  }
  for (Var v = 1; v <= top; ++v)
    if (!bound_[v]) order_[v] = v;
}

Quantifier PrefixIndex::level_quantifier(std::uint32_t level) const {
  return level < level_quantifiers_.size() ? level_quantifiers_[level] : Quantifier::Exists;
}

std::uint32_t PrefixIndex::max_existential_level(std::span<const Literal> lits) const {
  std::uint32_t m = 0;
  for (Literal l : lits)
    if (is_existential(l.var())) m = std::max(m, level(l.var()));
  return m;
}

std::uint32_t PrefixIndex::max_universal_level(std::span<const Literal> lits) const {
  std::uint32_t m = 0;
  for (Literal l : lits)
    if (is_universal(l.var())) m = std::max(m, level(l.var()));
  return m;
}

Clause universal_reduce(const Clause& clause, const PrefixIndex& index) {
  const std::uint32_t bound = index.max_existential_level(clause);
  Clause out;
  out.reserve(clause.size());
  for (Literal l : clause)
    if (!index.is_universal(l.var()) || index.level(l.var()) < bound) out.push_back(l);
  return out;
}

Cube existential_reduce(const Cube& cube, const PrefixIndex& index) {
  const std::uint32_t bound = index.max_universal_level(cube);
  Cube out;
  out.reserve(cube.size());
  for (Literal l : cube)
    if (index.is_universal(l.var()) || index.level(l.var()) < bound) out.push_back(l);
  return out;
}

}  // namespace qgal
