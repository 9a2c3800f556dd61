#include "qgal/solver/expansion.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <unordered_map>

#include "qgal/prefix_index.hpp"
#include "qgal/solver/sat.hpp"
#include "qgal/util/timer.hpp"

namespace qgal {
namespace {

// Clause under u = value: nullopt if satisfied, else the clause without u.
std::optional<Clause> restrict_clause(const Clause& c, Var u, bool value) {
  Clause out;
  out.reserve(c.size());
  for (Literal l : c) {
    if (l.var() != u) {
      out.push_back(l);
    } else if (l.is_positive() == value) {
      return std::nullopt;
    }
  }
  return out;
}

}  // namespace

Pcnf expand_universal_variable(const Pcnf& f, Var u) {
  PrefixIndex index(f);
  if (!index.is_universal(u)) throw FormulaError("variable " + std::to_string(u) + " is not universal");
  const auto lu = index.level(u);

  Pcnf out;
  out.max_var = f.effective_max_var();
  for (const auto& block : merge_adjacent_blocks(f.prefix)) {
    QuantifierBlock b{block.quantifier, {}};
    for (Var v : block.variables)
      if (v != u) b.variables.push_back(v);
    if (!b.variables.empty()) out.prefix.push_back(std::move(b));
  }
  out.prefix = merge_adjacent_blocks(out.prefix);

  // Inner scope: every variable quantified right of u. Inner universals
  // stay shared, which only happens when u is not innermost; copies of inner
  // existentials get fresh names.
  std::unordered_map<Var, Var> rename;
  std::vector<Var> fresh;
  auto inner = [&](Var v) { return index.level(v) > lu && index.is_existential(v); };
  bool uses_inner_universal = false;
  for (const auto& c : f.matrix)
    for (Literal l : c)
      if (index.level(l.var()) > lu && index.is_universal(l.var())) uses_inner_universal = true;
  if (uses_inner_universal)
    throw FormulaError("expansion requires u in the innermost universal block");

  Var next = out.max_var;
  auto renamed = [&](Var v) {
    auto it = rename.find(v);
    if (it != rename.end()) return it->second;
    rename.emplace(v, ++next);
    fresh.push_back(next);
    return next;
  };

  for (const auto& c : f.matrix) {
    bool has_u = false, has_inner = false;
    for (Literal l : c) {
      if (l.var() == u) has_u = true;
      if (inner(l.var())) has_inner = true;
    }
    if (!has_u && !has_inner) {
      out.matrix.push_back(c);
      continue;
    }
    if (auto c0 = restrict_clause(c, u, false)) out.matrix.push_back(*c0);
    if (auto c1 = restrict_clause(c, u, true)) {
      for (auto& l : *c1)
        if (inner(l.var())) l = Literal::of(renamed(l.var()), l.is_positive());
      out.matrix.push_back(std::move(*c1));
    }
  }

  if (!fresh.empty()) {
    std::sort(fresh.begin(), fresh.end());
    if (!out.prefix.empty() && out.prefix.back().quantifier == Quantifier::Exists) {
      auto& vars = out.prefix.back().variables;
      vars.insert(vars.end(), fresh.begin(), fresh.end());
    } else {
      out.prefix.push_back(QuantifierBlock{Quantifier::Exists, fresh});
    }
    out.max_var = next;
  }
  return out;
}

SolveOutcome solve_expansion(const Pcnf& input, const Limits& limits, ExpansionStats* stats) {
  Deadline deadline(limits.time_seconds);
  auto footprint = [](const Pcnf& f) {
    std::size_t bytes = f.matrix.size() * sizeof(Clause);
    for (const auto& c : f.matrix) bytes += c.size() * sizeof(Literal);
    return bytes;
  };

  Pcnf f = input;
  PrefixIndex index(f);
  for (auto& c : f.matrix) {
    if (is_tautology(c)) continue;
    c = universal_reduce(c, index);
    if (c.empty()) return SolveOutcome::unsat(deadline.elapsed());
  }
  std::erase_if(f.matrix, [](const Clause& c) { return is_tautology(c); });

  ExpansionStats local;
  for (;;) {
    f.prefix = merge_adjacent_blocks(f.prefix);
    auto it = std::find_if(f.prefix.rbegin(), f.prefix.rend(),
                           [](const QuantifierBlock& b) { return b.quantifier == Quantifier::Forall; });
    if (it == f.prefix.rend()) break;
    if (deadline.expired()) return SolveOutcome::unknown(deadline.elapsed(), UnknownReason::Timeout);
    Var u = it->variables.back();
    f = expand_universal_variable(f, u);
    ++local.expanded;
    local.peak_memory = std::max(local.peak_memory, footprint(f));
    for (const auto& c : f.matrix)
      if (c.empty()) {
        if (stats) *stats = local;
        return SolveOutcome::unsat(deadline.elapsed());
      }
    if (footprint(f) > limits.memory_bytes) {
      if (stats) *stats = local;
      return SolveOutcome::unknown(deadline.elapsed(), UnknownReason::Memout);
    }
  }

  local.final_clauses = f.matrix.size();
  local.final_vars = f.effective_max_var();
  if (stats) *stats = local;

  SatSolver sat(f.effective_max_var());
  for (const auto& c : f.matrix) sat.add_clause(c);
  Limits rest = limits;
  rest.time_seconds = deadline.remaining();
  if (limits.memory_bytes != Limits{}.memory_bytes)
    rest.memory_bytes = limits.memory_bytes > footprint(f) ? limits.memory_bytes - footprint(f) : 0;
  auto result = sat.solve(rest);
  if (stats) stats->peak_memory = std::max(local.peak_memory, footprint(f) + sat.memory_estimate());
  switch (result) {
    case SatSolver::Result::Sat: return SolveOutcome::sat(deadline.elapsed());
    case SatSolver::Result::Unsat: return SolveOutcome::unsat(deadline.elapsed());
    case SatSolver::Result::Unknown: break;
  }
  return SolveOutcome::unknown(deadline.elapsed(), sat.unknown_reason());
}

}  // namespace qgal
