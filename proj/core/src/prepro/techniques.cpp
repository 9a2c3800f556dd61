#include <algorithm>
#include <numeric>

#include "qgal/normalize.hpp"
#include "qgal/prefix_index.hpp"
#include "qgal/prepro/preprocessor.hpp"
#include "qgal/solver/expansion.hpp"
#include "prepro_internal.hpp"

namespace qgal {
namespace {

using prepro_detail::Ticker;

inline std::size_t code(Literal l) {
  return 2 * static_cast<std::size_t>(l.var()) + (l.is_negative() ? 1 : 0);
}

PreproOutcome finish(const Pcnf& base, std::vector<Clause> matrix, Technique t,
                     std::uint64_t applications) {
  PreproOutcome out;
  out.log.push_back({t, applications});
  bool empty_clause = std::any_of(matrix.begin(), matrix.end(),
                                  [](const Clause& c) { return c.empty(); });
  Pcnf g;
  g.prefix = base.prefix;
  g.max_var = base.effective_max_var();
  if (empty_clause)
    g.matrix = {Clause{}};
  else
    g.matrix = std::move(matrix);
  out.formula = tidy(g);
  if (empty_clause)
    out.kind = PreproKind::SolvedUnsat;
  else if (out.formula.matrix.empty())
    out.kind = PreproKind::SolvedSat;
  return out;
}

PreproOutcome finish(Pcnf g, Technique t, std::uint64_t applications) {
  auto matrix = std::move(g.matrix);
  return finish(g, std::move(matrix), t, applications);
}

PreproOutcome unit_pass(const Pcnf& f, Ticker& tick) {
  PrefixIndex index(f);
  std::vector<std::int8_t> val(index.max_var() + 1, 0);
  auto value = [&](Literal l) {
    int v = val[l.var()];
    return l.is_positive() ? v : -v;
  };
  std::uint64_t applications = 0;
  bool conflict = false;
  Clause open;
  for (bool changed = true; changed && !conflict;) {
    changed = false;
    for (const auto& c : f.matrix) {
      tick();
      open.clear();
      bool satisfied = false;
      for (Literal l : c) {
        int v = value(l);
        if (v > 0) {
          satisfied = true;
          break;
        }
        if (v == 0) open.push_back(l);
      }
      if (satisfied) continue;
      Clause reduced = universal_reduce(open, index);
      if (reduced.empty()) {
        conflict = true;
        break;
      }
      if (reduced.size() == 1) {
        // A lone universal never survives reduction, so this is existential.
        val[reduced[0].var()] = reduced[0].is_positive() ? 1 : -1;
        ++applications;
        changed = true;
      }
    }
  }
  std::vector<Clause> matrix;
  if (conflict) {
    matrix.emplace_back();
  } else {
    for (const auto& c : f.matrix) {
      Clause kept;
      bool satisfied = false;
      for (Literal l : c) {
        int v = value(l);
        if (v > 0) {
          satisfied = true;
          break;
        }
        if (v == 0) kept.push_back(l);
      }
      if (!satisfied) matrix.push_back(std::move(kept));
    }
  }
  return finish(f, std::move(matrix), Technique::Unit, applications);
}

PreproOutcome pure_pass(const Pcnf& f, Ticker& tick) {
  PrefixIndex index(f);
  std::vector<Clause> clauses = f.matrix;
  std::vector<bool> active(clauses.size(), true);
  std::vector<std::uint32_t> count(2 * (index.max_var() + 1));
  std::uint64_t applications = 0;
  for (;;) {
    std::fill(count.begin(), count.end(), 0);
    for (std::size_t i = 0; i < clauses.size(); ++i)
      if (active[i])
        for (Literal l : clauses[i]) ++count[code(l)];
    std::vector<bool> drop_clause_lit(count.size(), false);  // literal -> clauses removed
    std::vector<bool> drop_lit(count.size(), false);         // literal -> literal removed
    bool any = false;
    for (Var v = 1; v <= index.max_var(); ++v) {
      auto p = count[code(Literal::positive(v))], n = count[code(Literal::negative(v))];
      if ((p == 0) == (n == 0)) continue;
      Literal pure = Literal::of(v, p > 0);
      if (index.is_existential(v))
        drop_clause_lit[code(pure)] = true;
      else
        drop_lit[code(pure)] = true;
      ++applications;
      any = true;
    }
    if (!any) break;
    for (std::size_t i = 0; i < clauses.size(); ++i) {
      if (!active[i]) continue;
      tick();
      auto& c = clauses[i];
      if (std::any_of(c.begin(), c.end(), [&](Literal l) { return drop_clause_lit[code(l)]; })) {
        active[i] = false;
        continue;
      }
      std::erase_if(c, [&](Literal l) { return drop_lit[code(l)]; });
      if (c.empty()) return finish(f, {Clause{}}, Technique::Pure, applications);
    }
  }
  std::vector<Clause> matrix;
  for (std::size_t i = 0; i < clauses.size(); ++i)
    if (active[i]) matrix.push_back(std::move(clauses[i]));
  return finish(f, std::move(matrix), Technique::Pure, applications);
}

PreproOutcome reduction_pass(const Pcnf& f, Ticker& tick) {
  PrefixIndex index(f);
  std::vector<Clause> matrix;
  matrix.reserve(f.matrix.size());
  std::uint64_t applications = 0;
  for (const auto& c : f.matrix) {
    tick();
    matrix.push_back(universal_reduce(c, index));
    if (matrix.back().size() != c.size()) ++applications;
  }
  return finish(f, std::move(matrix), Technique::UniversalReduction, applications);
}

PreproOutcome subsumption_pass(const Pcnf& f, Ticker& tick) {
  Pcnf g = normalize(f);
  auto& clauses = g.matrix;
  std::vector<std::size_t> order(clauses.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return clauses[a].size() < clauses[b].size();
  });
  std::vector<std::vector<std::size_t>> occ(2 * (g.effective_max_var() + 1));
  std::vector<bool> keep(clauses.size(), false);
  std::vector<std::size_t> visited(clauses.size(), SIZE_MAX);
  std::uint64_t applications = 0;
  for (std::size_t i : order) {
    const auto& c = clauses[i];
    bool subsumed = false;
    for (Literal l : c) {
      for (std::size_t d : occ[code(l)]) {
        if (visited[d] == i) continue;
        visited[d] = i;
        tick();
        if (std::includes(c.begin(), c.end(), clauses[d].begin(), clauses[d].end())) {
          subsumed = true;
          break;
        }
      }
      if (subsumed) break;
    }
    if (subsumed) {
      ++applications;
      continue;
    }
    keep[i] = true;
    for (Literal l : c) occ[code(l)].push_back(i);
  }
  std::vector<Clause> matrix;
  for (std::size_t i = 0; i < clauses.size(); ++i)
    if (keep[i]) matrix.push_back(std::move(clauses[i]));
  return finish(g, std::move(matrix), Technique::Subsumption, applications);
}

PreproOutcome blocked_pass(const Pcnf& f, Ticker& tick) {
  Pcnf g = normalize(f);
  PrefixIndex index(g);
  const auto& clauses = g.matrix;
  std::vector<std::vector<std::size_t>> occ(2 * (index.max_var() + 1));
  for (std::size_t i = 0; i < clauses.size(); ++i)
    for (Literal l : clauses[i]) occ[code(l)].push_back(i);
  std::vector<bool> active(clauses.size(), true);

  auto blocked_on = [&](const Clause& c, Literal l) {
    const auto level = index.level(l.var());
    for (std::size_t d : occ[code(-l)]) {
      if (!active[d]) continue;
      tick();
      const auto& other = clauses[d];
      bool tautological = false;
      for (Literal k : c) {
        if (k == l || index.level(k.var()) > level) continue;
        if (std::binary_search(other.begin(), other.end(), -k)) {
          tautological = true;
          break;
        }
      }
      if (!tautological) return false;
    }
    return true;
  };

  std::uint64_t applications = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < clauses.size(); ++i) {
      if (!active[i]) continue;
      for (Literal l : clauses[i]) {
        if (!index.is_existential(l.var()) || !blocked_on(clauses[i], l)) continue;
        active[i] = false;
        ++applications;
        changed = true;
        break;
      }
    }
  }
  std::vector<Clause> matrix;
  for (std::size_t i = 0; i < clauses.size(); ++i)
    if (active[i]) matrix.push_back(clauses[i]);
  return finish(g, std::move(matrix), Technique::BlockedClauseElim, applications);
}

// Replaces the clauses on v by their non-tautological, reduced resolvents
// when that adds at most `budget` clauses. Returns false if nothing changed.
bool eliminate_in(std::vector<Clause>& clauses, const PrefixIndex& index, Var v,
                  std::size_t budget, Ticker& tick) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < clauses.size(); ++i)
    for (Literal l : clauses[i])
      if (l.var() == v) {
        (l.is_positive() ? pos : neg).push_back(i);
        break;
      }
  if (pos.empty() && neg.empty()) return false;
  const std::size_t allowed = pos.size() + neg.size() + budget;
  std::vector<Clause> resolvents;
  for (std::size_t p : pos)
    for (std::size_t n : neg) {
      tick();
      Clause r;
      for (Literal l : clauses[p])
        if (l.var() != v) r.push_back(l);
      for (Literal l : clauses[n])
        if (l.var() != v) r.push_back(l);
      std::sort(r.begin(), r.end());
      r.erase(std::unique(r.begin(), r.end()), r.end());
      if (is_tautology(r)) continue;
      resolvents.push_back(universal_reduce(r, index));
      if (resolvents.size() > allowed) return false;
    }
  std::vector<bool> drop(clauses.size(), false);
  for (auto i : pos) drop[i] = true;
  for (auto i : neg) drop[i] = true;
  std::vector<Clause> next;
  next.reserve(clauses.size() - pos.size() - neg.size() + resolvents.size());
  for (std::size_t i = 0; i < clauses.size(); ++i)
    if (!drop[i]) next.push_back(std::move(clauses[i]));
  for (auto& r : resolvents) next.push_back(std::move(r));
  clauses = std::move(next);
  return true;
}

bool innermost_existential(const PrefixIndex& index, Var v) {
  return index.num_levels() > 0 && index.level(v) == index.num_levels() &&
         index.level_quantifier(index.num_levels()) == Quantifier::Exists;
}

PreproOutcome var_elim_pass(const Pcnf& f, std::size_t budget, Ticker& tick) {
  constexpr std::size_t kMaxProduct = 10000;
  PrefixIndex index(f);
  std::vector<Clause> clauses = f.matrix;
  std::uint64_t applications = 0;
  if (index.num_levels() == 0 || index.level_quantifier(index.num_levels()) != Quantifier::Exists)
    return finish(f, std::move(clauses), Technique::VarElim, 0);

  std::vector<std::size_t> pos(index.max_var() + 1), neg(index.max_var() + 1);
  for (const auto& c : clauses)
    for (Literal l : c) ++(l.is_positive() ? pos : neg)[l.var()];
  std::vector<Var> candidates;
  for (Var v : index.levels()[index.num_levels()])
    if (pos[v] + neg[v] > 0 && pos[v] * neg[v] <= kMaxProduct) candidates.push_back(v);
  std::sort(candidates.begin(), candidates.end(), [&](Var a, Var b) {
    auto ka = pos[a] * neg[a], kb = pos[b] * neg[b];
    return ka != kb ? ka < kb : a < b;
  });
  for (Var v : candidates) {
    if (eliminate_in(clauses, index, v, budget, tick)) {
      ++applications;
      if (std::any_of(clauses.begin(), clauses.end(), [](const Clause& c) { return c.empty(); }))
        break;
    }
  }
  return finish(f, std::move(clauses), Technique::VarElim, applications);
}

std::uint32_t innermost_universal_level(const PrefixIndex& index) {
  for (auto level = index.num_levels(); level > 0; --level)
    if (index.level_quantifier(level) == Quantifier::Forall) return level;
  return 0;
}

bool occurs(const Pcnf& f, Var v) {
  for (const auto& c : f.matrix)
    for (Literal l : c)
      if (l.var() == v) return true;
  return false;
}

PreproOutcome expansion_pass(const Pcnf& f, std::optional<std::size_t> growth, Ticker& tick) {
  PrefixIndex index(f);
  auto level = innermost_universal_level(index);
  if (level == 0) return finish(f, Technique::UniversalExpansion, 0);
  std::vector<std::size_t> count(index.max_var() + 1);
  for (const auto& c : f.matrix)
    for (Literal l : c) ++count[l.var()];
  std::vector<Var> vars;
  for (Var u : index.levels()[level])
    if (count[u] > 0) vars.push_back(u);
  std::sort(vars.begin(), vars.end(), [&](Var a, Var b) {
    return count[a] != count[b] ? count[a] < count[b] : a < b;
  });
  const std::size_t base = f.matrix.size();
  const std::size_t cap = base + growth.value_or(base);
  Pcnf current = f;
  std::uint64_t applications = 0;
  for (Var u : vars) {
    tick();
    if (current.matrix.size() > cap) break;
    auto step = expand_universal(current, u, cap - current.matrix.size());
    if (step.log.front().applications == 0) continue;
    applications += 1;
    current = std::move(step.formula);
    if (step.solved()) break;
  }
  return finish(std::move(current), Technique::UniversalExpansion, applications);
}

}  // namespace

PreproOutcome apply_unit(const Pcnf& f) {
  Ticker tick;
  return unit_pass(f, tick);
}

PreproOutcome apply_pure(const Pcnf& f) {
  Ticker tick;
  return pure_pass(f, tick);
}

PreproOutcome apply_unit_pure(const Pcnf& f) {
  Ticker tick;
  PreproOutcome out;
  out.formula = f;
  std::uint64_t units = 0, pures = 0;
  for (;;) {
    auto u = unit_pass(out.formula, tick);
    units += u.log.front().applications;
    out.formula = std::move(u.formula);
    out.kind = u.kind;
    if (out.solved()) break;
    auto p = pure_pass(out.formula, tick);
    pures += p.log.front().applications;
    out.formula = std::move(p.formula);
    out.kind = p.kind;
    if (out.solved() || p.log.front().applications == 0) break;
  }
  out.log = {{Technique::Unit, units}, {Technique::Pure, pures}};
  return out;
}

PreproOutcome apply_universal_reduction(const Pcnf& f) {
  Ticker tick;
  return reduction_pass(f, tick);
}

PreproOutcome subsume(const Pcnf& f) {
  Ticker tick;
  return subsumption_pass(f, tick);
}

PreproOutcome eliminate_blocked_clauses(const Pcnf& f) {
  Ticker tick;
  return blocked_pass(f, tick);
}

PreproOutcome eliminate_variable(const Pcnf& f, Var v, std::size_t growth_budget) {
  PrefixIndex index(f);
  if (index.is_universal(v))
    throw FormulaError("variable " + std::to_string(v) + " is universal");
  std::vector<Clause> clauses = f.matrix;
  Ticker tick;
  bool applied = innermost_existential(index, v) && eliminate_in(clauses, index, v, growth_budget, tick);
  return finish(f, std::move(clauses), Technique::VarElim, applied ? 1 : 0);
}

PreproOutcome expand_universal(const Pcnf& f, Var u, std::optional<std::size_t> growth_budget) {
  PrefixIndex index(f);
  if (!index.is_universal(u))
    throw FormulaError("variable " + std::to_string(u) + " is not universal");
  if (index.level(u) != innermost_universal_level(index))
    throw FormulaError("variable " + std::to_string(u) + " is not in the innermost universal block");
  if (!occurs(f, u)) {
    Pcnf g = f;
    for (auto& block : g.prefix) std::erase(block.variables, u);
    return finish(std::move(g), Technique::UniversalExpansion, 1);
  }
  Pcnf g = expand_universal_variable(f, u);
  if (g.matrix.size() > f.matrix.size() + growth_budget.value_or(f.matrix.size()))
    return finish(f, Technique::UniversalExpansion, 0);
  return finish(std::move(g), Technique::UniversalExpansion, 1);
}

PreproOutcome apply_technique(const Pcnf& f, Technique t, const TechniqueBudgets& budgets,
                              const Deadline* deadline) {
  Ticker tick{deadline};
  switch (t) {
    case Technique::Unit:
      return unit_pass(f, tick);
    case Technique::Pure:
      return pure_pass(f, tick);
    case Technique::UniversalReduction:
      return reduction_pass(f, tick);
    case Technique::Subsumption:
      return subsumption_pass(f, tick);
    case Technique::BlockedClauseElim:
      return blocked_pass(f, tick);
    case Technique::VarElim:
      return var_elim_pass(f, budgets.var_elim_growth, tick);
    case Technique::UniversalExpansion:
      return expansion_pass(f, budgets.expansion_growth, tick);
  }
  throw FormulaError("unknown technique");
}

}  // namespace qgal
