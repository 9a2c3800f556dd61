#include "qgal/generator.hpp"

#include <algorithm>

#include "qgal/util/random.hpp"

namespace qgal {

Pcnf random_pcnf(std::mt19937_64& rng, const RandomPcnfOptions& o) {
  auto pick = [&](std::uint64_t lo, std::uint64_t hi) { return lo + uniform_below(rng, hi - lo + 1); };

  Pcnf f;
  const auto nvars = static_cast<Var>(pick(1, o.max_vars));
  f.max_var = nvars;

  const auto nblocks = pick(1, std::min<std::uint64_t>(o.max_blocks, nvars));
  std::vector<Var> vars(nvars);
  for (Var v = 0; v < nvars; ++v) vars[v] = v + 1;
  portable_shuffle(vars, rng);
  // Cut points split the shuffled variables into nonempty blocks.
  std::vector<std::size_t> cuts;
  std::vector<std::size_t> slots(nvars - 1);
  for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = i + 1;
  portable_shuffle(slots, rng);
  cuts.assign(slots.begin(), slots.begin() + static_cast<std::ptrdiff_t>(nblocks - 1));
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(nvars);
  Quantifier q = uniform_below(rng, 2) ? Quantifier::Forall : Quantifier::Exists;
  std::size_t begin = 0;
  for (std::size_t end : cuts) {
    QuantifierBlock block{q, {vars.begin() + static_cast<std::ptrdiff_t>(begin),
                              vars.begin() + static_cast<std::ptrdiff_t>(end)}};
    std::sort(block.variables.begin(), block.variables.end());
    f.prefix.push_back(std::move(block));
    q = dual(q);
    begin = end;
  }

  const auto nclauses = pick(1, o.max_clauses);
  const auto max_len = std::min<std::uint64_t>(o.max_clause_len, nvars);
  const auto min_len = std::min<std::uint64_t>(o.min_clause_len, max_len);
  for (std::uint64_t i = 0; i < nclauses; ++i) {
    auto len = pick(min_len, max_len);
    std::vector<Var> pool(vars);
    portable_shuffle(pool, rng);
    Clause c;
    for (std::uint64_t k = 0; k < len; ++k) c.push_back(Literal::of(pool[k], uniform_below(rng, 2) == 1));
    f.matrix.push_back(std::move(c));
  }
  return f;
}

std::vector<Pcnf> random_suite(std::uint64_t seed, std::size_t count, const RandomPcnfOptions& options) {
  std::mt19937_64 rng(seed);
  std::vector<Pcnf> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_pcnf(rng, options));
  return out;
}

}  // namespace qgal
