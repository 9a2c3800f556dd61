#include "qgal/solver/qresolution.hpp"

#include <algorithm>

namespace qgal {

std::optional<Clause> resolvent(const Clause& c1, const Clause& c2, Var pivot) {
  Clause out;
  out.reserve(c1.size() + c2.size());
  for (const Clause* c : {&c1, &c2})
    for (Literal l : *c) {
      if (l.var() == pivot) continue;
      if (std::find(out.begin(), out.end(), -l) != out.end()) return std::nullopt;
      if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
    }
  return out;
}

Clause qresolve(const Clause& c1, const Clause& c2, Var pivot, const PrefixIndex& index) {
  if (!index.is_existential(pivot))
    throw ResolutionError(ResolutionError::Kind::PivotNotExistential,
                          "pivot " + std::to_string(pivot) + " is universal");
  auto has = [](const Clause& c, Literal l) { return std::find(c.begin(), c.end(), l) != c.end(); };
  Literal pos = Literal::positive(pivot), neg = Literal::negative(pivot);
  bool clash = (has(c1, pos) && has(c2, neg)) || (has(c1, neg) && has(c2, pos));
  if (!clash)
    throw ResolutionError(ResolutionError::Kind::PivotNotPresent,
                          "pivot " + std::to_string(pivot) + " does not occur with opposite signs");
  auto r = resolvent(c1, c2, pivot);
  if (!r)
    throw ResolutionError(ResolutionError::Kind::Tautology,
                          "resolvent on " + std::to_string(pivot) + " is tautological");
  return universal_reduce(*r, index);
}

}  // namespace qgal
