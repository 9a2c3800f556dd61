#pragma once

#include <optional>
#include <stdexcept>

#include "qgal/pcnf.hpp"
#include "qgal/prefix_index.hpp"

namespace qgal {

class ResolutionError : public std::runtime_error {
 public:
  enum class Kind { Tautology, PivotNotPresent, PivotNotExistential };
  ResolutionError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// One traditional Q-resolution step: union of both clauses without the
/// pivot, followed by universal reduction. Throws ResolutionError when the
/// pivot is universal or does not clash, or the resolvent is tautological.
Clause qresolve(const Clause& c1, const Clause& c2, Var pivot, const PrefixIndex& index);

/// Plain resolvent (no reduction); nullopt when it would be tautological.
/// Duplicate literals are merged and first-seen order is kept.
std::optional<Clause> resolvent(const Clause& c1, const Clause& c2, Var pivot);

}  // namespace qgal
