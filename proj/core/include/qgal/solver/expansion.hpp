#pragma once

#include "qgal/pcnf.hpp"
#include "qgal/solver/outcome.hpp"

namespace qgal {

struct ExpansionStats {
  std::size_t expanded = 0;          // universal variables expanded
  std::size_t final_clauses = 0;     // clauses handed to the SAT engine
  std::size_t final_vars = 0;
  std::size_t peak_memory = 0;       // estimated bytes, matrix plus SAT engine
};

/// Expands every universal variable (innermost first) and solves the purely
/// existential remainder with the SAT engine. Each expansion of u keeps the
/// u=false copy under the original names, renames the existentials right of
/// u in the u=true copy, and shares clauses that do not mention them.
SolveOutcome solve_expansion(const Pcnf& f, const Limits& limits = {},
                             ExpansionStats* stats = nullptr);

/// One expansion step, shared with the preprocessor: eliminates universal u
/// by duplicating the scope to its right. Fresh variables are allocated above
/// f.effective_max_var() and appended to the innermost existential block.
Pcnf expand_universal_variable(const Pcnf& f, Var u);

}  // namespace qgal
