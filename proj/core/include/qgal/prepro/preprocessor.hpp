#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qgal/pcnf.hpp"

namespace qgal {

class Deadline;

enum class Technique : std::uint8_t {
  Unit,
  Pure,
  UniversalReduction,
  Subsumption,
  BlockedClauseElim,
  VarElim,
  UniversalExpansion,
};

std::string_view to_string(Technique t);
/// Accepts the names printed by to_string plus a few short aliases
/// (ur, bce, ve, expansion).
Technique parse_technique(std::string_view name);

enum class PreproKind : std::uint8_t { Simplified, SolvedSat, SolvedUnsat };

std::string_view to_string(PreproKind k);

struct TechniqueCount {
  Technique technique;
  std::uint64_t applications = 0;

  bool operator==(const TechniqueCount&) const = default;
};

struct PreproOutcome {
  PreproKind kind = PreproKind::Simplified;
  Pcnf formula;  // the simplified formula; for solved outcomes the last one
  std::vector<TechniqueCount> log;
  bool timed_out = false;
  std::string failure;  // non-empty when an internal error forced a pass-through

  bool solved() const { return kind != PreproKind::Simplified; }
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A named technique list, or an external command that reads QDIMACS on
/// stdin and writes the simplified formula on stdout.
struct ToolBundle {
  std::string name;
  std::vector<Technique> techniques;
  bool fixpoint = true;  // rerun the list while the formula keeps shrinking
  std::string command;   // non-empty for external bundles

  /// Throws ConfigError for an empty name or technique list.
  static ToolBundle internal(std::string name, std::vector<Technique> techniques, bool fixpoint = true);
  static ToolBundle external(std::string name, std::string command);
  bool is_external() const { return !command.empty(); }
};

struct TechniqueBudgets {
  // Allowed net clause growth of one variable elimination.
  std::size_t var_elim_growth = 0;
  // Allowed clause growth of one expansion pass; unset means the clause
  // count at the start of the pass (at most doubling).
  std::optional<std::size_t> expansion_growth;
};

// Individual techniques. Each returns SolvedUnsat when an empty clause
// appears and SolvedSat when the matrix becomes empty.

/// Unit propagation (after universal reduction) and pure literals, to closure.
PreproOutcome apply_unit_pure(const Pcnf& f);
PreproOutcome apply_unit(const Pcnf& f);
PreproOutcome apply_pure(const Pcnf& f);
PreproOutcome apply_universal_reduction(const Pcnf& f);
PreproOutcome subsume(const Pcnf& f);
/// Removes clauses blocked on an existential literal: every resolvent on it
/// is tautological through a variable quantified at or before its level.
PreproOutcome eliminate_blocked_clauses(const Pcnf& f);
/// Resolves away an existential variable of the innermost block when the
/// clause count grows by at most growth_budget; otherwise (or when v is not
/// innermost) the formula is returned unchanged. Throws FormulaError when v
/// is universal.
PreproOutcome eliminate_variable(const Pcnf& f, Var v, std::size_t growth_budget = 0);
/// Expands universal u of the innermost universal block when the clause
/// count grows by at most growth_budget (default: the current clause count).
/// A non-occurring u is just dropped from the prefix. Throws FormulaError
/// when u is not universal or not innermost.
PreproOutcome expand_universal(const Pcnf& f, Var u, std::optional<std::size_t> growth_budget = {});

/// One whole-formula pass of a technique.
PreproOutcome apply_technique(const Pcnf& f, Technique t, const TechniqueBudgets& budgets = {},
                              const Deadline* deadline = nullptr);

/// Runs the bundle's techniques in order, repeating while the measure
/// clauses + literals + variables strictly decreases (if the bundle asks for
/// a fixpoint). Stops at the time limit with the formula reached so far. An
/// internal failure returns the input unchanged with `failure` set.
/// External bundles are not handled here (see the pipeline module).
PreproOutcome preprocess(const Pcnf& f, const ToolBundle& bundle,
                         double limit_seconds = std::numeric_limits<double>::infinity(),
                         const TechniqueBudgets& budgets = {});

/// Matrix normalized, prefix merged with sorted blocks and without variables
/// that no longer occur.
Pcnf tidy(const Pcnf& f);

std::uint64_t progress_measure(const Pcnf& f);

/// The four built-in bundles A-D.
std::map<std::string, ToolBundle> default_bundles();

/// Lines "X = tech, tech, ..." or "X = external: <command>"; '#' starts a
/// comment. A trailing "!" after the name ("X! = ...") disables the local
/// fixpoint loop.
std::map<std::string, ToolBundle> parse_bundle_config(std::istream& in);
std::map<std::string, ToolBundle> load_bundle_config(const std::filesystem::path& path);

}  // namespace qgal
