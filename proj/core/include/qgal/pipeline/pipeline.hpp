#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qgal/normalize.hpp"
#include "qgal/pcnf.hpp"
#include "qgal/prepro/preprocessor.hpp"

namespace qgal {

struct ExecutionSequence {
  std::vector<std::string> steps;  // bundle labels, repetitions allowed
  int max_rounds = 6;
  double per_call_limit = 120.0;  // seconds
  // Wall-clock budget for the whole run; when it runs out the result is
  // RoundsExhausted with the formula reached so far.
  double total_limit = std::numeric_limits<double>::infinity();

  /// "AABBCCDD" gives one label per character; a comma-separated list
  /// ("A,B,ext") allows longer labels. Throws ConfigError on an empty
  /// sequence or max_rounds < 1.
  static ExecutionSequence parse(std::string_view text, int max_rounds = 6,
                                 double per_call_limit = 120.0);
  /// Compact label string, e.g. "(AABB)^6".
  std::string label() const;
};

struct StepOutcome {
  std::string bundle;
  bool modified = false;  // digest of the output differs from the input's
  bool solved = false;
  bool failed = false;     // error or crash; the input was forwarded
  bool timed_out = false;  // hit the per-call limit; the input was forwarded
  double wall_seconds = 0.0;
  CanonicalDigest digest;  // of the step's output, for reporting only
  std::string message;
};

struct RoundReport {
  int round = 0;  // 1-based
  CanonicalDigest digest_before;
  CanonicalDigest digest_after;
  std::vector<StepOutcome> steps;
  bool fixpoint = false;
  bool solved = false;
};

enum class PipelineKind : std::uint8_t { SolvedSat, SolvedUnsat, Fixpoint, RoundsExhausted };

std::string_view to_string(PipelineKind k);

struct PipelineResult {
  PipelineKind kind = PipelineKind::RoundsExhausted;
  Pcnf formula;  // final formula (for solved runs, the last one produced)
  std::vector<RoundReport> rounds;
  std::optional<int> solved_in_round;
  std::string solved_by;  // bundle label of the solving step
};

/// Result of one bundle call on its own.
struct StepResult {
  Pcnf formula;
  PreproKind kind = PreproKind::Simplified;
  bool failed = false;
  bool timed_out = false;
  std::string message;
};

/// Runs one bundle under a wall-clock limit. Internal bundles run in
/// process; external ones get QDIMACS on stdin and must print the result
/// on stdout (exit codes 10/20 also report a solved formula). Timeouts and
/// failures forward the input unchanged.
StepResult run_bundle(const Pcnf& f, const ToolBundle& bundle, double limit_seconds,
                      const TechniqueBudgets& budgets = {});

/// Throws FormulaError when the digests use different algorithms.
bool detect_fixpoint(const CanonicalDigest& before, const CanonicalDigest& after);

/// Runs the sequence for up to max_rounds rounds, stopping early when a step
/// solves the formula or a round leaves the digest unchanged. Throws
/// ConfigError for unknown labels before running anything.
PipelineResult run_sequence(const Pcnf& f, const ExecutionSequence& seq,
                            const std::map<std::string, ToolBundle>& bundles,
                            const TechniqueBudgets& budgets = {});

/// The 24 orderings of "ABCD", lexicographic.
std::vector<std::string> bundle_permutations(std::string letters = "ABCD");

}  // namespace qgal
