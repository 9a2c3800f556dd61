#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "qgal/pcnf.hpp"
#include "qgal/proof.hpp"
#include "qgal/solver/outcome.hpp"

namespace qgal {

struct SearchOptions {
  // Pure literals are assigned as decisions, so they never need a reason.
  bool pure_literals = true;
  bool restarts = false;
  std::uint64_t restart_first = 100;  // learned constraints before the first restart
  double restart_factor = 1.5;
  double activity_decay = 0.95;
  // Nonzero seeds perturb the initial activities; 0 keeps pure id order.
  std::uint64_t seed = 0;
  // Limits are polled every this many propagations.
  std::uint32_t check_interval = 1024;
};

struct SearchStats {
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t solutions = 0;
  std::uint64_t learned_clauses = 0;
  std::uint64_t learned_cubes = 0;
  std::uint64_t restarts = 0;
  std::uint64_t trace_steps = 0;
  std::size_t peak_memory = 0;  // estimated bytes
};

enum class PropagationState : std::uint8_t { Open, Conflict, Solution };

struct PropagationResult {
  PropagationState state = PropagationState::Open;
  // The falsified clause or satisfied cube; empty for a solution found by
  // satisfying every input clause.
  std::vector<Literal> constraint;
};

/// Search-based QBF solver with clause and cube learning (QDPLL).
///
/// Decisions follow the prefix order. A clause implies its last open
/// existential literal only once all its other literals are false, and a cube
/// implies the negation of its last open universal literal only once all
/// others are true. Under this rule every conflict and solution analysis is a
/// sequence of traditional Q-resolution (term-resolution) steps, which are
/// emitted to the optional trace sink. The last traced step is the empty
/// clause (UNSAT) or the empty cube (SAT).
class QdpllSolver {
 public:
  explicit QdpllSolver(const Pcnf& f, SearchOptions options = {}, TraceSink* trace = nullptr);
  ~QdpllSolver();
  QdpllSolver(const QdpllSolver&) = delete;
  QdpllSolver& operator=(const QdpllSolver&) = delete;

  SolveOutcome solve(const Limits& limits = {});

  /// Closes the current state under unit propagation and pure-literal
  /// assignment and reports a conflict, a solution, or an open state.
  PropagationResult propagate();

  std::optional<bool> value(Var v) const;
  std::uint32_t decision_level() const;
  const SearchStats& stats() const;

  std::vector<Clause> learned_clauses() const;
  std::vector<Cube> learned_cubes() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

SolveOutcome solve_search(const Pcnf& f, const Limits& limits = {}, TraceSink* trace = nullptr,
                          const SearchOptions& options = {});

}  // namespace qgal
