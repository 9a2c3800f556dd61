#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qgal/pcnf.hpp"
#include "qgal/solver/outcome.hpp"

namespace qgal {

/// Small CDCL SAT engine: two watched literals, first-UIP learning, VSIDS
/// with phase saving and Luby restarts.
class SatSolver {
 public:
  enum class Result : std::uint8_t { Sat, Unsat, Unknown };

  explicit SatSolver(Var num_vars = 0);

  Var num_vars() const { return static_cast<Var>(assigns_.size()) - 1; }
  Var new_var();
  /// Grows the variable range so that v is valid.
  void reserve_vars(Var v);
  /// Adding an empty (or falsified-at-root) clause makes the instance UNSAT.
  void add_clause(std::span<const Literal> lits);
  void add_clause(std::initializer_list<Literal> lits) {
    add_clause(std::span<const Literal>(lits.begin(), lits.size()));
  }

  /// Unknown when the limits expire (timeout or memout).
  Result solve(const Limits& limits = {});
  UnknownReason unknown_reason() const { return unknown_reason_; }

  /// Value in the last satisfying assignment.
  bool model_value(Var v) const { return model_[v] > 0; }

  std::uint64_t conflicts() const { return conflicts_; }
  std::size_t memory_estimate() const;

 private:
  struct ClauseData {
    std::vector<Literal> lits;
    bool learned = false;
  };

  int value(Literal l) const;
  void assign(Literal l, std::int32_t reason);
  std::int32_t propagate();
  void analyze(std::int32_t conflict, std::vector<Literal>& learned, std::uint32_t& back_level);
  void backtrack(std::uint32_t level);
  Var pick_branch();
  void bump(Var v);
  void heap_push(Var v);
  void attach(std::uint32_t cid);
  std::uint32_t level() const { return static_cast<std::uint32_t>(trail_lim_.size()); }

  std::vector<ClauseData> clauses_;
  std::vector<std::vector<std::uint32_t>> watches_;
  std::vector<std::int8_t> assigns_;
  std::vector<std::int8_t> phase_;
  std::vector<std::int8_t> model_;
  std::vector<std::uint32_t> levels_;
  std::vector<std::int32_t> reasons_;
  std::vector<double> activity_;
  std::vector<Var> heap_;
  std::vector<std::int32_t> heap_index_;
  std::vector<Literal> trail_;
  std::vector<std::size_t> trail_lim_;
  std::vector<bool> seen_;
  std::size_t qhead_ = 0;
  double var_inc_ = 1.0;
  bool root_conflict_ = false;
  std::uint64_t conflicts_ = 0;
  std::size_t literal_count_ = 0;
  UnknownReason unknown_reason_ = UnknownReason::None;
};

}  // namespace qgal
