#pragma once

// Independent two-player game evaluation of a PCNF by exhaustive search.
// Deliberately shares no code with the library beyond the data types.

#include <cstdint>
#include <vector>

#include "qgal/pcnf.hpp"

namespace qgal::testing {

struct GameOrder {
  std::vector<Var> vars;
  std::vector<bool> universal;
};

inline GameOrder game_order(const Pcnf& f) {
  Var max_var = f.max_var;
  for (const auto& b : f.prefix)
    for (Var v : b.variables) max_var = std::max(max_var, v);
  for (const auto& c : f.matrix)
    for (Literal l : c) max_var = std::max(max_var, l.var());
  std::vector<bool> bound(max_var + 1, false);
  for (const auto& b : f.prefix)
    for (Var v : b.variables) bound[v] = true;
  GameOrder order;
  // Unbound variables play first as existentials.
  for (Var v = 1; v <= max_var; ++v)
    if (!bound[v]) {
      order.vars.push_back(v);
      order.universal.push_back(false);
    }
  for (const auto& b : f.prefix)
    for (Var v : b.variables) {
      order.vars.push_back(v);
      order.universal.push_back(b.quantifier == Quantifier::Forall);
    }
  return order;
}

class GameEvaluator {
 public:
  explicit GameEvaluator(const Pcnf& f) : f_(f), order_(game_order(f)) {
    Var max_var = 0;
    for (Var v : order_.vars) max_var = std::max(max_var, v);
    value_.assign(max_var + 1, 0);
  }

  bool evaluate() { return play(0); }

 private:
  // 1 all clauses satisfied, -1 some clause falsified, 0 undecided.
  int matrix_state() const {
    bool all_sat = true;
    for (const auto& c : f_.matrix) {
      bool sat = false, open = false;
      for (Literal l : c) {
        int v = value_[l.var()];
        if (v == 0) open = true;
        else if ((v > 0) == l.is_positive()) sat = true;
      }
      if (!sat && !open) return -1;
      if (!sat) all_sat = false;
    }
    return all_sat ? 1 : 0;
  }

  bool play(std::size_t depth) {
    int state = matrix_state();
    if (state != 0) return state > 0;
    if (depth == order_.vars.size()) return true;  // unreachable: all assigned means decided
    Var v = order_.vars[depth];
    bool universal = order_.universal[depth];
    bool result = universal;
    for (int s : {-1, 1}) {
      value_[v] = static_cast<std::int8_t>(s);
      bool r = play(depth + 1);
      value_[v] = 0;
      if (universal && !r) { result = false; break; }
      if (!universal && r) { result = true; break; }
    }
    return result;
  }

  const Pcnf& f_;
  GameOrder order_;
  std::vector<std::int8_t> value_;
};

/// True iff the QBF is true.
inline bool brute_force_truth(const Pcnf& f) { return GameEvaluator(f).evaluate(); }

}  // namespace qgal::testing
