#include "qgal/solver/sat.hpp"

#include <algorithm>

#include "qgal/util/timer.hpp"

namespace qgal {
namespace {

constexpr std::int32_t kNone = -1;

inline std::size_t code(Literal l) {
  return 2 * static_cast<std::size_t>(l.var()) + (l.is_negative() ? 1 : 0);
}

double luby(double y, std::uint64_t x) {
  std::uint64_t size = 1, seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  double r = 1;
  for (std::uint64_t i = 0; i < seq; ++i) r *= y;
  return r;
}

}  // namespace

SatSolver::SatSolver(Var num_vars) {
  assigns_.push_back(0);
  phase_.push_back(0);
  model_.push_back(0);
  levels_.push_back(0);
  reasons_.push_back(kNone);
  activity_.push_back(0);
  heap_index_.push_back(-1);
  seen_.push_back(false);
  watches_.resize(2);
  reserve_vars(num_vars);
}

Var SatSolver::new_var() {
  Var v = static_cast<Var>(assigns_.size());
  assigns_.push_back(0);
  phase_.push_back(-1);
  model_.push_back(0);
  levels_.push_back(0);
  reasons_.push_back(kNone);
  activity_.push_back(0);
  heap_index_.push_back(-1);
  seen_.push_back(false);
  watches_.resize(2 * (v + 1));
  heap_push(v);
  return v;
}

void SatSolver::reserve_vars(Var v) {
  while (num_vars() < v) new_var();
}

int SatSolver::value(Literal l) const {
  int v = assigns_[l.var()];
  return l.is_positive() ? v : -v;
}

void SatSolver::assign(Literal l, std::int32_t reason) {
  Var v = l.var();
  assigns_[v] = l.is_positive() ? 1 : -1;
  levels_[v] = level();
  reasons_[v] = reason;
  trail_.push_back(l);
}

void SatSolver::attach(std::uint32_t cid) {
  const auto& lits = clauses_[cid].lits;
  watches_[code(-lits[0])].push_back(cid);
  watches_[code(-lits[1])].push_back(cid);
}

void SatSolver::add_clause(std::span<const Literal> input) {
  if (root_conflict_) return;
  backtrack(0);
  std::vector<Literal> lits(input.begin(), input.end());
  Var top = 0;
  for (Literal l : lits) top = std::max(top, l.var());
  reserve_vars(top);
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  std::vector<Literal> kept;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (i + 1 < lits.size() && lits[i + 1] == -lits[i]) return;  // tautology
    int v = value(lits[i]);
    if (v > 0) return;  // satisfied at the root
    if (v == 0) kept.push_back(lits[i]);
  }
  if (kept.empty()) {
    root_conflict_ = true;
    return;
  }
  if (kept.size() == 1) {
    assign(kept[0], kNone);
    return;
  }
  literal_count_ += kept.size();
  clauses_.push_back({std::move(kept), false});
  attach(static_cast<std::uint32_t>(clauses_.size() - 1));
}

std::int32_t SatSolver::propagate() {
  while (qhead_ < trail_.size()) {
    Literal p = trail_[qhead_++];
    // Clauses watching -p, stored under code(p).
    auto& ws = watches_[code(p)];
    std::size_t i = 0, j = 0;
    std::int32_t conflict = kNone;
    while (i < ws.size()) {
      auto cid = ws[i++];
      auto& lits = clauses_[cid].lits;
      if (lits[0] == -p) std::swap(lits[0], lits[1]);
      if (value(lits[0]) > 0) {
        ws[j++] = cid;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < lits.size(); ++k)
        if (value(lits[k]) >= 0) {
          std::swap(lits[1], lits[k]);
          watches_[code(-lits[1])].push_back(cid);
          moved = true;
          break;
        }
      if (moved) continue;
      ws[j++] = cid;
      if (value(lits[0]) < 0) {
        conflict = static_cast<std::int32_t>(cid);
        break;
      }
      assign(lits[0], static_cast<std::int32_t>(cid));
    }
    while (i < ws.size()) ws[j++] = ws[i++];
    ws.resize(j);
    if (conflict != kNone) return conflict;
  }
  return kNone;
}

void SatSolver::analyze(std::int32_t conflict, std::vector<Literal>& learned,
                        std::uint32_t& back_level) {
  learned.clear();
  learned.push_back(Literal());  // asserting literal goes first
  int open = 0;
  Literal p;
  std::size_t index = trail_.size();
  std::int32_t cid = conflict;
  do {
    for (Literal q : clauses_[cid].lits) {
      if (p.var() != 0 && q == p) continue;
      Var v = q.var();
      if (seen_[v] || levels_[v] == 0) continue;
      seen_[v] = true;
      bump(v);
      if (levels_[v] >= level())
        ++open;
      else
        learned.push_back(q);
    }
    while (!seen_[trail_[--index].var()]) {
    }
    p = trail_[index];
    cid = reasons_[p.var()];
    seen_[p.var()] = false;
    --open;
  } while (open > 0);
  learned[0] = -p;

  back_level = 0;
  std::size_t max_i = 1;
  for (std::size_t i = 1; i < learned.size(); ++i)
    if (levels_[learned[i].var()] > back_level) {
      back_level = levels_[learned[i].var()];
      max_i = i;
    }
  if (learned.size() > 1) std::swap(learned[1], learned[max_i]);
  for (std::size_t i = 1; i < learned.size(); ++i) seen_[learned[i].var()] = false;
}

void SatSolver::backtrack(std::uint32_t target) {
  if (level() <= target) return;
  for (std::size_t i = trail_.size(); i > trail_lim_[target]; --i) {
    Var v = trail_[i - 1].var();
    phase_[v] = assigns_[v];
    assigns_[v] = 0;
    reasons_[v] = kNone;
    if (heap_index_[v] < 0) heap_push(v);
  }
  trail_.resize(trail_lim_[target]);
  trail_lim_.resize(target);
  qhead_ = trail_.size();
}

void SatSolver::heap_push(Var v) {
  heap_index_[v] = static_cast<std::int32_t>(heap_.size());
  heap_.push_back(v);
  // sift up
  std::size_t i = heap_.size() - 1;
  while (i > 0) {
    std::size_t parent = (i - 1) / 2;
    if (activity_[heap_[parent]] >= activity_[heap_[i]]) break;
    std::swap(heap_[parent], heap_[i]);
    heap_index_[heap_[parent]] = static_cast<std::int32_t>(parent);
    heap_index_[heap_[i]] = static_cast<std::int32_t>(i);
    i = parent;
  }
}

Var SatSolver::pick_branch() {
  while (!heap_.empty()) {
    Var top = heap_[0];
    Var last = heap_.back();
    heap_.pop_back();
    heap_index_[top] = -1;
    if (!heap_.empty()) {
      heap_[0] = last;
      heap_index_[last] = 0;
      std::size_t i = 0;
      for (;;) {
        std::size_t l = 2 * i + 1, r = l + 1, best = i;
        if (l < heap_.size() && activity_[heap_[l]] > activity_[heap_[best]]) best = l;
        if (r < heap_.size() && activity_[heap_[r]] > activity_[heap_[best]]) best = r;
        if (best == i) break;
        std::swap(heap_[i], heap_[best]);
        heap_index_[heap_[i]] = static_cast<std::int32_t>(i);
        heap_index_[heap_[best]] = static_cast<std::int32_t>(best);
        i = best;
      }
    }
    if (assigns_[top] == 0) return top;
  }
  return 0;
}

void SatSolver::bump(Var v) {
  activity_[v] += var_inc_;
  if (activity_[v] > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  // Restore heap order upwards.
  if (heap_index_[v] >= 0) {
    auto i = static_cast<std::size_t>(heap_index_[v]);
    while (i > 0) {
      std::size_t parent = (i - 1) / 2;
      if (activity_[heap_[parent]] >= activity_[heap_[i]]) break;
      std::swap(heap_[parent], heap_[i]);
      heap_index_[heap_[parent]] = static_cast<std::int32_t>(parent);
      heap_index_[heap_[i]] = static_cast<std::int32_t>(i);
      i = parent;
    }
  }
}

std::size_t SatSolver::memory_estimate() const {
  return literal_count_ * sizeof(Literal) + clauses_.size() * sizeof(ClauseData) +
         assigns_.size() * 48;
}

SatSolver::Result SatSolver::solve(const Limits& limits) {
  unknown_reason_ = UnknownReason::None;
  if (root_conflict_) return Result::Unsat;
  Deadline deadline(limits.time_seconds);
  backtrack(0);
  qhead_ = 0;
  std::vector<Literal> learned;
  std::uint64_t restarts = 0;
  std::uint64_t budget = static_cast<std::uint64_t>(luby(2, restarts) * 100);
  std::uint64_t since_restart = 0;
  std::uint64_t ticks = 0;

  for (;;) {
    std::int32_t conflict = propagate();
    if (conflict != kNone) {
      ++conflicts_;
      ++since_restart;
      if (level() == 0) {
        root_conflict_ = true;
        return Result::Unsat;
      }
      std::uint32_t back = 0;
      analyze(conflict, learned, back);
      backtrack(back);
      if (learned.size() == 1) {
        assign(learned[0], kNone);
      } else {
        literal_count_ += learned.size();
        clauses_.push_back({learned, true});
        auto cid = static_cast<std::uint32_t>(clauses_.size() - 1);
        attach(cid);
        assign(learned[0], static_cast<std::int32_t>(cid));
      }
      var_inc_ /= 0.95;
      continue;
    }
    if ((++ticks & 255) == 0) {
      if (deadline.expired()) {
        unknown_reason_ = UnknownReason::Timeout;
        backtrack(0);
        return Result::Unknown;
      }
      if (memory_estimate() > limits.memory_bytes) {
        unknown_reason_ = UnknownReason::Memout;
        backtrack(0);
        return Result::Unknown;
      }
    }
    if (since_restart >= budget) {
      since_restart = 0;
      budget = static_cast<std::uint64_t>(luby(2, ++restarts) * 100);
      backtrack(0);
    }
    Var v = pick_branch();
    if (v == 0) {
      model_ = assigns_;
      backtrack(0);
      return Result::Sat;
    }
    trail_lim_.push_back(trail_.size());
    assign(Literal::of(v, phase_[v] > 0), kNone);
  }
}

}  // namespace qgal
