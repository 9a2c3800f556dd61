#include "qgal/solver/qdpll.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "qgal/prefix_index.hpp"
#include "qgal/util/timer.hpp"

namespace qgal {
namespace {

constexpr std::int32_t kNoReason = -1;

inline std::size_t code(Literal l) { return 2 * static_cast<std::size_t>(l.var()) + (l.is_negative() ? 1 : 0); }

struct Constraint {
  std::vector<Literal> lits;
  StepId step = 0;
  bool cube = false;
  bool learned = false;
};

struct Analysis {
  bool empty = false;  // derived the empty clause / cube
  StepId step = 0;
};

class Timeout : public std::exception {};
class Memout : public std::exception {};

}  // namespace

struct QdpllSolver::Impl {
  SearchOptions opt;
  TraceSink* trace;
  PrefixIndex index;
  Var nvars = 0;

  std::vector<Constraint> cons;
  std::vector<std::uint32_t> originals;
  std::vector<std::vector<std::uint32_t>> clause_watch;  // by literal code, watched when false
  std::vector<std::vector<std::uint32_t>> cube_watch;    // by literal code, watched when true
  std::vector<std::vector<std::uint32_t>> occurrences;   // original clauses by literal code
  std::vector<std::uint32_t> units;                      // constraints of size one

  std::vector<std::int8_t> val;  // +1 true, -1 false, 0 open
  std::vector<std::uint32_t> lvl;
  std::vector<std::int32_t> reason;
  std::vector<std::uint32_t> trail_pos;
  std::vector<Literal> trail;
  std::vector<std::size_t> trail_lim;
  std::size_t qhead = 0;
  std::size_t sat_cursor = 0;
  bool units_loaded = false;

  // Occurring variables per decision level of the prefix; index 0 holds
  // unbound variables.
  std::vector<std::vector<Var>> level_vars;
  std::vector<double> activity;
  double var_inc = 1.0;
  std::vector<std::int8_t> phase;

  StepId next_id = 1;
  bool unsat_at_load = false;
  StepId load_root = 0;

  SearchStats stats;
  Deadline deadline;
  std::size_t memory_budget = SIZE_MAX;
  std::uint64_t until_check = 0;
  std::uint64_t restart_limit = 0;
  std::uint64_t learned_since_restart = 0;
  std::size_t lits_stored = 0;

  Impl(const Pcnf& f, SearchOptions o, TraceSink* t) : opt(o), trace(t), index(f) {
    nvars = f.effective_max_var();
    const std::size_t n = nvars + 1;
    clause_watch.resize(2 * n);
    cube_watch.resize(2 * n);
    occurrences.resize(2 * n);
    val.assign(n, 0);
    lvl.assign(n, 0);
    reason.assign(n, kNoReason);
    trail_pos.assign(n, 0);
    activity.assign(n, 0.0);
    phase.assign(n, -1);
    if (opt.seed != 0) {
      std::mt19937_64 rng(opt.seed);
      std::uniform_real_distribution<double> jitter(0.0, 1e-3);
      for (auto& a : activity) a = jitter(rng);
    }
    restart_limit = opt.restart_first;
    load(f);
  }

  // ---- trace ----

  StepId emit(StepKind kind, std::vector<StepId> ants, Var pivot, const std::vector<Literal>& lits,
              std::size_t input_index = 0) {
    StepId id = next_id++;
    ++stats.trace_steps;
    if (trace) {
      TraceStep s;
      s.id = id;
      s.kind = kind;
      s.antecedents = std::move(ants);
      s.pivot = pivot;
      s.input_index = input_index;
      s.literals = lits;
      trace->add(s);
    }
    return id;
  }

  // ---- loading ----

  void load(const Pcnf& f) {
    if (trace) trace->begin(nvars, f.matrix.size());
    for (std::size_t i = 0; i < f.matrix.size(); ++i)
      emit(StepKind::InputClause, {}, 0, f.matrix[i], i);

    std::vector<bool> occurs(nvars + 1, false);
    for (std::size_t i = 0; i < f.matrix.size(); ++i) {
      Clause c = f.matrix[i];
      std::sort(c.begin(), c.end());
      c.erase(std::unique(c.begin(), c.end()), c.end());
      if (is_tautology(c)) continue;
      StepId step = i + 1;
      Clause r = universal_reduce(c, index);
      if (r.size() != c.size()) step = emit(StepKind::UniversalReduction, {step}, 0, r);
      if (r.empty()) {
        unsat_at_load = true;
        load_root = step;
        return;
      }
      for (Literal l : r) occurs[l.var()] = true;
      auto id = add_constraint(std::move(r), step, false, false);
      originals.push_back(id);
      for (Literal l : cons[id].lits) occurrences[code(l)].push_back(id);
    }

    level_vars.resize(index.num_levels() + 1);
    for (Var v = 1; v <= nvars; ++v)
      if (occurs[v]) level_vars[index.level(v)].push_back(v);
  }

  std::uint32_t add_constraint(std::vector<Literal> lits, StepId step, bool cube, bool learned) {
    auto id = static_cast<std::uint32_t>(cons.size());
    lits_stored += lits.size();
    cons.push_back(Constraint{std::move(lits), step, cube, learned});
    const auto& c = cons.back();
    if (c.lits.size() == 1) {
      units.push_back(id);
    } else if (c.lits.size() >= 2) {
      auto& w = cube ? cube_watch : clause_watch;
      w[code(c.lits[0])].push_back(id);
      w[code(c.lits[1])].push_back(id);
    }
    return id;
  }

  // ---- assignment ----

  int value(Literal l) const {
    int v = val[l.var()];
    return l.is_positive() ? v : -v;
  }

  std::uint32_t level() const { return static_cast<std::uint32_t>(trail_lim.size()); }

  void assign(Literal l, std::int32_t why) {
    Var v = l.var();
    val[v] = l.is_positive() ? 1 : -1;
    lvl[v] = level();
    reason[v] = why;
    trail_pos[v] = static_cast<std::uint32_t>(trail.size());
    trail.push_back(l);
  }

  void backtrack(std::uint32_t target) {
    if (level() <= target) return;
    for (std::size_t i = trail.size(); i > trail_lim[target]; --i) {
      Var v = trail[i - 1].var();
      phase[v] = val[v];
      val[v] = 0;
      reason[v] = kNoReason;
    }
    trail.resize(trail_lim[target]);
    trail_lim.resize(target);
    qhead = std::min(qhead, trail.size());
    sat_cursor = 0;
  }

  void new_level() { trail_lim.push_back(trail.size()); }

  void check_limits() {
    if (deadline.expired()) throw Timeout();
    std::size_t mem = lits_stored * sizeof(Literal) + cons.size() * sizeof(Constraint) +
                      (clause_watch.size() + cube_watch.size()) * 24 + trail.capacity() * 4 +
                      val.size() * 32;
    stats.peak_memory = std::max(stats.peak_memory, mem);
    if (mem > memory_budget) throw Memout();
  }

  // ---- propagation ----

  struct Event {
    PropagationState state = PropagationState::Open;
    std::int32_t constraint = kNoReason;  // kNoReason for a matrix solution
  };

  // Units are not watched; they are (re)asserted whenever propagation
  // starts at decision level 0.
  Event assert_units() {
    if (level() != 0) return {};
    for (auto id : units) {
      Literal l = cons[id].lits[0];
      bool cube = cons[id].cube;
      Literal implied = cube ? -l : l;
      int v = value(implied);
      if (v > 0) continue;
      if (v < 0) return {cube ? PropagationState::Solution : PropagationState::Conflict,
                         static_cast<std::int32_t>(id)};
      // A unit clause holds an existential, a unit cube a universal.
      bool implies = cube ? index.is_universal(l.var()) : index.is_existential(l.var());
      if (!implies) return {cube ? PropagationState::Solution : PropagationState::Conflict,
                            static_cast<std::int32_t>(id)};
      assign(implied, static_cast<std::int32_t>(id));
    }
    return {};
  }

  Event bcp() {
    while (qhead < trail.size()) {
      Literal p = trail[qhead++];
      ++stats.propagations;
      if (++until_check >= opt.check_interval) {
        until_check = 0;
        check_limits();
      }
      if (auto e = visit_clauses(p); e.state != PropagationState::Open) return e;
      if (auto e = visit_cubes(p); e.state != PropagationState::Open) return e;
    }
    return {};
  }

  Event visit_clauses(Literal p) {
    auto& ws = clause_watch[code(-p)];
    std::size_t i = 0, j = 0;
    Event event;
    while (i < ws.size()) {
      auto cid = ws[i++];
      auto& lits = cons[cid].lits;
      if (lits[0] == -p) std::swap(lits[0], lits[1]);
      if (value(lits[0]) > 0) {
        ws[j++] = cid;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < lits.size(); ++k) {
        if (value(lits[k]) >= 0) {
          std::swap(lits[1], lits[k]);
          clause_watch[code(lits[1])].push_back(cid);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = cid;
      if (value(lits[0]) == 0 && index.is_existential(lits[0].var())) {
        assign(lits[0], static_cast<std::int32_t>(cid));
        continue;
      }
      event = {PropagationState::Conflict, static_cast<std::int32_t>(cid)};
      break;
    }
    while (i < ws.size()) ws[j++] = ws[i++];
    ws.resize(j);
    return event;
  }

  Event visit_cubes(Literal p) {
    auto& ws = cube_watch[code(p)];
    std::size_t i = 0, j = 0;
    Event event;
    while (i < ws.size()) {
      auto kid = ws[i++];
      auto& lits = cons[kid].lits;
      if (lits[0] == p) std::swap(lits[0], lits[1]);
      if (value(lits[0]) < 0) {
        ws[j++] = kid;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < lits.size(); ++k) {
        if (value(lits[k]) <= 0) {
          std::swap(lits[1], lits[k]);
          cube_watch[code(lits[1])].push_back(kid);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = kid;
      if (value(lits[0]) == 0 && index.is_universal(lits[0].var())) {
        assign(-lits[0], static_cast<std::int32_t>(kid));
        continue;
      }
      event = {PropagationState::Solution, static_cast<std::int32_t>(kid)};
      break;
    }
    while (i < ws.size()) ws[j++] = ws[i++];
    ws.resize(j);
    return event;
  }

  bool satisfied(const Constraint& c) const {
    for (Literal l : c.lits)
      if (value(l) > 0) return true;
    return false;
  }

  bool all_originals_satisfied() {
    while (sat_cursor < originals.size()) {
      if (!satisfied(cons[originals[sat_cursor]])) return false;
      ++sat_cursor;
    }
    return true;
  }

  /// Leftmost level with an open occurring variable, or -1.
  int eligible_level() const {
    for (std::size_t l = 0; l < level_vars.size(); ++l)
      for (Var v : level_vars[l])
        if (val[v] == 0) return static_cast<int>(l);
    return -1;
  }

  // Pure literal among the eligible variables, judged on the clauses not yet
  // satisfied. Returns the literal to assign.
  std::optional<Literal> find_pure(int lev) const {
    for (Var v : level_vars[lev]) {
      if (val[v] != 0) continue;
      auto active = [&](Literal l) {
        for (auto cid : occurrences[code(l)])
          if (!satisfied(cons[cid])) return true;
        return false;
      };
      bool pos = active(Literal::positive(v));
      bool neg = active(Literal::negative(v));
      if (pos && neg) continue;
      bool exist = index.is_existential(v);
      if (!pos && !neg) return Literal::of(v, phase[v] > 0);
      // Existentials satisfy their occurrences, universals falsify them.
      bool positive = exist ? pos : neg;
      return Literal::of(v, positive);
    }
    return std::nullopt;
  }

  Event propagate() {
    if (!units_loaded || level() == 0) {
      units_loaded = true;
      if (auto e = assert_units(); e.state != PropagationState::Open) return e;
    }
    for (;;) {
      if (auto e = bcp(); e.state != PropagationState::Open) return e;
      if (all_originals_satisfied()) return {PropagationState::Solution, kNoReason};
      if (!opt.pure_literals) return {};
      int lev = eligible_level();
      if (lev < 0) return {};
      auto pure = find_pure(lev);
      if (!pure) return {};
      ++stats.decisions;
      new_level();
      assign(*pure, kNoReason);
    }
  }

  bool decide() {
    int lev = eligible_level();
    if (lev < 0) return false;
    Var best = 0;
    for (Var v : level_vars[lev])
      if (val[v] == 0 && (best == 0 || activity[v] > activity[best])) best = v;
    ++stats.decisions;
    new_level();
    assign(Literal::of(best, phase[best] > 0), kNoReason);
    return true;
  }

  void bump(const std::vector<Literal>& lits) {
    for (Literal l : lits) {
      activity[l.var()] += var_inc;
      if (activity[l.var()] > 1e100) {
        for (auto& a : activity) a *= 1e-100;
        var_inc *= 1e-100;
      }
    }
    var_inc /= opt.activity_decay;
  }

  // ---- analysis ----

  static std::vector<Literal> resolve(const std::vector<Literal>& a, const std::vector<Literal>& b,
                                      Var pivot) {
    std::vector<Literal> out;
    out.reserve(a.size() + b.size());
    for (Literal l : a)
      if (l.var() != pivot) out.push_back(l);
    for (Literal l : b)
      if (l.var() != pivot && std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
    return out;
  }

  // Shared clause/cube analysis. For clauses the "own" quantifier is
  // existential (the literals that drive propagation) and the "other" is
  // universal; cubes swap the roles.
  Analysis analyze(std::vector<Literal> w, StepId sid, bool cube) {
    auto own = [&](Var v) { return cube ? index.is_universal(v) : index.is_existential(v); };
    const StepKind reduce_kind = cube ? StepKind::ExistentialReduction : StepKind::UniversalReduction;
    const StepKind resolve_kind = cube ? StepKind::CubeResolution : StepKind::Resolution;

    for (;;) {
      auto reduced = cube ? existential_reduce(w, index) : universal_reduce(w, index);
      if (reduced.size() != w.size()) {
        sid = emit(reduce_kind, {sid}, 0, reduced);
        w = std::move(reduced);
      }

      Literal a;
      bool has_own = false;
      for (Literal l : w)
        if (own(l.var()) && (!has_own || trail_pos[l.var()] > trail_pos[a.var()])) {
          a = l;
          has_own = true;
        }
      if (!has_own) return {true, sid};

      std::uint32_t lp = lvl[a.var()];
      Var pivot = 0;
      if (lp == 0) {
        pivot = a.var();
      } else {
        int own_at_lp = 0;
        for (Literal l : w)
          if (own(l.var()) && lvl[l.var()] == lp) ++own_at_lp;
        if (own_at_lp > 1) {
          pivot = a.var();
        } else {
          // Other-quantifier literals that are open or assigned at lp would
          // stay in the learned constraint without being reducible.
          Var blocker = 0;
          for (Literal l : w) {
            Var v = l.var();
            if (own(v) || (val[v] != 0 && lvl[v] < lp)) continue;
            if (blocker == 0 || index.level(v) < index.level(blocker)) blocker = v;
          }
          if (blocker == 0) {
            learn(std::move(w), a, sid, cube);
            return {false, sid};
          }
          for (Literal l : w) {
            Var v = l.var();
            if (own(v) && index.level(v) > index.level(blocker) &&
                (pivot == 0 || trail_pos[v] > trail_pos[pivot]))
              pivot = v;
          }
          if (pivot == 0) throw std::logic_error("analysis: blocking literal is reducible");
        }
      }

      std::int32_t rid = reason[pivot];
      if (rid == kNoReason || cons[rid].cube != cube)
        throw std::logic_error("analysis: pivot " + std::to_string(pivot) + " has no reason");
      w = resolve(w, cons[rid].lits, pivot);
      sid = emit(resolve_kind, {sid, cons[rid].step}, pivot, w);
    }
  }

  void learn(std::vector<Literal> w, Literal a, StepId sid, bool cube) {
    bump(w);
    auto it = std::find(w.begin(), w.end(), a);
    std::iter_swap(w.begin(), it);
    // Second watch: the other literal assigned at the highest level.
    std::uint32_t jump = 0;
    for (std::size_t i = 1; i < w.size(); ++i) {
      if (i == 1 || lvl[w[i].var()] > jump) {
        std::swap(w[1], w[i]);
        jump = lvl[w[1].var()];
      }
    }
    auto id = add_constraint(std::move(w), sid, cube, true);
    if (cube)
      ++stats.learned_cubes;
    else
      ++stats.learned_clauses;
    ++learned_since_restart;
    backtrack(jump);
    Literal head = cons[id].lits[0];
    assign(cube ? -head : head, static_cast<std::int32_t>(id));
  }

  std::vector<Literal> initial_cube() {
    std::vector<Literal> cube;
    std::vector<bool> in_cube(2 * (nvars + 1), false);
    for (auto cid : originals) {
      const auto& lits = cons[cid].lits;
      bool covered = false;
      for (Literal l : lits)
        if (in_cube[code(l)]) covered = true;
      if (covered) continue;
      // Prefer an innermost existential (likely reduced away), then an
      // outermost universal.
      Literal pick;
      bool found = false;
      for (Literal l : lits) {
        if (value(l) <= 0) continue;
        Var v = l.var();
        if (!found) {
          pick = l;
          found = true;
          continue;
        }
        Var p = pick.var();
        bool ev = index.is_existential(v), ep = index.is_existential(p);
        if (ev != ep) {
          if (ev) pick = l;
        } else if (ev ? index.level(v) > index.level(p) : index.level(v) < index.level(p)) {
          pick = l;
        }
      }
      if (!found) throw std::logic_error("initial cube: clause not satisfied");
      in_cube[code(pick)] = true;
      cube.push_back(pick);
    }
    return cube;
  }

  void maybe_restart() {
    if (!opt.restarts || learned_since_restart < restart_limit) return;
    learned_since_restart = 0;
    restart_limit = static_cast<std::uint64_t>(static_cast<double>(restart_limit) * opt.restart_factor);
    ++stats.restarts;
    backtrack(0);
  }

  SolveOutcome solve(const Limits& limits) {
    deadline = Deadline(limits.time_seconds);
    memory_budget = limits.memory_bytes;
    if (unsat_at_load) {
      if (trace) trace->finish(ProofKind::Refutation, load_root);
      return SolveOutcome::unsat(deadline.elapsed());
    }
    try {
      for (;;) {
        Event e = propagate();
        if (e.state == PropagationState::Conflict) {
          ++stats.conflicts;
          const auto& c = cons[e.constraint];
          auto r = analyze(c.lits, c.step, false);
          if (r.empty) {
            if (trace) trace->finish(ProofKind::Refutation, r.step);
            return SolveOutcome::unsat(deadline.elapsed());
          }
          maybe_restart();
        } else if (e.state == PropagationState::Solution) {
          ++stats.solutions;
          std::vector<Literal> w;
          StepId sid;
          if (e.constraint == kNoReason) {
            w = initial_cube();
            sid = emit(StepKind::InputCube, {}, 0, w);
          } else {
            w = cons[e.constraint].lits;
            sid = cons[e.constraint].step;
          }
          auto r = analyze(std::move(w), sid, true);
          if (r.empty) {
            if (trace) trace->finish(ProofKind::Satisfaction, r.step);
            return SolveOutcome::sat(deadline.elapsed());
          }
          maybe_restart();
        } else if (!decide()) {
          throw std::logic_error("search: complete assignment without result");
        }
        check_limits_cheap();
      }
    } catch (const Timeout&) {
      return SolveOutcome::unknown(deadline.elapsed(), UnknownReason::Timeout);
    } catch (const Memout&) {
      return SolveOutcome::unknown(deadline.elapsed(), UnknownReason::Memout);
    }
  }

  void check_limits_cheap() {
    if (((stats.conflicts + stats.solutions + stats.decisions) & 63) == 0) check_limits();
  }
};

QdpllSolver::QdpllSolver(const Pcnf& f, SearchOptions options, TraceSink* trace)
    : impl_(std::make_unique<Impl>(f, options, trace)) {}

QdpllSolver::~QdpllSolver() = default;

SolveOutcome QdpllSolver::solve(const Limits& limits) { return impl_->solve(limits); }

PropagationResult QdpllSolver::propagate() {
  PropagationResult r;
  if (impl_->unsat_at_load) {
    r.state = PropagationState::Conflict;
    return r;
  }
  auto e = impl_->propagate();
  r.state = e.state;
  if (e.constraint != kNoReason) r.constraint = impl_->cons[e.constraint].lits;
  return r;
}

std::optional<bool> QdpllSolver::value(Var v) const {
  if (v == 0 || v >= impl_->val.size() || impl_->val[v] == 0) return std::nullopt;
  return impl_->val[v] > 0;
}

std::uint32_t QdpllSolver::decision_level() const { return impl_->level(); }

const SearchStats& QdpllSolver::stats() const { return impl_->stats; }

std::vector<Clause> QdpllSolver::learned_clauses() const {
  std::vector<Clause> out;
  for (const auto& c : impl_->cons)
    if (c.learned && !c.cube) out.push_back(c.lits);
  return out;
}

std::vector<Cube> QdpllSolver::learned_cubes() const {
  std::vector<Cube> out;
  for (const auto& c : impl_->cons)
    if (c.learned && c.cube) out.push_back(c.lits);
  return out;
}

SolveOutcome solve_search(const Pcnf& f, const Limits& limits, TraceSink* trace,
                          const SearchOptions& options) {
  QdpllSolver solver(f, options, trace);
  return solver.solve(limits);
}

}  // namespace qgal
