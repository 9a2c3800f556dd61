#include "qgal/cert/checker.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "qgal/prefix_index.hpp"

namespace qgal {

std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::None: return "none";
    case RejectReason::MalformedReference: return "malformed-reference";
    case RejectReason::MalformedStep: return "malformed-step";
    case RejectReason::InputMismatch: return "input-mismatch";
    case RejectReason::InputCubeInconsistent: return "input-cube-inconsistent";
    case RejectReason::InputCubeNotImplicant: return "input-cube-not-implicant";
    case RejectReason::PivotViolation: return "pivot-violation";
    case RejectReason::PivotNotClashing: return "pivot-not-clashing";
    case RejectReason::TautologicalResolvent: return "tautological-resolvent";
    case RejectReason::LongDistance: return "long-distance-step";
    case RejectReason::ResolventMismatch: return "resolvent-mismatch";
    case RejectReason::ReductionViolation: return "reduction-violation";
    case RejectReason::ReductionNotSubset: return "reduction-not-subset";
    case RejectReason::RootMissing: return "root-missing";
    case RejectReason::RootNotEmpty: return "root-not-empty";
    case RejectReason::RootWrongFamily: return "root-wrong-family";
    case RejectReason::RetainedCapExceeded: return "retained-cap-exceeded";
  }
  return "?";
}

namespace {

using LitSet = std::vector<Literal>;

LitSet as_set(const std::vector<Literal>& lits) {
  LitSet s(lits);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

// Sorted by (var, polarity), so complementary literals are neighbours.
bool consistent(const LitSet& s) {
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i].var() == s[i - 1].var()) return false;
  return true;
}

bool contains(const LitSet& s, Literal l) { return std::binary_search(s.begin(), s.end(), l); }

struct Verdict {
  RejectReason reason = RejectReason::None;
  std::string message;
  bool ok() const { return reason == RejectReason::None; }
};

Verdict fail(RejectReason r, std::string msg) { return {r, std::move(msg)}; }

std::size_t expected_antecedents(StepKind k) {
  switch (k) {
    case StepKind::InputClause:
    case StepKind::InputCube: return 0;
    case StepKind::UniversalReduction:
    case StepKind::ExistentialReduction: return 1;
    case StepKind::Resolution:
    case StepKind::CubeResolution: return 2;
  }
  return 0;
}

class StepChecker {
 public:
  StepChecker(const Pcnf& f, std::size_t num_inputs) : f_(f), index_(f), num_inputs_(num_inputs) {
    for (const auto& c : f.matrix) clauses_.push_back(as_set(c));
  }

  Verdict check(const TraceStep& s, const TraceStep* a, const TraceStep* b) const {
    switch (s.kind) {
      case StepKind::InputClause: return input_clause(s);
      case StepKind::InputCube: return input_cube(s);
      case StepKind::UniversalReduction: return reduction(s, *a, false);
      case StepKind::ExistentialReduction: return reduction(s, *a, true);
      case StepKind::Resolution: return resolution(s, *a, *b, false);
      case StepKind::CubeResolution: return resolution(s, *a, *b, true);
    }
    return fail(RejectReason::MalformedStep, "unknown step kind");
  }

 private:
  // Literals a clause (cube) may drop: universal (existential) ones
  // quantified right of every existential (universal) literal in `lits`.
  bool reducible(Literal l, const LitSet& lits, bool cube) const {
    Var v = l.var();
    if (cube ? !index_.is_existential(v) : !index_.is_universal(v)) return false;
    auto bound = cube ? index_.max_universal_level(lits) : index_.max_existential_level(lits);
    return index_.level(v) > bound;
  }

  Verdict input_clause(const TraceStep& s) const {
    if (s.id == 0 || s.id > num_inputs_)
      return fail(RejectReason::MalformedStep, "input clause id outside the input range");
    auto idx = static_cast<std::size_t>(s.id - 1);
    if (idx >= clauses_.size()) return fail(RejectReason::InputMismatch, "no matrix clause for input id");
    if (as_set(s.literals) != clauses_[idx])
      return fail(RejectReason::InputMismatch, "literals differ from matrix clause " + std::to_string(idx + 1));
    return {};
  }

  Verdict input_cube(const TraceStep& s) const {
    if (s.id <= num_inputs_) return fail(RejectReason::MalformedStep, "input cube id inside the clause range");
    LitSet cube = as_set(s.literals);
    if (!consistent(cube)) return fail(RejectReason::InputCubeInconsistent, "cube assigns a variable twice");
    for (std::size_t i = 0; i < clauses_.size(); ++i) {
      if (!consistent(clauses_[i])) continue;  // tautologies hold under any cube
      bool hit = std::any_of(clauses_[i].begin(), clauses_[i].end(),
                             [&](Literal l) { return contains(cube, l); });
      if (!hit)
        return fail(RejectReason::InputCubeNotImplicant,
                    "cube does not satisfy clause " + std::to_string(i + 1));
    }
    return {};
  }

  Verdict reduction(const TraceStep& s, const TraceStep& a, bool cube) const {
    if (is_cube_step(a.kind) != cube)
      return fail(RejectReason::MalformedStep, "antecedent from the other family");
    LitSet from = as_set(a.literals);
    LitSet to = as_set(s.literals);
    if (!std::includes(from.begin(), from.end(), to.begin(), to.end()))
      return fail(RejectReason::ReductionNotSubset, "result is not a subset of the antecedent");
    for (Literal l : from)
      if (!contains(to, l) && !reducible(l, from, cube))
        return fail(RejectReason::ReductionViolation,
                    "literal " + std::to_string(l.dimacs()) + " cannot be reduced");
    return {};
  }

  Verdict resolution(const TraceStep& s, const TraceStep& a, const TraceStep& b, bool cube) const {
    if (is_cube_step(a.kind) != cube || is_cube_step(b.kind) != cube)
      return fail(RejectReason::MalformedStep, "antecedent from the other family");
    LitSet la = as_set(a.literals), lb = as_set(b.literals);
    std::vector<Var> clash;
    for (Literal l : la)
      if (contains(lb, -l) && (clash.empty() || clash.back() != l.var())) clash.push_back(l.var());
    auto own = [&](Var v) { return cube ? index_.is_universal(v) : index_.is_existential(v); };

    Var pivot = s.pivot;
    if (pivot != 0) {
      if (std::find(clash.begin(), clash.end(), pivot) == clash.end())
        return fail(RejectReason::PivotNotClashing,
                    "pivot " + std::to_string(pivot) + " does not occur with opposite signs");
    } else {
      if (clash.empty()) return fail(RejectReason::PivotNotClashing, "antecedents do not clash");
      auto it = std::find_if(clash.begin(), clash.end(), own);
      pivot = it != clash.end() ? *it : clash.front();
    }
    if (!own(pivot))
      return fail(RejectReason::PivotViolation,
                  "pivot " + std::to_string(pivot) + (cube ? " is existential" : " is universal"));

    if (clash.size() > 1) {
      bool merged = std::all_of(clash.begin(), clash.end(), [&](Var v) {
        return v == pivot || (!own(v) && index_.level(v) > index_.level(pivot));
      });
      return fail(merged ? RejectReason::LongDistance : RejectReason::TautologicalResolvent,
                  "antecedents clash on " + std::to_string(clash.size()) + " variables");
    }

    LitSet raw;
    for (Literal l : la)
      if (l.var() != pivot) raw.push_back(l);
    for (Literal l : lb)
      if (l.var() != pivot) raw.push_back(l);
    raw = as_set(raw);

    LitSet result = as_set(s.literals);
    if (!consistent(result))
      return fail(RejectReason::TautologicalResolvent, "recorded resolvent is tautological");
    if (!std::includes(raw.begin(), raw.end(), result.begin(), result.end()))
      return fail(RejectReason::ResolventMismatch, "recorded literals not in the resolvent");
    for (Literal l : raw)
      if (!contains(result, l) && !reducible(l, raw, cube))
        return fail(RejectReason::ResolventMismatch,
                    "resolvent literal " + std::to_string(l.dimacs()) + " missing");
    return {};
  }

  const Pcnf& f_;
  PrefixIndex index_;
  std::size_t num_inputs_;
  std::vector<LitSet> clauses_;
};

void reject(CheckReport& r, StepId step, RejectReason reason, std::string message) {
  r.accepted = false;
  r.failing_step = step;
  r.reason = reason;
  r.message = std::move(message);
}

Verdict structural(const TraceStep& s) {
  if (s.antecedents.size() != expected_antecedents(s.kind))
    return fail(RejectReason::MalformedStep, std::string(to_string(s.kind)) + " with " +
                                                 std::to_string(s.antecedents.size()) + " antecedents");
  return {};
}

void check_root(CheckReport& r, const TraceStep* root, StepId root_id, ProofKind kind) {
  if (!root) {
    reject(r, root_id, RejectReason::RootMissing, "root step not found");
    return;
  }
  if (!root->literals.empty()) {
    reject(r, root_id, RejectReason::RootNotEmpty, "root step is not empty");
    return;
  }
  if (is_cube_step(root->kind) != (kind == ProofKind::Satisfaction)) {
    reject(r, root_id, RejectReason::RootWrongFamily, "root family does not match the proof kind");
    return;
  }
  r.accepted = true;
}

CheckReport check_in_memory(const Proof& p, const Pcnf& f, ProofKind expected) {
  CheckReport r;
  if (p.kind != expected) {
    reject(r, p.root, RejectReason::RootWrongFamily, "proof kind does not match the check");
    return r;
  }
  if (p.num_inputs != f.matrix.size()) {
    reject(r, 0, RejectReason::InputMismatch, "input count differs from the matrix");
    return r;
  }
  StepChecker checker(f, p.num_inputs);
  std::unordered_map<StepId, const TraceStep*> seen;
  seen.reserve(p.steps.size());
  for (const auto& s : p.steps) {
    ++r.step_count;
    r.max_width = std::max(r.max_width, s.literals.size());
    if (s.kind == StepKind::Resolution || s.kind == StepKind::CubeResolution) ++r.resolution_steps;
    if (seen.count(s.id)) {
      reject(r, s.id, RejectReason::MalformedReference, "duplicate step id");
      return r;
    }
    if (auto v = structural(s); !v.ok()) {
      reject(r, s.id, v.reason, v.message);
      return r;
    }
    const TraceStep* ants[2] = {nullptr, nullptr};
    for (std::size_t i = 0; i < s.antecedents.size(); ++i) {
      auto it = seen.find(s.antecedents[i]);
      if (it == seen.end()) {
        reject(r, s.id, RejectReason::MalformedReference,
               "antecedent " + std::to_string(s.antecedents[i]) + " is not an earlier step");
        return r;
      }
      ants[i] = it->second;
    }
    if (auto v = checker.check(s, ants[0], ants[1]); !v.ok()) {
      reject(r, s.id, v.reason, v.message);
      return r;
    }
    seen.emplace(s.id, &s);
  }
  auto it = seen.find(p.root);
  check_root(r, it == seen.end() ? nullptr : it->second, p.root, p.kind);
  return r;
}

}  // namespace

CheckReport check_refutation(const Proof& p, const Pcnf& f) {
  return check_in_memory(p, f, ProofKind::Refutation);
}

CheckReport check_satisfaction(const Proof& p, const Pcnf& f) {
  return check_in_memory(p, f, ProofKind::Satisfaction);
}

CheckReport check_proof(const Proof& p, const Pcnf& f) { return check_in_memory(p, f, p.kind); }

CheckReport check_proof_file(const std::filesystem::path& trace, const Pcnf& f,
                             const StreamCheckOptions& options) {
  CheckReport r;

  // Pass 1: reference counts and step families.
  std::unordered_map<StepId, std::uint32_t> refs;
  std::unordered_map<StepId, TraceStep> stubs;
  TraceHeader header;
  TraceFooter footer;
  {
    std::ifstream in(trace);
    if (!in) throw std::runtime_error("cannot open trace " + trace.string());
    TraceReader reader(in);
    header = reader.header();
    auto lookup = [&](StepId id) -> const TraceStep* {
      auto it = stubs.find(id);
      return it == stubs.end() ? nullptr : &it->second;
    };
    while (auto s = reader.next(lookup)) {
      for (StepId a : s->antecedents) ++refs[a];
      TraceStep stub;
      stub.id = s->id;
      stub.kind = s->kind;
      stubs.emplace(s->id, std::move(stub));
    }
    if (!reader.footer()) {
      reject(r, 0, RejectReason::RootMissing, "trace has no result line");
      return r;
    }
    footer = *reader.footer();
  }
  stubs.clear();

  if (header.num_inputs != f.matrix.size()) {
    reject(r, 0, RejectReason::InputMismatch, "input count differs from the matrix");
    return r;
  }

  // Pass 2: check, retaining steps only while later steps refer to them.
  StepChecker checker(f, header.num_inputs);
  std::unordered_map<StepId, TraceStep> retained;
  std::unordered_set<StepId> seen;
  std::ifstream in(trace);
  TraceReader reader(in);
  reader.header();
  auto lookup = [&](StepId id) -> const TraceStep* {
    auto it = retained.find(id);
    return it == retained.end() ? nullptr : &it->second;
  };
  while (auto s = reader.next(lookup)) {
    ++r.step_count;
    r.max_width = std::max(r.max_width, s->literals.size());
    if (s->kind == StepKind::Resolution || s->kind == StepKind::CubeResolution) ++r.resolution_steps;
    if (!seen.insert(s->id).second) {
      reject(r, s->id, RejectReason::MalformedReference, "duplicate step id");
      return r;
    }
    if (auto v = structural(*s); !v.ok()) {
      reject(r, s->id, v.reason, v.message);
      return r;
    }
    const TraceStep* ants[2] = {nullptr, nullptr};
    for (std::size_t i = 0; i < s->antecedents.size(); ++i) {
      ants[i] = lookup(s->antecedents[i]);
      if (!ants[i]) {
        reject(r, s->id, RejectReason::MalformedReference,
               "antecedent " + std::to_string(s->antecedents[i]) + " is not an earlier step");
        return r;
      }
    }
    if (auto v = checker.check(*s, ants[0], ants[1]); !v.ok()) {
      reject(r, s->id, v.reason, v.message);
      return r;
    }
    for (StepId a : s->antecedents) {
      auto it = refs.find(a);
      if (it != refs.end() && --it->second == 0 && a != footer.root) retained.erase(a);
    }
    auto rc = refs.find(s->id);
    if ((rc != refs.end() && rc->second > 0) || s->id == footer.root) retained.emplace(s->id, std::move(*s));
    r.peak_retained = std::max(r.peak_retained, retained.size());
    if (retained.size() > options.retained_cap) {
      reject(r, s->id, RejectReason::RetainedCapExceeded,
             "more than " + std::to_string(options.retained_cap) + " steps retained");
      return r;
    }
  }
  check_root(r, lookup(footer.root), footer.root, footer.kind);
  return r;
}

}  // namespace qgal
