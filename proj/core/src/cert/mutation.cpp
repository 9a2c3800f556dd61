#include "qgal/cert/mutation.hpp"

#include <algorithm>
#include <random>
#include <unordered_map>

#include "qgal/util/random.hpp"

namespace qgal {

std::string_view to_string(MutationKind k) {
  switch (k) {
    case MutationKind::DeleteStep: return "delete-step";
    case MutationKind::SwapAntecedents: return "swap-antecedents";
    case MutationKind::FlipPivotLiteral: return "flip-pivot-literal";
    case MutationKind::InjectTautology: return "inject-tautology";
  }
  return "?";
}

namespace {

std::vector<Literal> as_set(std::vector<Literal> lits) {
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  return lits;
}

bool is_resolution(StepKind k) { return k == StepKind::Resolution || k == StepKind::CubeResolution; }

Var clash_var(const TraceStep& s, const TraceStep& a, const TraceStep& b) {
  if (s.pivot != 0) return s.pivot;
  for (Literal l : a.literals)
    if (std::find(b.literals.begin(), b.literals.end(), -l) != b.literals.end()) return l.var();
  return 0;
}

}  // namespace

std::optional<MutatedProof> mutate_proof(const Proof& p, MutationKind kind, std::uint64_t choice) {
  std::unordered_map<StepId, std::size_t> pos;
  for (std::size_t i = 0; i < p.steps.size(); ++i) pos[p.steps[i].id] = i;
  const auto live = p.live_steps();
  std::vector<std::size_t> resolutions;
  for (StepId id : live)
    if (is_resolution(p.steps[pos.at(id)].kind)) resolutions.push_back(pos.at(id));

  MutatedProof out{p, 0, {}};
  auto& steps = out.proof.steps;

  switch (kind) {
    case MutationKind::DeleteStep: {
      if (live.empty()) return std::nullopt;
      StepId id = live[choice % live.size()];
      steps.erase(steps.begin() + static_cast<std::ptrdiff_t>(pos.at(id)));
      out.target = id;
      out.description = "deleted step " + std::to_string(id);
      return out;
    }
    case MutationKind::SwapAntecedents: {
      std::vector<std::size_t> derived;
      for (StepId id : live)
        if (!p.steps[pos.at(id)].antecedents.empty()) derived.push_back(pos.at(id));
      if (derived.size() < 2) return std::nullopt;
      std::mt19937_64 rng(choice);
      for (int attempt = 0; attempt < 256; ++attempt) {
        std::size_t x = derived[uniform_below(rng, derived.size())];
        std::size_t y = derived[uniform_below(rng, derived.size())];
        if (x == y) continue;
        if (x > y) std::swap(x, y);  // x earlier in the sequence
        auto& sx = steps[x];
        auto& sy = steps[y];
        std::size_t i = uniform_below(rng, sx.antecedents.size());
        std::size_t j = uniform_below(rng, sy.antecedents.size());
        StepId ax = sx.antecedents[i], ay = sy.antecedents[j];
        // The moved antecedent must still precede its new consumer.
        if (ax == ay || pos.at(ay) >= x) continue;
        if (as_set(p.steps[pos.at(ax)].literals) == as_set(p.steps[pos.at(ay)].literals)) continue;
        std::swap(sx.antecedents[i], sy.antecedents[j]);
        out.target = sx.id;
        out.description = "swapped antecedent " + std::to_string(ax) + " of step " +
                          std::to_string(sx.id) + " with " + std::to_string(ay) + " of step " +
                          std::to_string(sy.id);
        return out;
      }
      return std::nullopt;
    }
    case MutationKind::FlipPivotLiteral: {
      if (resolutions.empty()) return std::nullopt;
      const TraceStep& s = p.steps[resolutions[choice % resolutions.size()]];
      const TraceStep& a = p.steps[pos.at(s.antecedents[0])];
      const TraceStep& b = p.steps[pos.at(s.antecedents[1])];
      Var pivot = clash_var(s, a, b);
      if (pivot == 0) return std::nullopt;
      auto& lits = steps[pos.at(a.id)].literals;
      for (auto& l : lits)
        if (l.var() == pivot) l = -l;
      out.target = a.id;
      out.description = "negated pivot " + std::to_string(pivot) + " in step " + std::to_string(a.id);
      return out;
    }
    case MutationKind::InjectTautology: {
      if (resolutions.empty()) return std::nullopt;
      std::size_t at = resolutions[choice % resolutions.size()];
      const TraceStep& s = p.steps[at];
      const TraceStep& a = p.steps[pos.at(s.antecedents[0])];
      const TraceStep& b = p.steps[pos.at(s.antecedents[1])];
      Var pivot = clash_var(s, a, b);
      if (pivot == 0) return std::nullopt;
      StepId fresh = 0;
      for (const auto& t : p.steps) fresh = std::max(fresh, t.id);
      ++fresh;
      TraceStep bad = s;
      bad.id = fresh;
      bad.literals.push_back(Literal::positive(pivot));
      bad.literals.push_back(Literal::negative(pivot));
      // Consumers of s now read the injected step instead.
      for (auto& t : steps)
        for (auto& ant : t.antecedents)
          if (ant == s.id) ant = fresh;
      if (out.proof.root == s.id) out.proof.root = fresh;
      steps.insert(steps.begin() + static_cast<std::ptrdiff_t>(at + 1), bad);
      out.target = fresh;
      out.description = "injected tautological resolvent " + std::to_string(fresh) + " replacing step " +
                        std::to_string(s.id);
      return out;
    }
  }
  return std::nullopt;
}

}  // namespace qgal
