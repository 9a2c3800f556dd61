#include <algorithm>
#include <fstream>
#include <istream>
#include <set>

#include "qgal/normalize.hpp"
#include "qgal/prepro/preprocessor.hpp"
#include "qgal/util/timer.hpp"
#include "prepro_internal.hpp"

namespace qgal {
namespace {

struct TechniqueName {
  Technique technique;
  std::string_view name;
};

constexpr TechniqueName kNames[] = {
    {Technique::Unit, "unit"},
    {Technique::Pure, "pure"},
    {Technique::UniversalReduction, "universal_reduction"},
    {Technique::Subsumption, "subsumption"},
    {Technique::BlockedClauseElim, "blocked_clause_elim"},
    {Technique::VarElim, "var_elim"},
    {Technique::UniversalExpansion, "universal_expansion"},
};

constexpr TechniqueName kAliases[] = {
    {Technique::UniversalReduction, "ur"},
    {Technique::BlockedClauseElim, "bce"},
    {Technique::VarElim, "ve"},
    {Technique::UniversalExpansion, "expansion"},
    {Technique::Subsumption, "subsume"},
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

void merge_log(std::vector<TechniqueCount>& log, const std::vector<TechniqueCount>& more) {
  for (const auto& entry : more) {
    auto it = std::find_if(log.begin(), log.end(),
                           [&](const TechniqueCount& c) { return c.technique == entry.technique; });
    if (it == log.end())
      log.push_back(entry);
    else
      it->applications += entry.applications;
  }
}

PreproKind classify(const Pcnf& f) {
  for (const auto& c : f.matrix)
    if (c.empty()) return PreproKind::SolvedUnsat;
  return f.matrix.empty() ? PreproKind::SolvedSat : PreproKind::Simplified;
}

}  // namespace

std::string_view to_string(Technique t) {
  for (const auto& n : kNames)
    if (n.technique == t) return n.name;
  return "?";
}

Technique parse_technique(std::string_view name) {
  name = trim(name);
  for (const auto& n : kNames)
    if (n.name == name) return n.technique;
  for (const auto& n : kAliases)
    if (n.name == name) return n.technique;
  throw ConfigError("unknown technique '" + std::string(name) + "'");
}

std::string_view to_string(PreproKind k) {
  switch (k) {
    case PreproKind::Simplified:
      return "simplified";
    case PreproKind::SolvedSat:
      return "solved-sat";
    case PreproKind::SolvedUnsat:
      return "solved-unsat";
  }
  return "?";
}

ToolBundle ToolBundle::internal(std::string name, std::vector<Technique> techniques, bool fixpoint) {
  if (name.empty()) throw ConfigError("bundle name is empty");
  if (techniques.empty()) throw ConfigError("bundle '" + name + "' has no techniques");
  ToolBundle b;
  b.name = std::move(name);
  b.techniques = std::move(techniques);
  b.fixpoint = fixpoint;
  return b;
}

ToolBundle ToolBundle::external(std::string name, std::string command) {
  if (name.empty()) throw ConfigError("bundle name is empty");
  if (trim(command).empty()) throw ConfigError("bundle '" + name + "' has an empty command");
  ToolBundle b;
  b.name = std::move(name);
  b.command = std::move(command);
  b.fixpoint = false;
  return b;
}

Pcnf tidy(const Pcnf& f) {
  Pcnf g = normalize(f);
  const Var top = g.effective_max_var();
  std::vector<bool> seen(top + 1, false), bound(top + 1, false);
  Var max_seen = 0;
  for (const auto& c : g.matrix)
    for (Literal l : c) {
      seen[l.var()] = true;
      max_seen = std::max(max_seen, l.var());
    }
  Prefix prefix;
  for (const auto& block : g.prefix) {
    QuantifierBlock b{block.quantifier, {}};
    for (Var v : block.variables)
      if (seen[v] && !bound[v]) {
        bound[v] = true;
        b.variables.push_back(v);
      }
    std::sort(b.variables.begin(), b.variables.end());
    prefix.push_back(std::move(b));
  }
  prefix = merge_adjacent_blocks(prefix);
  // Free variables are outermost existentials.
  std::vector<Var> free;
  for (Var v = 1; v <= top; ++v)
    if (seen[v] && !bound[v]) free.push_back(v);
  if (!free.empty()) {
    if (prefix.empty() || prefix.front().quantifier != Quantifier::Exists)
      prefix.insert(prefix.begin(), QuantifierBlock{Quantifier::Exists, {}});
    auto& vars = prefix.front().variables;
    vars.insert(vars.begin(), free.begin(), free.end());
    std::sort(vars.begin(), vars.end());
  }
  g.prefix = std::move(prefix);
  g.max_var = max_seen;
  return g;
}

std::uint64_t progress_measure(const Pcnf& f) {
  std::set<Var> vars;
  std::uint64_t literals = 0;
  for (const auto& c : f.matrix) {
    literals += c.size();
    for (Literal l : c) vars.insert(l.var());
  }
  return f.matrix.size() + literals + vars.size();
}

PreproOutcome preprocess(const Pcnf& f, const ToolBundle& bundle, double limit_seconds,
                         const TechniqueBudgets& budgets) {
  if (bundle.is_external())
    throw ConfigError("bundle '" + bundle.name + "' is external and runs through the pipeline");
  if (bundle.techniques.empty()) throw ConfigError("bundle '" + bundle.name + "' has no techniques");

  Deadline deadline(limit_seconds);
  PreproOutcome out;
  Pcnf current;
  try {
    current = tidy(f);
    out.kind = classify(current);
    while (!out.solved()) {
      const auto before = progress_measure(current);
      for (Technique t : bundle.techniques) {
        if (deadline.expired()) throw prepro_detail::Interrupted{};
        auto step = apply_technique(current, t, budgets, &deadline);
        merge_log(out.log, step.log);
        current = std::move(step.formula);
        out.kind = step.kind;
        if (out.solved()) break;
      }
      if (out.solved() || !bundle.fixpoint || progress_measure(current) >= before) break;
    }
  } catch (const prepro_detail::Interrupted&) {
    out.timed_out = true;
  } catch (const std::exception& e) {
    PreproOutcome failed;
    failed.formula = f;
    failed.log = std::move(out.log);
    failed.failure = e.what();
    return failed;
  }
  out.formula = std::move(current);
  return out;
}

std::map<std::string, ToolBundle> default_bundles() {
  using T = Technique;
  std::map<std::string, ToolBundle> bundles;
  bundles.emplace("A", ToolBundle::internal("A", {T::UniversalReduction, T::Subsumption}));
  bundles.emplace("B", ToolBundle::internal("B", {T::Unit, T::Pure, T::UniversalReduction,
                                                  T::Subsumption, T::BlockedClauseElim, T::VarElim,
                                                  T::UniversalExpansion}));
  bundles.emplace("C", ToolBundle::internal("C", {T::Unit, T::Pure, T::UniversalReduction,
                                                  T::VarElim, T::UniversalExpansion,
                                                  T::BlockedClauseElim, T::Subsumption}));
  bundles.emplace("D", ToolBundle::internal("D", {T::Unit, T::Pure, T::UniversalReduction,
                                                  T::Subsumption, T::VarElim}));
  return bundles;
}

std::map<std::string, ToolBundle> parse_bundle_config(std::istream& in) {
  std::map<std::string, ToolBundle> bundles;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    auto where = [&] { return "bundle config line " + std::to_string(number) + ": "; };
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string_view text = trim(line);
    if (text.empty()) continue;
    auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where() + "expected 'name = techniques'");
    std::string_view name = trim(text.substr(0, eq));
    std::string_view body = trim(text.substr(eq + 1));
    bool fixpoint = true;
    if (!name.empty() && name.back() == '!') {
      fixpoint = false;
      name = trim(name.substr(0, name.size() - 1));
    }
    if (name.empty()) throw ConfigError(where() + "missing bundle name");
    if (bundles.count(std::string(name))) throw ConfigError(where() + "duplicate bundle '" + std::string(name) + "'");
    try {
      if (body.rfind("external:", 0) == 0) {
        bundles.emplace(name, ToolBundle::external(std::string(name),
                                                   std::string(trim(body.substr(9)))));
        continue;
      }
      std::vector<Technique> techniques;
      while (!body.empty()) {
        auto comma = body.find(',');
        auto item = trim(body.substr(0, comma));
        if (item.empty()) throw ConfigError("empty technique name");
        techniques.push_back(parse_technique(item));
        if (comma == std::string_view::npos) break;
        body.remove_prefix(comma + 1);
      }
      bundles.emplace(name, ToolBundle::internal(std::string(name), std::move(techniques), fixpoint));
    } catch (const ConfigError& e) {
      throw ConfigError(where() + e.what());
    }
  }
  return bundles;
}

std::map<std::string, ToolBundle> load_bundle_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open bundle config " + path.string());
  return parse_bundle_config(in);
}

}  // namespace qgal
