#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "oracle.hpp"
#include "qgal/generator.hpp"
#include "qgal/normalize.hpp"
#include "qgal/prepro/preprocessor.hpp"
#include "qgal/qdimacs.hpp"

using namespace qgal;
using qgal::testing::brute_force_truth;

namespace {

Pcnf q(std::string_view text) { return parse_qdimacs(text); }

void expect_consistent(const Pcnf& input, const PreproOutcome& out, const std::string& what) {
  const bool truth = brute_force_truth(input);
  switch (out.kind) {
    case PreproKind::SolvedSat:
      ASSERT_TRUE(truth) << what << "\n" << write_qdimacs(input);
      break;
    case PreproKind::SolvedUnsat:
      ASSERT_FALSE(truth) << what << "\n" << write_qdimacs(input);
      break;
    case PreproKind::Simplified:
      ASSERT_EQ(brute_force_truth(out.formula), truth)
          << what << "\n" << write_qdimacs(input) << "=>\n" << write_qdimacs(out.formula);
  }
}

}  // namespace

TEST(Prepro, PureExistentialSolvesSat) {
  auto out = apply_unit_pure(q("p cnf 2 1\na 1 0\ne 2 0\n1 2 0\n"));
  EXPECT_EQ(out.kind, PreproKind::SolvedSat);
}

TEST(Prepro, PureUniversalSolvesUnsat) {
  auto out = apply_unit_pure(q("p cnf 1 1\na 1 0\n1 0\n"));
  EXPECT_EQ(out.kind, PreproKind::SolvedUnsat);
}

TEST(Prepro, UnitAfterReduction) {
  // e1 a2 e3: (1 2) reduces to (1); then (-1 3) forces 3.
  auto out = apply_unit(q("p cnf 3 3\ne 1 0\na 2 0\ne 3 0\n1 2 0\n-1 3 0\n-3 2 -1 0\n"));
  EXPECT_EQ(out.kind, PreproKind::SolvedUnsat);
  auto sat = apply_unit(q("p cnf 3 2\ne 1 0\na 2 0\ne 3 0\n1 2 0\n-1 3 2 0\n"));
  EXPECT_EQ(sat.log.front().applications, 1u);
  EXPECT_EQ(sat.formula.matrix, (std::vector<Clause>{{Literal(2), Literal(3)}}));
}

TEST(Prepro, UniversalReductionDropsTrailingUniversals) {
  auto out = apply_universal_reduction(q("p cnf 3 2\ne 1 0\na 2 0\ne 3 0\n1 2 0\n-1 -2 3 0\n"));
  EXPECT_EQ(out.log.front().applications, 1u);
  EXPECT_EQ(out.formula.matrix[0], Clause({Literal(-1), Literal(-2), Literal(3)}));
  EXPECT_EQ(out.formula.matrix[1], Clause({Literal(1)}));
}

TEST(Prepro, SubsumptionKeepsMinimalClauses) {
  auto out = subsume(q("p cnf 3 4\ne 1 2 3 0\n1 2 0\n1 2 3 0\n-1 3 0\n-1 2 3 0\n"));
  EXPECT_EQ(out.log.front().applications, 2u);
  EXPECT_EQ(out.formula.matrix.size(), 2u);
}

TEST(Prepro, BlockedClause) {
  auto out = eliminate_blocked_clauses(q("p cnf 2 2\ne 1 2 0\n1 2 0\n-1 -2 0\n"));
  EXPECT_GE(out.log.front().applications, 1u);
  EXPECT_EQ(out.kind, PreproKind::SolvedSat);
}

TEST(Prepro, BlockedClauseRespectsPrefixOrder) {
  // e1 a2: (1 2)(-1 -2) is false. Resolving on 1 is tautological only through
  // universal 2, which is right of 1, so nothing is blocked on 1.
  auto f = q("p cnf 2 2\ne 1 0\na 2 0\n1 2 0\n-1 -2 0\n");
  auto out = eliminate_blocked_clauses(f);
  EXPECT_EQ(out.log.front().applications, 0u);
  EXPECT_EQ(out.formula.matrix.size(), 2u);
}

TEST(Prepro, NoComplementaryLiteralsIsSat) {
  auto out = eliminate_blocked_clauses(q("p cnf 4 3\na 1 0\ne 2 3 4 0\n1 2 0\n2 3 0\n-1 4 0\n"));
  EXPECT_EQ(out.kind, PreproKind::SolvedSat);
}

TEST(Prepro, VariableElimination) {
  auto f = q("p cnf 3 3\na 1 0\ne 2 3 0\n1 2 0\n-2 3 0\n-2 -3 0\n");
  auto out = eliminate_variable(f, 2, 0);
  ASSERT_EQ(out.log.front().applications, 1u);
  for (const auto& c : out.formula.matrix)
    for (Literal l : c) EXPECT_NE(l.var(), 2u);
  EXPECT_EQ(brute_force_truth(out.formula), brute_force_truth(f));
  EXPECT_THROW(eliminate_variable(f, 1), FormulaError);
}

TEST(Prepro, VariableEliminationSkipsOuterExistentials) {
  auto f = q("p cnf 3 2\ne 1 0\na 2 0\ne 3 0\n1 2 3 0\n-1 -3 0\n");
  auto out = eliminate_variable(f, 1, 10);
  EXPECT_EQ(out.log.front().applications, 0u);
  EXPECT_EQ(out.formula.matrix.size(), 2u);
}

TEST(Prepro, UniversalExpansion) {
  auto f = q("p cnf 3 2\ne 1 0\na 2 0\ne 3 0\n1 2 3 0\n-2 -3 0\n");
  auto out = expand_universal(f, 2);
  EXPECT_EQ(out.log.front().applications, 1u);
  EXPECT_EQ(brute_force_truth(out.formula), brute_force_truth(f));
  for (const auto& b : out.formula.prefix) EXPECT_EQ(b.quantifier, Quantifier::Exists);
  EXPECT_THROW(expand_universal(f, 1), FormulaError);
  EXPECT_THROW(expand_universal(f, 3), FormulaError);
}

TEST(Prepro, ExpandingAbsentUniversalDropsIt) {
  auto f = q("p cnf 3 2\ne 1 0\na 2 0\ne 3 0\n1 3 0\n-1 -3 0\n");
  auto out = expand_universal(f, 2);
  EXPECT_EQ(out.formula.matrix, normalize(f).matrix);
  EXPECT_EQ(out.formula.prefix.size(), 1u);
}

TEST(Prepro, ExpansionBudget) {
  // (1 -3) mentions the inner existential but not u, so it gets copied.
  auto f = q("p cnf 3 3\ne 1 0\na 2 0\ne 3 0\n1 2 3 0\n-2 -3 0\n1 -3 0\n");
  auto out = expand_universal(f, 2, 0);
  EXPECT_EQ(out.log.front().applications, 0u);
}

TEST(Prepro, EveryTechniquePreservesTruth) {
  auto suite = random_suite(20240601, 500);
  for (int t = 0; t <= static_cast<int>(Technique::UniversalExpansion); ++t) {
    auto tech = static_cast<Technique>(t);
    for (std::size_t i = 0; i < suite.size(); ++i) {
      auto out = apply_technique(suite[i], tech);
      expect_consistent(suite[i], out, std::string(to_string(tech)) + " #" + std::to_string(i));
    }
  }
}

TEST(Prepro, EveryBundlePreservesTruth) {
  auto suite = random_suite(77, 500);
  TechniqueBudgets generous;
  generous.var_elim_growth = 4;
  for (const auto& [name, bundle] : default_bundles())
    for (const auto& budgets : {TechniqueBudgets{}, generous})
      for (std::size_t i = 0; i < suite.size(); ++i) {
        auto out = preprocess(suite[i], bundle, 10.0, budgets);
        ASSERT_TRUE(out.failure.empty()) << out.failure;
        expect_consistent(suite[i], out, name + " #" + std::to_string(i));
      }
}

TEST(Prepro, BundlesSolveSomething) {
  auto suite = random_suite(3, 200);
  auto bundles = default_bundles();
  int solved = 0;
  for (const auto& f : suite) solved += preprocess(f, bundles.at("B")).solved();
  EXPECT_GT(solved, 0);
}

TEST(Prepro, IdempotentBundle) {
  auto bundles = default_bundles();
  for (const auto& f : random_suite(11, 200)) {
    auto once = preprocess(f, bundles.at("A"));
    if (once.solved()) continue;
    auto twice = preprocess(once.formula, bundles.at("A"));
    EXPECT_EQ(canonical_digest(twice.formula), canonical_digest(once.formula));
  }
}

TEST(Prepro, ZeroTimeLimitReturnsTidyInput) {
  auto f = q("p cnf 4 2\ne 1 2 0\na 4 0\n1 2 0\n-1 2 0\n");
  auto out = preprocess(f, default_bundles().at("B"), 0.0);
  EXPECT_TRUE(out.timed_out);
  EXPECT_EQ(out.formula, tidy(f));
}

TEST(Prepro, LogAggregatesPerTechnique) {
  auto f = q("p cnf 3 3\ne 1 0\na 2 0\ne 3 0\n1 2 3 0\n-1 2 3 0\n1 -2 -3 0\n");
  auto out = preprocess(f, default_bundles().at("D"));
  std::set<Technique> seen;
  for (const auto& entry : out.log) EXPECT_TRUE(seen.insert(entry.technique).second);
  EXPECT_FALSE(out.log.empty());
}

TEST(Prepro, TidyBindsFreeVariablesOutermost) {
  Pcnf f;
  f.prefix = {{Quantifier::Forall, {2}}, {Quantifier::Exists, {3, 9}}};
  f.matrix = {{Literal(1), Literal(2), Literal(3)}};
  f.max_var = 9;
  auto g = tidy(f);
  ASSERT_EQ(g.prefix.size(), 3u);
  EXPECT_EQ(g.prefix[0], (QuantifierBlock{Quantifier::Exists, {1}}));
  EXPECT_EQ(g.prefix[2], (QuantifierBlock{Quantifier::Exists, {3}}));
  EXPECT_EQ(g.max_var, 3u);
}

TEST(BundleConfig, ParsesInternalAndExternal) {
  std::istringstream in(
      "# comment\n"
      "X = unit, pure , bce\n"
      "Y! = ur\n"
      "Z = external: bloqqer --keep=0\n");
  auto bundles = parse_bundle_config(in);
  ASSERT_EQ(bundles.size(), 3u);
  EXPECT_EQ(bundles.at("X").techniques,
            (std::vector<Technique>{Technique::Unit, Technique::Pure, Technique::BlockedClauseElim}));
  EXPECT_TRUE(bundles.at("X").fixpoint);
  EXPECT_FALSE(bundles.at("Y").fixpoint);
  EXPECT_TRUE(bundles.at("Z").is_external());
  EXPECT_EQ(bundles.at("Z").command, "bloqqer --keep=0");
}

TEST(BundleConfig, Rejections) {
  auto parse = [](const char* text) {
    std::istringstream in(text);
    return parse_bundle_config(in);
  };
  EXPECT_THROW(parse("X =\n"), ConfigError);
  EXPECT_THROW(parse("X = frobnicate\n"), ConfigError);
  EXPECT_THROW(parse("X unit\n"), ConfigError);
  EXPECT_THROW(parse("X = unit\nX = pure\n"), ConfigError);
  EXPECT_THROW(parse("X = external:\n"), ConfigError);
  EXPECT_THROW(ToolBundle::internal("E", {}), ConfigError);
  EXPECT_THROW(preprocess(Pcnf{}, ToolBundle::external("Z", "cat")), ConfigError);
}
