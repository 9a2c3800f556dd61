#include <gtest/gtest.h>

#include "oracle.hpp"
#include "qgal/generator.hpp"
#include "qgal/qdimacs.hpp"
#include "qgal/solver/qdpll.hpp"
#include "qgal/solver/qresolution.hpp"

using namespace qgal;

namespace {

Pcnf qbf(const char* text) { return parse_qdimacs(std::string_view(text)); }

}  // namespace

TEST(Propagate, ExistentialUnitGivesSolution) {
  QdpllSolver s(qbf("p cnf 1 1\ne 1 0\n1 0\n"));
  auto r = s.propagate();
  EXPECT_EQ(r.state, PropagationState::Solution);
  EXPECT_EQ(s.value(1), true);
}

TEST(Propagate, UniversalUnitIsConflict) {
  QdpllSolver s(qbf("p cnf 1 1\na 1 0\n1 0\n"));
  EXPECT_EQ(s.propagate().state, PropagationState::Conflict);
}

TEST(Propagate, ChainOfImplications) {
  QdpllSolver s(qbf("p cnf 2 2\ne 1 2 0\n1 0\n-1 2 0\n"));
  EXPECT_EQ(s.propagate().state, PropagationState::Solution);
  EXPECT_EQ(s.value(1), true);
  EXPECT_EQ(s.value(2), true);
  EXPECT_EQ(s.decision_level(), 0u);
}

TEST(SolveSearch, SpecExamples) {
  EXPECT_EQ(solve_search(qbf("p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n-1 -2 0\n")).status, Status::Sat);
  EXPECT_EQ(solve_search(qbf("p cnf 2 2\ne 1 0\na 2 0\n1 2 0\n-1 2 0\n")).status, Status::Unsat);
  EXPECT_EQ(solve_search(qbf("p cnf 0 0\n")).status, Status::Sat);
  EXPECT_EQ(solve_search(qbf("p cnf 1 2\ne 1 0\n1 0\n0\n")).status, Status::Unsat);
}

TEST(SolveSearch, TraceEndsInEmptyStep) {
  ProofRecorder rec;
  auto out = solve_search(qbf("p cnf 2 2\ne 1 0\na 2 0\n1 2 0\n-1 2 0\n"), {}, &rec);
  ASSERT_EQ(out.status, Status::Unsat);
  ASSERT_TRUE(rec.finished());
  const auto* root = rec.proof().find(rec.proof().root);
  ASSERT_NE(root, nullptr);
  EXPECT_TRUE(root->literals.empty());
  EXPECT_EQ(rec.proof().kind, ProofKind::Refutation);
}

TEST(SolveSearch, AgreesWithGameEvaluation) {
  auto suite = random_suite(20240601, 500);
  for (std::size_t i = 0; i < suite.size(); ++i) {
    bool truth = qgal::testing::brute_force_truth(suite[i]);
    for (bool pure : {true, false}) {
      SearchOptions opt;
      opt.pure_literals = pure;
      ProofRecorder rec;
      auto out = solve_search(suite[i], {}, &rec, opt);
      ASSERT_EQ(out.status, truth ? Status::Sat : Status::Unsat)
          << "formula " << i << "\n" << write_qdimacs(suite[i]);
      ASSERT_TRUE(rec.finished());
      EXPECT_EQ(rec.proof().kind, truth ? ProofKind::Satisfaction : ProofKind::Refutation);
    }
  }
}

TEST(SolveSearch, LearnedClausesAreEntailed) {
  auto suite = random_suite(77, 150);
  for (const auto& f : suite) {
    QdpllSolver s(f);
    s.solve();
    bool truth = qgal::testing::brute_force_truth(f);
    for (const auto& c : s.learned_clauses()) {
      Pcnf g = f;
      g.matrix.push_back(c);
      EXPECT_EQ(qgal::testing::brute_force_truth(g), truth);
    }
  }
}

TEST(QResolve, Examples) {
  auto f = qbf("p cnf 3 0\ne 1 2 3 0\n");
  PrefixIndex idx(f);
  Clause r = qresolve({Literal(3), Literal(1)}, {Literal(-3), Literal(2)}, 3, idx);
  EXPECT_EQ(r, (Clause{Literal(1), Literal(2)}));
  EXPECT_THROW(qresolve({Literal(3), Literal(1)}, {Literal(-3), Literal(-1)}, 3, idx), ResolutionError);
  EXPECT_THROW(qresolve({Literal(3)}, {Literal(2)}, 3, idx), ResolutionError);

  // prefix e1 a2 e3: (x u e)(-x e) -> (e) with e=1, u=2, x=3
  auto g = qbf("p cnf 3 0\ne 1 0\na 2 0\ne 3 0\n");
  PrefixIndex gi(g);
  EXPECT_EQ(qresolve({Literal(3), Literal(2), Literal(1)}, {Literal(-3), Literal(1)}, 3, gi),
            (Clause{Literal(1)}));
}
