#include <gtest/gtest.h>

#include "qgal/cert/checker.hpp"
#include "qgal/cert/mutation.hpp"
#include "qgal/generator.hpp"
#include "qgal/qdimacs.hpp"
#include "qgal/solver/qdpll.hpp"

using namespace qgal;

TEST(Mutation, EveryMutationIsRejected) {
  auto suite = random_suite(31337, 300);
  std::size_t applied = 0;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    ProofRecorder rec;
    solve_search(suite[i], {}, &rec);
    const Proof& p = rec.proof();
    ASSERT_TRUE(check_proof(p, suite[i]).accepted);
    for (auto kind : {MutationKind::DeleteStep, MutationKind::SwapAntecedents,
                      MutationKind::FlipPivotLiteral, MutationKind::InjectTautology}) {
      for (std::uint64_t choice = 0; choice < 3; ++choice) {
        auto m = mutate_proof(p, kind, choice * 7919 + i);
        if (!m) continue;
        ++applied;
        auto r = check_proof(m->proof, suite[i]);
        ASSERT_FALSE(r.accepted) << i << " " << to_string(kind) << ": " << m->description << "\n"
                                 << write_qdimacs(suite[i]);
        EXPECT_NE(r.reason, RejectReason::None);
        if (kind == MutationKind::InjectTautology) {
          EXPECT_EQ(r.reason, RejectReason::TautologicalResolvent);
          EXPECT_EQ(r.failing_step, m->target);
        }
        if (kind == MutationKind::DeleteStep)
          EXPECT_TRUE(r.reason == RejectReason::MalformedReference || r.reason == RejectReason::RootMissing);
      }
    }
  }
  EXPECT_GT(applied, 1000u);
}
