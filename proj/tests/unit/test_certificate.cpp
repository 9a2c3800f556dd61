#include <gtest/gtest.h>

#include <sstream>

#include "qgal/cert/certificate.hpp"
#include "qgal/generator.hpp"
#include "qgal/qdimacs.hpp"
#include "qgal/solver/qdpll.hpp"

using namespace qgal;

namespace {

Pcnf qbf(const char* text) { return parse_qdimacs(std::string_view(text)); }

Proof solve_with_proof(const Pcnf& f) {
  ProofRecorder rec;
  solve_search(f, {}, &rec);
  return rec.take();
}

}  // namespace

TEST(Certificate, SkolemForAlternatingFormula) {
  Pcnf f = qbf("p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n-1 -2 0\n");
  Certificate c = extract_certificate(solve_with_proof(f), f);
  EXPECT_EQ(c.kind, CertificateKind::Skolem);
  EXPECT_TRUE(validate_certificate(c, f));
  EXPECT_TRUE(dependency_violations(c, f).empty());
  // f_x must equal not u.
  EXPECT_FALSE(c.graph.evaluate(c.functions.at(2), {0, 1, 0}));
  EXPECT_TRUE(c.graph.evaluate(c.functions.at(2), {0, 0, 0}));
}

TEST(Certificate, HerbrandForOuterExistential) {
  Pcnf f = qbf("p cnf 2 2\ne 1 0\na 2 0\n1 2 0\n-1 2 0\n");
  Certificate c = extract_certificate(solve_with_proof(f), f);
  EXPECT_EQ(c.kind, CertificateKind::Herbrand);
  EXPECT_TRUE(validate_certificate(c, f));
  EXPECT_TRUE(dependency_violations(c, f).empty());
}

TEST(Certificate, HandWrittenFunctions) {
  Pcnf f = qbf("p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n-1 -2 0\n");
  Certificate good;
  good.kind = CertificateKind::Skolem;
  good.functions[2] = good.graph.negate(good.graph.var(1));
  EXPECT_TRUE(validate_certificate(good, f));
  Certificate bad;
  bad.kind = CertificateKind::Skolem;
  bad.functions[2] = bad.graph.var(1);
  EXPECT_FALSE(validate_certificate(bad, f));

  Pcnf g = qbf("p cnf 2 2\ne 1 0\na 2 0\n1 2 0\n-1 2 0\n");
  Certificate h;
  h.kind = CertificateKind::Herbrand;
  h.functions[2] = h.graph.constant(false);
  EXPECT_TRUE(validate_certificate(h, g));
}

TEST(Certificate, ExistentialOnlyGivesConstants) {
  Pcnf f = qbf("p cnf 3 2\ne 1 2 3 0\n1 -2 0\n2 3 0\n");
  Certificate c = extract_certificate(solve_with_proof(f), f);
  for (const auto& [v, root] : c.functions) EXPECT_LT(root, 2u) << v;
  EXPECT_TRUE(validate_certificate(c, f));
}

TEST(Certificate, RejectsUncheckedProof) {
  Pcnf f = qbf("p cnf 1 2\ne 1 0\n1 0\n-1 0\n");
  Proof p = solve_with_proof(f);
  p.steps.back().literals.push_back(Literal(1));
  EXPECT_THROW(extract_certificate(p, f), UncheckedProofError);
}

TEST(Certificate, FileRoundTrip) {
  Pcnf f = qbf("p cnf 3 3\na 1 0\ne 2 0\na 3 0\n1 2 3 0\n-1 -2 0\n2 -3 1 0\n");
  Certificate c = extract_certificate(solve_with_proof(f), f);
  std::stringstream ss;
  write_certificate(ss, c);
  Certificate back = read_certificate(ss);
  EXPECT_EQ(back.kind, c.kind);
  EXPECT_EQ(back.digest, c.digest);
  EXPECT_EQ(back.functions, c.functions);
  EXPECT_EQ(back.graph.size(), c.graph.size());
  EXPECT_TRUE(validate_certificate(back, f));
}

TEST(Certificate, ClosedLoopOnRandomSuite) {
  auto suite = random_suite(99, 400);
  ValidationBudget exhaustive;
  ValidationBudget sat_only;
  sat_only.exhaustive_vars = 0;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    Proof p = solve_with_proof(suite[i]);
    Certificate c = extract_certificate(p, suite[i]);
    ASSERT_TRUE(dependency_violations(c, suite[i]).empty()) << i;
    ASSERT_TRUE(validate_certificate(c, suite[i], exhaustive)) << i << "\n" << write_qdimacs(suite[i]);
    ASSERT_TRUE(validate_certificate(c, suite[i], sat_only)) << i;
  }
}
