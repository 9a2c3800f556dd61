#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>

#include "qgal/cert/checker.hpp"
#include "qgal/cert/function_graph.hpp"
#include "qgal/pcnf.hpp"
#include "qgal/proof.hpp"

namespace qgal {

enum class CertificateKind : std::uint8_t { Skolem, Herbrand };

std::string_view to_string(CertificateKind k);

/// Skolem functions for every existential (satisfiable formulas) or Herbrand
/// functions for every universal (unsatisfiable formulas), as roots in one
/// shared function graph.
struct Certificate {
  CertificateKind kind = CertificateKind::Skolem;
  std::string digest;  // tagged canonical digest of the certified formula
  FunctionGraph graph;
  std::map<Var, NodeId> functions;
};

class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by extraction when the proof does not pass the checker.
class UncheckedProofError : public CertificateError {
 public:
  explicit UncheckedProofError(const CheckReport& report);
  const CheckReport& report() const { return report_; }

 private:
  CheckReport report_;
};

/// Thrown by validation when the budget does not allow a verdict.
class ValidationInconclusive : public CertificateError {
 public:
  using CertificateError::CertificateError;
};

/// Balabanov-Jiang extraction. The proof is checked first; a satisfaction
/// proof yields a Skolem, a refutation a Herbrand certificate.
Certificate extract_certificate(const Proof& p, const Pcnf& f);

struct ValidationBudget {
  // Exhaustive enumeration up to 2^exhaustive_vars assignments of the
  // function inputs; beyond that the SAT engine decides.
  unsigned exhaustive_vars = 16;
  double sat_seconds = 60.0;
};

/// Substitutes the functions into the matrix. Skolem: the result must be
/// valid; Herbrand: it must be unsatisfiable. Throws ValidationInconclusive
/// when the budget runs out.
bool validate_certificate(const Certificate& c, const Pcnf& f, const ValidationBudget& budget = {});

/// Structural dependency check: each function may only read variables of the
/// opposite quantifier bound left of the defined variable, and every variable
/// of the certified quantifier has a function. Returns the offending
/// variables (empty when sound).
std::vector<Var> dependency_violations(const Certificate& c, const Pcnf& f);

/// Text format:
///   qcert skolem|herbrand <digest>
///   n <node count>
///   <id> const 0|1 | <id> var <v> | <id> not <id> | <id> and <id> <id>
///   f <var> <node id>
void write_certificate(std::ostream& out, const Certificate& c);
Certificate read_certificate(std::istream& in);
void write_certificate_file(const std::filesystem::path& path, const Certificate& c);
Certificate read_certificate_file(const std::filesystem::path& path);

}  // namespace qgal
