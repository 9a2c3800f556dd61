#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "qgal/pcnf.hpp"
#include "qgal/proof.hpp"

namespace qgal {

enum class RejectReason : std::uint8_t {
  None,
  MalformedReference,   // unknown, duplicate or non-earlier step id
  MalformedStep,        // wrong antecedent count or family for the step kind
  InputMismatch,        // input clause differs from the matrix clause
  InputCubeInconsistent,
  InputCubeNotImplicant,  // some clause not satisfied by the input cube
  PivotViolation,       // pivot has the wrong quantifier
  PivotNotClashing,
  TautologicalResolvent,
  LongDistance,         // merged complementary universal (existential) literals
  ResolventMismatch,    // recorded result is not the resolvent
  ReductionViolation,   // removed literal not reducible or of wrong quantifier
  ReductionNotSubset,
  RootMissing,
  RootNotEmpty,
  RootWrongFamily,
  RetainedCapExceeded,
};

std::string_view to_string(RejectReason r);

struct CheckReport {
  bool accepted = false;
  StepId failing_step = 0;
  RejectReason reason = RejectReason::None;
  std::string message;
  std::size_t step_count = 0;
  std::size_t resolution_steps = 0;
  std::size_t max_width = 0;
  std::size_t peak_retained = 0;  // streaming check only
};

/// Checks every step of a Q-resolution refutation (clause family).
CheckReport check_refutation(const Proof& p, const Pcnf& f);
/// Checks every step of a term-resolution satisfaction proof (cube family).
CheckReport check_satisfaction(const Proof& p, const Pcnf& f);
/// Dispatches on p.kind.
CheckReport check_proof(const Proof& p, const Pcnf& f);

struct StreamCheckOptions {
  // Steps kept in memory at once; exceeding it rejects the proof.
  std::size_t retained_cap = SIZE_MAX;
};

/// Two passes over a trace file: the first counts references, the second
/// checks steps while keeping only those still referenced later.
CheckReport check_proof_file(const std::filesystem::path& trace, const Pcnf& f,
                             const StreamCheckOptions& options = {});

}  // namespace qgal
