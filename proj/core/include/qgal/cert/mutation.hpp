#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "qgal/proof.hpp"

namespace qgal {

/// Single-step corruptions of a proof, used to exercise the checker.
enum class MutationKind : std::uint8_t {
  DeleteStep,        // drop a step the root depends on
  SwapAntecedents,   // exchange one antecedent between two derived steps
  FlipPivotLiteral,  // negate the pivot literal inside an antecedent
  InjectTautology,   // splice in a resolution step with a tautological result
};

std::string_view to_string(MutationKind k);

struct MutatedProof {
  Proof proof;
  StepId target = 0;  // the step that was changed or added
  std::string description;
};

/// Applies one mutation of the given kind to a step the root depends on;
/// `choice` selects among the candidates. Returns nullopt when the proof
/// offers no candidate (e.g. no resolution steps).
std::optional<MutatedProof> mutate_proof(const Proof& p, MutationKind kind, std::uint64_t choice);

}  // namespace qgal
