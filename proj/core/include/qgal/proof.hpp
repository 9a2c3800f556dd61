#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgal/pcnf.hpp"

namespace qgal {

using StepId = std::uint64_t;

enum class StepKind : std::uint8_t {
  InputClause,
  Resolution,
  UniversalReduction,
  InputCube,
  CubeResolution,
  ExistentialReduction,
};

enum class ProofKind : std::uint8_t { Refutation, Satisfaction };

std::string_view to_string(StepKind k);
std::string_view to_string(ProofKind k);

/// True for steps that derive cubes.
constexpr bool is_cube_step(StepKind k) {
  return k == StepKind::InputCube || k == StepKind::CubeResolution ||
         k == StepKind::ExistentialReduction;
}

/// One derivation step of a Q-resolution or term-resolution proof.
struct TraceStep {
  StepId id = 0;
  StepKind kind = StepKind::InputClause;
  std::vector<StepId> antecedents;
  Var pivot = 0;                 // resolutions only
  std::size_t input_index = 0;   // input clauses only: index into the matrix
  std::vector<Literal> literals;

  bool operator==(const TraceStep&) const = default;
};

struct Proof {
  ProofKind kind = ProofKind::Refutation;
  Var max_var = 0;
  std::size_t num_inputs = 0;  // input clauses occupy ids 1..num_inputs
  std::vector<TraceStep> steps;
  StepId root = 0;

  const TraceStep* find(StepId id) const;
  /// Ids of the steps the root depends on, root included.
  std::vector<StepId> live_steps() const;
};

/// Receives derivation steps as a solver produces them.
class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void begin(Var max_var, std::size_t num_inputs) = 0;
  virtual void add(const TraceStep& step) = 0;
  virtual void finish(ProofKind kind, StepId root) = 0;
};

class ProofRecorder final : public TraceSink {
 public:
  void begin(Var max_var, std::size_t num_inputs) override;
  void add(const TraceStep& step) override { proof_.steps.push_back(step); }
  void finish(ProofKind kind, StepId root) override;

  bool finished() const { return finished_; }
  const Proof& proof() const { return proof_; }
  Proof take() { return std::move(proof_); }

 private:
  Proof proof_;
  bool finished_ = false;
};

/// Line format:
///   p qrp <max_var> <num_inputs>
///   <id> <lit>* 0 <antecedent_id>* 0
///   r refutation|satisfaction <root_id>
/// Steps 1..num_inputs are the input clauses in matrix order.
class TraceFileWriter final : public TraceSink {
 public:
  explicit TraceFileWriter(std::ostream& out) : out_(&out) {}
  explicit TraceFileWriter(const std::filesystem::path& path);

  void begin(Var max_var, std::size_t num_inputs) override;
  void add(const TraceStep& step) override;
  void finish(ProofKind kind, StepId root) override;

  std::uint64_t bytes_written() const { return bytes_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
  std::uint64_t bytes_ = 0;
};

class ProofFormatError : public std::runtime_error {
 public:
  ProofFormatError(std::size_t line, const std::string& message)
      : std::runtime_error("proof line " + std::to_string(line) + ": " + message) {}
};

struct TraceHeader {
  Var max_var = 0;
  std::size_t num_inputs = 0;
};

struct TraceFooter {
  ProofKind kind = ProofKind::Refutation;
  StepId root = 0;
};

/// Streams a trace file. A trace may interleave clause and cube derivations;
/// step kinds and pivots are inferred. No antecedents means an input (clause
/// when id <= num_inputs, cube otherwise). Derived steps belong to the family
/// of their first antecedent: one antecedent is a reduction, two a resolution
/// whose pivot is the first variable occurring with opposite signs. Kind and
/// pivot fall back to the clause family and 0 when `lookup` cannot resolve
/// an antecedent.
class TraceReader {
 public:
  explicit TraceReader(std::istream& in) : in_(in) {}

  TraceHeader header();
  /// Next step, or nullopt at the footer / end of input. `lookup` resolves an
  /// earlier step id; it may return nullptr.
  std::optional<TraceStep> next(const std::function<const TraceStep*(StepId)>& lookup = {});
  std::optional<TraceFooter> footer() const { return footer_; }
  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  TraceHeader header_;
  std::optional<TraceFooter> footer_;
  std::size_t line_ = 0;
  bool header_read_ = false;
};

Proof read_proof(std::istream& in);
Proof read_proof_file(const std::filesystem::path& path);
void write_proof(std::ostream& out, const Proof& proof);

}  // namespace qgal
