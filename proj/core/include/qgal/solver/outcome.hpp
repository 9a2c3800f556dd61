#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

namespace qgal {

enum class Status : std::uint8_t { Sat, Unsat, Unknown };

enum class UnknownReason : std::uint8_t { None, Timeout, Memout, Error };

struct SolveOutcome {
  Status status = Status::Unknown;
  double wall_time = 0.0;  // seconds
  UnknownReason reason = UnknownReason::None;

  static SolveOutcome sat(double t) { return {Status::Sat, t, UnknownReason::None}; }
  static SolveOutcome unsat(double t) { return {Status::Unsat, t, UnknownReason::None}; }
  static SolveOutcome unknown(double t, UnknownReason r) { return {Status::Unknown, t, r}; }
  bool solved() const { return status != Status::Unknown; }
};

/// Resource budget for one solver call. Defaults are unlimited.
struct Limits {
  double time_seconds = std::numeric_limits<double>::infinity();
  std::size_t memory_bytes = std::numeric_limits<std::size_t>::max();
};

/// SAT-competition exit codes: 10 SAT, 20 UNSAT, 0 otherwise.
constexpr int exit_code(Status s) { return s == Status::Sat ? 10 : s == Status::Unsat ? 20 : 0; }
Status status_from_exit_code(int code);

std::string_view to_string(Status s);
std::string_view to_string(UnknownReason r);
Status parse_status(std::string_view text);

}  // namespace qgal
