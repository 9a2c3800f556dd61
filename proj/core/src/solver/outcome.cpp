#include "qgal/solver/outcome.hpp"

#include <stdexcept>
#include <string>

namespace qgal {

Status status_from_exit_code(int code) {
  if (code == 10) return Status::Sat;
  if (code == 20) return Status::Unsat;
  return Status::Unknown;
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Sat: return "SAT";
    case Status::Unsat: return "UNSAT";
    case Status::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

std::string_view to_string(UnknownReason r) {
  switch (r) {
    case UnknownReason::None: return "none";
    case UnknownReason::Timeout: return "timeout";
    case UnknownReason::Memout: return "memout";
    case UnknownReason::Error: return "error";
  }
  return "none";
}

Status parse_status(std::string_view text) {
  if (text == "SAT") return Status::Sat;
  if (text == "UNSAT") return Status::Unsat;
  if (text == "UNKNOWN") return Status::Unknown;
  throw std::invalid_argument("unknown status '" + std::string(text) + "'");
}

}  // namespace qgal
