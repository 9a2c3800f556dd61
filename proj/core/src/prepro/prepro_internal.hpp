#pragma once

#include <cstdint>

#include "qgal/util/timer.hpp"

namespace qgal::prepro_detail {

/// Thrown out of a technique when the deadline passes; the driver keeps the
/// formula from before that technique.
struct Interrupted {};

struct Ticker {
  const Deadline* deadline = nullptr;
  std::uint64_t ticks = 0;

  void operator()() {
    if (deadline != nullptr && (++ticks & 1023) == 0 && deadline->expired()) throw Interrupted{};
  }
};

}  // namespace qgal::prepro_detail
