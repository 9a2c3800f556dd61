#pragma once

#include <chrono>
#include <limits>

namespace qgal {

class Stopwatch {
 public:
  using Clock = std::chrono::steady_clock;

  Stopwatch() : start_(Clock::now()) {}
  void reset() { start_ = Clock::now(); }
  double seconds() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

 private:
  Clock::time_point start_;
};

/// Wall-clock deadline; an infinite budget never expires.
class Deadline {
 public:
  explicit Deadline(double budget_seconds = std::numeric_limits<double>::infinity())
      : budget_(budget_seconds) {}
  bool expired() const { return watch_.seconds() >= budget_; }
  double elapsed() const { return watch_.seconds(); }
  double remaining() const { return budget_ - watch_.seconds(); }
  double budget() const { return budget_; }

 private:
  Stopwatch watch_;
  double budget_;
};

}  // namespace qgal
