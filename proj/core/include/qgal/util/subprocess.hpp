#pragma once

#include <cstddef>
#include <limits>
#include <string>

namespace qgal {

struct ProcessOptions {
  double time_limit = std::numeric_limits<double>::infinity();  // wall-clock seconds
  std::size_t memory_limit = 0;  // peak resident bytes over the process tree; 0 = none
  std::string stdin_data;
  double poll_interval = 0.01;  // seconds between memory samples
};

struct ProcessResult {
  int exit_code = -1;  // -1 unless the process exited normally
  int signal = 0;      // terminating signal, if any
  bool timed_out = false;
  bool memout = false;
  double wall_seconds = 0.0;
  double cpu_seconds = 0.0;  // user + system of the reaped tree
  std::size_t peak_memory = 0;
  std::string stdout_data;
  std::string stderr_data;

  bool exited_normally() const { return exit_code >= 0 && !timed_out && !memout; }
};

/// Runs `command` through /bin/sh in its own process group. The whole group
/// is killed with SIGKILL when the time or memory limit is exceeded.
/// Throws std::system_error if the process cannot be started.
ProcessResult run_process(const std::string& command, const ProcessOptions& options = {});

/// Single-quotes a string for /bin/sh.
std::string shell_quote(const std::string& text);

}  // namespace qgal
