#include "qgal/util/subprocess.hpp"

#include <dirent.h>
#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <system_error>
#include <vector>

#include "qgal/util/timer.hpp"

namespace qgal {
namespace {

[[noreturn]] void fail(const char* what) { throw std::system_error(errno, std::generic_category(), what); }

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

void set_nonblocking(int fd) { ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK); }

// Resident bytes summed over every process in group `pgid`.
std::size_t group_rss(pid_t pgid) {
  static const long page = ::sysconf(_SC_PAGESIZE);
  std::size_t total = 0;
  DIR* proc = ::opendir("/proc");
  if (proc == nullptr) return 0;
  while (dirent* entry = ::readdir(proc)) {
    const char* name = entry->d_name;
    if (name[0] < '0' || name[0] > '9') continue;
    std::string base = std::string("/proc/") + name;
    std::ifstream stat(base + "/stat");
    std::string line;
    if (!std::getline(stat, line)) continue;
    auto close_paren = line.rfind(')');
    if (close_paren == std::string::npos) continue;
    char state = 0;
    long ppid = 0, group = 0;
    if (std::sscanf(line.c_str() + close_paren + 1, " %c %ld %ld", &state, &ppid, &group) != 3) continue;
    if (group != pgid || state == 'Z') continue;
    std::ifstream statm(base + "/statm");
    std::size_t size = 0, resident = 0;
    if (statm >> size >> resident) total += resident * static_cast<std::size_t>(page);
  }
  ::closedir(proc);
  return total;
}

// Writes with SIGPIPE blocked so a reader that exits early only yields EPIPE.
ssize_t write_quietly(int fd, const char* data, std::size_t size) {
  sigset_t pipe_set, old;
  sigemptyset(&pipe_set);
  sigaddset(&pipe_set, SIGPIPE);
  ::pthread_sigmask(SIG_BLOCK, &pipe_set, &old);
  ssize_t n = ::write(fd, data, size);
  int saved = errno;
  if (n < 0 && saved == EPIPE) {
    timespec zero{0, 0};
    ::sigtimedwait(&pipe_set, nullptr, &zero);
  }
  ::pthread_sigmask(SIG_SETMASK, &old, nullptr);
  errno = saved;
  return n;
}

}  // namespace

std::string shell_quote(const std::string& text) {
  std::string out = "'";
  for (char c : text) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  return out + "'";
}

ProcessResult run_process(const std::string& command, const ProcessOptions& options) {
  int in[2], out[2], err[2];
  if (::pipe2(in, O_CLOEXEC) != 0) fail("pipe");
  if (::pipe2(out, O_CLOEXEC) != 0) {
    ::close(in[0]);
    ::close(in[1]);
    fail("pipe");
  }
  if (::pipe2(err, O_CLOEXEC) != 0) {
    for (int fd : {in[0], in[1], out[0], out[1]}) ::close(fd);
    fail("pipe");
  }

  Stopwatch watch;
  pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in[0], in[1], out[0], out[1], err[0], err[1]}) ::close(fd);
    fail("fork");
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(in[0], 0);
    ::dup2(out[1], 1);
    ::dup2(err[1], 2);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);  // also done by the child; whichever runs first wins

  int to_child = in[1], from_out = out[0], from_err = err[0];
  ::close(in[0]);
  ::close(out[1]);
  ::close(err[1]);
  set_nonblocking(to_child);
  set_nonblocking(from_out);
  set_nonblocking(from_err);

  ProcessResult result;
  std::size_t written = 0;
  if (options.stdin_data.empty()) close_fd(to_child);

  bool reaped = false, killed = false;
  int status = 0;
  rusage usage{};
  double last_sample = -1.0;
  const int poll_ms = std::max(1, static_cast<int>(options.poll_interval * 1000));
  char buffer[65536];

  auto kill_group = [&] {
    ::kill(-pid, SIGKILL);
    killed = true;
  };

  while (!reaped || from_out >= 0 || from_err >= 0) {
    std::vector<pollfd> fds;
    if (to_child >= 0) fds.push_back({to_child, POLLOUT, 0});
    if (from_out >= 0) fds.push_back({from_out, POLLIN, 0});
    if (from_err >= 0) fds.push_back({from_err, POLLIN, 0});
    if (!fds.empty()) {
      ::poll(fds.data(), fds.size(), reaped ? 0 : poll_ms);
    } else if (!reaped) {
      ::usleep(static_cast<useconds_t>(poll_ms) * 1000);
    }

    for (const auto& p : fds) {
      if (p.revents == 0) continue;
      if (p.fd == to_child) {
        ssize_t n = write_quietly(to_child, options.stdin_data.data() + written,
                                  options.stdin_data.size() - written);
        if (n > 0) written += static_cast<std::size_t>(n);
        if ((n < 0 && errno != EAGAIN && errno != EINTR) || written == options.stdin_data.size())
          close_fd(to_child);
      } else {
        int& fd = p.fd == from_out ? from_out : from_err;
        std::string& sink = p.fd == from_out ? result.stdout_data : result.stderr_data;
        for (;;) {
          ssize_t n = ::read(fd, buffer, sizeof buffer);
          if (n > 0) {
            sink.append(buffer, static_cast<std::size_t>(n));
            continue;
          }
          if (n == 0 || (errno != EAGAIN && errno != EINTR)) close_fd(fd);
          break;
        }
      }
    }

    if (!reaped) {
      pid_t r = ::wait4(pid, &status, WNOHANG, &usage);
      if (r == pid) {
        reaped = true;
        result.wall_seconds = watch.seconds();
        // Stragglers that kept the pipes open would block the drain forever.
        ::kill(-pid, SIGKILL);
        continue;
      }
      const double now = watch.seconds();
      if (!killed && now - last_sample >= options.poll_interval) {
        last_sample = now;
        result.peak_memory = std::max(result.peak_memory, group_rss(pid));
        if (options.memory_limit > 0 && result.peak_memory > options.memory_limit) {
          result.memout = true;
          kill_group();
        }
      }
      if (!killed && now >= options.time_limit) {
        result.timed_out = true;
        kill_group();
      }
    } else {
      // Child is gone: take whatever is already buffered, then stop.
      close_fd(to_child);
      if (from_out >= 0 || from_err >= 0) {
        for (int* fd : {&from_out, &from_err}) {
          if (*fd < 0) continue;
          std::string& sink = fd == &from_out ? result.stdout_data : result.stderr_data;
          ssize_t n;
          while ((n = ::read(*fd, buffer, sizeof buffer)) > 0) sink.append(buffer, static_cast<std::size_t>(n));
          close_fd(*fd);
        }
      }
    }
  }
  close_fd(to_child);

  result.peak_memory = std::max(result.peak_memory, static_cast<std::size_t>(usage.ru_maxrss) * 1024);
  result.cpu_seconds = static_cast<double>(usage.ru_utime.tv_sec + usage.ru_stime.tv_sec) +
                       static_cast<double>(usage.ru_utime.tv_usec + usage.ru_stime.tv_usec) * 1e-6;
  if (WIFEXITED(status) && !killed) result.exit_code = WEXITSTATUS(status);
  if (WIFSIGNALED(status)) result.signal = WTERMSIG(status);
  return result;
}

}  // namespace qgal
