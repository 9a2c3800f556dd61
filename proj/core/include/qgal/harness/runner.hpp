#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qgal/harness/registry.hpp"
#include "qgal/prepro/preprocessor.hpp"
#include "qgal/solver/outcome.hpp"

namespace qgal {

/// How a tool is run:
///   internal:search            QDPLL engine in process
///   internal:expansion         expansion engine in process
///   internal:prep-search:SEQ   pipeline SEQ (bundle letters), then search
///   cmd:<command>              external process; "{}" becomes the quoted
///                              instance path (appended when absent)
/// A "name=" prefix sets the tool id; otherwise the whole text is the id.
struct ToolSpec {
  enum class Kind { Search, Expansion, PreproSearch, Command };

  std::string id;
  Kind kind = Kind::Search;
  std::string sequence;  // PreproSearch
  std::string command;   // Command

  static ToolSpec parse(std::string_view text);
};

struct RunRecord {
  std::string tool;
  std::string instance;
  std::string family;
  Status status = Status::Unknown;
  double wall_s = 0.0;
  std::size_t mem_bytes = 0;
  int exit = 0;
  std::string trial;

  bool operator==(const RunRecord&) const = default;
};

std::string record_to_json(const RunRecord& r);
/// Throws HarnessError on malformed lines.
RunRecord record_from_json(std::string_view line);
/// Reads a JSONL record log. Blank lines are skipped; malformed lines (a
/// write cut short by a crash) are skipped and counted in `skipped`.
std::vector<RunRecord> read_record_log(const std::filesystem::path& path, std::size_t* skipped = nullptr);

struct RunOptions {
  double time_limit = 900.0;
  std::size_t memory_limit = std::size_t{7} << 30;
  unsigned jobs = 1;
  std::string trial;
  std::optional<std::filesystem::path> log;  // appended to, one JSON object per run
  bool resume = true;  // skip (tool, instance, trial) triples already in the log
  std::map<std::string, ToolBundle> bundles = default_bundles();  // for prep-search
  double per_call_limit = 120.0;                                   // for prep-search
  int max_rounds = 6;                                              // for prep-search
};

/// Runs every tool on every instance of `instance_ids` with a pool of
/// `jobs` workers. Returns records sorted by (tool, instance), including
/// those recovered from the log. Failures of single runs are recorded as
/// UNKNOWN; only unknown instance ids or unusable tool specs throw.
std::vector<RunRecord> execute_runs(const Registry& registry, const std::vector<std::string>& instance_ids,
                                    const std::vector<ToolSpec>& tools, const RunOptions& options = {});

/// Runs one tool on one instance without logging.
RunRecord run_one(const BenchmarkInstance& instance, const ToolSpec& tool, const RunOptions& options);

/// Parses "7G", "512M", "64K" or a plain byte count.
std::size_t parse_memory_size(std::string_view text);

}  // namespace qgal
