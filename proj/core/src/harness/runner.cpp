#include "qgal/harness/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "qgal/pipeline/pipeline.hpp"
#include "qgal/qdimacs.hpp"
#include "qgal/solver/expansion.hpp"
#include "qgal/solver/qdpll.hpp"
#include "qgal/util/subprocess.hpp"
#include "qgal/util/timer.hpp"

namespace qgal {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string substitute_path(const std::string& command, const fs::path& path) {
  const std::string quoted = shell_quote(path.string());
  std::string out;
  bool replaced = false;
  for (std::size_t i = 0; i < command.size(); ++i) {
    if (command.compare(i, 2, "{}") == 0) {
      out += quoted;
      ++i;
      replaced = true;
    } else {
      out += command[i];
    }
  }
  if (!replaced) out += " " + quoted;
  return out;
}

// QDIMACS solver output: "s cnf 1 ..." for true, "s cnf 0 ..." for false.
Status status_from_output(const std::string& text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    if (line.rfind("s cnf ", 0) == 0 && line.size() > 6) {
      if (line[6] == '1') return Status::Sat;
      if (line[6] == '0') return Status::Unsat;
    }
    pos = end + 1;
  }
  return Status::Unknown;
}

RunRecord run_command(const BenchmarkInstance& instance, const ToolSpec& tool, const RunOptions& options,
                      RunRecord rec) {
  ProcessOptions po;
  po.time_limit = options.time_limit;
  po.memory_limit = options.memory_limit;
  ProcessResult p;
  try {
    p = run_process(substitute_path(tool.command, instance.path), po);
  } catch (const std::exception&) {
    rec.exit = -1;
    return rec;
  }
  rec.wall_s = p.wall_seconds;
  rec.mem_bytes = p.peak_memory;
  rec.exit = p.exit_code;
  if (p.exited_normally()) {
    rec.status = status_from_exit_code(p.exit_code);
    if (rec.status == Status::Unknown) rec.status = status_from_output(p.stdout_data);
  }
  return rec;
}

RunRecord run_internal(const BenchmarkInstance& instance, const ToolSpec& tool, const RunOptions& options,
                       RunRecord rec) {
  Stopwatch watch;
  try {
    Pcnf f = read_qdimacs_file(instance.path, ParseOptions{false});
    Limits limits{options.time_limit, options.memory_limit};
    SolveOutcome out;
    switch (tool.kind) {
      case ToolSpec::Kind::Search: {
        QdpllSolver solver(f);
        out = solver.solve(limits);
        rec.mem_bytes = solver.stats().peak_memory;
        break;
      }
      case ToolSpec::Kind::Expansion: {
        ExpansionStats stats;
        out = solve_expansion(f, limits, &stats);
        rec.mem_bytes = stats.peak_memory;
        break;
      }
      case ToolSpec::Kind::PreproSearch: {
        auto seq = ExecutionSequence::parse(tool.sequence, options.max_rounds, options.per_call_limit);
        seq.total_limit = options.time_limit;
        auto pipe = run_sequence(f, seq, options.bundles);
        if (pipe.kind == PipelineKind::SolvedSat || pipe.kind == PipelineKind::SolvedUnsat) {
          out.status = pipe.kind == PipelineKind::SolvedSat ? Status::Sat : Status::Unsat;
          break;
        }
        limits.time_seconds = std::max(0.0, options.time_limit - watch.seconds());
        QdpllSolver solver(pipe.formula);
        out = solver.solve(limits);
        rec.mem_bytes = solver.stats().peak_memory;
        break;
      }
      case ToolSpec::Kind::Command:
        break;
    }
    rec.status = out.status;
    rec.exit = exit_code(out.status);
  } catch (const std::exception&) {
    rec.status = Status::Unknown;
    rec.exit = -1;
  }
  rec.wall_s = watch.seconds();
  return rec;
}

using Key = std::tuple<std::string, std::string, std::string>;

Key key_of(const RunRecord& r) { return {r.tool, r.instance, r.trial}; }

}  // namespace

ToolSpec ToolSpec::parse(std::string_view text) {
  ToolSpec spec;
  std::string_view body = text;
  auto eq = text.find('=');
  auto colon = text.find(':');
  if (eq != std::string_view::npos && (colon == std::string_view::npos || eq < colon)) {
    spec.id = std::string(text.substr(0, eq));
    body = text.substr(eq + 1);
    if (spec.id.empty()) throw HarnessError("empty tool name in '" + std::string(text) + "'");
  }
  if (body == "internal:search") {
    spec.kind = Kind::Search;
  } else if (body == "internal:expansion") {
    spec.kind = Kind::Expansion;
  } else if (body.rfind("internal:prep-search:", 0) == 0) {
    spec.kind = Kind::PreproSearch;
    spec.sequence = std::string(body.substr(21));
    if (spec.sequence.empty()) throw HarnessError("prep-search needs a sequence: '" + std::string(text) + "'");
  } else if (body.rfind("cmd:", 0) == 0) {
    spec.kind = Kind::Command;
    spec.command = std::string(body.substr(4));
    if (spec.command.find_first_not_of(" \t") == std::string::npos)
      throw HarnessError("empty command in '" + std::string(text) + "'");
  } else {
    throw HarnessError("unknown tool spec '" + std::string(text) + "'");
  }
  if (spec.id.empty()) spec.id = std::string(body);
  return spec;
}

std::string record_to_json(const RunRecord& r) {
  ordered_json j;
  j["tool"] = r.tool;
  j["instance"] = r.instance;
  j["family"] = r.family;
  j["status"] = std::string(to_string(r.status));
  j["wall_s"] = r.wall_s;
  j["mem_bytes"] = r.mem_bytes;
  j["exit"] = r.exit;
  j["trial"] = r.trial;
  return j.dump();
}

RunRecord record_from_json(std::string_view line) {
  try {
    auto j = ordered_json::parse(line);
    RunRecord r;
    r.tool = j.at("tool");
    r.instance = j.at("instance");
    r.family = j.at("family");
    r.status = parse_status(j.at("status").get<std::string>());
    r.wall_s = j.at("wall_s");
    r.mem_bytes = j.at("mem_bytes");
    r.exit = j.at("exit");
    r.trial = j.at("trial");
    return r;
  } catch (const std::exception& e) {
    throw HarnessError(std::string("bad run record: ") + e.what());
  }
}

std::vector<RunRecord> read_record_log(const fs::path& path, std::size_t* skipped) {
  std::ifstream in(path);
  if (!in) throw HarnessError("cannot open record log " + path.string());
  std::vector<RunRecord> records;
  std::size_t bad = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(record_from_json(line));
    } catch (const HarnessError&) {
      ++bad;
    }
  }
  if (skipped) *skipped = bad;
  return records;
}

RunRecord run_one(const BenchmarkInstance& instance, const ToolSpec& tool, const RunOptions& options) {
  RunRecord rec;
  rec.tool = tool.id;
  rec.instance = instance.id;
  rec.family = instance.family;
  rec.trial = options.trial;
  if (tool.kind == ToolSpec::Kind::Command) return run_command(instance, tool, options, std::move(rec));
  return run_internal(instance, tool, options, std::move(rec));
}

std::vector<RunRecord> execute_runs(const Registry& registry, const std::vector<std::string>& instance_ids,
                                    const std::vector<ToolSpec>& tools, const RunOptions& options) {
  std::vector<const BenchmarkInstance*> instances;
  for (const auto& id : instance_ids) {
    const auto* b = registry.find(id);
    if (b == nullptr) throw HarnessError("instance '" + id + "' is not registered");
    instances.push_back(b);
  }
  std::set<std::string> tool_ids;
  for (const auto& t : tools)
    if (!tool_ids.insert(t.id).second) throw HarnessError("duplicate tool id '" + t.id + "'");
  for (const auto& t : tools)
    if (t.kind == ToolSpec::Kind::PreproSearch)
      for (const auto& label : ExecutionSequence::parse(t.sequence).steps)
        if (!options.bundles.count(label)) throw HarnessError("tool '" + t.id + "': unknown bundle '" + label + "'");

  std::set<std::string> wanted(instance_ids.begin(), instance_ids.end());
  std::vector<RunRecord> results;
  std::set<Key> done;
  if (options.log && options.resume && fs::exists(*options.log)) {
    for (auto& r : read_record_log(*options.log)) {
      if (!tool_ids.count(r.tool) || !wanted.count(r.instance) || r.trial != options.trial) continue;
      if (done.insert(key_of(r)).second) results.push_back(std::move(r));
    }
  }

  struct Task {
    const BenchmarkInstance* instance;
    const ToolSpec* tool;
  };
  std::vector<Task> tasks;
  for (const auto& t : tools)
    for (const auto* b : instances)
      if (!done.count(Key{t.id, b->id, options.trial})) {
        done.insert(Key{t.id, b->id, options.trial});
        tasks.push_back({b, &t});
      }

  std::ofstream log;
  if (options.log) {
    bool needs_newline = false;
    if (options.resume && fs::exists(*options.log) && fs::file_size(*options.log) > 0) {
      std::ifstream tail(*options.log, std::ios::binary);
      tail.seekg(-1, std::ios::end);
      needs_newline = tail.get() != '\n';
    }
    log.open(*options.log, options.resume ? std::ios::app : std::ios::trunc);
    if (!log) throw HarnessError("cannot write record log " + options.log->string());
    if (needs_newline) log << '\n';
  }
  std::mutex writer;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) {
      RunRecord rec = run_one(*tasks[i].instance, *tasks[i].tool, options);
      std::lock_guard lock(writer);
      if (log.is_open()) log << record_to_json(rec) << '\n' << std::flush;
      results.push_back(std::move(rec));
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(tasks.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::sort(results.begin(), results.end(),
            [](const RunRecord& a, const RunRecord& b) { return key_of(a) < key_of(b); });
  return results;
}

std::size_t parse_memory_size(std::string_view text) {
  if (text.empty()) throw HarnessError("empty memory size");
  std::size_t i = 0;
  bool digits = false;
  std::string number;
  while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) {
    number += text[i++];
    digits = true;
  }
  if (!digits) throw HarnessError("bad memory size '" + std::string(text) + "'");
  const double value = std::stod(number);
  std::string unit(text.substr(i));
  for (auto& c : unit) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (unit.size() > 1 && (unit.back() == 'B')) unit.pop_back();
  double scale = 1;
  if (unit.empty() || unit == "B")
    scale = 1;
  else if (unit == "K")
    scale = 1024.0;
  else if (unit == "M")
    scale = 1024.0 * 1024;
  else if (unit == "G")
    scale = 1024.0 * 1024 * 1024;
  else
    throw HarnessError("bad memory unit in '" + std::string(text) + "'");
  return static_cast<std::size_t>(value * scale);
}

}  // namespace qgal
