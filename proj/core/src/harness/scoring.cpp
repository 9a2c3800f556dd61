#include "qgal/harness/scoring.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

namespace qgal {
namespace fs = std::filesystem;

namespace {

struct Best {
  bool solved = false;
  double time = 0.0;
  Status status = Status::Unknown;
};

bool better(const Best& a, const Best& b) {
  if (a.solved != b.solved) return a.solved;
  if (a.time != b.time) return a.time < b.time;
  return a.status < b.status;
}

struct View {
  std::map<std::string, std::map<std::string, Best>> by_tool;  // tool -> instance -> best run
  std::map<std::string, std::string> family_of;
  std::map<std::string, std::size_t> solvers;  // instance -> number of tools solving it

  std::size_t instances() const { return family_of.size(); }
};

View make_view(const std::vector<RunRecord>& records, double limit) {
  View v;
  for (const auto& r : records) {
    auto [it, inserted] = v.family_of.emplace(r.instance, r.family);
    if (!inserted && r.family < it->second) it->second = r.family;
    Best b;
    b.status = r.status;
    b.solved = r.status != Status::Unknown && r.wall_s <= limit;
    b.time = std::min(r.wall_s, limit);
    auto& slot = v.by_tool[r.tool];
    auto found = slot.find(r.instance);
    if (found == slot.end())
      slot.emplace(r.instance, b);
    else if (better(b, found->second))
      found->second = b;
  }
  for (const auto& [tool, runs] : v.by_tool)
    for (const auto& [instance, b] : runs)
      if (b.solved) ++v.solvers[instance];
  return v;
}

std::vector<ScoreRow> score(const View& v, double limit) {
  std::vector<ScoreRow> rows;
  for (const auto& [tool, runs] : v.by_tool) {
    ScoreRow row;
    row.tool = tool;
    row.instances = v.instances();
    double sum = 0.0;
    for (const auto& [instance, b] : runs) {
      if (!b.solved) continue;
      ++row.solved;
      (b.status == Status::Sat ? row.sat : row.unsat) += 1;
      if (v.solvers.at(instance) == 1) ++row.unique;
      sum += b.time;
    }
    row.solved_time = sum;
    row.avg_solved_time = row.solved ? sum / static_cast<double>(row.solved) : 0.0;
    row.total_time = sum + limit * static_cast<double>(row.instances - row.solved);
    rows.push_back(std::move(row));
  }
  return rows;
}

double par_of(const ScoreRow& row, double k, double limit) {
  if (row.instances == 0) return 0.0;
  return (row.solved_time + k * limit * static_cast<double>(row.instances - row.solved)) /
         static_cast<double>(row.instances);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::set<std::string> instance_set(const std::vector<RunRecord>& records) {
  std::set<std::string> out;
  for (const auto& r : records) out.insert(r.instance);
  return out;
}

std::map<std::string, std::size_t> solved_counts(const std::vector<RunRecord>& records) {
  std::map<std::string, std::set<std::string>> solved;
  for (const auto& r : records) {
    auto& s = solved[r.tool];
    if (r.status != Status::Unknown) s.insert(r.instance);
  }
  std::map<std::string, std::size_t> out;
  for (const auto& [tool, s] : solved) out[tool] = s.size();
  return out;
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

std::vector<ScoreRow> rank_solved(const std::vector<RunRecord>& records, double limit) {
  auto rows = score(make_view(records, limit), limit);
  std::sort(rows.begin(), rows.end(), [](const ScoreRow& a, const ScoreRow& b) {
    if (a.solved != b.solved) return a.solved > b.solved;
    if (a.total_time != b.total_time) return a.total_time < b.total_time;
    return a.tool < b.tool;
  });
  return rows;
}

std::vector<ScoreRow> rank_par(const std::vector<RunRecord>& records, double k, double limit) {
  if (!(k >= 1.0)) throw HarnessError("PAR penalty factor must be at least 1");
  auto rows = score(make_view(records, limit), limit);
  for (auto& row : rows) row.par_k = par_of(row, k, limit);
  std::sort(rows.begin(), rows.end(), [](const ScoreRow& a, const ScoreRow& b) {
    if (*a.par_k != *b.par_k) return *a.par_k < *b.par_k;
    if (a.solved != b.solved) return a.solved > b.solved;
    return a.tool < b.tool;
  });
  return rows;
}

std::string display_kilo(double seconds) {
  if (seconds >= 1000.0) return std::to_string(std::llround(seconds / 1000.0)) + "K";
  return std::to_string(std::llround(seconds));
}

std::string_view to_string(FootCategory c) { return c == FootCategory::NoPrepro ? "NO" : "WANT"; }

std::vector<BestFootRow> best_foot(const std::vector<RunRecord>& original,
                                   const std::vector<RunRecord>& preprocessed) {
  auto a = instance_set(original), b = instance_set(preprocessed);
  if (a != b) {
    std::size_t only_a = 0, only_b = 0;
    for (const auto& i : a) only_a += !b.count(i);
    for (const auto& i : b) only_b += !a.count(i);
    throw HarnessError("instance sets differ: " + std::to_string(only_a) + " only in the original campaign, " +
                       std::to_string(only_b) + " only in the preprocessed one");
  }
  auto orig = solved_counts(original), prep = solved_counts(preprocessed);
  std::set<std::string> tools;
  for (const auto& [t, n] : orig) tools.insert(t);
  for (const auto& [t, n] : prep) tools.insert(t);
  std::vector<BestFootRow> rows;
  for (const auto& tool : tools) {
    BestFootRow row;
    row.tool = tool;
    row.original = orig.count(tool) ? orig[tool] : 0;
    row.preprocessed = prep.count(tool) ? prep[tool] : 0;
    row.category = row.original > row.preprocessed ? FootCategory::NoPrepro : FootCategory::WantPrepro;
    row.best_foot = std::max(row.original, row.preprocessed);
    row.worst_foot = std::min(row.original, row.preprocessed);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<Discrepancy> detect_discrepancies(const std::vector<RunRecord>& records, const Registry* registry) {
  std::map<std::string, std::set<std::pair<std::string, Status>>> reports;
  for (const auto& r : records)
    if (r.status != Status::Unknown) reports[r.instance].insert({r.tool, r.status});
  std::vector<Discrepancy> out;
  for (const auto& [instance, rs] : reports) {
    bool sat = false, unsat = false;
    for (const auto& [tool, status] : rs) (status == Status::Sat ? sat : unsat) = true;
    std::optional<Status> expected;
    if (registry)
      if (const auto* b = registry->find(instance)) expected = b->expected;
    bool conflict = sat && unsat;
    if (expected) conflict |= (*expected == Status::Sat && unsat) || (*expected == Status::Unsat && sat);
    if (!conflict) continue;
    out.push_back({instance, {rs.begin(), rs.end()}, expected});
  }
  return out;
}

TrialTable trial_table(const std::vector<RunRecord>& records, const std::vector<BenchmarkSet>& sets,
                       double limit, double k) {
  TrialTable table;
  std::set<std::string> tools;
  for (const auto& r : records) tools.insert(r.tool);
  table.tools.assign(tools.begin(), tools.end());
  table.cells.assign(table.tools.size(), std::vector<TrialCell>(sets.size()));
  std::vector<std::string> first_order;
  for (std::size_t t = 0; t < sets.size(); ++t) {
    table.seeds.push_back(sets[t].seed);
    std::set<std::string> members(sets[t].instance_ids.begin(), sets[t].instance_ids.end());
    std::vector<RunRecord> subset;
    for (const auto& r : records)
      if (members.count(r.instance)) subset.push_back(r);
    auto rows = rank_solved(subset, limit);
    std::vector<std::string> order;
    for (std::size_t rank = 0; rank < rows.size(); ++rank) {
      auto idx = static_cast<std::size_t>(
          std::lower_bound(table.tools.begin(), table.tools.end(), rows[rank].tool) - table.tools.begin());
      table.cells[idx][t] = {rank + 1, rows[rank].solved, par_of(rows[rank], k, limit)};
      order.push_back(rows[rank].tool);
    }
    if (t == 0)
      first_order = order;
    else if (order != first_order)
      table.stable_ranking = false;
  }
  return table;
}

void write_cactus_csv(std::ostream& out, const std::vector<RunRecord>& records, double limit) {
  out << "tool,rank,time_s\n";
  auto view = make_view(records, limit);
  for (const auto& [tool, runs] : view.by_tool) {
    std::vector<double> times;
    for (const auto& [instance, b] : runs)
      if (b.solved) times.push_back(b.time);
    std::sort(times.begin(), times.end());
    for (std::size_t i = 0; i < times.size(); ++i)
      out << csv_field(tool) << ',' << i + 1 << ',' << format_number(times[i]) << '\n';
  }
}

void write_family_csv(std::ostream& out, const std::vector<RunRecord>& records, double limit) {
  auto view = make_view(records, limit);
  std::map<std::string, std::size_t> sizes;
  for (const auto& [instance, family] : view.family_of) ++sizes[family];
  out << "tool";
  for (const auto& [family, size] : sizes) out << ',' << csv_field(family + " (" + std::to_string(size) + ")");
  out << '\n';
  for (const auto& [tool, runs] : view.by_tool) {
    std::map<std::string, std::size_t> solved;
    for (const auto& [instance, b] : runs)
      if (b.solved) ++solved[view.family_of.at(instance)];
    out << csv_field(tool);
    for (const auto& [family, size] : sizes) out << ',' << (solved.count(family) ? solved[family] : 0);
    out << '\n';
  }
}

void write_score_csv(std::ostream& out, const std::vector<ScoreRow>& rows) {
  out << "tool,solved,sat,unsat,unique,avg_s,total_s,total_display,par_k\n";
  for (const auto& r : rows) {
    out << csv_field(r.tool) << ',' << r.solved << ',' << r.sat << ',' << r.unsat << ',' << r.unique << ','
        << format_number(r.avg_solved_time) << ',' << format_number(r.total_time) << ','
        << display_kilo(r.total_time) << ',' << (r.par_k ? format_number(*r.par_k) : "") << '\n';
  }
}

void write_trial_csv(std::ostream& out, const TrialTable& table) {
  out << "tool,trial,seed,rank,solved,par_k\n";
  for (std::size_t i = 0; i < table.tools.size(); ++i)
    for (std::size_t t = 0; t < table.seeds.size(); ++t) {
      const auto& c = table.cells[i][t];
      out << csv_field(table.tools[i]) << ',' << t + 1 << ',' << table.seeds[t] << ',' << c.rank << ','
          << c.solved << ',' << format_number(c.par_k) << '\n';
    }
}

void emit_reports(const std::vector<RunRecord>& records, const fs::path& dir, double limit, double k) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw HarnessError("cannot write " + (dir / name).string());
    return f;
  };
  auto rows = rank_solved(records, limit);
  for (auto& row : rows) row.par_k = par_of(row, k, limit);
  {
    auto f = open("cactus.csv");
    write_cactus_csv(f, records, limit);
  }
  {
    auto f = open("families.csv");
    write_family_csv(f, records, limit);
  }
  {
    auto f = open("scores.csv");
    write_score_csv(f, rows);
    if (!f) throw HarnessError("cannot write " + (dir / "scores.csv").string());
  }
}

}  // namespace qgal
