#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qgal/harness/registry.hpp"
#include "qgal/harness/runner.hpp"

namespace qgal {

// A run counts as solved when it reports SAT or UNSAT within the limit.
// The instance set of a campaign is every instance that appears in the
// records; a tool without a record for an instance did not solve it. When a
// tool has several records for one instance the best one is used.

struct ScoreRow {
  std::string tool;
  std::size_t instances = 0;
  std::size_t solved = 0;
  std::size_t sat = 0;
  std::size_t unsat = 0;
  std::size_t unique = 0;        // solved by this tool and no other
  double solved_time = 0.0;      // sum over solved runs
  double avg_solved_time = 0.0;  // over solved runs only
  double total_time = 0.0;       // solved times plus limit per unsolved instance
  std::optional<double> par_k;
};

/// Sorted by solved (descending), total time, tool id.
std::vector<ScoreRow> rank_solved(const std::vector<RunRecord>& records, double limit);

/// par_k = (sum of solved times + k * limit * unsolved) / instances, sorted
/// ascending, then by solved (descending) and tool id. Throws HarnessError
/// for k < 1.
std::vector<ScoreRow> rank_par(const std::vector<RunRecord>& records, double k, double limit);

/// Thousands of seconds rounded to the nearest integer with a "K" suffix,
/// e.g. 245281 -> "245K"; values below 1000 print as whole seconds.
std::string display_kilo(double seconds);

enum class FootCategory : std::uint8_t { NoPrepro, WantPrepro };

std::string_view to_string(FootCategory c);

struct BestFootRow {
  std::string tool;
  FootCategory category = FootCategory::WantPrepro;
  std::size_t original = 0;      // solved on the original instances
  std::size_t preprocessed = 0;  // solved on the preprocessed instances
  std::size_t best_foot = 0;
  std::size_t worst_foot = 0;
};

/// Per tool: the campaign where it solved more decides the category; ties go
/// to WantPrepro. Throws HarnessError when the two campaigns cover different
/// instance sets.
std::vector<BestFootRow> best_foot(const std::vector<RunRecord>& original,
                                   const std::vector<RunRecord>& preprocessed);

struct Discrepancy {
  std::string instance;
  std::vector<std::pair<std::string, Status>> reports;  // solved reports, by tool
  std::optional<Status> expected;
};

/// Instances with both SAT and UNSAT reports, or with a report contradicting
/// the expected status from the registry. UNKNOWN never conflicts.
std::vector<Discrepancy> detect_discrepancies(const std::vector<RunRecord>& records,
                                              const Registry* registry = nullptr);

struct TrialCell {
  std::size_t rank = 0;  // 1-based, by rank_solved
  std::size_t solved = 0;
  double par_k = 0.0;
};

struct TrialTable {
  std::vector<std::string> tools;  // sorted
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<TrialCell>> cells;  // [tool][trial]
  bool stable_ranking = true;                 // same order in every trial
};

/// Scores each sampled set separately on the records of its instances.
TrialTable trial_table(const std::vector<RunRecord>& records, const std::vector<BenchmarkSet>& sets,
                       double limit, double k = 10.0);

// CSV output. Numbers use the shortest round-trip decimal form.
void write_cactus_csv(std::ostream& out, const std::vector<RunRecord>& records, double limit);
void write_family_csv(std::ostream& out, const std::vector<RunRecord>& records, double limit);
void write_score_csv(std::ostream& out, const std::vector<ScoreRow>& rows);
void write_trial_csv(std::ostream& out, const TrialTable& table);

/// Writes cactus.csv, families.csv and scores.csv (rank_solved order with
/// PAR-k filled in) into `dir`, creating it if needed.
void emit_reports(const std::vector<RunRecord>& records, const std::filesystem::path& dir, double limit,
                  double k = 10.0);

std::string format_number(double value);

}  // namespace qgal
