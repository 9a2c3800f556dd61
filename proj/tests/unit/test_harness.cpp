#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "qgal/harness/registry.hpp"
#include "qgal/harness/runner.hpp"
#include "qgal/harness/scoring.hpp"

using namespace qgal;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("qgal_harness_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

const char* kTrue = "p cnf 1 1\ne 1 0\n1 0\n";
const char* kFalse = "p cnf 1 1\na 1 0\n1 0\n";
const char* kMixed = "p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n-1 -2 0\n";

RunRecord rec(std::string tool, std::string instance, Status status, double wall, std::string family = "f") {
  RunRecord r;
  r.tool = std::move(tool);
  r.instance = std::move(instance);
  r.family = std::move(family);
  r.status = status;
  r.wall_s = wall;
  r.exit = exit_code(status);
  return r;
}

// Synthetic campaign: `solved` of `n` instances solved at `avg` seconds.
std::vector<RunRecord> campaign(const std::string& tool, int n, int solved, double avg, double limit) {
  std::vector<RunRecord> out;
  for (int i = 0; i < n; ++i)
    out.push_back(i < solved ? rec(tool, "i" + std::to_string(i), Status::Sat, avg)
                             : rec(tool, "i" + std::to_string(i), Status::Unknown, limit));
  return out;
}

Registry registry_with_families(const std::vector<std::size_t>& sizes) {
  Registry reg;
  for (std::size_t f = 0; f < sizes.size(); ++f)
    for (std::size_t i = 0; i < sizes[f]; ++i) {
      BenchmarkInstance b;
      b.family = "fam" + std::to_string(f);
      b.id = b.family + "/" + std::to_string(100 + i) + ".qdimacs";
      reg.instances.push_back(b);
    }
  std::sort(reg.instances.begin(), reg.instances.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  return reg;
}

}  // namespace

TEST(Registry, FamiliesFromDirectories) {
  TempDir dir;
  write_file(dir.path() / "fam1/a.qdimacs", kTrue);
  write_file(dir.path() / "fam1/b.qdimacs", kMixed);
  write_file(dir.path() / "fam2/c.qdimacs", kFalse);
  auto reg = register_benchmarks(dir.path());
  ASSERT_EQ(reg.instances.size(), 3u);
  EXPECT_EQ(reg.families().size(), 2u);
  EXPECT_EQ(reg.find("fam2/c.qdimacs")->family, "fam2");
  EXPECT_TRUE(reg.rejected.empty());
  EXPECT_TRUE(reg.duplicates.empty());
  EXPECT_EQ(reg.find("fam1/b.qdimacs")->stats.num_clauses, 2u);
}

TEST(Registry, DuplicatesRejectsAndManifest) {
  TempDir dir;
  write_file(dir.path() / "x/a.qdimacs", kTrue);
  write_file(dir.path() / "y/b.qdimacs", "c same formula\np cnf 1 1\ne 1 0\n1 0\n");
  write_file(dir.path() / "y/broken.qdimacs", "p cnf 1 1\ne 1 0\n1 x 0\n");
  write_file(dir.path() / ".hidden/z.qdimacs", kTrue);
  write_file(dir.path() / "manifest.tsv", "x/a.qdimacs\tspecial\tSAT\n");
  RegisterOptions opts;
  opts.manifest = dir.path() / "manifest.tsv";
  auto reg = register_benchmarks(dir.path(), opts);
  ASSERT_EQ(reg.instances.size(), 2u);
  ASSERT_EQ(reg.rejected.size(), 1u);
  EXPECT_EQ(reg.rejected[0].path.filename(), "broken.qdimacs");
  ASSERT_EQ(reg.duplicates.size(), 1u);
  EXPECT_EQ(reg.duplicates[0], (std::vector<std::string>{"x/a.qdimacs", "y/b.qdimacs"}));
  EXPECT_EQ(reg.find("x/a.qdimacs")->family, "special");
  EXPECT_EQ(reg.find("x/a.qdimacs")->expected, Status::Sat);

  save_registry(reg, dir.path() / "reg.json");
  auto back = load_registry(dir.path() / "reg.json");
  ASSERT_EQ(back.instances.size(), 2u);
  EXPECT_EQ(back.instances[0].digest, reg.instances[0].digest);
  EXPECT_EQ(back.instances[0].expected, Status::Sat);
  EXPECT_EQ(back.duplicates, reg.duplicates);
  EXPECT_EQ(back.rejected.size(), 1u);
}

TEST(Registry, EmptyDirectoryWarns) {
  TempDir dir;
  auto reg = register_benchmarks(dir.path());
  EXPECT_TRUE(reg.instances.empty());
  EXPECT_FALSE(reg.warnings.empty());
  EXPECT_THROW(register_benchmarks(dir.path() / "missing"), HarnessError);
}

TEST(Sampling, PerFamilyCounts) {
  auto reg = registry_with_families({10, 8, 6, 4});
  auto set = stratified_sample(reg, 6, 1);
  std::map<std::string, int> per;
  for (const auto& id : set.instance_ids) ++per[reg.find(id)->family];
  EXPECT_EQ(per, (std::map<std::string, int>{{"fam0", 6}, {"fam1", 6}, {"fam2", 6}, {"fam3", 4}}));
  EXPECT_EQ(set.instance_ids.size(), 22u);
  std::set<std::string> unique(set.instance_ids.begin(), set.instance_ids.end());
  EXPECT_EQ(unique.size(), set.instance_ids.size());
}

TEST(Sampling, DeterministicPerSeed) {
  auto reg = registry_with_families({10, 8, 6});
  EXPECT_EQ(stratified_sample(reg, 6, 42).instance_ids, stratified_sample(reg, 6, 42).instance_ids);
  bool differs = false;
  for (std::uint64_t s = 1; s < 5; ++s)
    differs |= stratified_sample(reg, 6, 42).instance_ids != stratified_sample(reg, 6, 42 + s).instance_ids;
  EXPECT_TRUE(differs);
  EXPECT_THROW(stratified_sample(reg, 0, 1), HarnessError);
}

TEST(Sampling, RoughlyUniform) {
  auto reg = registry_with_families({10});
  std::map<std::string, int> hits;
  for (std::uint64_t s = 0; s < 2000; ++s)
    for (const auto& id : stratified_sample(reg, 3, s).instance_ids) ++hits[id];
  for (const auto& [id, n] : hits) {
    EXPECT_GT(n, 500) << id;  // expected 600
    EXPECT_LT(n, 700) << id;
  }
}

TEST(Sampling, SetsRoundTrip) {
  TempDir dir;
  auto reg = registry_with_families({5, 3});
  auto sets = sample_trials(reg, 2, 9, 7);
  ASSERT_EQ(sets.size(), 7u);
  save_sets(sets, dir.path() / "sets.json");
  auto back = load_sets(dir.path() / "sets.json");
  ASSERT_EQ(back.size(), 7u);
  EXPECT_EQ(back[3].seed, 12u);
  EXPECT_EQ(back[3].instance_ids, sets[3].instance_ids);
}

TEST(Runner, ToolSpecs) {
  EXPECT_EQ(ToolSpec::parse("internal:search").kind, ToolSpec::Kind::Search);
  auto p = ToolSpec::parse("pre=internal:prep-search:ABCD");
  EXPECT_EQ(p.id, "pre");
  EXPECT_EQ(p.kind, ToolSpec::Kind::PreproSearch);
  EXPECT_EQ(p.sequence, "ABCD");
  auto c = ToolSpec::parse("cmd:solver --opt=1 {}");
  EXPECT_EQ(c.kind, ToolSpec::Kind::Command);
  EXPECT_EQ(c.id, "cmd:solver --opt=1 {}");
  EXPECT_EQ(c.command, "solver --opt=1 {}");
  EXPECT_THROW(ToolSpec::parse("internal:magic"), HarnessError);
  EXPECT_THROW(ToolSpec::parse("cmd:"), HarnessError);
  EXPECT_THROW(ToolSpec::parse("=internal:search"), HarnessError);
}

TEST(Runner, MemorySizes) {
  EXPECT_EQ(parse_memory_size("7G"), std::size_t{7} << 30);
  EXPECT_EQ(parse_memory_size("512M"), std::size_t{512} << 20);
  EXPECT_EQ(parse_memory_size("64kb"), std::size_t{64} << 10);
  EXPECT_EQ(parse_memory_size("1000"), 1000u);
  EXPECT_THROW(parse_memory_size("lots"), HarnessError);
  EXPECT_THROW(parse_memory_size("3T"), HarnessError);
}

TEST(Runner, RecordJsonRoundTrip) {
  auto r = rec("t", "fam/x.qdimacs", Status::Unsat, 1.25);
  r.mem_bytes = 1234;
  r.trial = "3";
  auto line = record_to_json(r);
  EXPECT_EQ(line.find("{\"tool\""), 0u);
  EXPECT_EQ(record_from_json(line), r);
  EXPECT_THROW(record_from_json("{\"tool\":1}"), HarnessError);
}

TEST(Runner, InternalAndExternalTools) {
  TempDir dir;
  write_file(dir.path() / "b/t.qdimacs", kTrue);
  write_file(dir.path() / "b/f.qdimacs", kFalse);
  write_file(dir.path() / "b/m.qdimacs", kMixed);
  auto reg = register_benchmarks(dir.path());
  std::vector<std::string> ids;
  for (const auto& b : reg.instances) ids.push_back(b.id);

  std::vector<ToolSpec> tools = {ToolSpec::parse("internal:search"), ToolSpec::parse("internal:expansion"),
                                 ToolSpec::parse("internal:prep-search:ABCD"),
                                 ToolSpec::parse("says-unsat=cmd:cat {} >/dev/null; exit 20"),
                                 ToolSpec::parse("prints=cmd:cat >/dev/null; echo 's cnf 1 1 1'")};
  RunOptions opts;
  opts.time_limit = 10;
  opts.jobs = 2;
  auto records = execute_runs(reg, ids, tools, opts);
  ASSERT_EQ(records.size(), 15u);
  for (const auto& r : records) {
    if (r.tool == "says-unsat") {
      EXPECT_EQ(r.status, Status::Unsat);
      EXPECT_EQ(r.exit, 20);
    } else if (r.tool == "prints") {
      EXPECT_EQ(r.status, Status::Sat);
    } else {
      Status want = r.instance == "b/f.qdimacs" ? Status::Unsat : Status::Sat;
      EXPECT_EQ(r.status, want) << r.tool << " " << r.instance;
      EXPECT_EQ(r.exit, exit_code(want));
    }
    EXPECT_EQ(r.family, "b");
  }
}

TEST(Runner, TimeoutIsUnknownAtTheLimit) {
  TempDir dir;
  write_file(dir.path() / "b/t.qdimacs", kTrue);
  auto reg = register_benchmarks(dir.path());
  RunOptions opts;
  opts.time_limit = 0.4;
  auto records = execute_runs(reg, {"b/t.qdimacs"}, {ToolSpec::parse("slow=cmd:sleep 5; exit 10")}, opts);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].status, Status::Unknown);
  EXPECT_GE(records[0].wall_s, 0.4);
  EXPECT_LT(records[0].wall_s, 2.0);
}

TEST(Runner, ResumeSkipsLoggedRuns) {
  TempDir dir;
  write_file(dir.path() / "b/t.qdimacs", kTrue);
  write_file(dir.path() / "b/f.qdimacs", kFalse);
  auto reg = register_benchmarks(dir.path());
  RunOptions opts;
  opts.log = dir.path() / "runs.jsonl";
  opts.trial = "1";
  auto marker = dir.path() / "count";
  auto tool = ToolSpec::parse("counting=cmd:echo x >> " + marker.string() + "; exit 10");
  auto first = execute_runs(reg, {"b/f.qdimacs"}, {tool}, opts);
  ASSERT_EQ(first.size(), 1u);
  // Simulate a crash in the middle of a write.
  std::ofstream(*opts.log, std::ios::app) << "{\"tool\":\"coun";
  auto second = execute_runs(reg, {"b/f.qdimacs", "b/t.qdimacs"}, {tool}, opts);
  ASSERT_EQ(second.size(), 2u);
  std::ifstream count(marker);
  int lines = 0;
  for (std::string l; std::getline(count, l);) ++lines;
  EXPECT_EQ(lines, 2);
  std::size_t skipped = 0;
  EXPECT_EQ(read_record_log(*opts.log, &skipped).size(), 2u);
  EXPECT_EQ(skipped, 1u);
  EXPECT_THROW(execute_runs(reg, {"nope"}, {tool}, opts), HarnessError);
}

TEST(Scoring, TotalTimeArithmetic) {
  auto a = rank_solved(campaign("Nenofex", 345, 77, 53, 900), 900);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].total_time, 245281.0);
  EXPECT_EQ(display_kilo(a[0].total_time), "245K");
  EXPECT_EQ(a[0].avg_solved_time, 53.0);
  auto b = rank_solved(campaign("bGhostQ", 345, 210, 50, 900), 900);
  EXPECT_EQ(b[0].total_time, 132000.0);
  EXPECT_EQ(display_kilo(b[0].total_time), "132K");
  EXPECT_EQ(display_kilo(999.4), "999");
}

TEST(Scoring, UniqueAndOrdering) {
  std::vector<RunRecord> r = {rec("a", "1", Status::Sat, 1),     rec("b", "1", Status::Sat, 2),
                              rec("a", "2", Status::Unsat, 3),   rec("b", "2", Status::Unknown, 900),
                              rec("a", "3", Status::Unknown, 900), rec("b", "3", Status::Sat, 5),
                              rec("c", "4", Status::Sat, 1),     rec("a", "4", Status::Unknown, 10)};
  auto rows = rank_solved(r, 900);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].tool, "a");
  EXPECT_EQ(rows[0].unique, 1u);
  EXPECT_EQ(rows[0].sat, 1u);
  EXPECT_EQ(rows[0].unsat, 1u);
  EXPECT_EQ(rows[1].tool, "b");
  EXPECT_EQ(rows[1].unique, 1u);
  EXPECT_EQ(rows[2].tool, "c");
  EXPECT_EQ(rows[2].unique, 1u);
  // c has no records for 1..3, so they count as unsolved.
  EXPECT_EQ(rows[2].total_time, 1 + 3 * 900.0);
  std::size_t unique_total = 0;
  for (const auto& row : rows) unique_total += row.unique;
  EXPECT_LE(unique_total, 4u);
}

TEST(Scoring, SolvedAfterTheLimitDoesNotCount) {
  auto rows = rank_solved({rec("a", "1", Status::Sat, 250), rec("a", "2", Status::Sat, 10)}, 200);
  EXPECT_EQ(rows[0].solved, 1u);
  EXPECT_EQ(rows[0].total_time, 210.0);
}

TEST(Scoring, Par10) {
  std::vector<RunRecord> r = {rec("t", "1", Status::Sat, 100), rec("t", "2", Status::Unsat, 50),
                              rec("t", "3", Status::Unknown, 200)};
  auto rows = rank_par(r, 10, 200);
  EXPECT_NEAR(*rows[0].par_k, 716.67, 0.005);
  EXPECT_DOUBLE_EQ(*rows[0].par_k, 2150.0 / 3);
  EXPECT_EQ(*rank_par(campaign("t", 5, 5, 0, 200), 10, 200)[0].par_k, 0.0);
  EXPECT_EQ(*rank_par(campaign("t", 5, 0, 0, 200), 10, 200)[0].par_k, 2000.0);
  EXPECT_THROW(rank_par(r, 0.5, 200), HarnessError);
}

TEST(Scoring, ParMonotoneInK) {
  std::mt19937_64 rng(3);
  std::vector<RunRecord> r;
  for (int t = 0; t < 4; ++t)
    for (int i = 0; i < 30; ++i) {
      bool solved = rng() % 3 != 0;
      r.push_back(rec("t" + std::to_string(t), std::to_string(i), solved ? Status::Sat : Status::Unknown,
                      solved ? static_cast<double>(rng() % 200) : 200.0));
    }
  std::map<std::string, double> prev;
  for (double k = 1; k <= 20; k += 1) {
    for (const auto& row : rank_par(r, k, 200)) {
      if (prev.count(row.tool)) EXPECT_GE(*row.par_k, prev[row.tool]);
      prev[row.tool] = *row.par_k;
    }
  }
}

TEST(Scoring, BestFoot) {
  auto orig = campaign("s", 150, 8, 1, 900);
  auto prep = campaign("s", 150, 10, 1, 900);
  auto rows = best_foot(orig, prep);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].category, FootCategory::WantPrepro);
  EXPECT_EQ(rows[0].best_foot, 10u);
  EXPECT_EQ(rows[0].worst_foot, 8u);

  rows = best_foot(campaign("g", 150, 142, 1, 900), campaign("g", 150, 93, 1, 900));
  EXPECT_EQ(rows[0].category, FootCategory::NoPrepro);
  EXPECT_EQ(rows[0].best_foot, 142u);
  EXPECT_EQ(rows[0].worst_foot, 93u);

  rows = best_foot(campaign("e", 20, 7, 1, 900), campaign("e", 20, 7, 1, 900));
  EXPECT_EQ(rows[0].category, FootCategory::WantPrepro);
  EXPECT_EQ(rows[0].best_foot, rows[0].worst_foot);

  EXPECT_THROW(best_foot(campaign("s", 10, 1, 1, 9), campaign("s", 11, 1, 1, 9)), HarnessError);
}

TEST(Scoring, Discrepancies) {
  std::vector<RunRecord> r = {rec("a", "1", Status::Sat, 1), rec("b", "1", Status::Unsat, 1),
                              rec("a", "2", Status::Sat, 1), rec("b", "2", Status::Sat, 1),
                              rec("a", "3", Status::Unknown, 1), rec("b", "3", Status::Sat, 1)};
  auto d = detect_discrepancies(r);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].instance, "1");
  EXPECT_EQ(d[0].reports.size(), 2u);
  EXPECT_TRUE(detect_discrepancies({r[2], r[3], r[4], r[5]}).empty());

  Registry reg;
  BenchmarkInstance b;
  b.id = "2";
  b.expected = Status::Unsat;
  reg.instances.push_back(b);
  auto with_expected = detect_discrepancies(r, &reg);
  ASSERT_EQ(with_expected.size(), 2u);
  EXPECT_EQ(with_expected[1].instance, "2");
  EXPECT_EQ(with_expected[1].expected, Status::Unsat);
}

TEST(Reports, CactusAndFamilyShapes) {
  std::vector<RunRecord> r = {rec("T", "a", Status::Sat, 5, "fam"), rec("T", "b", Status::Sat, 1, "fam"),
                              rec("T", "c", Status::Unknown, 900, "fam"),
                              rec("T", "d", Status::Unknown, 900, "fam")};
  std::ostringstream cactus;
  write_cactus_csv(cactus, r, 900);
  EXPECT_EQ(cactus.str(), "tool,rank,time_s\nT,1,1\nT,2,5\n");

  std::ostringstream fam;
  write_family_csv(fam, {r[1], r[2], r[3], rec("T", "e", Status::Unknown, 900, "fam")}, 900);
  EXPECT_EQ(fam.str(), "tool,fam (4)\nT,1\n");

  std::ostringstream empty_cactus, empty_fam, empty_scores;
  write_cactus_csv(empty_cactus, {}, 900);
  write_family_csv(empty_fam, {}, 900);
  write_score_csv(empty_scores, {});
  EXPECT_EQ(empty_cactus.str(), "tool,rank,time_s\n");
  EXPECT_EQ(empty_fam.str(), "tool\n");
  EXPECT_EQ(empty_scores.str(), "tool,solved,sat,unsat,unique,avg_s,total_s,total_display,par_k\n");
}

TEST(Reports, OrderIndependent) {
  std::mt19937_64 rng(8);
  std::vector<RunRecord> r;
  for (int t = 0; t < 3; ++t)
    for (int i = 0; i < 40; ++i) {
      bool solved = rng() % 2;
      r.push_back(rec("tool" + std::to_string(t), "i" + std::to_string(i),
                      solved ? (rng() % 2 ? Status::Sat : Status::Unsat) : Status::Unknown,
                      solved ? static_cast<double>(rng() % 1000) / 7.0 : 900.0, "f" + std::to_string(i % 3)));
    }
  auto render = [](const std::vector<RunRecord>& recs) {
    std::ostringstream out;
    write_cactus_csv(out, recs, 900);
    write_family_csv(out, recs, 900);
    write_score_csv(out, rank_par(recs, 10, 900));
    return out.str();
  };
  auto expected = render(r);
  for (int i = 0; i < 5; ++i) {
    std::shuffle(r.begin(), r.end(), rng);
    EXPECT_EQ(render(r), expected);
  }
}

TEST(Reports, EmitWritesThreeFiles) {
  TempDir dir;
  emit_reports({rec("T", "a", Status::Sat, 5)}, dir.path() / "out", 900);
  for (const char* name : {"cactus.csv", "families.csv", "scores.csv"})
    EXPECT_TRUE(fs::exists(dir.path() / "out" / name)) << name;
  std::ifstream scores(dir.path() / "out" / "scores.csv");
  std::string header, row;
  std::getline(scores, header);
  std::getline(scores, row);
  EXPECT_EQ(row, "T,1,1,0,1,5,5,5,5");
}

TEST(Reports, SevenTrialTable) {
  auto reg = registry_with_families({10, 8, 6, 4});
  auto sets = sample_trials(reg, 6, 100, 7);
  std::vector<RunRecord> r;
  for (const auto& b : reg.instances) {
    r.push_back(rec("fast", b.id, Status::Sat, 1, b.family));
    r.push_back(rec("slow", b.id, b.id.back() == 's' ? Status::Sat : Status::Unknown, 50, b.family));
  }
  auto table = trial_table(r, sets, 900);
  ASSERT_EQ(table.tools.size(), 2u);
  ASSERT_EQ(table.seeds.size(), 7u);
  for (const auto& row : table.cells) ASSERT_EQ(row.size(), 7u);
  for (std::size_t t = 0; t < 7; ++t) {
    EXPECT_EQ(table.cells[0][t].rank, 1u);
    EXPECT_EQ(table.cells[0][t].solved, 22u);
  }
  EXPECT_TRUE(table.stable_ranking);
  std::ostringstream csv;
  write_trial_csv(csv, table);
  const std::string text = csv.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 2 * 7);
}
