#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>

#include "qgal/cert/certificate.hpp"
#include "qgal/harness/registry.hpp"
#include "qgal/harness/runner.hpp"
#include "qgal/harness/scoring.hpp"
#include "qgal/normalize.hpp"
#include "qgal/pipeline/pipeline.hpp"
#include "qgal/prepro/preprocessor.hpp"
#include "qgal/qdimacs.hpp"
#include "qgal/solver/expansion.hpp"
#include "qgal/solver/qdpll.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace qgal;

namespace {

// Exit codes besides the solver convention (10 SAT, 20 UNSAT, 0 unknown).
constexpr int kRejected = 1;
constexpr int kError = 2;
constexpr int kInconclusive = 3;

Pcnf load_formula(const std::string& path, bool strict) {
  ParseOptions opts{strict};
  if (path == "-") return parse_qdimacs(std::cin, opts);
  return read_qdimacs_file(path, opts);
}

double limit_or_inf(double seconds) { return seconds > 0 ? seconds : std::numeric_limits<double>::infinity(); }

std::map<std::string, ToolBundle> load_bundles(const std::string& path) {
  return path.empty() ? default_bundles() : load_bundle_config(path);
}

void write_output(const std::string& path, const Pcnf& f) {
  if (path.empty() || path == "-")
    write_qdimacs(std::cout, f);
  else
    write_qdimacs_file(path, f);
}

int status_exit(PreproKind k) {
  return k == PreproKind::SolvedSat ? 10 : k == PreproKind::SolvedUnsat ? 20 : 0;
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  std::string input;
  std::string engine = "search";
  double time = 0;
  std::string memory;
  std::string proof;
  std::uint64_t seed = 0;
  bool restarts = false;
  bool strict = false;
};

int cmd_solve(const SolveArgs& a) {
  Pcnf f = load_formula(a.input, a.strict);
  Limits limits;
  limits.time_seconds = limit_or_inf(a.time);
  if (!a.memory.empty()) limits.memory_bytes = parse_memory_size(a.memory);
  SolveOutcome out;
  if (a.engine == "expansion") {
    if (!a.proof.empty()) throw std::runtime_error("--proof needs the search engine");
    ExpansionStats stats;
    out = solve_expansion(f, limits, &stats);
    std::cout << "c expanded " << stats.expanded << " universals, " << stats.final_clauses << " clauses\n";
  } else {
    SearchOptions opts;
    opts.seed = a.seed;
    opts.restarts = a.restarts;
    std::optional<TraceFileWriter> trace;
    if (!a.proof.empty()) trace.emplace(fs::path(a.proof));
    QdpllSolver solver(f, opts, trace ? &*trace : nullptr);
    out = solver.solve(limits);
    const auto& st = solver.stats();
    std::cout << "c decisions " << st.decisions << " conflicts " << st.conflicts << " solutions " << st.solutions
              << '\n';
  }
  std::cout << "c time " << format_number(out.wall_time) << " s\n";
  if (!out.solved()) std::cout << "c unknown: " << to_string(out.reason) << '\n';
  const char* verdict = out.status == Status::Sat ? "1" : out.status == Status::Unsat ? "0" : "-1";
  std::cout << "s cnf " << verdict << ' ' << f.effective_max_var() << ' ' << f.matrix.size() << '\n';
  return exit_code(out.status);
}

// ---------------------------------------------------------------- info

int cmd_info(const std::string& input, bool strict) {
  Pcnf f = load_formula(input, strict);
  auto s = compute_stats(f);
  ordered_json j;
  j["digest"] = canonical_digest(f).tagged();
  j["vars"] = s.num_vars;
  j["clauses"] = s.num_clauses;
  j["literals"] = s.num_literals;
  j["blocks"] = s.num_blocks;
  j["existential"] = s.num_existential;
  j["universal"] = s.num_universal;
  std::cout << j.dump() << '\n';
  return 0;
}

// ---------------------------------------------------------------- prep

struct PrepArgs {
  std::string input;
  std::string output;
  std::string bundle = "A";
  std::string bundles;
  double limit = 300;
  std::size_t ve_growth = 0;
  bool strict = false;
};

int cmd_prep(const PrepArgs& a) {
  Pcnf f = load_formula(a.input, a.strict);
  auto bundles = load_bundles(a.bundles);
  auto it = bundles.find(a.bundle);
  if (it == bundles.end()) throw ConfigError("unknown bundle '" + a.bundle + "'");
  TechniqueBudgets budgets;
  budgets.var_elim_growth = a.ve_growth;
  auto step = run_bundle(f, it->second, limit_or_inf(a.limit), budgets);
  write_output(a.output, step.formula);
  auto before = compute_stats(f), after = compute_stats(step.formula);
  std::cerr << "c bundle " << a.bundle << ": " << before.num_clauses << " -> " << after.num_clauses
            << " clauses, " << before.num_vars << " -> " << after.num_vars << " vars";
  if (step.timed_out) std::cerr << ", timed out";
  if (step.failed) std::cerr << ", failed: " << step.message;
  std::cerr << '\n';
  return status_exit(step.kind);
}

// ---------------------------------------------------------------- pipeline

struct PipelineArgs {
  std::string input;
  std::string output;
  std::string report;
  std::string seq = "AABBCCDD";
  std::string bundles;
  int rounds = 6;
  double call_limit = 120;
  double total_limit = 0;
  bool strict = false;
};

ordered_json round_json(const RoundReport& r) {
  ordered_json j;
  j["round"] = r.round;
  j["digest_before"] = r.digest_before.tagged();
  j["digest_after"] = r.digest_after.tagged();
  j["fixpoint"] = r.fixpoint;
  j["solved"] = r.solved;
  j["steps"] = ordered_json::array();
  for (const auto& s : r.steps) {
    ordered_json step;
    step["bundle"] = s.bundle;
    step["modified"] = s.modified;
    step["solved"] = s.solved;
    step["failed"] = s.failed;
    step["timed_out"] = s.timed_out;
    step["wall_s"] = s.wall_seconds;
    step["digest"] = s.digest.tagged();
    if (!s.message.empty()) step["message"] = s.message;
    j["steps"].push_back(std::move(step));
  }
  return j;
}

int cmd_pipeline(const PipelineArgs& a) {
  Pcnf f = load_formula(a.input, a.strict);
  auto seq = ExecutionSequence::parse(a.seq, a.rounds, limit_or_inf(a.call_limit));
  seq.total_limit = limit_or_inf(a.total_limit);
  auto result = run_sequence(f, seq, load_bundles(a.bundles));

  std::ofstream report_file;
  std::ostream* report = &std::cout;
  if (!a.report.empty() && a.report != "-") {
    report_file.open(a.report);
    if (!report_file) throw std::runtime_error("cannot write " + a.report);
    report = &report_file;
  }
  for (const auto& r : result.rounds) *report << round_json(r).dump() << '\n';
  if (!a.output.empty()) write_output(a.output, result.formula);
  std::cerr << "c " << seq.label() << ": " << to_string(result.kind) << " after " << result.rounds.size()
            << " round(s)";
  if (!result.solved_by.empty()) std::cerr << " by " << result.solved_by;
  std::cerr << '\n';
  if (result.kind == PipelineKind::SolvedSat) return 10;
  if (result.kind == PipelineKind::SolvedUnsat) return 20;
  return 0;
}

// ---------------------------------------------------------------- bench

std::vector<RunRecord> load_logs(const std::vector<std::string>& paths) {
  std::vector<RunRecord> all;
  for (const auto& p : paths) {
    std::size_t skipped = 0;
    auto records = read_record_log(p, &skipped);
    if (skipped) std::cerr << "warning: " << p << ": skipped " << skipped << " malformed line(s)\n";
    all.insert(all.end(), records.begin(), records.end());
  }
  return all;
}

// Keeps the records of one trial tag; an empty filter keeps all.
std::vector<RunRecord> filter_trial(std::vector<RunRecord> records, const std::optional<std::string>& trial) {
  if (!trial) return records;
  std::erase_if(records, [&](const RunRecord& r) { return r.trial != *trial; });
  return records;
}

void print_scores(const std::vector<ScoreRow>& rows) {
  std::size_t width = 4;
  for (const auto& r : rows) width = std::max(width, r.tool.size());
  bool par = !rows.empty() && rows[0].par_k;
  std::cout << std::left << std::setw(static_cast<int>(width)) << "tool" << std::right << std::setw(8) << "solved"
            << std::setw(6) << "sat" << std::setw(7) << "unsat" << std::setw(8) << "unique" << std::setw(10)
            << "avg_s" << std::setw(12) << "total_s" << std::setw(8) << "total";
  if (par) std::cout << std::setw(12) << "par";
  std::cout << '\n' << std::fixed;
  for (const auto& r : rows) {
    std::cout << std::left << std::setw(static_cast<int>(width)) << r.tool << std::right << std::setw(8)
              << r.solved << std::setw(6) << r.sat << std::setw(7) << r.unsat << std::setw(8) << r.unique
              << std::setw(10) << std::setprecision(2) << r.avg_solved_time << std::setw(12)
              << std::setprecision(1) << r.total_time << std::setw(8) << display_kilo(r.total_time);
    if (par) std::cout << std::setw(12) << std::setprecision(2) << *r.par_k;
    std::cout << '\n';
  }
  std::cout << std::defaultfloat;
}

struct BenchArgs {
  std::string root;
  std::string manifest;
  std::string registry = "registry.json";
  std::string sets;
  std::string output;
  std::size_t k = 6;
  std::uint64_t seed = 1;
  std::size_t trials = 1;
  std::vector<std::string> tools;
  std::string log = "runs.jsonl";
  std::vector<std::string> logs;
  std::string original;
  std::string preprocessed;
  double time = 900;
  std::string memory = "7G";
  unsigned jobs = 1;
  std::optional<std::string> trial;
  std::optional<std::size_t> set_index;
  bool fresh = false;
  std::string bundles;
  double par = 0;
  std::string out_dir = "report";
};

int cmd_register(const BenchArgs& a) {
  RegisterOptions opts;
  if (!a.manifest.empty()) opts.manifest = a.manifest;
  auto reg = register_benchmarks(a.root, opts);
  save_registry(reg, a.output.empty() ? a.registry : a.output);
  for (const auto& w : reg.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& r : reg.rejected) std::cerr << "rejected: " << r.path.string() << ": " << r.reason << '\n';
  for (const auto& d : reg.duplicates) {
    std::cerr << "duplicate:";
    for (const auto& id : d) std::cerr << ' ' << id;
    std::cerr << '\n';
  }
  std::cout << reg.instances.size() << " instance(s) in " << reg.families().size() << " famil"
            << (reg.families().size() == 1 ? "y" : "ies") << ", " << reg.rejected.size() << " rejected\n";
  return 0;
}

int cmd_sample(const BenchArgs& a) {
  auto reg = load_registry(a.registry);
  auto sets = sample_trials(reg, a.k, a.seed, a.trials);
  save_sets(sets, a.output.empty() ? a.sets : a.output);
  for (const auto& s : sets)
    std::cout << "seed " << s.seed << ": " << s.instance_ids.size() << " instance(s)\n";
  return 0;
}

int cmd_run(const BenchArgs& a) {
  auto reg = load_registry(a.registry);
  std::vector<std::string> ids;
  if (a.sets.empty()) {
    for (const auto& b : reg.instances) ids.push_back(b.id);
  } else {
    auto sets = load_sets(a.sets);
    std::set<std::string> chosen;
    for (std::size_t i = 0; i < sets.size(); ++i)
      if (!a.set_index || *a.set_index == i) chosen.insert(sets[i].instance_ids.begin(), sets[i].instance_ids.end());
    if (a.set_index && *a.set_index >= sets.size()) throw HarnessError("set index out of range");
    ids.assign(chosen.begin(), chosen.end());
  }
  std::vector<ToolSpec> tools;
  for (const auto& t : a.tools) tools.push_back(ToolSpec::parse(t));
  RunOptions opts;
  opts.time_limit = a.time;
  opts.memory_limit = parse_memory_size(a.memory);
  opts.jobs = a.jobs;
  opts.trial = a.trial.value_or("");
  opts.log = a.log;
  opts.resume = !a.fresh;
  opts.bundles = load_bundles(a.bundles);
  auto records = execute_runs(reg, ids, tools, opts);
  print_scores(rank_solved(records, a.time));
  return 0;
}

int cmd_rank(const BenchArgs& a) {
  auto records = filter_trial(load_logs(a.logs), a.trial);
  print_scores(a.par > 0 ? rank_par(records, a.par, a.time) : rank_solved(records, a.time));
  return 0;
}

int cmd_bestfoot(const BenchArgs& a) {
  auto orig = filter_trial(load_logs({a.original}), a.trial);
  auto prep = filter_trial(load_logs({a.preprocessed}), a.trial);
  auto rows = best_foot(orig, prep);
  std::cout << "tool,category,original,preprocessed,best_foot,worst_foot\n";
  for (const auto& r : rows)
    std::cout << r.tool << ',' << to_string(r.category) << ',' << r.original << ',' << r.preprocessed << ','
              << r.best_foot << ',' << r.worst_foot << '\n';
  return 0;
}

int cmd_report(const BenchArgs& a) {
  auto records = filter_trial(load_logs(a.logs), a.trial);
  const double k = a.par > 0 ? a.par : 10.0;
  emit_reports(records, a.out_dir, a.time, k);
  if (!a.sets.empty()) {
    auto table = trial_table(records, load_sets(a.sets), a.time, k);
    std::ofstream out(fs::path(a.out_dir) / "trials.csv");
    write_trial_csv(out, table);
    if (!table.stable_ranking) std::cerr << "note: the ranking differs between trials\n";
  }
  std::cout << "wrote reports to " << a.out_dir << '\n';
  return 0;
}

int cmd_discrepancies(const BenchArgs& a) {
  auto records = load_logs(a.logs);
  std::optional<Registry> reg;
  if (!a.registry.empty() && fs::exists(a.registry)) reg = load_registry(a.registry);
  auto found = detect_discrepancies(records, reg ? &*reg : nullptr);
  for (const auto& d : found) {
    std::cout << d.instance << ':';
    for (const auto& [tool, status] : d.reports) std::cout << ' ' << tool << '=' << to_string(status);
    if (d.expected) std::cout << " expected=" << to_string(*d.expected);
    std::cout << '\n';
  }
  std::cerr << found.size() << " discrepanc" << (found.size() == 1 ? "y" : "ies") << '\n';
  return found.empty() ? 0 : kRejected;
}

// ---------------------------------------------------------------- cert

struct CertArgs {
  std::string formula;
  std::string proof;
  std::string certificate;
  std::string output;
  std::size_t retained_cap = 0;
  unsigned exhaustive_vars = 16;
  double sat_seconds = 60;
  bool strict = false;
};

int cmd_cert_check(const CertArgs& a) {
  Pcnf f = load_formula(a.formula, a.strict);
  StreamCheckOptions opts;
  if (a.retained_cap) opts.retained_cap = a.retained_cap;
  auto r = check_proof_file(a.proof, f, opts);
  if (r.accepted) {
    std::cout << "ACCEPTED steps=" << r.step_count << " resolutions=" << r.resolution_steps
              << " max_width=" << r.max_width << " peak_retained=" << r.peak_retained << '\n';
    return 0;
  }
  std::cout << "REJECTED step=" << r.failing_step << " reason=" << to_string(r.reason);
  if (!r.message.empty()) std::cout << ": " << r.message;
  std::cout << '\n';
  return kRejected;
}

int cmd_cert_extract(const CertArgs& a) {
  Pcnf f = load_formula(a.formula, a.strict);
  Proof p = read_proof_file(a.proof);
  Certificate c;
  try {
    c = extract_certificate(p, f);
  } catch (const UncheckedProofError& e) {
    std::cerr << "proof rejected at step " << e.report().failing_step << ": " << to_string(e.report().reason)
              << '\n';
    return kRejected;
  }
  if (a.output.empty() || a.output == "-")
    write_certificate(std::cout, c);
  else
    write_certificate_file(a.output, c);
  std::cerr << to_string(c.kind) << " certificate: " << c.functions.size() << " function(s), "
            << c.graph.size() << " node(s)\n";
  return 0;
}

int cmd_cert_validate(const CertArgs& a) {
  Pcnf f = load_formula(a.formula, a.strict);
  Certificate c = read_certificate_file(a.certificate);
  const auto digest = canonical_digest(f).tagged();
  if (c.digest != digest) {
    std::cout << "INVALID digest mismatch: certificate " << c.digest << ", formula " << digest << '\n';
    return kRejected;
  }
  auto bad = dependency_violations(c, f);
  if (!bad.empty()) {
    std::cout << "INVALID dependency violations:";
    for (Var v : bad) std::cout << ' ' << v;
    std::cout << '\n';
    return kRejected;
  }
  try {
    bool ok = validate_certificate(c, f, ValidationBudget{a.exhaustive_vars, a.sat_seconds});
    std::cout << (ok ? "VALID " : "INVALID ") << to_string(c.kind) << '\n';
    return ok ? 0 : kRejected;
  } catch (const ValidationInconclusive& e) {
    std::cout << "INCONCLUSIVE " << e.what() << '\n';
    return kInconclusive;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QBF solving, preprocessing and benchmarking toolkit"};
  app.require_subcommand(1);
  std::function<int()> action;

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Solve a QDIMACS formula (exit 10 SAT, 20 UNSAT, 0 unknown)");
  s->add_option("input", solve.input, "QDIMACS file, - for stdin")->required();
  s->add_option("--engine", solve.engine, "search or expansion")
      ->check(CLI::IsMember({"search", "expansion"}));
  s->add_option("--time", solve.time, "Time limit in seconds (0 = none)");
  s->add_option("--mem", solve.memory, "Memory limit, e.g. 4G");
  s->add_option("--proof", solve.proof, "Write a Q-resolution trace (search engine)");
  s->add_option("--seed", solve.seed, "Activity seed for the search engine");
  s->add_flag("--restarts", solve.restarts, "Enable restarts");
  s->add_flag("--strict", solve.strict, "Reject header mismatches");
  s->callback([&] { action = [&] { return cmd_solve(solve); }; });

  std::string info_input;
  bool info_strict = false;
  auto* info = app.add_subcommand("info", "Print statistics and the canonical digest as JSON");
  info->add_option("input", info_input, "QDIMACS file")->required();
  info->add_flag("--strict", info_strict);
  info->callback([&] { action = [&] { return cmd_info(info_input, info_strict); }; });

  PrepArgs prep;
  auto* p = app.add_subcommand("prep", "Apply one preprocessing bundle");
  p->add_option("input", prep.input, "QDIMACS file, - for stdin")->required();
  p->add_option("-o,--output", prep.output, "Output file (default stdout)");
  p->add_option("--bundle", prep.bundle, "Bundle label");
  p->add_option("--bundles", prep.bundles, "Bundle configuration file");
  p->add_option("--limit", prep.limit, "Time limit in seconds (0 = none)");
  p->add_option("--ve-growth", prep.ve_growth, "Clause growth allowed per variable elimination");
  p->add_flag("--strict", prep.strict);
  p->callback([&] { action = [&] { return cmd_prep(prep); }; });

  PipelineArgs pipe;
  auto* pl = app.add_subcommand("pipeline", "Run a bundle sequence for several rounds");
  pl->add_option("input", pipe.input, "QDIMACS file, - for stdin")->required();
  pl->add_option("--seq", pipe.seq, "Bundle labels, e.g. AABBCCDD or A,B,ext");
  pl->add_option("--rounds", pipe.rounds, "Maximum number of rounds");
  pl->add_option("--call-limit", pipe.call_limit, "Seconds per bundle call (0 = none)");
  pl->add_option("--total-limit", pipe.total_limit, "Seconds for the whole run (0 = none)");
  pl->add_option("--bundles", pipe.bundles, "Bundle configuration file");
  pl->add_option("-o,--output", pipe.output, "Write the final formula");
  pl->add_option("--report", pipe.report, "Round report stream (default stdout)");
  pl->add_flag("--strict", pipe.strict);
  pl->callback([&] { action = [&] { return cmd_pipeline(pipe); }; });

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Benchmark registry, campaigns and scoring");
  b->require_subcommand(1);
  auto* reg = b->add_subcommand("register", "Scan a benchmark directory");
  reg->add_option("root", bench.root, "Benchmark directory")->required();
  reg->add_option("--manifest", bench.manifest, "TSV: path, family[, SAT|UNSAT]");
  reg->add_option("-o,--output", bench.output, "Registry file (default registry.json)");
  reg->callback([&] { action = [&] { return cmd_register(bench); }; });

  auto* smp = b->add_subcommand("sample", "Draw stratified benchmark sets");
  smp->add_option("--registry", bench.registry, "Registry file");
  smp->add_option("--k", bench.k, "Instances per family")->required();
  smp->add_option("--seed", bench.seed, "Seed of the first set")->required();
  smp->add_option("--trials", bench.trials, "Number of sets (seeds seed, seed+1, ...)");
  smp->add_option("-o,--output", bench.output, "Sets file")->required();
  smp->callback([&] { action = [&] { return cmd_sample(bench); }; });

  auto* run = b->add_subcommand("run", "Run tools on registered instances");
  run->add_option("--registry", bench.registry, "Registry file");
  run->add_option("--sets", bench.sets, "Restrict to the instances of these sets");
  run->add_option("--set-index", bench.set_index, "Use only this set (0-based)");
  run->add_option("--tool", bench.tools, "Tool spec, repeatable")->required();
  run->add_option("--time", bench.time, "Time limit per run in seconds");
  run->add_option("--mem", bench.memory, "Memory limit per run, e.g. 7G");
  run->add_option("--jobs", bench.jobs, "Parallel runs");
  run->add_option("--trial", bench.trial, "Trial tag stored with each record");
  run->add_option("--log", bench.log, "Record log (JSON lines)");
  run->add_option("--bundles", bench.bundles, "Bundle configuration for prep-search tools");
  run->add_flag("--fresh", bench.fresh, "Truncate the log instead of resuming");
  run->callback([&] { action = [&] { return cmd_run(bench); }; });

  auto* rank = b->add_subcommand("rank", "Rank tools by solved count or PAR-k");
  rank->add_option("logs", bench.logs, "Record logs")->required();
  rank->add_option("--time", bench.time, "Time limit used for the campaign");
  rank->add_option("--par", bench.par, "Rank by PAR-k with this penalty factor");
  rank->add_option("--trial", bench.trial, "Only records with this trial tag");
  rank->callback([&] { action = [&] { return cmd_rank(bench); }; });

  auto* foot = b->add_subcommand("bestfoot", "Compare campaigns on original and preprocessed instances");
  foot->add_option("original", bench.original, "Record log on original instances")->required();
  foot->add_option("preprocessed", bench.preprocessed, "Record log on preprocessed instances")->required();
  foot->add_option("--trial", bench.trial, "Only records with this trial tag");
  foot->callback([&] { action = [&] { return cmd_bestfoot(bench); }; });

  auto* rep = b->add_subcommand("report", "Write cactus, family, score and trial CSVs");
  rep->add_option("logs", bench.logs, "Record logs")->required();
  rep->add_option("--time", bench.time, "Time limit used for the campaign");
  rep->add_option("--par", bench.par, "PAR penalty factor (default 10)");
  rep->add_option("--sets", bench.sets, "Sets file; adds trials.csv");
  rep->add_option("--trial", bench.trial, "Only records with this trial tag");
  rep->add_option("--out", bench.out_dir, "Output directory");
  rep->callback([&] { action = [&] { return cmd_report(bench); }; });

  auto* disc = b->add_subcommand("discrepancies", "List contradicting SAT/UNSAT reports (exit 1 if any)");
  disc->add_option("logs", bench.logs, "Record logs")->required();
  disc->add_option("--registry", bench.registry, "Registry with expected statuses");
  disc->callback([&] { action = [&] { return cmd_discrepancies(bench); }; });

  CertArgs cert;
  auto* c = app.add_subcommand("cert", "Proof checking and certificates");
  c->require_subcommand(1);
  auto* chk = c->add_subcommand("check", "Check a proof trace (exit 0 accepted, 1 rejected)");
  chk->add_option("formula", cert.formula)->required();
  chk->add_option("proof", cert.proof)->required();
  chk->add_option("--retained-cap", cert.retained_cap, "Reject when more steps must be kept in memory");
  chk->add_flag("--strict", cert.strict);
  chk->callback([&] { action = [&] { return cmd_cert_check(cert); }; });

  auto* ext = c->add_subcommand("extract", "Extract a Skolem or Herbrand certificate from a proof");
  ext->add_option("formula", cert.formula)->required();
  ext->add_option("proof", cert.proof)->required();
  ext->add_option("-o,--output", cert.output, "Certificate file (default stdout)");
  ext->add_flag("--strict", cert.strict);
  ext->callback([&] { action = [&] { return cmd_cert_extract(cert); }; });

  auto* val = c->add_subcommand("validate", "Validate a certificate (exit 0 valid, 1 invalid, 3 inconclusive)");
  val->add_option("formula", cert.formula)->required();
  val->add_option("certificate", cert.certificate)->required();
  val->add_option("--exhaustive-vars", cert.exhaustive_vars, "Enumerate up to 2^n input assignments");
  val->add_option("--sat-seconds", cert.sat_seconds, "SAT budget beyond that");
  val->add_flag("--strict", cert.strict);
  val->callback([&] { action = [&] { return cmd_cert_validate(cert); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kError;
  }
  try {
    return action();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
}
