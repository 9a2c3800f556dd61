#include "qgal/pipeline/pipeline.hpp"

#include <algorithm>
#include <cctype>

#include "qgal/qdimacs.hpp"
#include "qgal/util/subprocess.hpp"
#include "qgal/util/timer.hpp"

namespace qgal {
namespace {

PreproKind classify(const Pcnf& f) {
  for (const auto& c : f.matrix)
    if (c.empty()) return PreproKind::SolvedUnsat;
  return f.matrix.empty() ? PreproKind::SolvedSat : PreproKind::Simplified;
}

StepResult pass_through(const Pcnf& f, bool timed_out, std::string message) {
  StepResult r;
  r.formula = f;
  r.failed = !timed_out;
  r.timed_out = timed_out;
  r.message = std::move(message);
  return r;
}

StepResult run_external(const Pcnf& f, const ToolBundle& bundle, double limit_seconds) {
  ProcessOptions options;
  options.time_limit = limit_seconds;
  options.stdin_data = write_qdimacs(f);
  ProcessResult proc;
  try {
    proc = run_process(bundle.command, options);
  } catch (const std::exception& e) {
    return pass_through(f, false, e.what());
  }
  if (proc.timed_out) return pass_through(f, true, "per-call limit reached");
  if (proc.signal != 0) return pass_through(f, false, "killed by signal " + std::to_string(proc.signal));
  if (proc.exit_code == 10 || proc.exit_code == 20) {
    StepResult r;
    r.formula = f;
    r.kind = proc.exit_code == 10 ? PreproKind::SolvedSat : PreproKind::SolvedUnsat;
    return r;
  }
  if (proc.exit_code != 0)
    return pass_through(f, false, "exit code " + std::to_string(proc.exit_code));
  StepResult r;
  try {
    r.formula = parse_qdimacs(std::string_view(proc.stdout_data));
  } catch (const std::exception& e) {
    return pass_through(f, false, std::string("unreadable output: ") + e.what());
  }
  r.kind = classify(r.formula);
  return r;
}

}  // namespace

ExecutionSequence ExecutionSequence::parse(std::string_view text, int max_rounds,
                                           double per_call_limit) {
  ExecutionSequence seq;
  seq.max_rounds = max_rounds;
  seq.per_call_limit = per_call_limit;
  if (text.find(',') != std::string_view::npos) {
    std::string item;
    for (char c : text) {
      if (c == ',') {
        if (item.empty()) throw ConfigError("empty label in execution sequence");
        seq.steps.push_back(std::move(item));
        item.clear();
      } else if (!std::isspace(static_cast<unsigned char>(c))) {
        item += c;
      }
    }
    if (item.empty()) throw ConfigError("empty label in execution sequence");
    seq.steps.push_back(std::move(item));
  } else {
    for (char c : text)
      if (!std::isspace(static_cast<unsigned char>(c))) seq.steps.emplace_back(1, c);
  }
  if (seq.steps.empty()) throw ConfigError("execution sequence is empty");
  if (max_rounds < 1) throw ConfigError("max_rounds must be at least 1");
  return seq;
}

std::string ExecutionSequence::label() const {
  bool short_labels = std::all_of(steps.begin(), steps.end(),
                                  [](const std::string& s) { return s.size() == 1; });
  std::string body;
  for (const auto& s : steps) {
    if (!short_labels && !body.empty()) body += ',';
    body += s;
  }
  return "(" + body + ")^" + std::to_string(max_rounds);
}

std::string_view to_string(PipelineKind k) {
  switch (k) {
    case PipelineKind::SolvedSat:
      return "solved-sat";
    case PipelineKind::SolvedUnsat:
      return "solved-unsat";
    case PipelineKind::Fixpoint:
      return "fixpoint";
    case PipelineKind::RoundsExhausted:
      return "rounds-exhausted";
  }
  return "?";
}

StepResult run_bundle(const Pcnf& f, const ToolBundle& bundle, double limit_seconds,
                      const TechniqueBudgets& budgets) {
  if (bundle.is_external()) return run_external(f, bundle, limit_seconds);
  auto out = preprocess(f, bundle, limit_seconds, budgets);
  if (out.timed_out) return pass_through(f, true, "per-call limit reached");
  if (!out.failure.empty()) return pass_through(f, false, out.failure);
  StepResult r;
  r.formula = std::move(out.formula);
  r.kind = out.kind;
  return r;
}

bool detect_fixpoint(const CanonicalDigest& before, const CanonicalDigest& after) {
  if (before.algorithm != after.algorithm)
    throw FormulaError("digest algorithms differ: " + before.algorithm + " vs " + after.algorithm);
  return before.bytes == after.bytes;
}

PipelineResult run_sequence(const Pcnf& f, const ExecutionSequence& seq,
                            const std::map<std::string, ToolBundle>& bundles,
                            const TechniqueBudgets& budgets) {
  if (seq.steps.empty()) throw ConfigError("execution sequence is empty");
  if (seq.max_rounds < 1) throw ConfigError("max_rounds must be at least 1");
  for (const auto& label : seq.steps)
    if (!bundles.count(label)) throw ConfigError("unknown bundle label '" + label + "'");

  PipelineResult result;
  Pcnf current = f;
  Deadline total(seq.total_limit);
  bool out_of_time = false;
  for (int round = 1; round <= seq.max_rounds && !out_of_time; ++round) {
    RoundReport report;
    report.round = round;
    report.digest_before = canonical_digest(current);
    CanonicalDigest previous = report.digest_before;
    for (const auto& label : seq.steps) {
      if (total.expired()) {
        out_of_time = true;
        break;
      }
      Stopwatch watch;
      StepResult step = run_bundle(current, bundles.at(label),
                                   std::min(seq.per_call_limit, total.remaining()), budgets);
      StepOutcome outcome;
      outcome.bundle = label;
      outcome.wall_seconds = watch.seconds();
      outcome.failed = step.failed;
      outcome.timed_out = step.timed_out;
      outcome.message = std::move(step.message);
      outcome.digest = canonical_digest(step.formula);
      outcome.modified = outcome.digest != previous;
      outcome.solved = step.kind != PreproKind::Simplified;
      previous = outcome.digest;
      current = std::move(step.formula);
      report.steps.push_back(std::move(outcome));
      if (step.kind != PreproKind::Simplified) {
        report.solved = true;
        report.digest_after = previous;
        result.rounds.push_back(std::move(report));
        result.kind = step.kind == PreproKind::SolvedSat ? PipelineKind::SolvedSat
                                                         : PipelineKind::SolvedUnsat;
        result.solved_in_round = round;
        result.solved_by = label;
        result.formula = std::move(current);
        return result;
      }
    }
    if (report.steps.empty()) break;
    report.digest_after = previous;
    report.fixpoint = !out_of_time && detect_fixpoint(report.digest_before, report.digest_after);
    const bool done = report.fixpoint;
    result.rounds.push_back(std::move(report));
    if (done) {
      result.kind = PipelineKind::Fixpoint;
      result.formula = std::move(current);
      return result;
    }
  }
  result.kind = PipelineKind::RoundsExhausted;
  result.formula = std::move(current);
  return result;
}

std::vector<std::string> bundle_permutations(std::string letters) {
  std::sort(letters.begin(), letters.end());
  std::vector<std::string> out;
  do out.push_back(letters);
  while (std::next_permutation(letters.begin(), letters.end()));
  return out;
}

}  // namespace qgal
