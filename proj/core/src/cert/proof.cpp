#include "qgal/proof.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace qgal {

std::string_view to_string(StepKind k) {
  switch (k) {
    case StepKind::InputClause: return "input-clause";
    case StepKind::Resolution: return "resolution";
    case StepKind::UniversalReduction: return "universal-reduction";
    case StepKind::InputCube: return "input-cube";
    case StepKind::CubeResolution: return "cube-resolution";
    case StepKind::ExistentialReduction: return "existential-reduction";
  }
  return "?";
}

std::string_view to_string(ProofKind k) {
  return k == ProofKind::Refutation ? "refutation" : "satisfaction";
}

const TraceStep* Proof::find(StepId id) const {
  // Steps are usually stored in id order; fall back to a scan otherwise.
  if (id >= 1 && id <= steps.size() && steps[id - 1].id == id) return &steps[id - 1];
  for (const auto& s : steps)
    if (s.id == id) return &s;
  return nullptr;
}

std::vector<StepId> Proof::live_steps() const {
  std::unordered_map<StepId, const TraceStep*> by_id;
  for (const auto& s : steps) by_id[s.id] = &s;
  std::vector<StepId> out;
  std::unordered_set<StepId> seen;
  std::vector<StepId> stack{root};
  while (!stack.empty()) {
    StepId id = stack.back();
    stack.pop_back();
    if (!seen.insert(id).second) continue;
    auto it = by_id.find(id);
    if (it == by_id.end()) continue;
    out.push_back(id);
    for (StepId a : it->second->antecedents) stack.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void ProofRecorder::begin(Var max_var, std::size_t num_inputs) {
  proof_ = Proof{};
  proof_.max_var = max_var;
  proof_.num_inputs = num_inputs;
  finished_ = false;
}

void ProofRecorder::finish(ProofKind kind, StepId root) {
  proof_.kind = kind;
  proof_.root = root;
  finished_ = true;
}

namespace {

void write_step(std::ostream& out, const TraceStep& step) {
  out << step.id;
  for (Literal l : step.literals) out << ' ' << l.dimacs();
  out << " 0";
  for (StepId a : step.antecedents) out << ' ' << a;
  out << " 0\n";
}

}  // namespace

TraceFileWriter::TraceFileWriter(const std::filesystem::path& path)
    : file_(path), out_(&file_) {
  if (!file_) throw std::runtime_error("cannot write trace " + path.string());
}

void TraceFileWriter::begin(Var max_var, std::size_t num_inputs) {
  std::ostringstream line;
  line << "p qrp " << max_var << ' ' << num_inputs << '\n';
  bytes_ += line.str().size();
  *out_ << line.str();
}

void TraceFileWriter::add(const TraceStep& step) {
  std::ostringstream line;
  write_step(line, step);
  bytes_ += line.str().size();
  *out_ << line.str();
}

void TraceFileWriter::finish(ProofKind kind, StepId root) {
  std::ostringstream line;
  line << "r " << to_string(kind) << ' ' << root << '\n';
  bytes_ += line.str().size();
  *out_ << line.str();
  out_->flush();
}

namespace {

bool next_token(std::string_view& rest, std::string_view& token) {
  auto start = rest.find_first_not_of(" \t\r");
  if (start == std::string_view::npos) return false;
  rest.remove_prefix(start);
  auto end = rest.find_first_of(" \t\r");
  token = rest.substr(0, end);
  rest.remove_prefix(end == std::string_view::npos ? rest.size() : end);
  return true;
}

std::int64_t parse_int(std::string_view token, std::size_t line) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw ProofFormatError(line, "expected integer, got '" + std::string(token) + "'");
  return value;
}

Var infer_pivot(const std::vector<Literal>& a, const std::vector<Literal>& b) {
  for (Literal l : a)
    if (std::find(b.begin(), b.end(), -l) != b.end()) return l.var();
  return 0;
}

}  // namespace

TraceHeader TraceReader::header() {
  if (header_read_) return header_;
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    std::string_view rest(line), tok;
    if (!next_token(rest, tok) || tok == "c") continue;
    std::string_view fmt, vars, inputs;
    if (tok != "p" || !next_token(rest, fmt) || fmt != "qrp" || !next_token(rest, vars) ||
        !next_token(rest, inputs))
      throw ProofFormatError(line_, "expected header 'p qrp <max_var> <num_inputs>'");
    header_.max_var = static_cast<Var>(parse_int(vars, line_));
    header_.num_inputs = static_cast<std::size_t>(parse_int(inputs, line_));
    header_read_ = true;
    return header_;
  }
  throw ProofFormatError(line_, "missing header");
}

std::optional<TraceStep> TraceReader::next(
    const std::function<const TraceStep*(StepId)>& lookup) {
  if (!header_read_) header();
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    std::string_view rest(line), tok;
    if (!next_token(rest, tok) || tok == "c") continue;
    if (tok == "r") {
      std::string_view kind, root;
      if (!next_token(rest, kind) || !next_token(rest, root))
        throw ProofFormatError(line_, "malformed result line");
      TraceFooter f;
      if (kind == "refutation" || kind == "UNSAT")
        f.kind = ProofKind::Refutation;
      else if (kind == "satisfaction" || kind == "SAT")
        f.kind = ProofKind::Satisfaction;
      else
        throw ProofFormatError(line_, "unknown proof kind '" + std::string(kind) + "'");
      f.root = static_cast<StepId>(parse_int(root, line_));
      footer_ = f;
      return std::nullopt;
    }
    TraceStep step;
    auto id = parse_int(tok, line_);
    if (id <= 0) throw ProofFormatError(line_, "step id must be positive");
    step.id = static_cast<StepId>(id);
    bool lits_done = false, ants_done = false;
    while (next_token(rest, tok)) {
      auto v = parse_int(tok, line_);
      if (!lits_done) {
        if (v == 0)
          lits_done = true;
        else
          step.literals.push_back(Literal(static_cast<std::int32_t>(v)));
      } else if (!ants_done) {
        if (v == 0)
          ants_done = true;
        else if (v < 0)
          throw ProofFormatError(line_, "negative antecedent id");
        else
          step.antecedents.push_back(static_cast<StepId>(v));
      } else {
        throw ProofFormatError(line_, "tokens after terminating 0");
      }
    }
    if (!ants_done) throw ProofFormatError(line_, "step line missing terminating zeros");

    switch (step.antecedents.size()) {
      case 0:
        if (step.id <= header_.num_inputs) {
          step.kind = StepKind::InputClause;
          step.input_index = step.id - 1;
        } else {
          step.kind = StepKind::InputCube;
        }
        break;
      default: {
        const TraceStep* first = lookup ? lookup(step.antecedents[0]) : nullptr;
        const bool cube = first && is_cube_step(first->kind);
        if (step.antecedents.size() == 1) {
          step.kind = cube ? StepKind::ExistentialReduction : StepKind::UniversalReduction;
        } else {
          step.kind = cube ? StepKind::CubeResolution : StepKind::Resolution;
          const TraceStep* second = lookup ? lookup(step.antecedents[1]) : nullptr;
          if (first && second && step.antecedents.size() == 2)
            step.pivot = infer_pivot(first->literals, second->literals);
        }
        break;
      }
    }
    return step;
  }
  return std::nullopt;
}

Proof read_proof(std::istream& in) {
  TraceReader reader(in);
  auto header = reader.header();
  Proof proof;
  proof.max_var = header.max_var;
  proof.num_inputs = header.num_inputs;
  std::unordered_map<StepId, std::size_t> index;
  auto lookup = [&](StepId id) -> const TraceStep* {
    auto it = index.find(id);
    return it == index.end() ? nullptr : &proof.steps[it->second];
  };
  while (auto step = reader.next(lookup)) {
    index[step->id] = proof.steps.size();
    proof.steps.push_back(std::move(*step));
  }
  auto footer = reader.footer();
  if (!footer) throw ProofFormatError(reader.line(), "missing result line");
  proof.kind = footer->kind;
  proof.root = footer->root;
  return proof;
}

Proof read_proof_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open proof " + path.string());
  return read_proof(in);
}

void write_proof(std::ostream& out, const Proof& proof) {
  TraceFileWriter writer(out);
  writer.begin(proof.max_var, proof.num_inputs);
  for (const auto& s : proof.steps) writer.add(s);
  writer.finish(proof.kind, proof.root);
}

}  // namespace qgal
