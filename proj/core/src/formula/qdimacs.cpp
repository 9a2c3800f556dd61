#include "qgal/qdimacs.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace qgal {
namespace {

class LineTokens {
 public:
  explicit LineTokens(std::string_view line) : rest_(line) {}

  bool next(std::string_view& token) {
    auto start = rest_.find_first_not_of(" \t\r\f\v");
    if (start == std::string_view::npos) return false;
    rest_.remove_prefix(start);
    auto end = rest_.find_first_of(" \t\r\f\v");
    token = rest_.substr(0, end);
    rest_.remove_prefix(end == std::string_view::npos ? rest_.size() : end);
    return true;
  }

 private:
  std::string_view rest_;
};

std::int64_t to_int(std::string_view token, std::size_t line) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw ParseError(line, "expected integer, got '" + std::string(token) + "'");
  if (value > INT32_MAX || value < -INT32_MAX) throw ParseError(line, "integer out of range");
  return value;
}

class Parser {
 public:
  explicit Parser(const ParseOptions& options) : options_(options) {}

  void feed(std::string_view line) {
    ++line_no_;
    LineTokens tokens(line);
    std::string_view tok;
    if (!tokens.next(tok)) return;

    if (!header_seen_) {
      if (tok == "c") return;
      if (tok != "p") throw ParseError(line_no_, "expected header 'p cnf <vars> <clauses>'");
      std::string_view fmt, vars, clauses, extra;
      if (!tokens.next(fmt) || fmt != "cnf" || !tokens.next(vars) || !tokens.next(clauses) ||
          tokens.next(extra))
        throw ParseError(line_no_, "malformed header");
      auto v = to_int(vars, line_no_);
      auto c = to_int(clauses, line_no_);
      if (v < 0 || c < 0) throw ParseError(line_no_, "negative header value");
      declared_vars_ = static_cast<Var>(v);
      declared_clauses_ = static_cast<std::size_t>(c);
      header_seen_ = true;
      return;
    }

    if (tok == "c") {
      if (in_matrix_ && options_.strict) throw ParseError(line_no_, "comment after clauses");
      return;
    }

    if (tok == "a" || tok == "e") {
      if (in_matrix_) throw ParseError(line_no_, "quantifier line after clauses");
      QuantifierBlock block{tok == "a" ? Quantifier::Forall : Quantifier::Exists, {}};
      bool terminated = false;
      while (tokens.next(tok)) {
        if (terminated) throw ParseError(line_no_, "tokens after terminating 0");
        auto value = to_int(tok, line_no_);
        if (value == 0) {
          terminated = true;
          continue;
        }
        if (value < 0) throw ParseError(line_no_, "negative variable in quantifier line");
        Var v = static_cast<Var>(value);
        check_bound(v);
        if (v >= bound_.size()) bound_.resize(v + 1, false);
        if (bound_[v]) throw ParseError(line_no_, "variable " + std::to_string(v) + " quantified twice");
        bound_[v] = true;
        block.variables.push_back(v);
      }
      if (!terminated) throw ParseError(line_no_, "quantifier line missing terminating 0");
      if (block.variables.empty()) return;
      if (!f_.prefix.empty() && f_.prefix.back().quantifier == block.quantifier) {
        auto& vars = f_.prefix.back().variables;
        vars.insert(vars.end(), block.variables.begin(), block.variables.end());
      } else {
        f_.prefix.push_back(std::move(block));
      }
      return;
    }

    in_matrix_ = true;
    do {
      auto value = to_int(tok, line_no_);
      if (value == 0) {
        f_.matrix.push_back(std::move(clause_));
        clause_.clear();
        continue;
      }
      Literal lit(static_cast<std::int32_t>(value));
      check_bound(lit.var());
      clause_.push_back(lit);
    } while (tokens.next(tok));
  }

  Pcnf finish() {
    if (!header_seen_) throw ParseError(line_no_, "missing header");
    if (!clause_.empty()) throw ParseError(line_no_, "last clause missing terminating 0");
    if (options_.strict && f_.matrix.size() != declared_clauses_)
      throw ParseError(line_no_, "header declares " + std::to_string(declared_clauses_) +
                                     " clauses, found " + std::to_string(f_.matrix.size()));
    f_.max_var = std::max(declared_vars_, seen_max_);

    std::vector<Var> free_vars;
    std::vector<bool> is_free(f_.max_var + 1, false);
    for (const auto& clause : f_.matrix)
      for (Literal l : clause) {
        Var v = l.var();
        if ((v >= bound_.size() || !bound_[v]) && !is_free[v]) {
          is_free[v] = true;
          free_vars.push_back(v);
        }
      }
    if (!free_vars.empty()) {
      std::sort(free_vars.begin(), free_vars.end());
      if (!f_.prefix.empty() && f_.prefix.front().quantifier == Quantifier::Exists) {
        auto& vars = f_.prefix.front().variables;
        vars.insert(vars.begin(), free_vars.begin(), free_vars.end());
      } else {
        f_.prefix.insert(f_.prefix.begin(), QuantifierBlock{Quantifier::Exists, free_vars});
      }
    }
    return std::move(f_);
  }

 private:
  void check_bound(Var v) {
    if (v > declared_vars_) {
      if (options_.strict)
        throw ParseError(line_no_, "variable " + std::to_string(v) + " exceeds declared maximum " +
                                       std::to_string(declared_vars_));
    }
    seen_max_ = std::max(seen_max_, v);
  }

  ParseOptions options_;
  Pcnf f_;
  Clause clause_;
  std::vector<bool> bound_;
  std::size_t line_no_ = 0;
  std::size_t declared_clauses_ = 0;
  Var declared_vars_ = 0;
  Var seen_max_ = 0;
  bool header_seen_ = false;
  bool in_matrix_ = false;
};

}  // namespace

Pcnf parse_qdimacs(std::string_view text, const ParseOptions& options) {
  Parser parser(options);
  while (!text.empty()) {
    auto nl = text.find('\n');
    parser.feed(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
  }
  return parser.finish();
}

Pcnf parse_qdimacs(std::istream& in, const ParseOptions& options) {
  Parser parser(options);
  std::string line;
  while (std::getline(in, line)) parser.feed(line);
  return parser.finish();
}

Pcnf read_qdimacs_file(const std::filesystem::path& path, const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_qdimacs(in, options);
}

void write_qdimacs(std::ostream& out, const Pcnf& f) {
  out << "p cnf " << f.effective_max_var() << ' ' << f.matrix.size() << '\n';
  for (const auto& block : f.prefix) {
    if (block.variables.empty()) continue;
    out << quantifier_char(block.quantifier);
    for (Var v : block.variables) out << ' ' << v;
    out << " 0\n";
  }
  for (const auto& clause : f.matrix) {
    for (Literal l : clause) out << l.dimacs() << ' ';
    out << "0\n";
  }
}

std::string write_qdimacs(const Pcnf& f) {
  std::ostringstream out;
  write_qdimacs(out, f);
  return out.str();
}

void write_qdimacs_file(const std::filesystem::path& path, const Pcnf& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_qdimacs(out, f);
}

}  // namespace qgal
