#include "qgal/cert/certificate.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "qgal/normalize.hpp"
#include "qgal/prefix_index.hpp"
#include "qgal/solver/sat.hpp"

namespace qgal {

std::string_view to_string(CertificateKind k) { return k == CertificateKind::Skolem ? "skolem" : "herbrand"; }

UncheckedProofError::UncheckedProofError(const CheckReport& report)
    : CertificateError("proof rejected at step " + std::to_string(report.failing_step) + ": " +
                       std::string(to_string(report.reason))),
      report_(report) {}

namespace {

using LitSet = std::vector<Literal>;

LitSet as_set(const std::vector<Literal>& lits) {
  LitSet s(lits);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

struct Pair {
  LitSet condition;  // cube remainder (Skolem) or clause remainder (Herbrand)
  bool value;
};

}  // namespace

Certificate extract_certificate(const Proof& p, const Pcnf& f) {
  auto report = check_proof(p, f);
  if (!report.accepted) throw UncheckedProofError(report);

  const bool skolem = p.kind == ProofKind::Satisfaction;
  PrefixIndex index(f);
  auto defined = [&](Var v) { return skolem ? index.is_existential(v) : index.is_universal(v); };

  // Replay the derivation, reducing fully after every derived step, and
  // record one (condition, value) pair per removed literal. Literals are
  // removed innermost first so a condition only mentions variables defined
  // before the removed one.
  std::unordered_map<Var, std::vector<Pair>> pairs;
  std::unordered_map<StepId, LitSet> replay;
  for (StepId id : p.live_steps()) {
    const TraceStep& s = *p.find(id);
    LitSet cur;
    switch (s.kind) {
      case StepKind::InputClause:
      case StepKind::InputCube:
        replay[id] = as_set(s.literals);
        continue;
      case StepKind::UniversalReduction:
      case StepKind::ExistentialReduction:
        cur = replay.at(s.antecedents[0]);
        break;
      case StepKind::Resolution:
      case StepKind::CubeResolution: {
        const LitSet& a = replay.at(s.antecedents[0]);
        const LitSet& b = replay.at(s.antecedents[1]);
        Var pivot = 0;
        for (Literal l : a)
          if (std::binary_search(b.begin(), b.end(), -l)) pivot = l.var();
        if (pivot == 0) throw std::logic_error("replay lost the pivot of step " + std::to_string(id));
        for (const LitSet* side : {&a, &b})
          for (Literal l : *side)
            if (l.var() != pivot) cur.push_back(l);
        cur = as_set(cur);
        break;
      }
    }
    auto bound = skolem ? index.max_universal_level(cur) : index.max_existential_level(cur);
    for (;;) {
      auto victim = cur.end();
      for (auto it = cur.begin(); it != cur.end(); ++it)
        if (defined(it->var()) && index.level(it->var()) > bound &&
            (victim == cur.end() || index.order(it->var()) > index.order(victim->var())))
          victim = it;
      if (victim == cur.end()) break;
      Literal removed = *victim;
      cur.erase(victim);
      // Skolem: make the cube literal true. Herbrand: make the clause literal false.
      bool value = skolem ? removed.is_positive() : removed.is_negative();
      pairs[removed.var()].push_back({cur, value});
    }
    replay[id] = std::move(cur);
  }

  Certificate cert;
  cert.kind = skolem ? CertificateKind::Skolem : CertificateKind::Herbrand;
  cert.digest = canonical_digest(f).tagged();

  std::vector<Var> vars;
  for (Var v = 1; v <= index.max_var(); ++v)
    if (defined(v)) vars.push_back(v);
  std::sort(vars.begin(), vars.end(), [&](Var a, Var b) { return index.order(a) < index.order(b); });

  FunctionGraph& g = cert.graph;
  for (Var v : vars) {
    NodeId fn = g.constant(false);
    auto it = pairs.find(v);
    if (it != pairs.end()) {
      const auto& list = it->second;
      // Earlier pairs take priority: build the chain from the back.
      for (auto pit = list.rbegin(); pit != list.rend(); ++pit) {
        NodeId cond = g.constant(true);
        for (Literal l : pit->condition) {
          NodeId lit;
          if (defined(l.var())) {
            auto dep = cert.functions.find(l.var());
            if (dep == cert.functions.end())
              throw std::logic_error("condition of " + std::to_string(v) + " uses undefined " +
                                     std::to_string(l.var()));
            lit = l.is_positive() ? dep->second : g.negate(dep->second);
          } else {
            lit = g.literal(l);
          }
          // A cube condition holds when its literals are true, a clause
          // condition when its literals are false.
          cond = g.conj(cond, skolem ? lit : g.negate(lit));
        }
        fn = g.ite(cond, g.constant(pit->value), fn);
      }
    }
    cert.functions[v] = fn;
  }
  return cert;
}

std::vector<Var> dependency_violations(const Certificate& c, const Pcnf& f) {
  PrefixIndex index(f);
  const bool skolem = c.kind == CertificateKind::Skolem;
  auto defined = [&](Var v) { return skolem ? index.is_existential(v) : index.is_universal(v); };
  std::vector<Var> bad;
  for (Var v = 1; v <= index.max_var(); ++v)
    if (defined(v) && !c.functions.count(v)) bad.push_back(v);
  for (const auto& [v, root] : c.functions) {
    if (!defined(v) || root >= c.graph.size()) {
      bad.push_back(v);
      continue;
    }
    for (Var in : c.graph.support(root))
      if (defined(in) || index.level(in) >= index.level(v)) {
        bad.push_back(v);
        break;
      }
  }
  std::sort(bad.begin(), bad.end());
  bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
  return bad;
}

namespace {

bool satisfied(const Clause& clause, const std::vector<std::int8_t>& assignment) {
  for (Literal l : clause)
    if ((assignment[l.var()] > 0) == l.is_positive()) return true;
  return false;
}

bool validate_exhaustive(const Certificate& c, const Pcnf& f, const std::vector<Var>& inputs,
                         const std::vector<Var>& defined_vars) {
  const bool skolem = c.kind == CertificateKind::Skolem;
  std::vector<std::int8_t> assignment(f.effective_max_var() + 1, 0);
  std::vector<std::int8_t> values;
  const std::uint64_t total = std::uint64_t{1} << inputs.size();
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    for (std::size_t i = 0; i < inputs.size(); ++i) assignment[inputs[i]] = (bits >> i) & 1;
    c.graph.evaluate(assignment, values);
    for (Var v : defined_vars) {
      auto it = c.functions.find(v);
      assignment[v] = it == c.functions.end() ? 0 : values[it->second];
    }
    bool all = true;
    for (const auto& clause : f.matrix)
      if (!is_tautology(clause) && !satisfied(clause, assignment)) {
        all = false;
        break;
      }
    // Skolem: every universal assignment satisfies the matrix. Herbrand:
    // every existential assignment falsifies it.
    if (skolem && !all) return false;
    if (!skolem && all) return false;
  }
  return true;
}

bool validate_sat(const Certificate& c, const Pcnf& f, const ValidationBudget& budget) {
  const bool skolem = c.kind == CertificateKind::Skolem;
  SatSolver sat(f.effective_max_var());
  const Var false_var = sat.new_var();
  sat.add_clause({Literal::negative(false_var)});

  // Tseitin literals per graph node.
  std::vector<Literal> node_lit(c.graph.size());
  for (NodeId i = 0; i < c.graph.size(); ++i) {
    const auto& n = c.graph.node(i);
    switch (n.op) {
      case FunctionGraph::Op::Const:
        node_lit[i] = n.a ? Literal::negative(false_var) : Literal::positive(false_var);
        break;
      case FunctionGraph::Op::Var: node_lit[i] = Literal::positive(n.a); break;
      case FunctionGraph::Op::Not: node_lit[i] = -node_lit[n.a]; break;
      case FunctionGraph::Op::And: {
        Literal t = Literal::positive(sat.new_var());
        Literal a = node_lit[n.a], b = node_lit[n.b];
        sat.add_clause({-t, a});
        sat.add_clause({-t, b});
        sat.add_clause({t, -a, -b});
        node_lit[i] = t;
        break;
      }
    }
  }
  auto mapped = [&](Literal l) {
    auto it = c.functions.find(l.var());
    if (it == c.functions.end()) return l;
    Literal fn = node_lit[it->second];
    return l.is_positive() ? fn : -fn;
  };
  PrefixIndex index(f);
  auto defined = [&](Var v) { return skolem ? index.is_existential(v) : index.is_universal(v); };
  // Defined variables without a function read as constant false.
  auto substitute = [&](Literal l) {
    if (!defined(l.var())) return l;
    if (!c.functions.count(l.var()))
      return l.is_positive() ? Literal::positive(false_var) : Literal::negative(false_var);
    return mapped(l);
  };

  if (skolem) {
    // Search for a universal assignment falsifying some clause.
    std::vector<Literal> some;
    for (const auto& clause : f.matrix) {
      if (is_tautology(clause)) continue;
      Literal sel = Literal::positive(sat.new_var());
      for (Literal l : clause) sat.add_clause({-sel, -substitute(l)});
      some.push_back(sel);
    }
    sat.add_clause(some);
  } else {
    for (const auto& clause : f.matrix) {
      std::vector<Literal> lits;
      for (Literal l : clause) lits.push_back(substitute(l));
      sat.add_clause(lits);
    }
  }
  Limits limits;
  limits.time_seconds = budget.sat_seconds;
  switch (sat.solve(limits)) {
    case SatSolver::Result::Sat: return false;
    case SatSolver::Result::Unsat: return true;
    case SatSolver::Result::Unknown: break;
  }
  throw ValidationInconclusive("SAT check did not finish within the budget");
}

}  // namespace

bool validate_certificate(const Certificate& c, const Pcnf& f, const ValidationBudget& budget) {
  PrefixIndex index(f);
  const bool skolem = c.kind == CertificateKind::Skolem;
  auto defined = [&](Var v) { return skolem ? index.is_existential(v) : index.is_universal(v); };
  std::vector<bool> relevant(f.effective_max_var() + 1, false);
  for (const auto& clause : f.matrix)
    for (Literal l : clause) relevant[l.var()] = true;
  for (const auto& [v, root] : c.functions) {
    if (root >= c.graph.size()) throw CertificateError("function root out of range");
    for (Var in : c.graph.support(root))
      if (in < relevant.size()) relevant[in] = true;
  }
  std::vector<Var> inputs, defined_vars;
  for (Var v = 1; v <= f.effective_max_var(); ++v) {
    if (defined(v))
      defined_vars.push_back(v);
    else if (relevant[v])
      inputs.push_back(v);
  }
  // Functions are evaluated on the inputs alone; a defined variable read by
  // another function would make the substitution ill-founded.
  if (!dependency_violations(c, f).empty()) return false;

  if (inputs.size() <= budget.exhaustive_vars) return validate_exhaustive(c, f, inputs, defined_vars);
  return validate_sat(c, f, budget);
}

void write_certificate(std::ostream& out, const Certificate& c) {
  out << "qcert " << to_string(c.kind) << ' ' << c.digest << '\n';
  out << "n " << c.graph.size() << '\n';
  for (NodeId i = 0; i < c.graph.size(); ++i) {
    const auto& n = c.graph.node(i);
    out << i << ' ';
    switch (n.op) {
      case FunctionGraph::Op::Const: out << "const " << n.a; break;
      case FunctionGraph::Op::Var: out << "var " << n.a; break;
      case FunctionGraph::Op::Not: out << "not " << n.a; break;
      case FunctionGraph::Op::And: out << "and " << n.a << ' ' << n.b; break;
    }
    out << '\n';
  }
  for (const auto& [v, root] : c.functions) out << "f " << v << ' ' << root << '\n';
}

Certificate read_certificate(std::istream& in) {
  Certificate c;
  std::string line;
  std::size_t line_no = 0;
  auto error = [&](const std::string& msg) {
    return CertificateError("certificate line " + std::to_string(line_no) + ": " + msg);
  };
  bool header = false;
  std::size_t declared = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok == "c") continue;
    if (!header) {
      std::string kind;
      if (tok != "qcert" || !(ls >> kind >> c.digest)) throw error("expected 'qcert <kind> <digest>'");
      if (kind == "skolem")
        c.kind = CertificateKind::Skolem;
      else if (kind == "herbrand")
        c.kind = CertificateKind::Herbrand;
      else
        throw error("unknown certificate kind '" + kind + "'");
      header = true;
    } else if (tok == "n") {
      if (!(ls >> declared)) throw error("malformed node count");
    } else if (tok == "f") {
      Var v;
      NodeId root;
      if (!(ls >> v >> root)) throw error("malformed function line");
      if (root >= c.graph.size()) throw error("function root refers to an unknown node");
      c.functions[v] = root;
    } else {
      NodeId id = static_cast<NodeId>(std::stoul(tok));
      std::string op;
      ls >> op;
      FunctionGraph::Node n;
      if (op == "const") {
        n.op = FunctionGraph::Op::Const;
        ls >> n.a;
      } else if (op == "var") {
        n.op = FunctionGraph::Op::Var;
        ls >> n.a;
      } else if (op == "not") {
        n.op = FunctionGraph::Op::Not;
        ls >> n.a;
      } else if (op == "and") {
        n.op = FunctionGraph::Op::And;
        ls >> n.a >> n.b;
      } else {
        throw error("unknown node op '" + op + "'");
      }
      if (!ls) throw error("malformed node line");
      if (id < 2) {
        if (n.op != FunctionGraph::Op::Const || n.a != id) throw error("nodes 0 and 1 must be the constants");
        continue;
      }
      if (id != c.graph.size()) throw error("node ids must be consecutive");
      try {
        c.graph.append(n);
      } catch (const std::invalid_argument& e) {
        throw error(e.what());
      }
    }
  }
  if (!header) throw error("missing header");
  if (declared != 0 && declared != c.graph.size()) throw error("node count mismatch");
  return c;
}

void write_certificate_file(const std::filesystem::path& path, const Certificate& c) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_certificate(out, c);
}

Certificate read_certificate_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_certificate(in);
}

}  // namespace qgal
