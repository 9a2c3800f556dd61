#include "qgal/cert/function_graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace qgal {
namespace {

std::uint64_t key(const FunctionGraph::Node& n) {
  return (static_cast<std::uint64_t>(n.op) << 62) ^ (static_cast<std::uint64_t>(n.a) << 31) ^ n.b;
}

}  // namespace

FunctionGraph::FunctionGraph() {
  nodes_.push_back({Op::Const, 0, 0});
  nodes_.push_back({Op::Const, 1, 0});
}

NodeId FunctionGraph::intern(const Node& node) {
  auto k = key(node);
  auto [it, inserted] = table_.emplace(k, static_cast<NodeId>(nodes_.size()));
  if (!inserted) {
    if (nodes_[it->second] == node) return it->second;
    // Key collision: fall back to an unshared node.
    nodes_.push_back(node);
    return static_cast<NodeId>(nodes_.size() - 1);
  }
  nodes_.push_back(node);
  return it->second;
}

NodeId FunctionGraph::var(Var v) { return intern({Op::Var, v, 0}); }

NodeId FunctionGraph::negate(NodeId n) {
  const Node& x = nodes_[n];
  if (x.op == Op::Const) return x.a ? 0 : 1;
  if (x.op == Op::Not) return x.a;
  return intern({Op::Not, n, 0});
}

NodeId FunctionGraph::conj(NodeId x, NodeId y) {
  if (x == 0 || y == 0) return 0;
  if (x == 1) return y;
  if (y == 1) return x;
  if (x == y) return x;
  if (negate(x) == y) return 0;
  if (x > y) std::swap(x, y);
  return intern({Op::And, x, y});
}

NodeId FunctionGraph::ite(NodeId c, NodeId t, NodeId e) {
  if (c == 1 || t == e) return t;
  if (c == 0) return e;
  return disj(conj(c, t), conj(negate(c), e));
}

NodeId FunctionGraph::append(const Node& node) {
  if ((node.op == Op::Not || node.op == Op::And) &&
      (node.a >= nodes_.size() || (node.op == Op::And && node.b >= nodes_.size())))
    throw std::invalid_argument("node refers to a later node");
  nodes_.push_back(node);
  table_.emplace(key(node), static_cast<NodeId>(nodes_.size() - 1));
  return static_cast<NodeId>(nodes_.size() - 1);
}

void FunctionGraph::evaluate(const std::vector<std::int8_t>& assignment,
                             std::vector<std::int8_t>& values) const {
  values.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    switch (n.op) {
      case Op::Const: values[i] = static_cast<std::int8_t>(n.a); break;
      case Op::Var: values[i] = n.a < assignment.size() && assignment[n.a] > 0; break;
      case Op::Not: values[i] = !values[n.a]; break;
      case Op::And: values[i] = values[n.a] && values[n.b]; break;
    }
  }
}

bool FunctionGraph::evaluate(NodeId root, const std::vector<std::int8_t>& assignment) const {
  std::vector<std::int8_t> values;
  evaluate(assignment, values);
  return values[root] != 0;
}

std::vector<Var> FunctionGraph::support(NodeId root) const {
  std::vector<Var> vars;
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<NodeId> stack{root};
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    if (seen[n]) continue;
    seen[n] = true;
    const Node& x = nodes_[n];
    if (x.op == Op::Var) vars.push_back(x.a);
    if (x.op == Op::Not || x.op == Op::And) stack.push_back(x.a);
    if (x.op == Op::And) stack.push_back(x.b);
  }
  std::sort(vars.begin(), vars.end());
  return vars;
}

}  // namespace qgal
