#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "qgal/pcnf.hpp"

namespace qgal {

using NodeId = std::uint32_t;

/// Hash-consed and-inverter graph. Node 0 is constant false and node 1
/// constant true; children always have smaller ids than their parents.
class FunctionGraph {
 public:
  enum class Op : std::uint8_t { Const, Var, Not, And };
  struct Node {
    Op op = Op::Const;
    std::uint32_t a = 0;  // Const: value, Var: variable, Not/And: first child
    std::uint32_t b = 0;  // And: second child

    bool operator==(const Node&) const = default;
  };

  FunctionGraph();

  NodeId constant(bool value) const { return value ? 1 : 0; }
  NodeId var(Var v);
  NodeId negate(NodeId n);
  NodeId conj(NodeId x, NodeId y);
  NodeId disj(NodeId x, NodeId y) { return negate(conj(negate(x), negate(y))); }
  NodeId ite(NodeId c, NodeId t, NodeId e);
  NodeId literal(Literal l) { return l.is_positive() ? var(l.var()) : negate(var(l.var())); }

  const Node& node(NodeId n) const { return nodes_[n]; }
  std::size_t size() const { return nodes_.size(); }

  /// Appends a node verbatim (used by the reader); returns its id.
  NodeId append(const Node& node);

  /// Values of all nodes under an assignment indexed by variable.
  void evaluate(const std::vector<std::int8_t>& assignment, std::vector<std::int8_t>& values) const;
  bool evaluate(NodeId root, const std::vector<std::int8_t>& assignment) const;

  /// Variables reachable from the root.
  std::vector<Var> support(NodeId root) const;

 private:
  NodeId intern(const Node& node);

  std::vector<Node> nodes_;
  std::unordered_map<std::uint64_t, NodeId> table_;
};

}  // namespace qgal
