// Copyright 2026 The qreuse authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qreuse/error.hpp"

namespace qreuse {

/// Dense node index, contiguous from 0 to |V|-1 within a graph.
using NodeId = std::uint32_t;
using QubitCount = std::uint32_t;
/// Accumulated circuit depth in time steps.
using Depth = std::int64_t;

/// Sentinel for "no gate path between these qubits" inside a depth matrix.
inline constexpr Depth kNoPath = -1;

enum class Role : std::uint8_t {
  Allocating,  // draws fresh |0> qubits from the pool
  Releasing,   // returns |0> qubits to the pool
  Neutral,
};

inline std::string_view to_string(Role role) {
  switch (role) {
    case Role::Allocating: return "alloc";
    case Role::Releasing: return "dealloc";
    case Role::Neutral: return "neutral";
  }
  return "?";
}

/// Per-node depth data over the node's full qubit set (io + required/released
/// + aux). Either a scalar d, meaning every input qubit reaches every output
/// qubit through a gate path of length d, or a full matrix whose (i, j) entry
/// is the longest gate-path length from the input vertex of qubit i to the
/// output vertex of qubit j (kNoPath when no path exists).
class DepthDescriptor {
 public:
  static DepthDescriptor scalar(Depth d) {
    DepthDescriptor desc;
    desc.scalar_ = d;
    return desc;
  }

  static DepthDescriptor matrix(std::vector<std::vector<Depth>> entries) {
    DepthDescriptor desc;
    desc.matrix_ = std::move(entries);
    return desc;
  }

  bool is_scalar() const { return !matrix_.has_value(); }

  Depth scalar_value() const {
    if (!is_scalar()) throw ContractError("depth descriptor is not scalar");
    return scalar_;
  }

  std::size_t matrix_dimension() const {
    return is_scalar() ? 0 : matrix_->size();
  }

  const std::vector<std::vector<Depth>>& matrix_entries() const {
    if (is_scalar()) throw ContractError("depth descriptor is not a matrix");
    return *matrix_;
  }

  /// Path length from the input vertex of qubit `from` to the output vertex
  /// of qubit `to`.
  Depth path_depth(std::size_t from, std::size_t to) const {
    if (is_scalar()) return scalar_;
    return (*matrix_)[from][to];
  }

  friend bool operator==(const DepthDescriptor& a, const DepthDescriptor& b) {
    return a.scalar_ == b.scalar_ && a.matrix_ == b.matrix_;
  }

 private:
  Depth scalar_ = 0;
  std::optional<std::vector<std::vector<Depth>>> matrix_;
};

/// One quantum operation. `role_qubits` is the required count for an
/// allocating node and the released count for a releasing node; auxiliary
/// qubits (drawn and released within the node) are counted separately and are
/// permitted on any role. `io_width` is the pass-through I/O width derived
/// from edge flows at graph construction, and `external_in` counts qubits
/// entering from outside the graph (program inputs or cut block edges).
struct Node {
  NodeId id = 0;
  Role role = Role::Neutral;
  QubitCount role_qubits = 0;
  QubitCount aux = 0;
  QubitCount io_width = 0;
  QubitCount external_in = 0;
  std::optional<DepthDescriptor> depth;

  QubitCount required() const {
    return role == Role::Allocating ? role_qubits : 0;
  }
  QubitCount released() const {
    return role == Role::Releasing ? role_qubits : 0;
  }
  /// Qubits this node asks from the pool (fresh or recycled).
  QubitCount fresh_draws() const { return required() + aux; }
  /// Qubits this node appends to the pool.
  QubitCount pool_returns() const { return released() + aux; }
  /// Size of the node's full qubit set, the depth-matrix dimension.
  QubitCount total_qubits() const { return io_width + role_qubits + aux; }
};

/// Directed data-flow edge carrying `flow` qubits. The offsets pin which
/// positions of the source's output list and the target's input list the
/// edge occupies; they are assigned canonically at construction (ascending
/// peer id) and inherited verbatim by induced subgraphs so that qubit
/// lineage is stable under partitioning.
struct Edge {
  NodeId from = 0;
  NodeId to = 0;
  QubitCount flow = 1;
  QubitCount src_offset = 0;
  QubitCount dst_offset = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

enum class ViolationKind : std::uint8_t {
  Cycle,
  RoleCount,
  FlowConservation,
  DepthMatrix,
};

inline std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::Cycle: return "cycle";
    case ViolationKind::RoleCount: return "role-count";
    case ViolationKind::FlowConservation: return "flow-conservation";
    case ViolationKind::DepthMatrix: return "depth-matrix";
  }
  return "?";
}

struct Violation {
  ViolationKind kind;
  std::optional<NodeId> node;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool clean() const { return violations.empty(); }

  std::string to_text() const {
    std::ostringstream os;
    for (const auto& v : violations) {
      os << "[" << to_string(v.kind) << "] " << v.message << "\n";
    }
    return os.str();
  }
};

class GraphBuilder;

/// Immutable sparse DAG of quantum operations. Edges are kept in canonical
/// order (ascending (from, to), duplicates merged by summing flow), so all
/// traversals and serializations are deterministic.
class ControlFlowGraph {
 public:
  std::size_t node_count() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }

  const Node& node(NodeId id) const {
    check_id(id);
    return nodes_[id];
  }

  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Edge> edges() const { return edges_; }

  /// Out-edges of `id`, ascending by target.
  std::span<const Edge> out_edges(NodeId id) const {
    check_id(id);
    return {edges_.data() + out_begin_[id], out_begin_[id + 1] - out_begin_[id]};
  }

  /// Indices into edges() of the in-edges of `id`, ascending by source.
  std::span<const std::uint32_t> in_edge_indices(NodeId id) const {
    check_id(id);
    return {in_index_.data() + in_begin_[id], in_begin_[id + 1] - in_begin_[id]};
  }

  QubitCount in_flow(NodeId id) const {
    check_id(id);
    return in_flow_[id];
  }

  QubitCount out_flow(NodeId id) const {
    check_id(id);
    return out_flow_[id];
  }

  /// Qubits arriving at the node: edge in-flow plus external inputs.
  QubitCount available_inputs(NodeId id) const {
    return in_flow(id) + nodes_[id].external_in;
  }

  /// Qubits the node holds after acting: available − released + required.
  QubitCount held_outputs(NodeId id) const {
    const Node& n = node(id);
    QubitCount avail = available_inputs(id);
    if (n.released() > avail) return n.required();
    return avail - n.released() + n.required();
  }

  bool is_acyclic() const { return topo_order_.size() == nodes_.size(); }

  /// A fixed topological order (lexicographically smallest by node id).
  std::span<const NodeId> topological_order() const {
    if (!is_acyclic()) throw ValidationError("graph contains a cycle");
    return topo_order_;
  }

  QubitCount total_fresh_draws() const { return total_fresh_draws_; }

  bool all_nodes_have_depth() const {
    return std::all_of(nodes_.begin(), nodes_.end(),
                       [](const Node& n) { return n.depth.has_value(); });
  }

  /// True for induced subgraphs whose edges keep parent positions; such
  /// graphs are views of a parent and have no standalone file form.
  bool has_explicit_positions() const { return explicit_positions_; }

 private:
  friend class GraphBuilder;

  void check_id(NodeId id) const {
    if (id >= nodes_.size()) {
      throw ContractError("unknown node id " + std::to_string(id));
    }
  }

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> out_begin_;  // size |V|+1, offsets into edges_
  std::vector<std::uint32_t> in_begin_;   // size |V|+1, offsets into in_index_
  std::vector<std::uint32_t> in_index_;
  std::vector<QubitCount> in_flow_;
  std::vector<QubitCount> out_flow_;
  std::vector<NodeId> topo_order_;  // shorter than |V| iff cyclic
  QubitCount total_fresh_draws_ = 0;
  bool explicit_positions_ = false;
};

class GraphBuilder {
 public:
  NodeId add_allocating(QubitCount required, QubitCount aux = 0) {
    return add(Role::Allocating, required, aux);
  }
  NodeId add_releasing(QubitCount released, QubitCount aux = 0) {
    return add(Role::Releasing, released, aux);
  }
  NodeId add_neutral(QubitCount aux = 0) { return add(Role::Neutral, 0, aux); }

  GraphBuilder& set_depth(NodeId id, DepthDescriptor desc) {
    at(id).depth = std::move(desc);
    return *this;
  }

  GraphBuilder& clear_depth(NodeId id) {
    at(id).depth.reset();
    return *this;
  }

  GraphBuilder& set_external_input(NodeId id, QubitCount qubits) {
    at(id).external_in = qubits;
    return *this;
  }

  GraphBuilder& add_edge(NodeId from, NodeId to, QubitCount flow = 1) {
    if (flow == 0) throw ContractError("edge flow must be at least 1");
    if (placed_) throw ContractError("cannot mix placed and plain edges");
    edges_.push_back(Edge{from, to, flow});
    return *this;
  }

  /// Adds an edge with explicit output/input positions, used when inducing
  /// block subgraphs that must keep the parent graph's qubit positions.
  GraphBuilder& add_edge_placed(NodeId from, NodeId to, QubitCount flow,
                                QubitCount src_offset, QubitCount dst_offset) {
    if (flow == 0) throw ContractError("edge flow must be at least 1");
    if (!edges_.empty() && !placed_) {
      throw ContractError("cannot mix placed and plain edges");
    }
    placed_ = true;
    edges_.push_back(Edge{from, to, flow, src_offset, dst_offset});
    return *this;
  }

  std::size_t node_count() const { return nodes_.size(); }

  ControlFlowGraph build() const {
    ControlFlowGraph g;
    g.nodes_ = nodes_;
    g.explicit_positions_ = placed_;
    const std::size_t n = nodes_.size();

    for (const Edge& e : edges_) {
      if (e.from >= n || e.to >= n) {
        throw ContractError("edge endpoint out of range");
      }
    }

    // Canonicalize: sort by (from, to); plain edges additionally merge
    // duplicates by summing flow (placed edges are unique by construction).
    std::vector<Edge> edges = edges_;
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      return std::tie(a.from, a.to) < std::tie(b.from, b.to);
    });
    g.edges_.reserve(edges.size());
    for (const Edge& e : edges) {
      if (!g.edges_.empty() && g.edges_.back().from == e.from &&
          g.edges_.back().to == e.to) {
        if (placed_) throw ContractError("duplicate placed edge");
        g.edges_.back().flow += e.flow;
      } else {
        g.edges_.push_back(e);
      }
    }

    g.out_begin_.assign(n + 1, 0);
    g.in_begin_.assign(n + 1, 0);
    g.in_flow_.assign(n, 0);
    g.out_flow_.assign(n, 0);
    for (const Edge& e : g.edges_) {
      g.out_begin_[e.from + 1]++;
      g.in_begin_[e.to + 1]++;
      g.in_flow_[e.to] += e.flow;
      g.out_flow_[e.from] += e.flow;
    }
    for (std::size_t i = 0; i < n; ++i) {
      g.out_begin_[i + 1] += g.out_begin_[i];
      g.in_begin_[i + 1] += g.in_begin_[i];
    }
    // edges_ is sorted by (from, to), so per-target in-edge lists built in
    // edge order come out ascending by source.
    g.in_index_.resize(g.edges_.size());
    {
      std::vector<std::uint32_t> cursor(g.in_begin_.begin(),
                                        g.in_begin_.end() - 1);
      for (std::uint32_t i = 0; i < g.edges_.size(); ++i) {
        g.in_index_[cursor[g.edges_[i].to]++] = i;
      }
    }

    for (NodeId v = 0; v < n; ++v) {
      Node& node = g.nodes_[v];
      node.id = v;
      QubitCount avail = g.in_flow_[v] + node.external_in;
      node.io_width = avail >= node.released() ? avail - node.released() : 0;
      g.total_fresh_draws_ += node.fresh_draws();
    }

    if (!placed_) {
      // Canonical positions: out-edges pack the source's output list in
      // ascending target order, in-edges pack the target's input list in
      // ascending source order after any external inputs.
      std::vector<QubitCount> src_cursor(n, 0);
      for (Edge& e : g.edges_) {
        e.src_offset = src_cursor[e.from];
        src_cursor[e.from] += e.flow;
      }
      for (NodeId v = 0; v < n; ++v) {
        QubitCount cursor = g.nodes_[v].external_in;
        for (std::uint32_t idx :
             std::span<const std::uint32_t>(g.in_index_.data() + g.in_begin_[v],
                                            g.in_begin_[v + 1] - g.in_begin_[v])) {
          g.edges_[idx].dst_offset = cursor;
          cursor += g.edges_[idx].flow;
        }
      }
    } else {
      // Explicit positions: verify they tile disjoint in-range spans.
      auto check_spans = [](std::vector<std::pair<QubitCount, QubitCount>>& spans,
                            QubitCount limit, const char* what) {
        std::sort(spans.begin(), spans.end());
        QubitCount prev_end = 0;
        for (auto [begin, end] : spans) {
          if (begin < prev_end || end > limit) {
            throw ContractError(std::string("placed edges overlap or exceed ") +
                                what);
          }
          prev_end = end;
        }
      };
      for (NodeId v = 0; v < n; ++v) {
        std::vector<std::pair<QubitCount, QubitCount>> spans;
        for (const Edge& e : g.out_edges(v)) {
          spans.emplace_back(e.src_offset, e.src_offset + e.flow);
        }
        check_spans(spans, g.held_outputs(v), "the source output list");
        spans.clear();
        for (std::uint32_t idx :
             std::span<const std::uint32_t>(g.in_index_.data() + g.in_begin_[v],
                                            g.in_begin_[v + 1] - g.in_begin_[v])) {
          const Edge& e = g.edges_[idx];
          spans.emplace_back(e.dst_offset, e.dst_offset + e.flow);
        }
        check_spans(spans, g.in_flow_[v] + g.nodes_[v].external_in,
                    "the target input list");
      }
    }

    // Kahn with a min-heap on node id; a short order flags a cycle.
    {
      std::vector<std::uint32_t> indeg(n, 0);
      for (const Edge& e : g.edges_) indeg[e.to]++;
      std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
      for (NodeId v = 0; v < n; ++v) {
        if (indeg[v] == 0) ready.push(v);
      }
      g.topo_order_.reserve(n);
      while (!ready.empty()) {
        NodeId v = ready.top();
        ready.pop();
        g.topo_order_.push_back(v);
        for (const Edge& e : g.out_edges(v)) {
          if (--indeg[e.to] == 0) ready.push(e.to);
        }
      }
    }
    return g;
  }

 private:
  NodeId add(Role role, QubitCount role_qubits, QubitCount aux) {
    Node n;
    n.id = static_cast<NodeId>(nodes_.size());
    n.role = role;
    n.role_qubits = role_qubits;
    n.aux = aux;
    nodes_.push_back(std::move(n));
    return nodes_.back().id;
  }

  Node& at(NodeId id) {
    if (id >= nodes_.size()) {
      throw ContractError("unknown node id " + std::to_string(id));
    }
    return nodes_[id];
  }

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  bool placed_ = false;
};

/// Checks a constructed graph and reports every violation; an empty report
/// means the graph is well-formed for the passes. Nothing is thrown.
inline ValidationReport validate(const ControlFlowGraph& graph) {
  ValidationReport report;
  auto add = [&](ViolationKind kind, std::optional<NodeId> node,
                 std::string msg) {
    report.violations.push_back(Violation{kind, node, std::move(msg)});
  };

  if (!graph.is_acyclic()) {
    // Name the nodes left unscheduled by Kahn's algorithm; they all sit on or
    // behind a cycle.
    std::vector<bool> placed(graph.node_count(), false);
    std::size_t done = 0;
    {
      std::vector<std::uint32_t> indeg(graph.node_count(), 0);
      for (const Edge& e : graph.edges()) indeg[e.to]++;
      std::vector<NodeId> stack;
      for (NodeId v = 0; v < graph.node_count(); ++v) {
        if (indeg[v] == 0) stack.push_back(v);
      }
      while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        placed[v] = true;
        ++done;
        for (const Edge& e : graph.out_edges(v)) {
          if (--indeg[e.to] == 0) stack.push_back(e.to);
        }
      }
    }
    std::ostringstream os;
    os << "cycle through nodes {";
    bool first = true;
    for (NodeId v = 0; v < graph.node_count(); ++v) {
      if (!placed[v]) {
        if (!first) os << ", ";
        os << v;
        first = false;
      }
    }
    os << "}";
    (void)done;
    add(ViolationKind::Cycle, std::nullopt, os.str());
  }

  for (const Node& n : graph.nodes()) {
    if (n.role == Role::Allocating && n.role_qubits == 0) {
      add(ViolationKind::RoleCount, n.id,
          "node " + std::to_string(n.id) +
              ": allocating node must require at least 1 qubit");
    }
    if (n.role == Role::Releasing && n.role_qubits == 0) {
      add(ViolationKind::RoleCount, n.id,
          "node " + std::to_string(n.id) +
              ": releasing node must release at least 1 qubit");
    }

    const QubitCount avail = graph.available_inputs(n.id);
    if (n.released() > avail) {
      add(ViolationKind::FlowConservation, n.id,
          "node " + std::to_string(n.id) + ": releases " +
              std::to_string(n.released()) + " qubits but holds only " +
              std::to_string(avail));
    } else {
      const QubitCount held = avail - n.released() + n.required();
      if (graph.out_flow(n.id) > held) {
        add(ViolationKind::FlowConservation, n.id,
            "node " + std::to_string(n.id) + ": outgoing flow " +
                std::to_string(graph.out_flow(n.id)) + " exceeds held volume " +
                std::to_string(held));
      }
    }

    if (n.depth && !n.depth->is_scalar()) {
      const auto& m = n.depth->matrix_entries();
      const std::size_t want = n.total_qubits();
      bool square = m.size() == want;
      for (const auto& row : m) square = square && row.size() == want;
      if (!square) {
        add(ViolationKind::DepthMatrix, n.id,
            "node " + std::to_string(n.id) + ": depth matrix is not " +
                std::to_string(want) + "x" + std::to_string(want));
      } else {
        for (std::size_t i = 0; i < m.size(); ++i) {
          for (std::size_t j = 0; j < m.size(); ++j) {
            if (m[i][j] < 0 && m[i][j] != kNoPath) {
              add(ViolationKind::DepthMatrix, n.id,
                  "node " + std::to_string(n.id) + ": negative depth entry");
            }
          }
          if (m[i][i] == kNoPath) {
            add(ViolationKind::DepthMatrix, n.id,
                "node " + std::to_string(n.id) + ": depth matrix diagonal (" +
                    std::to_string(i) + ") has no path");
          }
        }
      }
    }
    if (n.depth && n.depth->is_scalar() && n.depth->scalar_value() < 0) {
      add(ViolationKind::DepthMatrix, n.id,
          "node " + std::to_string(n.id) + ": negative scalar depth");
    }
  }
  return report;
}

/// Throws ValidationError unless the graph validates cleanly.
inline void require_valid(const ControlFlowGraph& graph) {
  ValidationReport report = validate(graph);
  if (!report.clean()) {
    throw ValidationError("graph rejected:\n" + report.to_text());
  }
}

}  // namespace qreuse
