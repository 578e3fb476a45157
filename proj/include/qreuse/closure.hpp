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
#include <span>
#include <vector>

#include "qreuse/graph.hpp"

namespace qreuse {

/// All strict ancestors of `v` plus `v` itself, ascending by id. Linear in
/// the size of the reachable-backwards subgraph.
inline std::vector<NodeId> ancestry(const ControlFlowGraph& graph, NodeId v) {
  graph.node(v);  // id check
  std::vector<bool> seen(graph.node_count(), false);
  std::vector<NodeId> stack{v};
  seen[v] = true;
  std::vector<NodeId> result;
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    result.push_back(u);
    for (std::uint32_t idx : graph.in_edge_indices(u)) {
      NodeId p = graph.edges()[idx].from;
      if (!seen[p]) {
        seen[p] = true;
        stack.push_back(p);
      }
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

/// Reachability relation of the full graph confined to a node subset: the
/// members carry an edge (u, v) exactly when v is reachable from u in the
/// underlying graph.
struct ClosureGraph {
  std::vector<NodeId> members;                    // ascending
  std::vector<std::vector<NodeId>> successors;    // per member, ascending ids
  std::vector<std::uint32_t> in_degree;           // per member

  std::size_t size() const { return members.size(); }

  std::size_t edge_count() const {
    std::size_t total = 0;
    for (const auto& s : successors) total += s.size();
    return total;
  }
};

/// Builds the closure by walking a topological order in reverse while keeping
/// per-node reachability sets restricted to the subset, giving
/// O(|V| * |subset|) time and memory.
inline ClosureGraph restricted_transitive_closure(
    const ControlFlowGraph& graph, std::span<const NodeId> subset) {
  const std::size_t n = graph.node_count();
  ClosureGraph closure;
  closure.members.assign(subset.begin(), subset.end());
  std::sort(closure.members.begin(), closure.members.end());
  closure.members.erase(
      std::unique(closure.members.begin(), closure.members.end()),
      closure.members.end());
  for (NodeId m : closure.members) graph.node(m);  // id check

  const std::size_t k = closure.members.size();
  closure.successors.resize(k);
  closure.in_degree.assign(k, 0);
  if (k == 0) return closure;

  std::vector<std::int32_t> member_index(n, -1);
  for (std::size_t i = 0; i < k; ++i) {
    member_index[closure.members[i]] = static_cast<std::int32_t>(i);
  }

  const std::size_t words = (k + 63) / 64;
  std::vector<std::uint64_t> reach(n * words, 0);
  auto row = [&](NodeId v) {
    return std::span<std::uint64_t>(reach.data() + v * words, words);
  };

  std::span<const NodeId> topo = graph.topological_order();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    NodeId v = *it;
    auto rv = row(v);
    for (const Edge& e : graph.out_edges(v)) {
      auto rs = row(e.to);
      for (std::size_t w = 0; w < words; ++w) rv[w] |= rs[w];
      if (std::int32_t mi = member_index[e.to]; mi >= 0) {
        rv[mi / 64] |= std::uint64_t{1} << (mi % 64);
      }
    }
  }

  for (std::size_t i = 0; i < k; ++i) {
    auto r = row(closure.members[i]);
    auto& succ = closure.successors[i];
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t bits = r[w];
      while (bits) {
        std::size_t j = w * 64 + static_cast<std::size_t>(__builtin_ctzll(bits));
        bits &= bits - 1;
        succ.push_back(closure.members[j]);
        closure.in_degree[j]++;
      }
    }
  }
  return closure;
}

/// Full transitive closure with O(1) strict-reachability queries, built once
/// per graph for the dependency-preserving strategy. Memory is |V|^2 bits.
class TransitiveClosure {
 public:
  explicit TransitiveClosure(const ControlFlowGraph& graph)
      : n_(graph.node_count()), words_((n_ + 63) / 64), bits_(n_ * words_, 0) {
    std::span<const NodeId> topo = graph.topological_order();
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
      NodeId v = *it;
      std::uint64_t* rv = bits_.data() + v * words_;
      for (const Edge& e : graph.out_edges(v)) {
        const std::uint64_t* rs = bits_.data() + e.to * words_;
        for (std::size_t w = 0; w < words_; ++w) rv[w] |= rs[w];
        rv[e.to / 64] |= std::uint64_t{1} << (e.to % 64);
      }
    }
  }

  /// True when `to` is reachable from `from` through at least one edge.
  bool reaches(NodeId from, NodeId to) const {
    return (bits_[from * words_ + to / 64] >> (to % 64)) & 1;
  }

 private:
  std::size_t n_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

}  // namespace qreuse
