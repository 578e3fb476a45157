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

#include <vector>

#include "qreuse/qreuse.hpp"

namespace qtest {

using namespace qreuse;

// 7-node branch/join graph: one 5-qubit allocation feeding two branches, a
// single release on one branch and a later 1-qubit allocation that can reuse
// it when scheduled afterwards.
//
//   A(alloc 5) -> B, C, D, E;  B -> E;  C -> F(dealloc 1), G(alloc 1);  D -> G
struct BranchJoin {
  static constexpr NodeId A = 0, B = 1, C = 2, D = 3, E = 4, F = 5, G = 6;

  static ControlFlowGraph build(bool with_depth = true) {
    GraphBuilder b;
    b.add_allocating(5);  // A
    b.add_neutral();      // B
    b.add_neutral();      // C
    b.add_neutral();      // D
    b.add_neutral();      // E
    b.add_releasing(1);   // F
    b.add_allocating(1);  // G
    b.add_edge(A, B, 1).add_edge(A, C, 2).add_edge(A, D, 1).add_edge(A, E, 1);
    b.add_edge(B, E, 1).add_edge(C, F, 1).add_edge(C, G, 1).add_edge(D, G, 1);
    if (with_depth) {
      for (NodeId v = 0; v <= G; ++v) b.set_depth(v, DepthDescriptor::scalar(1));
    }
    return b.build();
  }
};

// Same shape with F and G neutral, each using one auxiliary qubit.
struct AuxBranchJoin {
  static constexpr NodeId A = 0, B = 1, C = 2, D = 3, E = 4, F = 5, G = 6;

  static ControlFlowGraph build() {
    GraphBuilder b;
    b.add_allocating(5);  // A
    b.add_neutral();      // B
    b.add_neutral();      // C
    b.add_neutral();      // D
    b.add_neutral();      // E
    b.add_neutral(1);     // F, aux 1
    b.add_neutral(1);     // G, aux 1
    b.add_edge(A, B, 1).add_edge(A, C, 2).add_edge(A, D, 1).add_edge(A, E, 1);
    b.add_edge(B, E, 1).add_edge(C, F, 1).add_edge(C, G, 1).add_edge(D, G, 1);
    for (NodeId v = 0; v <= G; ++v) b.set_depth(v, DepthDescriptor::scalar(1));
    return b.build();
  }
};

// 25-node graph with three independent regions and five releasing nodes; the
// initial releasing frontier is {D, N, Y} with ancestries
//   anc(D) = {A, B, D}, anc(N) = {A, B, C, E, N}, anc(Y) = {W, X, Y}
// and default costs cost(D) = 6, cost(N) = 9, cost(Y) = 1.
struct FrontierExample {
  // clang-format off
  static constexpr NodeId A = 0, B = 1, C = 2, D = 3, E = 4, F = 5, G = 6,
      H = 7, I = 8, J = 9, K = 10, L = 11, M = 12, N = 13, O = 14, P = 15,
      Q = 16, R = 17, S = 18, T = 19, U = 20, V = 21, W = 22, X = 23, Y = 24;
  // clang-format on

  static ControlFlowGraph build() {
    GraphBuilder b;
    b.add_allocating(6);  // A
    b.add_neutral();      // B
    b.add_neutral();      // C
    b.add_releasing(1);   // D
    b.add_allocating(3);  // E
    b.add_neutral();      // F
    b.add_allocating(1);  // G
    b.add_allocating(1);  // H
    b.add_neutral();      // I
    b.add_allocating(1);  // J
    b.add_neutral();      // K
    b.add_releasing(1);   // L
    b.add_neutral();      // M
    b.add_releasing(1);   // N
    b.add_neutral();      // O
    b.add_neutral();      // P
    b.add_neutral();      // Q
    b.add_neutral();      // R
    b.add_neutral();      // S
    b.add_releasing(1);   // T
    b.add_allocating(1);  // U
    b.add_neutral();      // V
    b.add_allocating(1);  // W
    b.add_neutral();      // X
    b.add_releasing(1);   // Y

    b.add_edge(A, B, 6);
    b.add_edge(B, C, 3).add_edge(B, D, 3);
    b.add_edge(C, E, 1).add_edge(C, F, 1).add_edge(C, G, 1);
    b.add_edge(D, H, 1).add_edge(D, I, 1);
    b.add_edge(I, J, 1).add_edge(J, M, 1);
    b.add_edge(H, K, 2).add_edge(K, L, 2).add_edge(L, M, 1);
    b.add_edge(E, N, 3).add_edge(E, O, 1);
    b.add_edge(N, P, 2);
    b.add_edge(P, Q, 1).add_edge(Q, R, 1).add_edge(R, S, 1).add_edge(S, T, 1);
    b.add_edge(O, U, 1).add_edge(U, V, 1).add_edge(P, V, 1).add_edge(V, T, 1);
    b.add_edge(M, R, 1);
    b.add_edge(W, X, 1).add_edge(X, Y, 1);
    return b.build();
  }
};

inline bool is_valid_order(const ControlFlowGraph& graph,
                           const std::vector<NodeId>& order) {
  if (order.size() != graph.node_count()) return false;
  std::vector<std::uint32_t> pos(graph.node_count(), 0);
  std::vector<bool> seen(graph.node_count(), false);
  for (std::uint32_t i = 0; i < order.size(); ++i) {
    if (order[i] >= graph.node_count() || seen[order[i]]) return false;
    seen[order[i]] = true;
    pos[order[i]] = i;
  }
  for (const Edge& e : graph.edges()) {
    if (pos[e.from] >= pos[e.to]) return false;
  }
  return true;
}

}  // namespace qtest
