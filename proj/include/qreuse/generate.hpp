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

#include <cstdint>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "qreuse/graph.hpp"
#include "qreuse/hierarchy.hpp"

namespace qreuse {

/// Inlined loop of a function with a local temporary: every iteration draws
/// `aux_per_iter` qubits, runs a body and releases them again; `body_size`
/// qubits of loop data thread through all iterations (allocated by iteration
/// 0) and end in a terminal node. Also emits the per-iteration block tree.
struct FooChain {
  std::uint32_t iterations = 1;
  QubitCount body_size = 1;
  QubitCount aux_per_iter = 1;
};

struct RoleMix {
  double alloc = 0.2;
  double release = 0.2;
  double neutral = 0.6;
};

/// Random sparse DAG: mean in-degree tracks edge_density, edges stay within a
/// short window for locality, and roles/flows are drawn so the graph always
/// validates. Every node carries a depth descriptor (scalar or matrix).
struct RandomSparse {
  std::uint32_t nodes = 8;
  double edge_density = 1.5;
  RoleMix mix;
  std::uint64_t seed = 1;
};

/// A root allocation fanning out into branches of staggered lengths; even
/// branches end by releasing their qubit, odd ones keep it through a join,
/// and a final allocation draws one more qubit after the join.
struct FanoutFanin {
  std::uint32_t branches = 2;
  std::uint32_t branch_len = 1;
};

/// Alternating allocation/release chain sharing one carrier qubit; it has a
/// unique topological order.
struct SerialAllocDealloc {
  std::uint32_t pairs = 1;
};

using GraphFamily =
    std::variant<FooChain, RandomSparse, FanoutFanin, SerialAllocDealloc>;

struct Generated {
  ControlFlowGraph graph;
  std::optional<BlockTree> blocks;
};

namespace detail {

/// Bounded draw with plain modulo; bias is irrelevant for test data and the
/// result only depends on the (portable) mt19937_64 stream.
inline std::uint64_t draw(std::mt19937_64& rng, std::uint64_t bound) {
  return bound == 0 ? 0 : rng() % bound;
}

inline Generated generate_foo_chain(const FooChain& f) {
  if (f.iterations == 0 || f.body_size == 0 || f.aux_per_iter == 0) {
    throw ConfigError("foo_chain parameters must be positive");
  }
  const std::uint32_t iters = f.iterations;
  const QubitCount body = f.body_size;
  const QubitCount aux = f.aux_per_iter;

  // Ids: bodies first (foo_k = k), terminal = iters, then per iteration the
  // allocation (iters + 1 + 2k) and release (iters + 2 + 2k). Out-edges are
  // consumed ascending by target, so the body qubits always continue to the
  // next body (or the terminal) and each iteration's release takes exactly
  // its own temporaries.
  GraphBuilder builder;
  for (std::uint32_t k = 0; k < iters; ++k) builder.add_neutral();
  const NodeId terminal = builder.add_neutral();
  std::vector<NodeId> allocs(iters);
  std::vector<NodeId> deallocs(iters);
  for (std::uint32_t k = 0; k < iters; ++k) {
    allocs[k] = builder.add_allocating(k == 0 ? body + aux : aux);
    deallocs[k] = builder.add_releasing(aux);
  }
  for (std::uint32_t k = 0; k < iters; ++k) {
    builder.add_edge(allocs[k], k, k == 0 ? body + aux : aux);
    builder.add_edge(k, deallocs[k], aux);
    builder.add_edge(k, k + 1 < iters ? k + 1 : terminal, body);
  }
  for (NodeId v = 0; v < builder.node_count(); ++v) {
    builder.set_depth(static_cast<NodeId>(v), DepthDescriptor::scalar(1));
  }

  Generated g;
  g.graph = builder.build();
  BlockTree tree;
  for (std::uint32_t k = 0; k < iters; ++k) {
    Block b;
    b.id = k;
    b.nodes = {static_cast<NodeId>(k), allocs[k], deallocs[k]};
    if (k + 1 == iters) b.nodes.push_back(terminal);
    tree.blocks.push_back(std::move(b));
  }
  g.blocks = std::move(tree);
  return g;
}

inline Generated generate_random_sparse(const RandomSparse& r) {
  if (r.nodes == 0) throw ConfigError("random_sparse needs at least 1 node");
  if (r.edge_density <= 0.0) {
    throw ConfigError("random_sparse edge density must be positive");
  }
  std::mt19937_64 rng(r.seed);
  const std::uint32_t n = r.nodes;
  const std::uint32_t window = 8;

  GraphBuilder builder;
  struct Planned {
    Role role;
    QubitCount role_qubits;
    QubitCount aux;
  };
  std::vector<QubitCount> spare;  // unrouted held qubits per node
  std::vector<Planned> planned;
  std::vector<Edge> edges;

  const auto whole = static_cast<std::uint32_t>(r.edge_density);
  const double frac = r.edge_density - whole;

  for (std::uint32_t v = 0; v < n; ++v) {
    std::uint32_t want_in = whole + (draw(rng, 1000) < frac * 1000 ? 1 : 0);
    QubitCount in_flow = 0;
    std::uint32_t lo = v > window ? v - window : 0;
    std::vector<std::uint32_t> candidates;
    for (std::uint32_t p = lo; p < v; ++p) {
      if (spare[p] > 0) candidates.push_back(p);
    }
    for (std::uint32_t i = 0; i < want_in && !candidates.empty(); ++i) {
      std::size_t pick = draw(rng, candidates.size());
      std::uint32_t p = candidates[pick];
      candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(pick));
      QubitCount flow =
          1 + static_cast<QubitCount>(draw(rng, std::min<QubitCount>(2, spare[p])));
      spare[p] -= flow;
      in_flow += flow;
      edges.push_back(Edge{p, v, flow});
    }

    // A node holding no qubits must draw some; otherwise sample the mix,
    // releasing being feasible only when qubits arrived.
    double a = r.mix.alloc, rel = in_flow > 0 ? r.mix.release : 0.0,
           neu = in_flow > 0 ? r.mix.neutral : 0.0;
    double total = a + rel + neu;
    if (total <= 0.0) throw ConfigError("role mix must have positive weight");
    double t = static_cast<double>(draw(rng, 1 << 20)) / (1 << 20) * total;
    Planned p{};
    if (t < a || in_flow == 0) {
      p.role = Role::Allocating;
      p.role_qubits = 1 + static_cast<QubitCount>(draw(rng, 3));
    } else if (t < a + rel) {
      p.role = Role::Releasing;
      p.role_qubits = 1 + static_cast<QubitCount>(draw(rng, in_flow));
    } else {
      p.role = Role::Neutral;
      p.role_qubits = 0;
    }
    p.aux = draw(rng, 10) < 3 ? 1 + static_cast<QubitCount>(draw(rng, 2)) : 0;
    planned.push_back(p);
    QubitCount held = in_flow + (p.role == Role::Allocating ? p.role_qubits : 0) -
                      (p.role == Role::Releasing ? p.role_qubits : 0);
    spare.push_back(held);
  }

  for (const Planned& p : planned) {
    switch (p.role) {
      case Role::Allocating: builder.add_allocating(p.role_qubits, p.aux); break;
      case Role::Releasing: builder.add_releasing(p.role_qubits, p.aux); break;
      case Role::Neutral: builder.add_neutral(p.aux); break;
    }
  }
  for (const Edge& e : edges) builder.add_edge(e.from, e.to, e.flow);
  ControlFlowGraph without_depth = builder.build();

  // Depth data needs the derived io widths, so attach it after a first build.
  for (NodeId v = 0; v < n; ++v) {
    const QubitCount total = without_depth.node(v).total_qubits();
    if (draw(rng, 10) < 7 || total == 0) {
      builder.set_depth(v, DepthDescriptor::scalar(
                               static_cast<Depth>(draw(rng, 4))));
    } else {
      std::vector<std::vector<Depth>> m(total, std::vector<Depth>(total, 0));
      for (QubitCount i = 0; i < total; ++i) {
        for (QubitCount j = 0; j < total; ++j) {
          if (i != j && draw(rng, 4) == 0) {
            m[i][j] = kNoPath;
          } else {
            m[i][j] = static_cast<Depth>(draw(rng, 4));
          }
        }
      }
      builder.set_depth(v, DepthDescriptor::matrix(std::move(m)));
    }
  }

  Generated g;
  g.graph = builder.build();
  return g;
}

inline Generated generate_fanout_fanin(const FanoutFanin& f) {
  if (f.branches == 0 || f.branch_len == 0) {
    throw ConfigError("fanout_fanin parameters must be positive");
  }
  GraphBuilder builder;
  const NodeId root = builder.add_allocating(f.branches);
  std::vector<NodeId> holding_tails;
  for (std::uint32_t b = 0; b < f.branches; ++b) {
    NodeId prev = root;
    for (std::uint32_t i = 0; i < f.branch_len + b; ++i) {
      NodeId u = builder.add_neutral();
      builder.add_edge(prev, u, 1);
      prev = u;
    }
    if (b % 2 == 0) {
      NodeId tail = builder.add_releasing(1);
      builder.add_edge(prev, tail, 1);
    } else {
      holding_tails.push_back(prev);
    }
  }
  if (!holding_tails.empty()) {
    NodeId join = builder.add_neutral();
    for (NodeId t : holding_tails) builder.add_edge(t, join, 1);
    NodeId last = builder.add_allocating(1);
    builder.add_edge(join, last, 1);
  } else {
    builder.add_allocating(1);
  }
  for (NodeId v = 0; v < builder.node_count(); ++v) {
    builder.set_depth(static_cast<NodeId>(v), DepthDescriptor::scalar(1));
  }
  Generated g;
  g.graph = builder.build();
  return g;
}

inline Generated generate_serial(const SerialAllocDealloc& s) {
  if (s.pairs == 0) throw ConfigError("serial_alloc_dealloc needs pairs >= 1");
  GraphBuilder builder;
  NodeId prev_release = 0;
  for (std::uint32_t k = 0; k < s.pairs; ++k) {
    NodeId a = builder.add_allocating(k == 0 ? 2 : 1);
    NodeId d = builder.add_releasing(1);
    if (k > 0) builder.add_edge(prev_release, a, 1);  // the carrier qubit
    builder.add_edge(a, d, 2);
    prev_release = d;
  }
  for (NodeId v = 0; v < builder.node_count(); ++v) {
    builder.set_depth(static_cast<NodeId>(v), DepthDescriptor::scalar(1));
  }
  Generated g;
  g.graph = builder.build();
  return g;
}

}  // namespace detail

/// Deterministic graph generation for tests and benchmarks; a fixed family
/// value always yields the same graph.
inline Generated generate(const GraphFamily& family) {
  return std::visit(
      [](const auto& f) -> Generated {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, FooChain>) {
          return detail::generate_foo_chain(f);
        } else if constexpr (std::is_same_v<T, RandomSparse>) {
          return detail::generate_random_sparse(f);
        } else if constexpr (std::is_same_v<T, FanoutFanin>) {
          return detail::generate_fanout_fanin(f);
        } else {
          return detail::generate_serial(f);
        }
      },
      family);
}

}  // namespace qreuse
