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
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "qreuse/graph.hpp"
#include "qreuse/reuse.hpp"
#include "qreuse/sort.hpp"

namespace qreuse {

/// One leaf block of the (single-level) call hierarchy: a set of nodes that
/// belong to the same functional unit.
struct Block {
  std::uint32_t id = 0;
  std::vector<NodeId> nodes;
};

struct BlockTree {
  std::vector<Block> blocks;
};

/// A block's induced subgraph in local dense ids, plus the mapping back.
/// Cut in-edges become external inputs of their local target, so the induced
/// graph conserves flow and validates whenever the parent does.
struct InducedBlock {
  ControlFlowGraph graph;
  std::vector<NodeId> to_parent;  // local id -> parent id, ascending
};

inline InducedBlock induce_block(const ControlFlowGraph& parent,
                                 std::span<const NodeId> nodes) {
  InducedBlock block;
  block.to_parent.assign(nodes.begin(), nodes.end());
  std::sort(block.to_parent.begin(), block.to_parent.end());
  block.to_parent.erase(
      std::unique(block.to_parent.begin(), block.to_parent.end()),
      block.to_parent.end());

  // Work stays proportional to the block, so lookups go through the sorted
  // member list rather than a parent-sized table.
  auto to_local = [&](NodeId p) -> std::int32_t {
    auto it = std::lower_bound(block.to_parent.begin(), block.to_parent.end(), p);
    if (it == block.to_parent.end() || *it != p) return -1;
    return static_cast<std::int32_t>(it - block.to_parent.begin());
  };

  GraphBuilder builder;
  for (NodeId p : block.to_parent) {
    const Node& n = parent.node(p);
    NodeId local = 0;
    switch (n.role) {
      case Role::Allocating:
        local = builder.add_allocating(n.role_qubits, n.aux);
        break;
      case Role::Releasing:
        local = builder.add_releasing(n.role_qubits, n.aux);
        break;
      case Role::Neutral:
        local = builder.add_neutral(n.aux);
        break;
    }
    if (n.depth) builder.set_depth(local, *n.depth);

    QubitCount external = n.external_in;
    for (std::uint32_t idx : parent.in_edge_indices(p)) {
      const Edge& e = parent.edges()[idx];
      std::int32_t from_local = to_local(e.from);
      if (from_local < 0) {
        external += e.flow;
      } else {
        // Surviving edges keep the parent's positions so that block-local
        // qubit lineage matches the parent graph's; cut in-edge positions
        // become external inputs.
        builder.add_edge_placed(static_cast<NodeId>(from_local), local, e.flow,
                                e.src_offset, e.dst_offset);
      }
    }
    if (external > 0) builder.set_external_input(local, external);
  }
  block.graph = builder.build();
  return block;
}

/// A solved block collapsed to composite-node terms. The slot maps tie the
/// composite's qubit slots back to concrete slots of the block schedule:
/// draw_slots lists the block's device-pool draws (net-required ones first,
/// then the internally matched pairs), release_slots its unconsumed releases
/// (externally originated first, then the matched pairs).
struct BlockSummary {
  QubitCount net_required = 0;
  QubitCount net_released = 0;
  QubitCount aux = 0;
  Schedule schedule;
  std::vector<QubitSlot> draw_slots;
  std::vector<QubitSlot> release_slots;
};

/// Runs the full pipeline on a block subgraph and nets out its qubit flows.
/// Fresh draws whose qubits end up released inside the block act as the
/// composite's auxiliary qubits; a block that both holds fresh qubits and
/// releases outside qubits has no single node role and is rejected.
inline BlockSummary summarize_block(const ControlFlowGraph& block_graph,
                                    Strategy strategy,
                                    const SortOptions& sort_options = {}) {
  BlockSummary summary;
  SortResult sort = sort_for_reuse(block_graph, sort_options);
  summary.schedule = apply_reuse(block_graph, sort, strategy);
  const Schedule& schedule = summary.schedule;

  // Draw slots that were bound (not fresh) and pool entries that were
  // consumed inside the block.
  std::set<QubitSlot> bound_to;
  std::set<QubitSlot> consumed_from;
  for (const ReuseBinding& b : schedule.bindings) {
    bound_to.insert(b.to);
    consumed_from.insert(b.from);
  }

  // Devices minted by fresh draws, in mint order.
  std::vector<std::pair<std::uint32_t, QubitSlot>> mints;
  std::unordered_set<std::uint32_t> minted;
  // Unconsumed pool entries, in release order.
  std::vector<std::pair<std::uint32_t, QubitSlot>> leftovers;

  for (NodeId v : schedule.sort.order) {
    const Node& n = block_graph.node(v);
    const NodeDevices& devices = schedule.devices[v];
    const QubitCount required = n.required();
    for (QubitCount o = 0; o < n.fresh_draws(); ++o) {
      QubitSlot slot = o < required
                           ? QubitSlot{v, o, SlotKind::Required}
                           : QubitSlot{v, o - required, SlotKind::AuxIn};
      if (!bound_to.count(slot)) {
        mints.emplace_back(devices.draws[o], slot);
        minted.insert(devices.draws[o]);
      }
    }
    const QubitCount released = n.released();
    for (QubitCount k = 0; k < n.pool_returns(); ++k) {
      QubitSlot slot = k < released
                           ? QubitSlot{v, k, SlotKind::Released}
                           : QubitSlot{v, k - released, SlotKind::AuxOut};
      if (!consumed_from.count(slot)) {
        leftovers.emplace_back(devices.releases[k], slot);
      }
    }
  }

  std::unordered_set<std::uint32_t> leftover_devices;
  for (const auto& [device, slot] : leftovers) leftover_devices.insert(device);

  for (const auto& [device, slot] : mints) {
    if (!leftover_devices.count(device)) summary.draw_slots.push_back(slot);
  }
  summary.net_required = static_cast<QubitCount>(summary.draw_slots.size());
  for (const auto& [device, slot] : mints) {
    if (leftover_devices.count(device)) summary.draw_slots.push_back(slot);
  }
  summary.aux =
      static_cast<QubitCount>(summary.draw_slots.size()) - summary.net_required;

  for (const auto& [device, slot] : leftovers) {
    if (!minted.count(device)) summary.release_slots.push_back(slot);
  }
  summary.net_released =
      static_cast<QubitCount>(summary.release_slots.size());
  for (const auto& [device, slot] : leftovers) {
    if (minted.count(device)) summary.release_slots.push_back(slot);
  }

  if (summary.net_required > 0 && summary.net_released > 0) {
    throw PartitionError(
        "block summarizes to a simultaneous net draw (" +
        std::to_string(summary.net_required) + ") and net release (" +
        std::to_string(summary.net_released) +
        "); a finer or different partition is required");
  }
  return summary;
}

/// Advisory block count minimizing the N^2/P + P^2 solve cost: round(N^(2/3))
/// clamped to [1, n].
inline std::uint64_t suggest_partition_size(std::uint64_t n) {
  if (n == 0) throw ContractError("node count must be at least 1");
  double root = std::cbrt(static_cast<double>(n));
  auto p = static_cast<std::uint64_t>(std::llround(root * root));
  return std::clamp<std::uint64_t>(p, 1, n);
}

namespace detail {

inline std::vector<Block> checked_partition(const ControlFlowGraph& graph,
                                            const BlockTree& tree) {
  std::vector<Block> blocks = tree.blocks;
  std::sort(blocks.begin(), blocks.end(),
            [](const Block& a, const Block& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].id != i) {
      throw PartitionError("block ids must be dense from 0");
    }
  }
  std::vector<std::int32_t> owner(graph.node_count(), -1);
  for (const Block& b : blocks) {
    for (NodeId v : b.nodes) {
      graph.node(v);
      if (owner[v] >= 0) {
        throw PartitionError("node " + std::to_string(v) +
                             " appears in blocks " + std::to_string(owner[v]) +
                             " and " + std::to_string(b.id));
      }
      owner[v] = static_cast<std::int32_t>(b.id);
    }
  }
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    if (owner[v] < 0) {
      throw PartitionError("node " + std::to_string(v) +
                           " appears in no block");
    }
  }
  return blocks;
}

}  // namespace detail

/// Detailed result of a partitioned solve, for reporting and tests.
struct PartitionedSolve {
  Schedule schedule;                    // spliced, over the original graph
  std::vector<BlockSummary> summaries;  // by block id
  ControlFlowGraph composed;
  Schedule composed_schedule;
};

/// Hierarchical solve: each block is solved independently, collapsed to a
/// composite node, the composed graph is solved, and the block schedules are
/// spliced into the composite order. Cross-block bindings come from the
/// composed solution, intra-block ones from the leaves.
inline PartitionedSolve solve_partitioned_detailed(
    const ControlFlowGraph& graph, const BlockTree& tree, Strategy strategy,
    const SortOptions& sort_options = {}) {
  require_valid(graph);
  std::vector<Block> blocks = detail::checked_partition(graph, tree);

  PartitionedSolve result;
  std::vector<InducedBlock> induced;
  induced.reserve(blocks.size());
  for (const Block& b : blocks) {
    induced.push_back(induce_block(graph, b.nodes));
    try {
      result.summaries.push_back(
          summarize_block(induced.back().graph, strategy, sort_options));
    } catch (const PartitionError& e) {
      throw PartitionError("block " + std::to_string(b.id) + ": " + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError("block " + std::to_string(b.id) + ": " + e.what());
    }
  }

  // Composite nodes inherit the block's net role; a scalar depth equal to
  // the block schedule's depth conservatively couples all boundary qubits.
  GraphBuilder builder;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const BlockSummary& s = result.summaries[i];
    NodeId c = 0;
    if (s.net_required > 0) {
      c = builder.add_allocating(s.net_required, s.aux);
    } else if (s.net_released > 0) {
      c = builder.add_releasing(s.net_released, s.aux);
    } else {
      c = builder.add_neutral(s.aux);
    }
    if (s.schedule.depth) {
      builder.set_depth(c, DepthDescriptor::scalar(*s.schedule.depth));
    }
  }
  {
    std::vector<std::uint32_t> owner(graph.node_count(), 0);
    std::vector<QubitCount> external(blocks.size(), 0);
    for (const Block& b : blocks) {
      for (NodeId v : b.nodes) owner[v] = b.id;
    }
    for (const Node& n : graph.nodes()) {
      external[owner[n.id]] += n.external_in;
    }
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      if (external[i] > 0) {
        builder.set_external_input(static_cast<NodeId>(i), external[i]);
      }
    }
    for (const Edge& e : graph.edges()) {
      if (owner[e.from] != owner[e.to]) {
        builder.add_edge(owner[e.from], owner[e.to], e.flow);
      }
    }
  }
  result.composed = builder.build();
  if (!result.composed.is_acyclic()) {
    throw PartitionError(
        "blocks depend on each other cyclically; no block order exists");
  }

  SortResult composed_sort = sort_for_reuse(result.composed, sort_options);
  result.composed_schedule =
      apply_reuse(result.composed, composed_sort, strategy);

  // Splice: expand composite order into leaf orders, remap leaf bindings to
  // parent ids and translate composite bindings through the slot maps.
  std::vector<NodeId> order;
  order.reserve(graph.node_count());
  std::vector<ReuseBinding> bindings;
  auto to_parent_slot = [&](std::uint32_t block_id,
                            const QubitSlot& local) -> QubitSlot {
    return QubitSlot{induced[block_id].to_parent[local.node], local.index,
                     local.kind};
  };
  for (NodeId c : result.composed_schedule.sort.order) {
    const BlockSummary& s = result.summaries[c];
    for (NodeId local : s.schedule.sort.order) {
      order.push_back(induced[c].to_parent[local]);
    }
    for (const ReuseBinding& b : s.schedule.bindings) {
      bindings.push_back(
          ReuseBinding{to_parent_slot(c, b.from), to_parent_slot(c, b.to)});
    }
  }
  for (const ReuseBinding& b : result.composed_schedule.bindings) {
    const BlockSummary& from_s = result.summaries[b.from.node];
    const BlockSummary& to_s = result.summaries[b.to.node];
    QubitSlot from_local =
        b.from.kind == SlotKind::Released
            ? from_s.release_slots[b.from.index]
            : from_s.release_slots[from_s.net_released + b.from.index];
    QubitSlot to_local =
        b.to.kind == SlotKind::Required
            ? to_s.draw_slots[b.to.index]
            : to_s.draw_slots[to_s.net_required + b.to.index];
    bindings.push_back(ReuseBinding{to_parent_slot(b.from.node, from_local),
                                    to_parent_slot(b.to.node, to_local)});
  }

  result.schedule =
      materialize_schedule(graph, make_sort_result(graph, std::move(order)),
                           bindings);
  return result;
}

inline Schedule solve_partitioned(const ControlFlowGraph& graph,
                                  const BlockTree& tree, Strategy strategy,
                                  const SortOptions& sort_options = {}) {
  return solve_partitioned_detailed(graph, tree, strategy, sort_options)
      .schedule;
}

}  // namespace qreuse
