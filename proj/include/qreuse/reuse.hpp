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
#include <map>
#include <optional>
#include <ostream>
#include <string_view>
#include <tuple>
#include <vector>

#include "qreuse/closure.hpp"
#include "qreuse/depth.hpp"
#include "qreuse/flow.hpp"
#include "qreuse/graph.hpp"
#include "qreuse/sort.hpp"

namespace qreuse {

enum class SlotKind : std::uint8_t { Required, Released, AuxIn, AuxOut };

inline std::string_view to_string(SlotKind kind) {
  switch (kind) {
    case SlotKind::Required: return "required";
    case SlotKind::Released: return "released";
    case SlotKind::AuxIn: return "aux-in";
    case SlotKind::AuxOut: return "aux-out";
  }
  return "?";
}

/// One qubit endpoint of a node: the `index`-th slot of its kind.
struct QubitSlot {
  NodeId node = 0;
  QubitCount index = 0;
  SlotKind kind = SlotKind::Required;

  friend bool operator==(const QubitSlot&, const QubitSlot&) = default;
  friend bool operator<(const QubitSlot& a, const QubitSlot& b) {
    return std::tie(a.node, a.kind, a.index) < std::tie(b.node, b.kind, b.index);
  }
};

/// A recycled qubit: `from` (released or aux-out) feeds `to` (required or
/// aux-in) instead of a fresh device draw.
struct ReuseBinding {
  QubitSlot from;
  QubitSlot to;

  friend bool operator==(const ReuseBinding&, const ReuseBinding&) = default;
};

enum class Strategy : std::uint8_t {
  None,                  // zero bindings; the no-reuse baseline
  Greedy,                // every opportunity, FIFO
  DependencyPreserving,  // only descendants may reuse
  DepthPreserving,       // only bindings that keep the depth unchanged
};

inline std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::None: return "none";
    case Strategy::Greedy: return "greedy";
    case Strategy::DependencyPreserving: return "dependency";
    case Strategy::DepthPreserving: return "depth";
  }
  return "?";
}

inline std::ostream& operator<<(std::ostream& os, Strategy s) {
  return os << to_string(s);
}

inline std::ostream& operator<<(std::ostream& os, SlotKind kind) {
  return os << to_string(kind);
}

inline std::ostream& operator<<(std::ostream& os, const QubitSlot& slot) {
  return os << "(" << slot.node << ", " << slot.index << ", " << slot.kind
            << ")";
}

/// Device qubits assigned to a node's slots: `draws` covers required then
/// aux-in slots, `releases` covers released then aux-out slots.
struct NodeDevices {
  std::vector<std::uint32_t> draws;
  std::vector<std::uint32_t> releases;
};

/// The pass output: a full order, the reuse bindings, derived metrics and the
/// per-slot device assignment. Width counts device-pool draws; depth is
/// present when every node carries a depth descriptor.
struct Schedule {
  SortResult sort;
  std::vector<ReuseBinding> bindings;
  QubitCount width = 0;
  std::optional<Depth> depth;
  std::vector<NodeDevices> devices;
};

/// A released qubit waiting in the reuse pool, annotated with its device and
/// the accumulated depth at its release.
struct PoolEntry {
  QubitSlot slot;
  std::uint32_t device = 0;
  Depth exit_depth = 0;
};

namespace detail {

/// Walks a sort order, consulting `choose` for each draw slot and keeping the
/// pool, bindings, device lineage and (optionally) depth replay in sync.
/// `choose(v, ordinal, qubit_index, pool, fresh_exits)` returns the pool
/// index to bind or nullopt for a fresh draw; the pool shrinks between slots.
template <class Chooser>
Schedule walk_schedule(const ControlFlowGraph& graph, SortResult sort,
                       Chooser&& choose, bool track_depth) {
  Schedule schedule;
  schedule.devices.resize(graph.node_count());

  std::vector<PoolEntry> pool;
  EdgeTransport<std::uint32_t> lineage(graph);
  std::optional<DepthReplay> replay;
  if (track_depth) replay.emplace(graph);

  std::uint32_t next_device = 0;
  QubitCount width = 0;

  for (NodeId v : sort.order) {
    const Node& n = graph.node(v);
    const NodeLayout layout = NodeLayout::of(n);

    std::span<const Depth> fresh_exits;
    if (replay) fresh_exits = replay->begin_node(v);

    std::vector<std::uint32_t> inputs =
        lineage.gather(v, [&](QubitCount) { return next_device++; });

    NodeDevices& devices = schedule.devices[v];
    devices.draws.reserve(layout.draw_slots());
    for (QubitCount o = 0; o < layout.draw_slots(); ++o) {
      const QubitCount qubit = layout.draw_qubit(o);
      const QubitSlot to_slot =
          o < layout.required
              ? QubitSlot{v, o, SlotKind::Required}
              : QubitSlot{v, o - layout.required, SlotKind::AuxIn};
      std::optional<std::size_t> pick = choose(v, o, qubit, pool, fresh_exits);
      if (pick) {
        const PoolEntry entry = pool[*pick];
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(*pick));
        schedule.bindings.push_back(ReuseBinding{entry.slot, to_slot});
        devices.draws.push_back(entry.device);
        if (replay) replay->set_draw_entry(qubit, entry.exit_depth);
      } else {
        devices.draws.push_back(next_device++);
        width++;
      }
    }

    std::span<const Depth> exits;
    if (replay) exits = replay->commit_node(v);

    // Pool grows only after the node's own draws; a node never feeds itself.
    devices.releases.reserve(n.pool_returns());
    for (QubitCount k = 0; k < layout.released; ++k) {
      const std::uint32_t device = inputs[layout.io + k];
      devices.releases.push_back(device);
      pool.push_back(PoolEntry{QubitSlot{v, k, SlotKind::Released}, device,
                               replay ? exits[layout.released_qubit(k)] : 0});
    }
    for (QubitCount k = 0; k < layout.aux; ++k) {
      const std::uint32_t device = devices.draws[layout.required + k];
      devices.releases.push_back(device);
      pool.push_back(PoolEntry{QubitSlot{v, k, SlotKind::AuxOut}, device,
                               replay ? exits[layout.aux_qubit(k)] : 0});
    }

    std::vector<std::uint32_t> outputs(layout.outputs());
    for (QubitCount k = 0; k < layout.io; ++k) outputs[k] = inputs[k];
    for (QubitCount k = 0; k < layout.required; ++k) {
      outputs[layout.io + k] = devices.draws[k];
    }
    lineage.scatter(v, outputs);
  }

  schedule.width = width;
  if (replay) schedule.depth = replay->final_depth();
  schedule.sort = std::move(sort);
  return schedule;
}

/// Depth-preserving admission: binding the pool entry to draw slot `qubit`
/// must not raise any exit depth of the node beyond its fresh-draw value.
inline bool depth_admissible(const Node& n, const NodeLayout& layout,
                             QubitCount qubit, Depth entry_depth,
                             std::span<const Depth> fresh_exits) {
  for (QubitCount k = 0; k < layout.total(); ++k) {
    Depth step = n.depth->path_depth(qubit, k);
    if (step == kNoPath) continue;
    if (entry_depth + step > fresh_exits[k]) return false;
  }
  return true;
}

}  // namespace detail

/// Applies the selected reuse strategy along `sort`: walks the order,
/// maintains the pool of released qubits and binds them to later draw slots.
/// Unbound slots draw fresh device qubits.
inline Schedule apply_reuse(const ControlFlowGraph& graph,
                            const SortResult& sort, Strategy strategy) {
  require_valid(graph);
  if (!is_topological(graph, sort)) {
    throw ContractError("order is not a topological order of the graph");
  }
  const bool track_depth = graph.all_nodes_have_depth();
  if (strategy == Strategy::DepthPreserving && !track_depth) {
    for (const Node& n : graph.nodes()) {
      if (!n.depth) {
        throw ConfigError("depth-preserving reuse requires depth data: node " +
                          std::to_string(n.id) + " has none");
      }
    }
  }

  switch (strategy) {
    case Strategy::None:
      return detail::walk_schedule(
          graph, sort,
          [](NodeId, QubitCount, QubitCount, const std::vector<PoolEntry>&,
             std::span<const Depth>) -> std::optional<std::size_t> {
            return std::nullopt;
          },
          track_depth);

    case Strategy::Greedy:
      // Order of selection does not change the reuse volume, so take the
      // oldest entry for determinism.
      return detail::walk_schedule(
          graph, sort,
          [](NodeId, QubitCount, QubitCount, const std::vector<PoolEntry>& pool,
             std::span<const Depth>) -> std::optional<std::size_t> {
            if (pool.empty()) return std::nullopt;
            return std::size_t{0};
          },
          track_depth);

    case Strategy::DependencyPreserving: {
      TransitiveClosure closure(graph);
      return detail::walk_schedule(
          graph, sort,
          [&closure](NodeId v, QubitCount, QubitCount,
                     const std::vector<PoolEntry>& pool,
                     std::span<const Depth>) -> std::optional<std::size_t> {
            for (std::size_t i = 0; i < pool.size(); ++i) {
              if (closure.reaches(pool[i].slot.node, v)) return i;
            }
            return std::nullopt;
          },
          track_depth);
    }

    case Strategy::DepthPreserving:
      return detail::walk_schedule(
          graph, sort,
          [&graph](NodeId v, QubitCount, QubitCount qubit,
                   const std::vector<PoolEntry>& pool,
                   std::span<const Depth> fresh_exits)
              -> std::optional<std::size_t> {
            const Node& n = graph.node(v);
            const NodeLayout layout = NodeLayout::of(n);
            std::optional<std::size_t> best;
            for (std::size_t i = 0; i < pool.size(); ++i) {
              if (!detail::depth_admissible(n, layout, qubit,
                                            pool[i].exit_depth, fresh_exits)) {
                continue;
              }
              // Retiring the deepest admissible qubit now avoids paying its
              // depth later; ties keep the oldest entry.
              if (!best || pool[i].exit_depth > pool[*best].exit_depth) {
                best = i;
              }
            }
            return best;
          },
          track_depth);
  }
  throw ContractError("unknown strategy");
}

/// Rebuilds a schedule from an order and a binding set, verifying pool
/// integrity (each bound entry released earlier and consumed at most once).
/// Used to splice partitioned solutions and to recompute metrics.
inline Schedule materialize_schedule(const ControlFlowGraph& graph,
                                     SortResult sort,
                                     std::span<const ReuseBinding> bindings) {
  require_valid(graph);
  if (!is_topological(graph, sort)) {
    throw ContractError("order is not a topological order of the graph");
  }
  std::map<QubitSlot, QubitSlot> by_to;
  for (const ReuseBinding& b : bindings) {
    if (!by_to.emplace(b.to, b.from).second) {
      throw ContractError("inconsistent bindings: slot bound twice");
    }
  }
  Schedule schedule = detail::walk_schedule(
      graph, std::move(sort),
      [&](NodeId v, QubitCount ordinal, QubitCount,
          const std::vector<PoolEntry>& pool,
          std::span<const Depth>) -> std::optional<std::size_t> {
        const Node& n = graph.node(v);
        const QubitCount required = n.required();
        const QubitSlot to_slot =
            ordinal < required
                ? QubitSlot{v, ordinal, SlotKind::Required}
                : QubitSlot{v, ordinal - required, SlotKind::AuxIn};
        auto it = by_to.find(to_slot);
        if (it == by_to.end()) return std::nullopt;
        for (std::size_t i = 0; i < pool.size(); ++i) {
          if (pool[i].slot == it->second) return i;
        }
        throw ContractError(
            "inconsistent bindings: source slot unavailable (double use or "
            "release after use)");
      },
      graph.all_nodes_have_depth());
  if (schedule.bindings.size() != bindings.size()) {
    throw ContractError("inconsistent bindings: unmatched binding source");
  }
  return schedule;
}

/// Recomputes (width, depth) for a schedule from its order and bindings.
/// Throws on inconsistent bindings.
inline std::pair<QubitCount, std::optional<Depth>> compute_metrics(
    const Schedule& schedule, const ControlFlowGraph& graph) {
  Schedule rebuilt =
      materialize_schedule(graph, schedule.sort, schedule.bindings);
  return {rebuilt.width, rebuilt.depth};
}

}  // namespace qreuse
