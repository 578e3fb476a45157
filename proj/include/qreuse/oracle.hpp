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
#include <string>
#include <vector>

#include "qreuse/flow.hpp"
#include "qreuse/graph.hpp"
#include "qreuse/reuse.hpp"

namespace qreuse {

/// Brute-force reachability matrix (strict): m[u][v] is true when v is
/// reachable from u through at least one edge. Cubic-time closure over the
/// adjacency matrix; independent of the traversal-based implementations.
inline std::vector<std::vector<bool>> reachability_matrix(
    const ControlFlowGraph& graph) {
  const std::size_t n = graph.node_count();
  std::vector<std::vector<bool>> m(n, std::vector<bool>(n, false));
  for (const Edge& e : graph.edges()) m[e.from][e.to] = true;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!m[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (m[k][j]) m[i][j] = true;
      }
    }
  }
  return m;
}

inline constexpr std::size_t kEnumerationGuard = 12;

struct MinWidthResult {
  QubitCount min_width = 0;
  std::vector<NodeId> witness;
  std::uint64_t orders_tried = 0;
};

namespace detail {

struct EnumState {
  const ControlFlowGraph* graph;
  std::vector<std::uint32_t> indeg;
  std::vector<bool> scheduled;
  std::vector<NodeId> order;
  MinWidthResult result;
  bool any = false;
};

/// Depth-first enumeration of all topological sorts with on-the-fly greedy
/// pool accounting. Greedy width = total fresh draws, and fresh draws only
/// grow, which justifies the running-width prune.
inline void enumerate_orders(EnumState& state, QubitCount fresh,
                             QubitCount pool) {
  const ControlFlowGraph& g = *state.graph;
  if (state.order.size() == g.node_count()) {
    state.result.orders_tried++;
    if (!state.any || fresh < state.result.min_width) {
      state.any = true;
      state.result.min_width = fresh;
      state.result.witness = state.order;
    }
    return;
  }
  if (state.any && fresh >= state.result.min_width) {
    return;  // cannot improve: fresh never decreases
  }
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (state.scheduled[v] || state.indeg[v] != 0) continue;
    const Node& n = g.node(v);
    QubitCount bound = std::min(pool, n.fresh_draws());
    QubitCount next_fresh = fresh + n.fresh_draws() - bound;
    QubitCount next_pool = pool - bound + n.pool_returns();

    state.scheduled[v] = true;
    state.order.push_back(v);
    for (const Edge& e : g.out_edges(v)) state.indeg[e.to]--;

    enumerate_orders(state, next_fresh, next_pool);

    for (const Edge& e : g.out_edges(v)) state.indeg[e.to]++;
    state.order.pop_back();
    state.scheduled[v] = false;
  }
}

}  // namespace detail

/// Enumerates every topological sort (graphs up to 12 nodes), applies greedy
/// reuse to each and returns the minimal width with one witnessing order.
inline MinWidthResult enumerate_min_width(const ControlFlowGraph& graph) {
  if (graph.node_count() > kEnumerationGuard) {
    throw ContractError(
        "enumeration refused: " + std::to_string(graph.node_count()) +
        " nodes exceed the " + std::to_string(kEnumerationGuard) +
        "-node guard");
  }
  require_valid(graph);
  detail::EnumState state;
  state.graph = &graph;
  state.indeg.assign(graph.node_count(), 0);
  for (const Edge& e : graph.edges()) state.indeg[e.to]++;
  state.scheduled.assign(graph.node_count(), false);
  detail::enumerate_orders(state, 0, 0);
  if (graph.node_count() == 0) state.result.orders_tried = 1;
  return state.result;
}

/// Usage intervals of one device qubit: [draw position, release position)
/// in walk order; an open interval ends at order.size().
using DeviceIntervals =
    std::map<std::uint32_t, std::vector<std::pair<std::uint32_t, std::uint32_t>>>;

struct ReplayReport {
  QubitCount width = 0;
  std::vector<std::string> violations;
  DeviceIntervals intervals;

  bool clean() const { return violations.empty(); }
};

/// Replays a schedule against an explicit device pool, independently of the
/// pass that produced it: every binding must consume a pool entry that was
/// released strictly earlier and not consumed twice. Problems are reported,
/// not thrown.
inline ReplayReport simulate_pool(const Schedule& schedule,
                                  const ControlFlowGraph& graph) {
  ReplayReport report;
  if (!validate(graph).clean()) {
    report.violations.push_back("graph fails validation; replay skipped");
    return report;
  }
  const std::vector<NodeId>& order = schedule.sort.order;

  std::map<QubitSlot, QubitSlot> by_to;
  for (const ReuseBinding& b : schedule.bindings) {
    if (!by_to.emplace(b.to, b.from).second) {
      report.violations.push_back("target slot bound twice: node " +
                                  std::to_string(b.to.node));
    }
  }

  std::vector<bool> seen(graph.node_count(), false);
  for (NodeId v : order) {
    if (v >= graph.node_count() || seen[v]) {
      report.violations.push_back("order is not a permutation of the nodes");
      return report;
    }
    seen[v] = true;
  }
  if (order.size() != graph.node_count()) {
    report.violations.push_back("order does not cover every node");
    return report;
  }

  struct PoolItem {
    QubitSlot slot;
    std::uint32_t device;
  };
  std::vector<PoolItem> pool;
  EdgeTransport<std::uint32_t> lineage(graph);
  std::uint32_t next_device = 0;
  std::uint64_t matched_targets = 0;

  auto open_interval = [&](std::uint32_t device, std::uint32_t pos) {
    report.intervals[device].emplace_back(pos,
                                          static_cast<std::uint32_t>(order.size()));
  };
  auto close_interval = [&](std::uint32_t device, std::uint32_t pos) {
    auto& segments = report.intervals[device];
    if (!segments.empty()) segments.back().second = pos;
  };

  for (std::uint32_t pos = 0; pos < order.size(); ++pos) {
    const NodeId v = order[pos];
    const Node& n = graph.node(v);
    const NodeLayout layout = NodeLayout::of(n);

    std::vector<std::uint32_t> inputs = lineage.gather(
        v,
        [&](QubitCount) {
          std::uint32_t d = next_device++;
          open_interval(d, pos);
          return d;
        },
        [&](const Edge& e) {
          report.violations.push_back(
              "edge " + std::to_string(e.from) + " -> " + std::to_string(e.to) +
              " consumed before its source (order not topological?)");
        });

    std::vector<std::uint32_t> draw_devices;
    for (QubitCount o = 0; o < layout.draw_slots(); ++o) {
      const QubitCount required = layout.required;
      QubitSlot slot = o < required
                           ? QubitSlot{v, o, SlotKind::Required}
                           : QubitSlot{v, o - required, SlotKind::AuxIn};
      std::uint32_t device = 0;
      auto it = by_to.find(slot);
      if (it != by_to.end()) {
        matched_targets++;
        auto pit = std::find_if(pool.begin(), pool.end(), [&](const PoolItem& p) {
          return p.slot == it->second;
        });
        if (pit == pool.end()) {
          report.violations.push_back(
              "binding into node " + std::to_string(v) +
              " consumes a slot that is not in the pool (double use or not "
              "yet released)");
          device = next_device++;  // substitute a fresh qubit to continue
          report.width++;
        } else {
          device = pit->device;
          pool.erase(pit);
        }
      } else {
        device = next_device++;
        report.width++;
      }
      open_interval(device, pos);
      draw_devices.push_back(device);
    }

    for (QubitCount k = 0; k < layout.released; ++k) {
      std::uint32_t device = inputs[layout.io + k];
      close_interval(device, pos);
      pool.push_back(PoolItem{QubitSlot{v, k, SlotKind::Released}, device});
    }
    for (QubitCount k = 0; k < layout.aux; ++k) {
      std::uint32_t device = draw_devices[layout.required + k];
      close_interval(device, pos);
      pool.push_back(PoolItem{QubitSlot{v, k, SlotKind::AuxOut}, device});
    }

    std::vector<std::uint32_t> outputs(layout.outputs());
    for (QubitCount k = 0; k < layout.io; ++k) outputs[k] = inputs[k];
    for (QubitCount k = 0; k < layout.required; ++k) {
      outputs[layout.io + k] = draw_devices[k];
    }
    lineage.scatter(v, outputs);
  }

  if (matched_targets != by_to.size()) {
    report.violations.push_back(
        std::to_string(by_to.size() - matched_targets) +
        " binding target(s) name slots that no node draws");
  }

  // Independent disjointness check over the reconstructed intervals.
  for (auto& [device, segments] : report.intervals) {
    for (std::size_t i = 1; i < segments.size(); ++i) {
      if (segments[i].first < segments[i - 1].second) {
        report.violations.push_back("device " + std::to_string(device) +
                                    " has overlapping usage intervals");
      }
    }
  }
  return report;
}

}  // namespace qreuse
