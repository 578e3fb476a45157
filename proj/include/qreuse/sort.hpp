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
#include <cassert>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <string_view>
#include <vector>

#include "qreuse/closure.hpp"
#include "qreuse/graph.hpp"

namespace qreuse {

/// Counters for the sort pass; the cache-maintenance total is bounded by a
/// small multiple of |V| * |V_releasing|.
struct SortStats {
  std::uint64_t frontier_scans = 0;   // frontier members inspected at picks
  std::uint64_t cost_updates = 0;     // per (removed node, releasing descendant)
  std::uint64_t ancestry_visits = 0;  // nodes placed through ancestry sub-sorts
  std::uint64_t init_visits = 0;      // nodes visited building the caches

  std::uint64_t cache_touches() const {
    return frontier_scans + cost_updates + ancestry_visits + init_visits;
  }
};

struct SortResult {
  std::vector<NodeId> order;
  std::vector<std::uint32_t> position;  // position[id] = index within order
  SortStats stats;
};

/// Additive cost over a releasing node's live ancestry: the cost of v is the
/// sum of node_weight over every live ancestor of v, v included. Additivity
/// is what allows O(1) cached reads with incremental subtraction on removal.
class AncestryCost {
 public:
  virtual ~AncestryCost() = default;
  virtual std::int64_t node_weight(const Node& node) const = 0;
  virtual std::string_view name() const = 0;
};

/// Default cost: total fresh-qubit requirement (required + aux) of the
/// ancestry, i.e. how many pool draws scheduling this ancestry triggers.
class FreshQubitCost final : public AncestryCost {
 public:
  std::int64_t node_weight(const Node& node) const override {
    return node.fresh_draws();
  }
  std::string_view name() const override { return "ancestry-qubits"; }
};

enum class CacheMode : std::uint8_t {
  Auto,          // materialized below kMaterializedCacheLimit, else traversal
  Materialized,  // per-releasing ancestor vectors + reverse descendant lists
  Traversal,     // O(V+E) memory; costs maintained by descendant traversals
};

/// Above this |V| * (|V_releasing|+1) product the materialized caches would
/// dominate memory, so Auto switches to traversal-based maintenance.
inline constexpr std::uint64_t kMaterializedCacheLimit = std::uint64_t{1} << 25;

class SortState;

struct SortOptions {
  bool prioritize_aux = true;
  CacheMode cache_mode = CacheMode::Auto;
  const AncestryCost* cost = nullptr;  // defaults to FreshQubitCost
  /// Invoked after every frontier removal (used by consistency checks).
  std::function<void(const SortState&)> observer;
};

namespace detail {

/// Ready queue for Kahn-style sub-sorts. With aux priority, ready nodes that
/// use auxiliary qubits come before ready allocating nodes; ties and
/// everything else break by ascending node id.
class ReadyQueue {
 public:
  explicit ReadyQueue(bool prioritize_aux) : prioritize_aux_(prioritize_aux) {}

  void push(const Node& node) {
    if (prioritize_aux_ && node.aux == 0 && node.role == Role::Allocating) {
      low_.push(node.id);
    } else {
      high_.push(node.id);
    }
  }

  bool empty() const { return high_.empty() && low_.empty(); }

  NodeId pop() {
    auto& q = high_.empty() ? low_ : high_;
    NodeId v = q.top();
    q.pop();
    return v;
  }

 private:
  using MinHeap = std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>>;
  bool prioritize_aux_;
  MinHeap high_;
  MinHeap low_;
};

}  // namespace detail

/// Live view of the graph during the sort pass: removal flags, live
/// in-degrees, the closure over the remaining releasing nodes with its
/// frontier, and the per-releasing-node ancestry cost cache.
class SortState {
 public:
  SortState(const ControlFlowGraph& graph, const AncestryCost& cost,
            CacheMode mode = CacheMode::Auto)
      : graph_(graph),
        alive_(graph.node_count(), true),
        live_in_degree_(graph.node_count(), 0),
        rel_index_(graph.node_count(), -1),
        weight_(graph.node_count(), 0),
        stamp_(graph.node_count(), 0),
        member_stamp_(graph.node_count(), 0) {
    const std::size_t n = graph.node_count();
    for (NodeId v = 0; v < n; ++v) {
      live_in_degree_[v] =
          static_cast<std::uint32_t>(graph.in_edge_indices(v).size());
      weight_[v] = cost.node_weight(graph.node(v));
      if (graph.node(v).role == Role::Releasing) {
        rel_index_[v] = static_cast<std::int32_t>(releasing_.size());
        releasing_.push_back(v);
      }
    }
    live_releasing_ = releasing_.size();

    if (mode == CacheMode::Auto) {
      std::uint64_t product =
          static_cast<std::uint64_t>(n) * (releasing_.size() + 1);
      mode = product <= kMaterializedCacheLimit ? CacheMode::Materialized
                                                : CacheMode::Traversal;
    }
    materialized_ = mode == CacheMode::Materialized;

    cost_.assign(releasing_.size(), 0);
    closure_in_degree_.assign(releasing_.size(), 0);
    if (materialized_) {
      ancestors_.resize(releasing_.size());
      releasing_descendants_.resize(n);
      closure_successors_.resize(releasing_.size());
    }

    // One reverse traversal per releasing node computes its ancestry cost and
    // its count of releasing ancestors (the closure in-degree); materialized
    // mode additionally stores the ancestor vectors and their transposes.
    for (std::size_t i = 0; i < releasing_.size(); ++i) {
      NodeId r = releasing_[i];
      std::vector<NodeId> anc = collect_ancestry(r, /*live_only=*/false);
      stats_.init_visits += anc.size();
      std::int64_t total = 0;
      for (NodeId u : anc) {
        total += weight_[u];
        if (u != r && rel_index_[u] >= 0) {
          closure_in_degree_[i]++;
          if (materialized_) {
            closure_successors_[rel_index_[u]].push_back(
                static_cast<std::uint32_t>(i));
          }
        }
        if (materialized_ && u != r) {
          releasing_descendants_[u].push_back(static_cast<std::uint32_t>(i));
        }
      }
      cost_[i] = total;
      if (materialized_) ancestors_[i] = std::move(anc);
    }

    for (std::size_t i = 0; i < releasing_.size(); ++i) {
      if (closure_in_degree_[i] == 0) frontier_.push_back(releasing_[i]);
    }
  }

  bool materialized() const { return materialized_; }
  std::span<const NodeId> frontier() const { return frontier_; }
  std::span<const NodeId> releasing_nodes() const { return releasing_; }
  bool alive(NodeId v) const { return alive_[v]; }
  std::size_t live_releasing_count() const { return live_releasing_; }
  const SortStats& stats() const { return stats_; }

  /// Cached ancestry cost, O(1).
  std::int64_t cached_cost(NodeId releasing) const {
    return cost_[checked_rel_index(releasing)];
  }

  /// Recomputes the cost by a fresh traversal of the live ancestry, ignoring
  /// the cache. Used to cross-check incremental maintenance.
  std::int64_t recomputed_cost(NodeId releasing) const {
    checked_rel_index(releasing);
    std::int64_t total = 0;
    for_each_live_ancestor(releasing, [&](NodeId u) { total += weight_[u]; });
    return total;
  }

  std::vector<NodeId> live_ancestry(NodeId releasing) const {
    checked_rel_index(releasing);
    return collect_ancestry(releasing, /*live_only=*/true);
  }

  /// Frontier member of minimal cached cost; ties break to the lowest id.
  NodeId pick_min_cost() {
    if (frontier_.empty()) throw ContractError("frontier is empty");
    stats_.frontier_scans += frontier_.size();
    NodeId best = frontier_[0];
    std::int64_t best_cost = cost_[rel_index_[best]];
    for (std::size_t i = 1; i < frontier_.size(); ++i) {
      NodeId v = frontier_[i];
      std::int64_t c = cost_[rel_index_[v]];
      if (c < best_cost || (c == best_cost && v < best)) {
        best = v;
        best_cost = c;
      }
    }
    return best;
  }

  /// Emits the live ancestry of frontier member `v` in sub-sort order and
  /// removes it from the live graph, updating in-degrees, the costs of v's
  /// affected releasing descendants, the closure and the frontier.
  std::vector<NodeId> remove_ancestry(NodeId v, bool prioritize_aux) {
    std::size_t vi = checked_rel_index(v);
    if (!alive_[v]) throw ContractError("node already removed");

    std::vector<NodeId> members = collect_ancestry(v, /*live_only=*/true);
#ifndef NDEBUG
    // The frontier discipline guarantees the ancestry holds exactly one
    // releasing node: v itself.
    std::size_t releasing_members = 0;
    for (NodeId u : members) {
      if (rel_index_[u] >= 0) releasing_members++;
    }
    assert(releasing_members == 1);
#endif
    std::vector<NodeId> order = pop_members(members, prioritize_aux, v);

    // v was the only releasing node in its own ancestry, so the frontier
    // loses exactly v here.
    frontier_.erase(std::find(frontier_.begin(), frontier_.end(), v));
    live_releasing_--;

    if (materialized_) {
      for (std::uint32_t succ : closure_successors_[vi]) {
        if (!alive_[releasing_[succ]]) continue;
        if (--closure_in_degree_[succ] == 0) {
          frontier_.push_back(releasing_[succ]);
        }
      }
    }
    return order;
  }

  /// Emits every node still live. Valid once the frontier is exhausted (all
  /// releasing nodes emitted), but usable on any predecessor-closed remnant.
  std::vector<NodeId> drain_residual(bool prioritize_aux) {
    std::vector<NodeId> members;
    for (NodeId v = 0; v < graph_.node_count(); ++v) {
      if (alive_[v]) members.push_back(v);
    }
    return pop_members(members, prioritize_aux, std::nullopt);
  }

 private:
  std::size_t checked_rel_index(NodeId v) const {
    graph_.node(v);
    if (rel_index_[v] < 0) {
      throw ContractError("node " + std::to_string(v) + " is not releasing");
    }
    return static_cast<std::size_t>(rel_index_[v]);
  }

  /// Ancestors of v (v included). With live_only, both the start and the
  /// traversal stay on live nodes; live nodes never reach removed ones, so
  /// this equals the original ancestry intersected with the live set.
  std::vector<NodeId> collect_ancestry(NodeId v, bool live_only) const {
    std::vector<NodeId> result;
    if (live_only) {
      for_each_live_ancestor(v, [&](NodeId u) { result.push_back(u); });
      std::sort(result.begin(), result.end());
    } else {
      next_stamp_++;
      std::vector<NodeId> stack{v};
      stamp_[v] = next_stamp_;
      while (!stack.empty()) {
        NodeId u = stack.back();
        stack.pop_back();
        result.push_back(u);
        for (std::uint32_t idx : graph_.in_edge_indices(u)) {
          NodeId p = graph_.edges()[idx].from;
          if (stamp_[p] != next_stamp_) {
            stamp_[p] = next_stamp_;
            stack.push_back(p);
          }
        }
      }
      std::sort(result.begin(), result.end());
    }
    return result;
  }

  template <class Fn>
  void for_each_live_ancestor(NodeId v, Fn&& fn) const {
    next_stamp_++;
    std::vector<NodeId> stack{v};
    stamp_[v] = next_stamp_;
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      fn(u);
      for (std::uint32_t idx : graph_.in_edge_indices(u)) {
        NodeId p = graph_.edges()[idx].from;
        if (alive_[p] && stamp_[p] != next_stamp_) {
          stamp_[p] = next_stamp_;
          stack.push_back(p);
        }
      }
    }
  }

  /// Kahn over a predecessor-closed live member set; marks members dead as
  /// they are emitted and maintains live in-degrees, cost caches and (in
  /// traversal mode) the closure frontier bookkeeping for `releasing`.
  std::vector<NodeId> pop_members(const std::vector<NodeId>& members,
                                  bool prioritize_aux,
                                  std::optional<NodeId> releasing) {
    // Membership marks live in their own stamp array: the traversal-mode
    // updates below recycle stamp_ while this loop is still running.
    member_counter_++;
    const std::uint32_t in_set = member_counter_;
    for (NodeId u : members) member_stamp_[u] = in_set;

    // Cost maintenance is pointless once no releasing node will be left.
    const bool maintain_costs =
        live_releasing_ > (releasing.has_value() ? std::size_t{1} : 0);

    detail::ReadyQueue ready(prioritize_aux);
    for (NodeId u : members) {
      if (live_in_degree_[u] == 0) ready.push(graph_.node(u));
    }

    std::vector<NodeId> order;
    order.reserve(members.size());
    while (!ready.empty()) {
      NodeId u = ready.pop();
      order.push_back(u);
      alive_[u] = false;
      for (const Edge& e : graph_.out_edges(u)) {
        if (!alive_[e.to]) continue;
        if (--live_in_degree_[e.to] == 0 && member_stamp_[e.to] == in_set) {
          ready.push(graph_.node(e.to));
        }
      }
      if (materialized_) {
        if (maintain_costs && weight_[u] != 0) {
          for (std::uint32_t ri : releasing_descendants_[u]) {
            if (!alive_[releasing_[ri]]) continue;
            cost_[ri] -= weight_[u];
            stats_.cost_updates++;
          }
        }
      } else {
        update_by_traversal(u, releasing, maintain_costs);
      }
    }
    if (order.size() != members.size()) {
      throw ContractError("node set is not predecessor-closed");
    }
    stats_.ancestry_visits += order.size();
    return order;
  }

  /// Traversal-mode replacement for the reverse descendant lists: walk the
  /// still-live descendants of the removed node, adjusting their cached costs
  /// and, for the emitted releasing node itself, the closure in-degrees.
  void update_by_traversal(NodeId removed, std::optional<NodeId> releasing,
                           bool maintain_costs) {
    const bool is_chosen = releasing && *releasing == removed;
    const bool adjust_costs = maintain_costs && weight_[removed] != 0;
    // Nothing to do unless costs change or the chosen node's closure
    // successors (still-live releasing nodes) need in-degree updates.
    if (!adjust_costs && (!is_chosen || live_releasing_ <= 1)) return;

    next_stamp_++;
    const std::uint32_t seen = next_stamp_;
    scratch_.clear();
    scratch_.push_back(removed);
    while (!scratch_.empty()) {
      NodeId u = scratch_.back();
      scratch_.pop_back();
      for (const Edge& e : graph_.out_edges(u)) {
        NodeId w = e.to;
        if (!alive_[w] || stamp_[w] == seen) continue;
        stamp_[w] = seen;
        scratch_.push_back(w);
        if (std::int32_t wi = rel_index_[w]; wi >= 0) {
          if (adjust_costs) {
            cost_[wi] -= weight_[removed];
            stats_.cost_updates++;
          }
          if (is_chosen && --closure_in_degree_[wi] == 0) {
            frontier_.push_back(w);
          }
        }
      }
    }
  }

  const ControlFlowGraph& graph_;
  std::vector<std::uint8_t> alive_;
  std::vector<std::uint32_t> live_in_degree_;
  std::vector<NodeId> releasing_;       // ascending
  std::vector<std::int32_t> rel_index_; // -1 for non-releasing nodes
  std::vector<std::int64_t> weight_;
  std::vector<std::int64_t> cost_;
  std::vector<std::uint32_t> closure_in_degree_;
  std::vector<NodeId> frontier_;
  std::size_t live_releasing_ = 0;
  bool materialized_ = true;

  // Materialized caches: per releasing node its ancestor vector, per node the
  // indices of its releasing descendants, and the closure adjacency.
  std::vector<std::vector<NodeId>> ancestors_;
  std::vector<std::vector<std::uint32_t>> releasing_descendants_;
  std::vector<std::vector<std::uint32_t>> closure_successors_;

  mutable std::vector<std::uint32_t> stamp_;
  mutable std::uint32_t next_stamp_ = 0;
  std::vector<std::uint32_t> member_stamp_;
  std::uint32_t member_counter_ = 0;
  std::vector<NodeId> scratch_;
  SortStats stats_;
};

/// Reuse-prioritizing topological sort: iterates the frontier of the
/// releasing-node closure, emitting the cheapest frontier member's live
/// ancestry each round, then the residual graph. The result is a full
/// topological order in which releasing nodes come as early as the chosen
/// cost function can arrange.
inline SortResult sort_for_reuse(const ControlFlowGraph& graph,
                                 const SortOptions& options = {}) {
  require_valid(graph);
  FreshQubitCost default_cost;
  const AncestryCost& cost = options.cost ? *options.cost : default_cost;
  SortState state(graph, cost, options.cache_mode);

  SortResult result;
  result.order.reserve(graph.node_count());
  while (!state.frontier().empty()) {
    NodeId v = state.pick_min_cost();
    std::vector<NodeId> chunk = state.remove_ancestry(v, options.prioritize_aux);
    result.order.insert(result.order.end(), chunk.begin(), chunk.end());
    if (options.observer) options.observer(state);
  }
  std::vector<NodeId> rest = state.drain_residual(options.prioritize_aux);
  result.order.insert(result.order.end(), rest.begin(), rest.end());

  result.position.assign(graph.node_count(), 0);
  for (std::uint32_t i = 0; i < result.order.size(); ++i) {
    result.position[result.order[i]] = i;
  }
  result.stats = state.stats();
  return result;
}

/// Kahn-style order of a predecessor-closed node set of the full graph. With
/// prioritize_aux, ready nodes using auxiliary qubits are dequeued before
/// ready allocating nodes; ties break by ascending id.
inline std::vector<NodeId> sub_sort(const ControlFlowGraph& graph,
                                    std::span<const NodeId> nodes,
                                    bool prioritize_aux = true) {
  std::vector<bool> in_set(graph.node_count(), false);
  for (NodeId v : nodes) {
    graph.node(v);
    in_set[v] = true;
  }
  std::vector<std::uint32_t> indeg(graph.node_count(), 0);
  std::size_t count = 0;
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    if (!in_set[v]) continue;
    count++;
    for (std::uint32_t idx : graph.in_edge_indices(v)) {
      NodeId p = graph.edges()[idx].from;
      if (!in_set[p]) {
        throw ContractError("node set is not predecessor-closed: node " +
                            std::to_string(v) + " depends on " +
                            std::to_string(p));
      }
      indeg[v]++;
    }
  }

  detail::ReadyQueue ready(prioritize_aux);
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    if (in_set[v] && indeg[v] == 0) ready.push(graph.node(v));
  }
  std::vector<NodeId> order;
  order.reserve(count);
  while (!ready.empty()) {
    NodeId v = ready.pop();
    order.push_back(v);
    for (const Edge& e : graph.out_edges(v)) {
      if (in_set[e.to] && --indeg[e.to] == 0) ready.push(graph.node(e.to));
    }
  }
  if (order.size() != count) {
    throw ContractError("node set contains a cycle");
  }
  return order;
}

/// Wraps a caller-supplied order, verifying it is a topological order of the
/// graph covering every node exactly once.
inline SortResult make_sort_result(const ControlFlowGraph& graph,
                                   std::vector<NodeId> order) {
  if (order.size() != graph.node_count()) {
    throw ContractError("order does not cover every node exactly once");
  }
  SortResult result;
  result.position.assign(graph.node_count(), 0);
  std::vector<bool> seen(graph.node_count(), false);
  for (std::uint32_t i = 0; i < order.size(); ++i) {
    NodeId v = order[i];
    graph.node(v);
    if (seen[v]) {
      throw ContractError("order repeats node " + std::to_string(v));
    }
    seen[v] = true;
    result.position[v] = i;
  }
  for (const Edge& e : graph.edges()) {
    if (result.position[e.from] >= result.position[e.to]) {
      throw ContractError("order is not topological: edge " +
                          std::to_string(e.from) + " -> " +
                          std::to_string(e.to) + " is violated");
    }
  }
  result.order = std::move(order);
  return result;
}

/// True when `sort` is a topological order of `graph`.
inline bool is_topological(const ControlFlowGraph& graph,
                           const SortResult& sort) {
  if (sort.order.size() != graph.node_count()) return false;
  std::vector<bool> seen(graph.node_count(), false);
  for (NodeId v : sort.order) {
    if (v >= graph.node_count() || seen[v]) return false;
    seen[v] = true;
  }
  for (const Edge& e : graph.edges()) {
    if (sort.position[e.from] >= sort.position[e.to]) return false;
  }
  return true;
}

}  // namespace qreuse
