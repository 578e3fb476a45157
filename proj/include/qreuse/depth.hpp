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
#include <vector>

#include "qreuse/flow.hpp"
#include "qreuse/graph.hpp"

namespace qreuse {

/// Replays accumulated circuit depth along a schedule order.
///
/// For every node the entry depth of each qubit is the exit depth of the
/// qubit's previous node (io and released qubits arrive on edges, drawn
/// qubits carry the exit depth of the pool entry they were bound to, fresh
/// qubits start at 0). Exit depths follow the critical-path recurrence
///   exit(k) = max over j with a path j->k of (entry(j) + path_depth(j, k)).
/// The diagonal is never kNoPath, so exit(k) >= entry(k) and the final depth
/// is the maximum exit value seen anywhere.
class DepthReplay {
 public:
  explicit DepthReplay(const ControlFlowGraph& graph)
      : graph_(graph), transport_(graph) {}

  /// Gathers upstream entries for `v` and returns the exit depths under the
  /// assumption that every draw slot is fresh (entry 0). Must be called once
  /// per node, in schedule order, before commit_node.
  std::span<const Depth> begin_node(NodeId v) {
    const Node& n = graph_.node(v);
    layout_ = NodeLayout::of(n);
    entries_.assign(layout_.total(), 0);
    std::vector<Depth> inputs = transport_.gather(v, [](QubitCount) {
      return Depth{0};  // external qubits start a fresh wire
    });
    for (QubitCount k = 0; k < layout_.io; ++k) {
      entries_[layout_.io_qubit(k)] = inputs[k];
    }
    for (QubitCount k = 0; k < layout_.released; ++k) {
      entries_[layout_.released_qubit(k)] = inputs[layout_.io + k];
    }
    recurrence(n, fresh_exits_);
    return fresh_exits_;
  }

  /// Records the actual entry depth of a bound draw slot (full qubit index).
  void set_draw_entry(QubitCount qubit_index, Depth entry) {
    entries_[qubit_index] = entry;
  }

  /// Recomputes exits with the actual entries, forwards them to successors
  /// and folds them into the final depth. Returns the exit depths.
  std::span<const Depth> commit_node(NodeId v) {
    const Node& n = graph_.node(v);
    recurrence(n, exits_);
    for (Depth d : exits_) final_ = std::max(final_, d);

    outputs_.resize(layout_.outputs());
    for (QubitCount k = 0; k < layout_.io; ++k) {
      outputs_[k] = exits_[layout_.io_qubit(k)];
    }
    for (QubitCount k = 0; k < layout_.required; ++k) {
      outputs_[layout_.io + k] = exits_[layout_.required_qubit(k)];
    }
    transport_.scatter(v, outputs_);
    return exits_;
  }

  Depth final_depth() const { return final_; }

 private:
  void recurrence(const Node& n, std::vector<Depth>& out) const {
    const QubitCount total = layout_.total();
    out.assign(total, 0);
    if (total == 0) return;
    const DepthDescriptor& desc = *n.depth;
    if (desc.is_scalar()) {
      Depth base = desc.scalar_value();
      Depth peak = *std::max_element(entries_.begin(), entries_.end());
      std::fill(out.begin(), out.end(), base + peak);
      return;
    }
    for (QubitCount k = 0; k < total; ++k) {
      Depth best = 0;
      bool any = false;
      for (QubitCount j = 0; j < total; ++j) {
        Depth step = desc.path_depth(j, k);
        if (step == kNoPath) continue;
        Depth candidate = entries_[j] + step;
        if (!any || candidate > best) best = candidate;
        any = true;
      }
      // The diagonal is finite in validated graphs, so `any` holds.
      out[k] = best;
    }
  }

  const ControlFlowGraph& graph_;
  EdgeTransport<Depth> transport_;
  NodeLayout layout_;
  std::vector<Depth> entries_;
  std::vector<Depth> fresh_exits_;
  std::vector<Depth> exits_;
  std::vector<Depth> outputs_;
  Depth final_ = 0;
};

}  // namespace qreuse
