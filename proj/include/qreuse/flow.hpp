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
#include <span>
#include <vector>

#include "qreuse/graph.hpp"

namespace qreuse {

/// Positional layout of a node's full qubit set. Indices run io qubits first,
/// then the role qubits (required or released), then aux qubits. On the input
/// side a node receives io + released qubits (external inputs first, then
/// in-edges ascending by source); the last `released` positions are the ones
/// it releases. On the output side it forwards io + required qubits to its
/// out-edges ascending by target; untaken outputs idle to the program end.
struct NodeLayout {
  QubitCount io = 0;
  QubitCount required = 0;
  QubitCount released = 0;
  QubitCount aux = 0;

  static NodeLayout of(const Node& n) {
    return NodeLayout{n.io_width, n.required(), n.released(), n.aux};
  }

  QubitCount total() const { return io + required + released + aux; }
  QubitCount inputs() const { return io + released; }
  QubitCount outputs() const { return io + required; }
  QubitCount draw_slots() const { return required + aux; }

  QubitCount io_qubit(QubitCount k) const { return k; }
  QubitCount required_qubit(QubitCount k) const { return io + k; }
  QubitCount released_qubit(QubitCount k) const { return io + k; }
  QubitCount aux_qubit(QubitCount k) const {
    return io + required + released + k;
  }
  /// Qubit index of draw ordinal k (required slots first, then aux).
  QubitCount draw_qubit(QubitCount k) const {
    return k < required ? required_qubit(k) : aux_qubit(k - required);
  }
};

/// Moves per-qubit payloads along graph edges while a schedule order is
/// replayed. Each edge holds `flow` payload values, written when the source
/// is processed and consumed when the target is processed; edge offsets pin
/// the positions, and positions no edge covers are external qubits.
template <class Payload>
class EdgeTransport {
 public:
  explicit EdgeTransport(const ControlFlowGraph& graph)
      : graph_(graph), slots_(graph.edges().size()) {}

  /// Collects the inputs of `v` by position. Positions covered by an in-edge
  /// take that edge's payload; the rest (external inputs) are minted by
  /// `ext`, ascending. `on_missing` fires when an in-edge's payload was never
  /// written (its positions are then minted as well).
  template <class ExtFn, class MissingFn>
  std::vector<Payload> gather(NodeId v, ExtFn&& ext, MissingFn&& on_missing) {
    const QubitCount total = graph_.available_inputs(v);
    std::vector<Payload> in(total);
    std::vector<bool> covered(total, false);
    for (std::uint32_t idx : graph_.in_edge_indices(v)) {
      const Edge& e = graph_.edges()[idx];
      auto& vec = slots_[idx];
      if (vec.size() != e.flow) {
        on_missing(e);
      } else {
        for (QubitCount k = 0; k < e.flow; ++k) {
          in[e.dst_offset + k] = vec[k];
          covered[e.dst_offset + k] = true;
        }
      }
      vec.clear();
    }
    for (QubitCount pos = 0; pos < total; ++pos) {
      if (!covered[pos]) in[pos] = ext(pos);
    }
    return in;
  }

  template <class ExtFn>
  std::vector<Payload> gather(NodeId v, ExtFn&& ext) {
    return gather(v, ext, [](const Edge& e) {
      throw ContractError("edge " + std::to_string(e.from) + " -> " +
                          std::to_string(e.to) +
                          " consumed before its source was processed");
    });
  }

  /// Distributes the outputs of `v` to its out-edges at their offsets;
  /// uncovered output positions stay with the node to the program end.
  void scatter(NodeId v, std::span<const Payload> outputs) {
    const Edge* base = graph_.edges().data();
    for (const Edge& e : graph_.out_edges(v)) {
      auto& vec = slots_[static_cast<std::size_t>(&e - base)];
      vec.assign(outputs.begin() + e.src_offset,
                 outputs.begin() + e.src_offset + e.flow);
    }
  }

 private:
  const ControlFlowGraph& graph_;
  std::vector<std::vector<Payload>> slots_;
};

}  // namespace qreuse
