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

#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qreuse/graph.hpp"
#include "qreuse/hierarchy.hpp"
#include "qreuse/reuse.hpp"

namespace qreuse {

using Json = nlohmann::ordered_json;

namespace detail {

inline std::uint64_t require_uint(const Json& j, const std::string& context) {
  if (!j.is_number_unsigned()) {
    throw ParseError(context + ": expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

inline QubitCount require_qubits(const Json& j, const std::string& context) {
  std::uint64_t v = require_uint(j, context);
  if (v > 0xffffffffull) throw ParseError(context + ": value too large");
  return static_cast<QubitCount>(v);
}

inline DepthDescriptor parse_depth(const Json& j, const std::string& context) {
  if (j.is_number()) {
    if (!j.is_number_unsigned()) {
      throw ParseError(context + ": scalar depth must be non-negative");
    }
    return DepthDescriptor::scalar(j.get<Depth>());
  }
  if (!j.is_array()) {
    throw ParseError(context + ": depth must be a number, a matrix or null");
  }
  std::vector<std::vector<Depth>> m;
  for (const Json& row : j) {
    if (!row.is_array()) throw ParseError(context + ": depth matrix row");
    std::vector<Depth> r;
    for (const Json& cell : row) {
      if (cell.is_null()) {
        r.push_back(kNoPath);
      } else if (cell.is_number_unsigned()) {
        r.push_back(cell.get<Depth>());
      } else {
        throw ParseError(context +
                         ": depth entries must be non-negative or null");
      }
    }
    m.push_back(std::move(r));
  }
  return DepthDescriptor::matrix(std::move(m));
}

inline Json depth_to_json(const std::optional<DepthDescriptor>& depth) {
  if (!depth) return nullptr;
  if (depth->is_scalar()) return depth->scalar_value();
  Json rows = Json::array();
  for (const auto& row : depth->matrix_entries()) {
    Json r = Json::array();
    for (Depth d : row) {
      if (d == kNoPath) {
        r.push_back(nullptr);
      } else {
        r.push_back(d);
      }
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

inline SlotKind parse_slot_kind(const Json& j, const std::string& context) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "required") return SlotKind::Required;
    if (s == "released") return SlotKind::Released;
    if (s == "aux-in") return SlotKind::AuxIn;
    if (s == "aux-out") return SlotKind::AuxOut;
  }
  throw ParseError(context + ": unknown slot kind");
}

}  // namespace detail

/// Parses the graph schema:
///   {"nodes":[{"id":0,"role":"alloc|dealloc|neutral","qubits":n,"aux":m,
///              "depth": d | [[...]] | null}], "edges":[[u,v,flow]]}
/// "qubits" is present exactly for alloc/dealloc roles; an absent "depth"
/// defaults to a scalar depth of 1, an explicit null means no depth data.
inline ControlFlowGraph parse_graph(const Json& doc) {
  if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("edges")) {
    throw ParseError("graph document needs \"nodes\" and \"edges\"");
  }
  const Json& nodes = doc.at("nodes");
  const Json& edges = doc.at("edges");
  if (!nodes.is_array() || !edges.is_array()) {
    throw ParseError("\"nodes\" and \"edges\" must be arrays");
  }

  struct Parsed {
    Role role;
    QubitCount qubits = 0;
    QubitCount aux = 0;
    std::optional<DepthDescriptor> depth;
    bool seen = false;
  };
  std::vector<Parsed> parsed(nodes.size());

  for (const Json& jn : nodes) {
    if (!jn.is_object()) throw ParseError("node entries must be objects");
    for (auto it = jn.begin(); it != jn.end(); ++it) {
      const std::string& key = it.key();
      if (key != "id" && key != "role" && key != "qubits" && key != "aux" &&
          key != "depth") {
        throw ParseError("unknown node field \"" + key + "\"");
      }
    }
    if (!jn.contains("id") || !jn.contains("role")) {
      throw ParseError("node entries need \"id\" and \"role\"");
    }
    std::uint64_t id = detail::require_uint(jn.at("id"), "node id");
    if (id >= nodes.size()) {
      throw ParseError("node id " + std::to_string(id) +
                       " not dense (expected ids 0.." +
                       std::to_string(nodes.size() - 1) + ")");
    }
    Parsed& p = parsed[id];
    if (p.seen) throw ParseError("duplicate node id " + std::to_string(id));
    p.seen = true;
    const std::string ctx = "node " + std::to_string(id);

    std::string role = jn.at("role").is_string()
                           ? jn.at("role").get<std::string>()
                           : throw ParseError(ctx + ": role must be a string");
    if (role == "alloc") {
      p.role = Role::Allocating;
    } else if (role == "dealloc") {
      p.role = Role::Releasing;
    } else if (role == "neutral") {
      p.role = Role::Neutral;
    } else {
      throw ParseError(ctx + ": unknown role \"" + role + "\"");
    }

    if (p.role == Role::Neutral) {
      if (jn.contains("qubits")) {
        throw ParseError(ctx + ": neutral nodes must omit \"qubits\"");
      }
    } else {
      if (!jn.contains("qubits")) {
        throw ParseError(ctx + ": role \"" + role + "\" needs \"qubits\"");
      }
      p.qubits = detail::require_qubits(jn.at("qubits"), ctx + " qubits");
      if (p.qubits == 0) {
        throw ParseError(ctx + ": \"qubits\" must be at least 1");
      }
    }
    if (jn.contains("aux")) {
      p.aux = detail::require_qubits(jn.at("aux"), ctx + " aux");
    }
    if (!jn.contains("depth")) {
      p.depth = DepthDescriptor::scalar(1);
    } else if (!jn.at("depth").is_null()) {
      p.depth = detail::parse_depth(jn.at("depth"), ctx + " depth");
    }
  }

  GraphBuilder builder;
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    const Parsed& p = parsed[i];
    if (!p.seen) throw ParseError("missing node id " + std::to_string(i));
    switch (p.role) {
      case Role::Allocating: builder.add_allocating(p.qubits, p.aux); break;
      case Role::Releasing: builder.add_releasing(p.qubits, p.aux); break;
      case Role::Neutral: builder.add_neutral(p.aux); break;
    }
    if (p.depth) builder.set_depth(static_cast<NodeId>(i), *p.depth);
  }

  for (const Json& je : edges) {
    if (!je.is_array() || je.size() != 3) {
      throw ParseError("edges must be [from, to, flow] triples");
    }
    std::uint64_t from = detail::require_uint(je[0], "edge source");
    std::uint64_t to = detail::require_uint(je[1], "edge target");
    QubitCount flow = detail::require_qubits(je[2], "edge flow");
    if (from >= parsed.size() || to >= parsed.size()) {
      throw ParseError("edge endpoint out of range: [" + std::to_string(from) +
                       ", " + std::to_string(to) + "]");
    }
    if (flow == 0) throw ParseError("edge flow must be at least 1");
    builder.add_edge(static_cast<NodeId>(from), static_cast<NodeId>(to), flow);
  }
  return builder.build();
}

inline Json graph_to_json(const ControlFlowGraph& graph) {
  if (graph.has_explicit_positions()) {
    throw ContractError(
        "induced subgraphs keep parent qubit positions and have no file "
        "representation");
  }
  Json doc;
  doc["nodes"] = Json::array();
  for (const Node& n : graph.nodes()) {
    if (n.external_in > 0) {
      throw ContractError(
          "graphs with external inputs have no file representation");
    }
    Json jn;
    jn["id"] = n.id;
    jn["role"] = std::string(to_string(n.role));
    if (n.role != Role::Neutral) jn["qubits"] = n.role_qubits;
    jn["aux"] = n.aux;
    jn["depth"] = detail::depth_to_json(n.depth);
    doc["nodes"].push_back(std::move(jn));
  }
  doc["edges"] = Json::array();
  for (const Edge& e : graph.edges()) {
    doc["edges"].push_back(Json::array({e.from, e.to, e.flow}));
  }
  return doc;
}

/// Parses the partition schema: {"blocks":[{"id":0,"nodes":[...]}]}.
inline BlockTree parse_blocks(const Json& doc) {
  if (!doc.is_object() || !doc.contains("blocks") ||
      !doc.at("blocks").is_array()) {
    throw ParseError("partition document needs a \"blocks\" array");
  }
  BlockTree tree;
  for (const Json& jb : doc.at("blocks")) {
    if (!jb.is_object() || !jb.contains("id") || !jb.contains("nodes") ||
        !jb.at("nodes").is_array()) {
      throw ParseError("block entries need \"id\" and a \"nodes\" array");
    }
    for (auto it = jb.begin(); it != jb.end(); ++it) {
      if (it.key() != "id" && it.key() != "nodes") {
        throw ParseError("unknown block field \"" + it.key() + "\"");
      }
    }
    Block b;
    b.id = static_cast<std::uint32_t>(
        detail::require_uint(jb.at("id"), "block id"));
    for (const Json& jn : jb.at("nodes")) {
      b.nodes.push_back(static_cast<NodeId>(detail::require_uint(
          jn, "block " + std::to_string(b.id) + " node")));
    }
    tree.blocks.push_back(std::move(b));
  }
  return tree;
}

inline Json blocks_to_json(const BlockTree& tree) {
  Json doc;
  doc["blocks"] = Json::array();
  for (const Block& b : tree.blocks) {
    Json jb;
    jb["id"] = b.id;
    jb["nodes"] = b.nodes;
    doc["blocks"].push_back(std::move(jb));
  }
  return doc;
}

inline Json slot_to_json(const QubitSlot& slot) {
  return Json::array({slot.node, slot.index, std::string(to_string(slot.kind))});
}

inline Json schedule_to_json(const Schedule& schedule) {
  Json doc;
  doc["order"] = schedule.sort.order;
  doc["bindings"] = Json::array();
  for (const ReuseBinding& b : schedule.bindings) {
    Json jb;
    jb["from"] = slot_to_json(b.from);
    jb["to"] = slot_to_json(b.to);
    doc["bindings"].push_back(std::move(jb));
  }
  doc["width"] = schedule.width;
  if (schedule.depth) {
    doc["depth"] = *schedule.depth;
  } else {
    doc["depth"] = nullptr;
  }
  return doc;
}

/// Rebuilds a schedule document against its graph, re-deriving metrics and
/// verifying they match the stored ones.
inline Schedule parse_schedule(const Json& doc, const ControlFlowGraph& graph) {
  if (!doc.is_object() || !doc.contains("order") || !doc.contains("bindings") ||
      !doc.contains("width") || !doc.contains("depth")) {
    throw ParseError(
        "schedule document needs \"order\", \"bindings\", \"width\", "
        "\"depth\"");
  }
  std::vector<NodeId> order;
  for (const Json& j : doc.at("order")) {
    order.push_back(static_cast<NodeId>(detail::require_uint(j, "order entry")));
  }
  auto parse_slot = [](const Json& j, const std::string& ctx) -> QubitSlot {
    if (!j.is_array() || j.size() != 3) {
      throw ParseError(ctx + ": slots are [node, slot, kind] triples");
    }
    QubitSlot slot;
    slot.node = static_cast<NodeId>(detail::require_uint(j[0], ctx + " node"));
    slot.index = detail::require_qubits(j[1], ctx + " slot index");
    slot.kind = detail::parse_slot_kind(j[2], ctx);
    return slot;
  };
  std::vector<ReuseBinding> bindings;
  for (const Json& jb : doc.at("bindings")) {
    if (!jb.is_object() || !jb.contains("from") || !jb.contains("to")) {
      throw ParseError("bindings need \"from\" and \"to\"");
    }
    bindings.push_back(ReuseBinding{parse_slot(jb.at("from"), "binding from"),
                                    parse_slot(jb.at("to"), "binding to")});
  }

  Schedule schedule;
  try {
    schedule = materialize_schedule(
        graph, make_sort_result(graph, std::move(order)), bindings);
  } catch (const ContractError& e) {
    throw ParseError(std::string("schedule is inconsistent with the graph: ") +
                     e.what());
  }
  if (schedule.width != detail::require_qubits(doc.at("width"), "width")) {
    throw ParseError("stored width does not match the replayed schedule");
  }
  if (doc.at("depth").is_null() != !schedule.depth ||
      (schedule.depth &&
       *schedule.depth != static_cast<Depth>(
                              detail::require_uint(doc.at("depth"), "depth")))) {
    throw ParseError("stored depth does not match the replayed schedule");
  }
  return schedule;
}

inline std::string to_file_text(const Json& doc) { return doc.dump(2) + "\n"; }

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return doc;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

}  // namespace qreuse
