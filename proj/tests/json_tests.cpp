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

#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace qtest;

TEST_CASE("graph serialization round-trips byte for byte") {
  std::vector<ControlFlowGraph> graphs;
  graphs.push_back(BranchJoin::build());
  graphs.push_back(AuxBranchJoin::build());
  graphs.push_back(generate(FooChain{4, 2, 1}).graph);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    graphs.push_back(generate(RandomSparse{9, 1.7, {}, seed}).graph);
  }
  for (const ControlFlowGraph& g : graphs) {
    std::string text = to_file_text(graph_to_json(g));
    ControlFlowGraph parsed = parse_graph(Json::parse(text));
    CHECK(to_file_text(graph_to_json(parsed)) == text);
  }
}

TEST_CASE("block trees round-trip") {
  Generated g = generate(FooChain{3, 1, 1});
  std::string text = to_file_text(blocks_to_json(*g.blocks));
  BlockTree parsed = parse_blocks(Json::parse(text));
  CHECK(to_file_text(blocks_to_json(parsed)) == text);
}

TEST_CASE("schedules round-trip against their graph") {
  ControlFlowGraph g = AuxBranchJoin::build();
  SortResult sort = sort_for_reuse(g);
  Schedule s = apply_reuse(g, sort, Strategy::Greedy);
  std::string text = to_file_text(schedule_to_json(s));
  Schedule parsed = parse_schedule(Json::parse(text), g);
  CHECK(to_file_text(schedule_to_json(parsed)) == text);
}

TEST_CASE("absent depth defaults to a unit scalar, null depth to none") {
  Json doc = Json::parse(R"({
    "nodes": [
      {"id": 0, "role": "alloc", "qubits": 2},
      {"id": 1, "role": "neutral", "depth": null},
      {"id": 2, "role": "dealloc", "qubits": 1, "depth": 4}
    ],
    "edges": [[0, 1, 2], [1, 2, 2]]
  })");
  ControlFlowGraph g = parse_graph(doc);
  REQUIRE(g.node(0).depth.has_value());
  CHECK(g.node(0).depth->scalar_value() == 1);
  CHECK_FALSE(g.node(1).depth.has_value());
  CHECK(g.node(2).depth->scalar_value() == 4);
  CHECK(g.node(2).released() == 1);
}

TEST_CASE("matrix depth entries accept null as no-path") {
  Json doc = Json::parse(R"({
    "nodes": [{"id": 0, "role": "alloc", "qubits": 2,
               "depth": [[0, null], [1, 2]]}],
    "edges": []
  })");
  ControlFlowGraph g = parse_graph(doc);
  REQUIRE(g.node(0).depth.has_value());
  CHECK(g.node(0).depth->path_depth(0, 1) == kNoPath);
  CHECK(g.node(0).depth->path_depth(1, 1) == 2);
}

TEST_CASE("schema violations are parse errors naming the node") {
  auto expect_parse_error = [](const char* text, const char* needle) {
    try {
      parse_graph(Json::parse(text));
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring(needle));
    }
  };
  expect_parse_error(R"({"nodes": [{"id": 0, "role": "neutral", "qubits": 1}],
                         "edges": []})",
                     "node 0");
  expect_parse_error(R"({"nodes": [{"id": 0, "role": "alloc"}], "edges": []})",
                     "qubits");
  expect_parse_error(R"({"nodes": [{"id": 0, "role": "maybe"}], "edges": []})",
                     "role");
  expect_parse_error(R"({"nodes": [{"id": 1, "role": "neutral"}],
                         "edges": []})",
                     "dense");
  expect_parse_error(R"({"nodes": [{"id": 0, "role": "neutral", "x": 1}],
                         "edges": []})",
                     "unknown node field");
  expect_parse_error(R"({"nodes": [{"id": 0, "role": "alloc", "qubits": 1},
                                   {"id": 1, "role": "neutral"}],
                         "edges": [[0, 1, 0]]})",
                     "flow");
  expect_parse_error(R"({"nodes": [{"id": 0, "role": "alloc", "qubits": 0}],
                         "edges": []})",
                     "at least 1");
}

TEST_CASE("graphs with external inputs cannot be serialized") {
  GraphBuilder b;
  b.add_neutral();
  b.set_external_input(0, 1);
  CHECK_THROWS_AS(graph_to_json(b.build()), ContractError);
}

TEST_CASE("identical inputs produce byte-identical schedule documents") {
  ControlFlowGraph g = generate(RandomSparse{15, 1.8, {}, 11}).graph;
  auto solve = [&] {
    SortResult sort = sort_for_reuse(g);
    return to_file_text(schedule_to_json(apply_reuse(g, sort, Strategy::Greedy)));
  };
  CHECK(solve() == solve());
}

TEST_CASE("tampered schedule documents are rejected") {
  ControlFlowGraph g = BranchJoin::build();
  SortResult sort = sort_for_reuse(g);
  Schedule s = apply_reuse(g, sort, Strategy::Greedy);
  Json doc = schedule_to_json(s);
  doc["width"] = 17;
  CHECK_THROWS_AS(parse_schedule(doc, g), ParseError);
}
