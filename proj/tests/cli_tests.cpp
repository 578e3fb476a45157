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

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

#ifndef QREUSE_CLI_PATH
#error "QREUSE_CLI_PATH must point at the CLI binary"
#endif

namespace {

using namespace qtest;

struct CommandResult {
  int exit_code;
  std::string output;
};

CommandResult run_cli(const std::string& args) {
  std::string dir = std::string(QREUSE_CLI_TMPDIR);
  std::string out_file = dir + "/cli_output.txt";
  std::string command = std::string(QREUSE_CLI_PATH) + " " + args + " > " +
                        out_file + " 2>&1";
  int status = std::system(command.c_str());
  std::ifstream in(out_file);
  std::stringstream buffer;
  buffer << in.rdbuf();
  int code = -1;
  if (WIFEXITED(status)) code = WEXITSTATUS(status);
  return {code, buffer.str()};
}

std::string tmp_path(const std::string& name) {
  return std::string(QREUSE_CLI_TMPDIR) + "/" + name;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("gen + run round trip with deterministic output") {
  std::string graph = tmp_path("foo_graph.json");
  std::string blocks = tmp_path("foo_blocks.json");
  CommandResult gen = run_cli("gen --family foo_chain --iterations 5 --out " +
                              graph + " --blocks-out " + blocks);
  INFO(gen.output);
  REQUIRE(gen.exit_code == 0);

  std::string sched1 = tmp_path("sched1.json");
  std::string sched2 = tmp_path("sched2.json");
  CommandResult r1 = run_cli("run " + graph + " --out " + sched1);
  INFO(r1.output);
  REQUIRE(r1.exit_code == 0);
  CHECK(r1.output.find("width:     2") != std::string::npos);
  CommandResult r2 = run_cli("run " + graph + " --out " + sched2);
  REQUIRE(r2.exit_code == 0);
  CHECK(read_file(sched1) == read_file(sched2));

  CommandResult part = run_cli("run " + graph + " " + blocks +
                               " --partitioned --report json --out " +
                               tmp_path("sched3.json"));
  INFO(part.output);
  REQUIRE(part.exit_code == 0);
  Json j = Json::parse(part.output);
  CHECK(j["width"] == 2);
  CHECK(j["partitioned"] == true);
}

TEST_CASE("exit codes distinguish the failure classes") {
  std::string bad = tmp_path("bad.json");
  write_file(bad, "{not json");
  CHECK(run_cli("run " + bad).exit_code == 2);

  std::string cyclic = tmp_path("cyclic.json");
  write_file(cyclic, R"({"nodes":[{"id":0,"role":"neutral"},
                                  {"id":1,"role":"neutral"}],
                         "edges":[[0,1,1],[1,0,1]]})");
  CHECK(run_cli("run " + cyclic).exit_code == 3);

  // Block 1 must allocate before it releases a qubit that node 1 (in the
  // other block) still owns, so it has no single-role summary.
  std::string graph = tmp_path("split.json");
  write_file(graph, R"({"nodes":[{"id":0,"role":"alloc","qubits":1},
                                 {"id":1,"role":"alloc","qubits":1},
                                 {"id":2,"role":"dealloc","qubits":1}],
                        "edges":[[0,2,1],[1,2,1]]})");
  std::string blocks = tmp_path("split_blocks.json");
  write_file(blocks, R"({"blocks":[{"id":0,"nodes":[1]},
                                   {"id":1,"nodes":[0,2]}]})");
  CommandResult part = run_cli("run " + graph + " " + blocks + " --partitioned");
  CHECK(part.exit_code == 4);
  CHECK(part.output.find("block 1") != std::string::npos);

  // Depth strategy with a node that has explicitly no depth data.
  std::string no_depth = tmp_path("no_depth.json");
  write_file(no_depth, R"({"nodes":[{"id":0,"role":"alloc","qubits":1,
                                     "depth":null}],
                           "edges":[]})");
  CHECK(run_cli("run " + no_depth + " --strategy depth").exit_code == 5);

  CHECK(run_cli("frobnicate").exit_code == 1);
}

TEST_CASE("an empty node list solves to an empty schedule") {
  std::string graph = tmp_path("empty.json");
  write_file(graph, R"({"nodes":[],"edges":[]})");
  CommandResult r = run_cli("run " + graph + " --report json --out " +
                            tmp_path("empty_sched.json"));
  INFO(r.output);
  REQUIRE(r.exit_code == 0);
  Json j = Json::parse(r.output);
  CHECK(j["width"] == 0);
  CHECK(j["depth"] == 0);
}

TEST_CASE("branch/join report shows the reused width") {
  std::string graph = tmp_path("branch_graph.json");
  write_file(graph, to_file_text(graph_to_json(BranchJoin::build())));
  CommandResult r = run_cli("run " + graph + " --report json --out " +
                            tmp_path("branch_sched.json"));
  INFO(r.output);
  REQUIRE(r.exit_code == 0);
  Json j = Json::parse(r.output);
  CHECK(j["width"] == 5);
  CHECK(j["bindings"] == 1);
}

TEST_CASE("oracle subcommand reports the brute-force minimum") {
  std::string graph = tmp_path("oracle_graph.json");
  write_file(graph, to_file_text(graph_to_json(BranchJoin::build())));
  CommandResult r = run_cli("oracle " + graph + " --report json");
  INFO(r.output);
  REQUIRE(r.exit_code == 0);
  Json j = Json::parse(r.output);
  CHECK(j["min_width"] == 5);
}

TEST_CASE("bench emits one row per size and mode") {
  std::string csv = tmp_path("bench.csv");
  CommandResult r = run_cli(
      "bench --family foo_chain --sizes 40 100 --reps 2 --out " + csv);
  INFO(r.output);
  REQUIRE(r.exit_code == 0);
  std::string text = read_file(csv);
  std::size_t rows = 0;
  for (char c : text) rows += c == '\n';
  CHECK(rows == 5);  // header + 2 sizes x {flat, partitioned}
  CHECK(text.rfind("n,partitioned,wall_time_s,width,depth\n", 0) == 0);

  CHECK(run_cli("bench --family foo_chain --sizes 40 --reps 0").exit_code == 5);
  CHECK(run_cli("bench --family foo_chain --sizes 100 40 --reps 1").exit_code ==
        5);
}
