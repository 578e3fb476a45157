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

// Command-line front end: parses graph/partition JSON, runs the pass
// pipeline, emits schedule JSON plus a metrics report, and drives the
// generators, the brute-force oracle and the scaling benchmark.
//
// Exit codes: 0 success, 1 usage/parameter error, 2 parse error,
// 3 validation failure, 4 partition error, 5 configuration error.

#include <algorithm>
#include <chrono>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qreuse/qreuse.hpp"

namespace {

using namespace qreuse;

constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitPartition = 4;
constexpr int kExitConfig = 5;

Strategy parse_strategy(const std::string& name) {
  if (name == "greedy") return Strategy::Greedy;
  if (name == "dependency") return Strategy::DependencyPreserving;
  if (name == "depth") return Strategy::DepthPreserving;
  throw ConfigError("unknown strategy \"" + name + "\"");
}

struct RunArgs {
  std::string graph_file;
  std::string blocks_file;
  std::string strategy = "greedy";
  bool no_aux_priority = false;
  bool partitioned = false;
  std::string out = "schedule.json";
  std::string report = "text";
};

void check_report_format(const std::string& format) {
  if (format != "text" && format != "json") {
    throw ConfigError("unknown report format \"" + format + "\"");
  }
}

int cmd_run(const RunArgs& args) {
  check_report_format(args.report);
  ControlFlowGraph graph = parse_graph(load_json_file(args.graph_file));
  ValidationReport report = validate(graph);
  if (!report.clean()) {
    std::cerr << "graph failed validation:\n" << report.to_text();
    return kExitValidation;
  }
  Strategy strategy = parse_strategy(args.strategy);
  SortOptions options;
  options.prioritize_aux = !args.no_aux_priority;

  Schedule schedule;
  if (args.partitioned) {
    if (args.blocks_file.empty()) {
      throw ConfigError("--partitioned requires a partition file");
    }
    BlockTree tree = parse_blocks(load_json_file(args.blocks_file));
    schedule = solve_partitioned(graph, tree, strategy, options);
  } else {
    if (!args.blocks_file.empty()) {
      throw ConfigError("partition file given without --partitioned");
    }
    SortResult sort = sort_for_reuse(graph, options);
    schedule = apply_reuse(graph, sort, strategy);
  }

  write_text_file(args.out, to_file_text(schedule_to_json(schedule)));

  if (args.report == "json") {
    Json j;
    j["nodes"] = graph.node_count();
    j["strategy"] = args.strategy;
    j["partitioned"] = args.partitioned;
    j["width"] = schedule.width;
    if (schedule.depth) {
      j["depth"] = *schedule.depth;
    } else {
      j["depth"] = nullptr;
    }
    j["bindings"] = schedule.bindings.size();
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "nodes:     " << graph.node_count() << "\n"
              << "strategy:  " << args.strategy
              << (args.partitioned ? " (partitioned)" : "") << "\n"
              << "width:     " << schedule.width << "\n";
    if (schedule.depth) {
      std::cout << "depth:     " << *schedule.depth << "\n";
    } else {
      std::cout << "depth:     n/a\n";
    }
    std::cout << "bindings:  " << schedule.bindings.size() << "\n"
              << "schedule:  " << args.out << "\n";
  }
  return 0;
}

struct GenArgs {
  std::string family = "foo_chain";
  std::uint32_t iterations = 3;
  std::uint32_t body = 1;
  std::uint32_t aux = 1;
  std::uint32_t nodes = 8;
  double density = 1.5;
  std::vector<double> mix;
  std::uint32_t branches = 2;
  std::uint32_t length = 1;
  std::uint32_t pairs = 3;
  std::uint64_t seed = 1;
  std::string out = "graph.json";
  std::string blocks_out;
};

GraphFamily family_from_args(const GenArgs& args) {
  if (args.family == "foo_chain") {
    return FooChain{args.iterations, args.body, args.aux};
  }
  if (args.family == "random_sparse") {
    RoleMix mix;
    if (!args.mix.empty()) {
      if (args.mix.size() != 3) {
        throw ConfigError("--mix needs three weights: alloc,release,neutral");
      }
      mix = RoleMix{args.mix[0], args.mix[1], args.mix[2]};
    }
    return RandomSparse{args.nodes, args.density, mix, args.seed};
  }
  if (args.family == "fanout_fanin") {
    return FanoutFanin{args.branches, args.length};
  }
  if (args.family == "serial_alloc_dealloc") {
    return SerialAllocDealloc{args.pairs};
  }
  throw ConfigError("unknown family \"" + args.family + "\"");
}

int cmd_gen(const GenArgs& args) {
  Generated generated = generate(family_from_args(args));
  write_text_file(args.out, to_file_text(graph_to_json(generated.graph)));
  std::cout << "graph:  " << args.out << " (" << generated.graph.node_count()
            << " nodes)\n";
  if (!args.blocks_out.empty()) {
    if (!generated.blocks) {
      throw ConfigError("family \"" + args.family +
                        "\" does not emit a partition");
    }
    write_text_file(args.blocks_out,
                    to_file_text(blocks_to_json(*generated.blocks)));
    std::cout << "blocks: " << args.blocks_out << " ("
              << generated.blocks->blocks.size() << " blocks)\n";
  }
  return 0;
}

struct BenchArgs {
  std::string family = "foo_chain";
  std::vector<std::uint64_t> sizes;
  std::uint32_t repetitions = 3;
  std::string strategy = "greedy";
  std::uint64_t seed = 1;
  std::string out;
};

/// Builds a family instance of roughly `size` nodes plus its natural
/// partition (one block per repeated unit).
std::pair<Generated, BlockTree> bench_instance(const std::string& family,
                                               std::uint64_t size) {
  if (family == "foo_chain") {
    auto iters = static_cast<std::uint32_t>(std::max<std::uint64_t>(
        1, (size > 1 ? size - 1 : 1) / 3));
    Generated g = generate(FooChain{iters, 1, 1});
    BlockTree tree = *g.blocks;
    return {std::move(g), std::move(tree)};
  }
  if (family == "serial_alloc_dealloc") {
    auto pairs =
        static_cast<std::uint32_t>(std::max<std::uint64_t>(1, size / 2));
    Generated g = generate(SerialAllocDealloc{pairs});
    BlockTree tree;
    for (std::uint32_t k = 0; k < pairs; ++k) {
      tree.blocks.push_back(
          Block{k, {static_cast<NodeId>(2 * k), static_cast<NodeId>(2 * k + 1)}});
    }
    return {std::move(g), std::move(tree)};
  }
  throw ConfigError("bench supports foo_chain and serial_alloc_dealloc");
}

int cmd_bench(const BenchArgs& args) {
  if (args.repetitions == 0) {
    throw ConfigError("repetitions must be at least 1");
  }
  if (args.sizes.empty()) throw ConfigError("--sizes must not be empty");
  if (!std::is_sorted(args.sizes.begin(), args.sizes.end())) {
    throw ConfigError("--sizes must be ascending");
  }
  Strategy strategy = parse_strategy(args.strategy);

  std::ostringstream csv;
  csv << "n,partitioned,wall_time_s,width,depth\n";
  for (std::uint64_t size : args.sizes) {
    auto [generated, tree] = bench_instance(args.family, size);
    const ControlFlowGraph& graph = generated.graph;
    for (int partitioned = 0; partitioned <= 1; ++partitioned) {
      std::vector<double> times;
      QubitCount width = 0;
      std::optional<Depth> depth;
      for (std::uint32_t rep = 0; rep < args.repetitions; ++rep) {
        auto start = std::chrono::steady_clock::now();
        Schedule schedule;
        if (partitioned) {
          schedule = solve_partitioned(graph, tree, strategy);
        } else {
          SortResult sort = sort_for_reuse(graph);
          schedule = apply_reuse(graph, sort, strategy);
        }
        auto stop = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double>(stop - start).count());
        width = schedule.width;
        depth = schedule.depth;
      }
      std::sort(times.begin(), times.end());
      double median = times[times.size() / 2];
      csv << graph.node_count() << "," << partitioned << "," << std::fixed
          << std::setprecision(6) << median << "," << width << ","
          << (depth ? std::to_string(*depth) : std::string()) << "\n";
      csv.unsetf(std::ios::fixed);
    }
  }
  if (args.out.empty()) {
    std::cout << csv.str();
  } else {
    write_text_file(args.out, csv.str());
    std::cout << "bench csv: " << args.out << "\n";
  }
  return 0;
}

struct OracleArgs {
  std::string graph_file;
  std::string report = "text";
};

int cmd_oracle(const OracleArgs& args) {
  check_report_format(args.report);
  ControlFlowGraph graph = parse_graph(load_json_file(args.graph_file));
  ValidationReport report = validate(graph);
  if (!report.clean()) {
    std::cerr << "graph failed validation:\n" << report.to_text();
    return kExitValidation;
  }
  MinWidthResult result = enumerate_min_width(graph);
  if (args.report == "json") {
    Json j;
    j["min_width"] = result.min_width;
    j["witness"] = result.witness;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "min width: " << result.min_width << "\nwitness:  ";
    for (NodeId v : result.witness) std::cout << " " << v;
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qubit reuse scheduling passes over control flow graphs"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "solve a graph file");
  run->add_option("graph", run_args.graph_file, "graph JSON file")->required();
  run->add_option("blocks", run_args.blocks_file, "partition JSON file");
  run->add_option("--strategy", run_args.strategy,
                  "reuse strategy: greedy|dependency|depth");
  run->add_flag("--no-aux-priority", run_args.no_aux_priority,
                "do not prefer aux-using nodes in sub-sorts");
  run->add_flag("--partitioned", run_args.partitioned,
                "solve per block and compose (needs a partition file)");
  run->add_option("--out", run_args.out, "schedule JSON output path");
  run->add_option("--report", run_args.report, "report format: text|json");

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "generate a graph family instance");
  gen->add_option("--family", gen_args.family,
                  "foo_chain|random_sparse|fanout_fanin|serial_alloc_dealloc");
  gen->add_option("--iterations", gen_args.iterations, "foo_chain iterations");
  gen->add_option("--body", gen_args.body, "foo_chain body qubits");
  gen->add_option("--aux", gen_args.aux, "foo_chain aux qubits per iteration");
  gen->add_option("--nodes", gen_args.nodes, "random_sparse node count");
  gen->add_option("--density", gen_args.density, "random_sparse edge density");
  gen->add_option("--mix", gen_args.mix,
                  "random_sparse role mix: alloc release neutral");
  gen->add_option("--branches", gen_args.branches, "fanout_fanin branches");
  gen->add_option("--length", gen_args.length, "fanout_fanin branch length");
  gen->add_option("--pairs", gen_args.pairs, "serial_alloc_dealloc pairs");
  gen->add_option("--seed", gen_args.seed, "random seed");
  gen->add_option("--out", gen_args.out, "graph JSON output path");
  gen->add_option("--blocks-out", gen_args.blocks_out,
                  "partition JSON output path (foo_chain)");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "runtime scaling benchmark");
  bench->add_option("--family", bench_args.family,
                    "foo_chain|serial_alloc_dealloc");
  bench->add_option("--sizes", bench_args.sizes, "node counts, ascending")
      ->required();
  bench->add_option("--reps", bench_args.repetitions,
                    "repetitions per row (median is reported)");
  bench->add_option("--strategy", bench_args.strategy, "reuse strategy");
  bench->add_option("--seed", bench_args.seed, "random seed");
  bench->add_option("--out", bench_args.out, "CSV output path (default stdout)");

  OracleArgs oracle_args;
  CLI::App* oracle =
      app.add_subcommand("oracle", "brute-force minimal width (<= 12 nodes)");
  oracle->add_option("graph", oracle_args.graph_file, "graph JSON file")
      ->required();
  oracle->add_option("--report", oracle_args.report, "report format: text|json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (gen->parsed()) return cmd_gen(gen_args);
    if (bench->parsed()) return cmd_bench(bench_args);
    if (oracle->parsed()) return cmd_oracle(oracle_args);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const PartitionError& e) {
    std::cerr << "partition error: " << e.what() << "\n";
    return kExitPartition;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ContractError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitUsage;
}
