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

// End-to-end acceptance suite: every criterion prints exactly one PASS/FAIL
// line; the binary exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qreuse/qreuse.hpp"
#include "support.hpp"

namespace {

using namespace qtest;
using Clock = std::chrono::steady_clock;

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define EXPECT(cond, message)                                         \
  do {                                                                \
    if (!(cond)) {                                                    \
      std::ostringstream os_;                                         \
      os_ << message;                                                 \
      throw Failure(os_.str());                                       \
    }                                                                 \
  } while (0)

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// --- criterion bodies -------------------------------------------------------

std::string criterion_branch_join() {
  auto start = Clock::now();
  ControlFlowGraph g = BranchJoin::build();
  SortResult sort = sort_for_reuse(g);
  EXPECT(sort.position[BranchJoin::F] < sort.position[BranchJoin::G],
         "release must precede the allocation");
  Schedule reuse = apply_reuse(g, sort, Strategy::Greedy);
  EXPECT(reuse.width == 5, "expected width 5, got " << reuse.width);
  EXPECT(reuse.bindings.size() == 1,
         "expected 1 binding, got " << reuse.bindings.size());

  std::vector<NodeId> forced{BranchJoin::A, BranchJoin::B, BranchJoin::C,
                             BranchJoin::D, BranchJoin::G, BranchJoin::E,
                             BranchJoin::F};
  Schedule no_reuse =
      apply_reuse(g, make_sort_result(g, forced), Strategy::Greedy);
  EXPECT(no_reuse.width == 6, "expected width 6, got " << no_reuse.width);
  EXPECT(no_reuse.bindings.empty(), "forced order must not bind");
  double elapsed = seconds_since(start);
  EXPECT(elapsed < 1.0, "took " << elapsed << " s");
  return "width 5 with reuse vs 6 without";
}

std::string criterion_aux_variant() {
  auto start = Clock::now();
  ControlFlowGraph g = AuxBranchJoin::build();
  SortResult sort = sort_for_reuse(g);
  Schedule with = apply_reuse(g, sort, Strategy::Greedy);
  EXPECT(with.width == 6, "expected width 6, got " << with.width);
  EXPECT(with.bindings.size() == 1, "expected exactly one binding");
  EXPECT((with.bindings[0].from ==
          QubitSlot{AuxBranchJoin::F, 0, SlotKind::AuxOut}),
         "binding must come from F's aux qubit");
  EXPECT((with.bindings[0].to ==
          QubitSlot{AuxBranchJoin::G, 0, SlotKind::AuxIn}),
         "binding must feed G's aux qubit");
  Schedule without = apply_reuse(g, sort, Strategy::None);
  EXPECT(without.width == 7, "expected width 7, got " << without.width);
  double elapsed = seconds_since(start);
  EXPECT(elapsed < 1.0, "took " << elapsed << " s");
  return "aux reuse width 6 vs 7 without";
}

std::string criterion_loop_chain() {
  for (std::uint32_t iters : {3u, 20u, 200u}) {
    ControlFlowGraph g = generate(FooChain{iters, 1, 1}).graph;
    SortResult sort = sort_for_reuse(g);
    std::vector<NodeId> expected;
    for (std::uint32_t k = 0; k < iters; ++k) {
      expected.push_back(iters + 1 + 2 * k);
      expected.push_back(k);
      expected.push_back(iters + 2 + 2 * k);
    }
    expected.push_back(iters);
    EXPECT(sort.order == expected,
           "iterations " << iters << ": not the interleaved order");
    Schedule s = apply_reuse(g, sort, Strategy::Greedy);
    EXPECT(s.bindings.size() == iters - 1,
           "iterations " << iters << ": expected " << iters - 1
                         << " bindings, got " << s.bindings.size());
    EXPECT(s.width == 2, "iterations " << iters
                                       << ": expected footprint width 2, got "
                                       << s.width);
  }
  return "interleaved order and single-iteration footprint at N=3,20,200";
}

std::string criterion_oracle_equivalence() {
  std::size_t instances = 0;
  std::size_t ratio_buckets[4] = {0, 0, 0, 0};  // 1.0, <=1.25, <=1.5, >1.5
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    ControlFlowGraph g = generate(RandomSparse{8, 1.7, {}, seed}).graph;
    SortResult sort = sort_for_reuse(g);
    EXPECT(is_valid_order(g, sort.order), "seed " << seed << ": bad order");
    for (Strategy strategy : {Strategy::Greedy, Strategy::DepthPreserving}) {
      Schedule s = apply_reuse(g, sort, strategy);
      EXPECT(s.width == g.total_fresh_draws() - s.bindings.size(),
             "seed " << seed << ": width identity violated");
      ReplayReport replay = simulate_pool(s, g);
      EXPECT(replay.clean(), "seed " << seed << ": replay violations");
      EXPECT(replay.width == s.width, "seed " << seed << ": replay width");
    }
    Schedule greedy = apply_reuse(g, sort, Strategy::Greedy);
    MinWidthResult oracle = enumerate_min_width(g);
    EXPECT(greedy.width >= oracle.min_width,
           "seed " << seed << ": heuristic beat the oracle");
    double ratio = oracle.min_width == 0
                       ? 1.0
                       : static_cast<double>(greedy.width) / oracle.min_width;
    if (ratio <= 1.0) {
      ratio_buckets[0]++;
    } else if (ratio <= 1.25) {
      ratio_buckets[1]++;
    } else if (ratio <= 1.5) {
      ratio_buckets[2]++;
    } else {
      ratio_buckets[3]++;
    }
    instances++;
  }
  // Structured families: the heuristic must be exactly optimal.
  for (std::uint32_t pairs : {1u, 2u, 3u, 4u}) {
    ControlFlowGraph g = generate(SerialAllocDealloc{pairs}).graph;
    QubitCount heuristic =
        apply_reuse(g, sort_for_reuse(g), Strategy::Greedy).width;
    EXPECT(heuristic == enumerate_min_width(g).min_width,
           "serial chain " << pairs << " pairs: heuristic not optimal");
  }
  for (std::uint32_t iters : {1u, 2u}) {
    ControlFlowGraph g = generate(FooChain{iters, 1, 1}).graph;
    QubitCount heuristic =
        apply_reuse(g, sort_for_reuse(g), Strategy::Greedy).width;
    EXPECT(heuristic == enumerate_min_width(g).min_width,
           "loop chain " << iters << " iterations: heuristic not optimal");
  }
  std::ostringstream os;
  os << instances << " random graphs; width ratio vs oracle: " << "=1.0: "
     << ratio_buckets[0] << ", <=1.25: " << ratio_buckets[1]
     << ", <=1.5: " << ratio_buckets[2] << ", >1.5: " << ratio_buckets[3]
     << "; structured families exactly optimal";
  return os.str();
}

std::string criterion_depth_preservation() {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    ControlFlowGraph g = generate(RandomSparse{12, 1.8, {}, seed}).graph;
    SortResult sort = sort_for_reuse(g);
    Schedule preserved = apply_reuse(g, sort, Strategy::DepthPreserving);
    Schedule baseline = apply_reuse(g, sort, Strategy::None);
    EXPECT(preserved.depth.has_value() && baseline.depth.has_value(),
           "seed " << seed << ": depth must be tracked");
    EXPECT(*preserved.depth == *baseline.depth,
           "seed " << seed << ": depth changed " << *baseline.depth << " -> "
                   << *preserved.depth);
    checked++;
  }
  return std::to_string(checked) + " instances, final depth always unchanged";
}

std::string criterion_dependency_soundness() {
  std::size_t bindings_checked = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    ControlFlowGraph g = generate(RandomSparse{12, 1.8, {}, seed}).graph;
    auto reach = reachability_matrix(g);
    SortResult sort = sort_for_reuse(g);
    Schedule s = apply_reuse(g, sort, Strategy::DependencyPreserving);
    for (const ReuseBinding& b : s.bindings) {
      EXPECT(reach[b.from.node][b.to.node],
             "seed " << seed << ": binding " << b.from.node << " -> "
                     << b.to.node << " is not a descendant edge");
      bindings_checked++;
    }
  }
  return std::to_string(bindings_checked) +
         " bindings, all into graph descendants";
}

std::string criterion_partition_loss() {
  ControlFlowGraph g = [] {
    GraphBuilder b;
    b.add_neutral();      // A, holds two program inputs
    b.add_allocating(1);  // B
    b.add_releasing(1);   // C
    b.set_external_input(0, 2);
    b.add_edge(0, 1, 1).add_edge(0, 2, 1);
    return b.build();
  }();
  SortResult sort = sort_for_reuse(g);
  Schedule flat = apply_reuse(g, sort, Strategy::Greedy);

  BlockTree grouped;
  grouped.blocks.push_back(Block{0, {0, 1}});
  grouped.blocks.push_back(Block{1, {2}});
  Schedule part = solve_partitioned(g, grouped, Strategy::Greedy);
  EXPECT(part.width > flat.width,
         "expected strict loss, got " << part.width << " vs " << flat.width);

  ControlFlowGraph rich = generate(RandomSparse{14, 1.8, {}, 3}).graph;
  BlockTree one;
  one.blocks.push_back(Block{0, {}});
  for (NodeId v = 0; v < rich.node_count(); ++v) one.blocks[0].nodes.push_back(v);
  SortResult rich_sort = sort_for_reuse(rich);
  std::string flat_text = to_file_text(
      schedule_to_json(apply_reuse(rich, rich_sort, Strategy::Greedy)));
  std::string part_text = to_file_text(
      schedule_to_json(solve_partitioned(rich, one, Strategy::Greedy)));
  EXPECT(flat_text == part_text, "single block must reproduce the flat solve");
  return "grouped partition loses exactly the released qubit; single block "
         "byte-identical";
}

std::string criterion_scaling() {
  const std::vector<std::uint64_t> sizes{1000, 3000, 10000, 30000, 100000};
  std::vector<double> xs, flat_ts, part_ts;
  double top_part_time = 0.0;
  for (std::uint64_t size : sizes) {
    auto iters = static_cast<std::uint32_t>((size - 1) / 3);
    Generated gen = generate(FooChain{iters, 1, 1});
    const ControlFlowGraph& g = gen.graph;
    const std::uint32_t reps = size <= 10000 ? 3 : 1;

    std::vector<double> flat_times, part_times;
    for (std::uint32_t rep = 0; rep < reps; ++rep) {
      auto t0 = Clock::now();
      Schedule flat = apply_reuse(g, sort_for_reuse(g), Strategy::Greedy);
      flat_times.push_back(seconds_since(t0));
      EXPECT(flat.width == 2, "flat width drifted");

      auto t1 = Clock::now();
      Schedule part = solve_partitioned(g, *gen.blocks, Strategy::Greedy);
      part_times.push_back(seconds_since(t1));
      EXPECT(part.width == 2, "partitioned width drifted");
    }
    std::sort(flat_times.begin(), flat_times.end());
    std::sort(part_times.begin(), part_times.end());
    xs.push_back(static_cast<double>(g.node_count()));
    flat_ts.push_back(flat_times[flat_times.size() / 2]);
    part_ts.push_back(part_times[part_times.size() / 2]);
    if (size == sizes.back()) top_part_time = part_ts.back();
  }

  auto fit_exponent = [](const std::vector<double>& x,
                         const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      double lx = std::log(x[i]);
      double ly = std::log(y[i]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  double flat_exp = fit_exponent(xs, flat_ts);
  double part_exp = fit_exponent(xs, part_ts);

  std::ostringstream detail;
  detail << "exponents: flat " << std::fixed << std::setprecision(2) << flat_exp
         << " (>= 1.8), partitioned " << part_exp << " (<= 1.6); N=1e5"
         << " partitioned in " << std::setprecision(2) << top_part_time
         << " s (< 60)";
  EXPECT(flat_exp >= 1.8, "flat exponent " << flat_exp << " below 1.8 ["
                                           << detail.str() << "]");
  EXPECT(part_exp <= 1.6, "partitioned exponent " << part_exp << " above 1.6 ["
                                                  << detail.str() << "]");
  EXPECT(top_part_time < 60.0, "partitioned top size took " << top_part_time);
  return detail.str();
}

std::string criterion_incremental_costs() {
  std::size_t comparisons = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    ControlFlowGraph g = generate(RandomSparse{12, 1.8, {}, seed}).graph;
    SortOptions options;
    options.cache_mode = CacheMode::Materialized;
    options.observer = [&](const SortState& state) {
      for (NodeId r : state.releasing_nodes()) {
        if (!state.alive(r)) continue;
        EXPECT(state.cached_cost(r) == state.recomputed_cost(r),
               "seed " << seed << ": cache drift at node " << r);
        comparisons++;
      }
    };
    sort_for_reuse(g, options);
  }
  return std::to_string(comparisons) + " cache/recompute comparisons, no drift";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<std::string()> body;
  };
  const std::vector<Criterion> criteria{
      {1, "branch/join golden widths", criterion_branch_join},
      {2, "aux-variant golden widths", criterion_aux_variant},
      {3, "loop-chain interleaving", criterion_loop_chain},
      {4, "oracle equivalence", criterion_oracle_equivalence},
      {5, "depth preservation", criterion_depth_preservation},
      {6, "dependency soundness", criterion_dependency_soundness},
      {7, "partition loss and degenerate partition", criterion_partition_loss},
      {8, "runtime scaling exponents", criterion_scaling},
      {9, "incremental cost correctness", criterion_incremental_costs},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    try {
      std::string detail = c.body();
      std::printf("criterion %d PASS  %s — %s\n", c.id, c.title,
                  detail.c_str());
    } catch (const std::exception& e) {
      std::printf("criterion %d FAIL  %s — %s\n", c.id, c.title, e.what());
      failures++;
    }
    std::fflush(stdout);
  }
  if (failures > 0) {
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
