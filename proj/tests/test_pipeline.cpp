#include "smtj/pipeline.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "oracles.hpp"
#include "smtj/tsplib.hpp"

using namespace smtj;

namespace {
const std::string kData = std::string(SMTJ_DATA_DIR) + "/tsplib/";
}

TEST_CASE("window plan covers the bounding box") {
  Rng rng = make_rng(81);
  const TspInstance ins = oracle::random_instance("plan", 40, rng);
  const WindowPlan plan = make_window_plan(ins, 8, 0.5);
  REQUIRE(plan.rects.size() >= 4);
  for (const auto& p : ins.cities) {
    bool covered = false;
    for (const auto& r : plan.rects) covered = covered || r.contains(p);
    REQUIRE(covered);
  }
}

TEST_CASE("stitching") {
  SECTION("a single group passes through unchanged") {
    Rng rng = make_rng(82);
    const TspInstance ins = oracle::random_instance("one", 6, rng);
    Partition part;
    part.max_group = 9;
    part.groups.push_back({0, 1, 2, 3, 4, 5});
    const Tour t{{0, 3, 1, 4, 2, 5}, tour_length(ins, {0, 3, 1, 4, 2, 5})};
    const Tour stitched = stitch_groups(ins, part, {t});
    REQUIRE(stitched.order == t.order);
    REQUIRE(stitched.length == t.length);
  }

  SECTION("two separated 2-city groups stitch optimally") {
    const TspInstance ins = TspInstance::from_points(
        "pairs", {{0.0, 0.0}, {0.0, 1.0}, {10.0, 0.0}, {10.0, 1.0}});
    Partition part;
    part.max_group = 9;
    part.groups = {{0, 1}, {2, 3}};
    std::vector<Tour> tours{{{0, 1}, 2.0}, {{2, 3}, 2.0}};
    const Tour stitched = stitch_groups(ins, part, tours);
    const Tour best = oracle::best_tour(ins);
    REQUIRE(stitched.length == Catch::Approx(best.length));
    REQUIRE(oracle::same_cycle(stitched.order, best.order));
  }

  SECTION("stitched tour is always a valid permutation") {
    Rng rng = make_rng(83);
    const TspInstance ins = oracle::random_instance("many", 23, rng);
    GpConfig gcfg;
    gcfg.spin_budget = 25;
    gcfg.seed = 5;
    const Partition part = recursive_partition(ins, gcfg);
    std::vector<Tour> tours;
    for (const auto& g : part.groups) {
      // arbitrary group tours: identity order within the group
      std::vector<int> order(g.begin(), g.end());
      tours.push_back({order, 0.0});
    }
    const Tour stitched = stitch_groups(ins, part, tours);
    REQUIRE_NOTHROW(tour_length(ins, stitched.order));  // permutation check
    REQUIRE(stitched.order.size() == 23);
  }
}

TEST_CASE("window refinement") {
  PipelineConfig cfg;
  cfg.seed = 17;
  cfg.window_iterations = 4000;

  SECTION("a manufactured crossing is removed") {
    // two horizontal rows; the crossing tour swaps partners in the middle
    const TspInstance ins = TspInstance::from_points(
        "cross", {{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}, {3.0, 0.0},
                  {0.0, 1.0}, {1.0, 1.0}, {2.0, 1.0}, {3.0, 1.0}});
    // crossing: ...1 -> 6... and ...5 -> 2... instead of 1->2, 5->6
    const std::vector<int> crossed{0, 1, 6, 7, 3, 2, 5, 4};
    const Tour bad{crossed, tour_length(ins, crossed)};
    const Rect window{0.5, -0.5, 2.5, 1.5};  // covers the crossing
    bool accepted = false;
    const Tour fixed =
        window_refine(ins, bad, window, cfg, 1, nullptr, &accepted);
    REQUIRE(accepted);
    REQUIRE(fixed.length < bad.length);
    const Tour best = oracle::best_tour(ins);
    REQUIRE(fixed.length == Catch::Approx(best.length));
  }

  SECTION("windows with fewer than two segments change nothing") {
    Rng rng = make_rng(84);
    const TspInstance ins = oracle::random_instance("few", 10, rng);
    std::vector<int> ident(10);
    std::iota(ident.begin(), ident.end(), 0);
    const Tour t{ident, tour_length(ins, ident)};
    const Rect nowhere{5.0, 5.0, 6.0, 6.0};  // no cities inside
    const Tour same = window_refine(ins, t, nowhere, cfg, 2);
    REQUIRE(same.order == t.order);
  }

  SECTION("acceptance never increases the length") {
    Rng rng = make_rng(85);
    const TspInstance ins = oracle::random_instance("mono", 16, rng);
    std::vector<int> order(16);
    std::iota(order.begin(), order.end(), 0);
    Tour t{order, tour_length(ins, order)};
    const WindowPlan plan = make_window_plan(ins, 6, 0.5);
    std::uint64_t salt = 0;
    for (const auto& r : plan.rects) {
      const Tour next = window_refine(ins, t, r, cfg, salt++);
      REQUIRE(next.length <= t.length + 1e-9);
      REQUIRE_NOTHROW(tour_length(ins, next.order));
      t = next;
    }
  }
}

TEST_CASE("degenerate pipeline equals a direct solve") {
  Rng rng = make_rng(86);
  const TspInstance ins = oracle::random_instance("small", 8, rng);
  PipelineConfig cfg;
  cfg.seed = 23;
  const PipelineResult res = pipeline_run(ins, cfg);
  REQUIRE(res.partition.groups.size() == 1);
  REQUIRE(res.report.group_sizes == std::vector<std::size_t>{8});
  REQUIRE(res.report.final_length == res.report.stitched_length);
  REQUIRE_NOTHROW(tour_length(ins, res.tour.order));
  // with an exhaustive oracle available, check the solve is actually good
  const Tour best = oracle::best_tour(ins);
  REQUIRE(res.tour.length >= best.length);
  REQUIRE(res.tour.length <= best.length * 1.25);
}

TEST_CASE("pipeline is deterministic") {
  Rng rng = make_rng(87);
  const TspInstance ins = oracle::random_instance("det20", 20, rng);
  PipelineConfig cfg;
  cfg.spin_budget = 36;
  cfg.seed = 29;
  cfg.group_iterations = 4000;
  cfg.window_iterations = 1500;
  const PipelineResult a = pipeline_run(ins, cfg);
  const PipelineResult b = pipeline_run(ins, cfg);
  REQUIRE(a.tour.order == b.tour.order);
  REQUIRE(a.tour.length == b.tour.length);
  REQUIRE(a.report.total_sweeps == b.report.total_sweeps);
}

TEST_CASE("pipeline config validation") {
  Rng rng = make_rng(90);
  const TspInstance ins = oracle::random_instance("cfg", 6, rng);
  PipelineConfig cfg;
  cfg.spin_budget = 9;  // too small for any group solve
  REQUIRE_THROWS_AS(pipeline_run(ins, cfg), std::invalid_argument);
  cfg = PipelineConfig{};
  cfg.window_overlap = 1.0;
  REQUIRE_THROWS_AS(pipeline_run(ins, cfg), std::invalid_argument);
}

TEST_CASE("pipeline stages remain valid and within budget") {
  Rng rng = make_rng(88);
  const TspInstance ins = oracle::random_instance("mid", 30, rng);
  PipelineConfig cfg;
  cfg.spin_budget = 49;
  cfg.seed = 31;
  cfg.group_iterations = 6000;
  cfg.window_iterations = 2000;
  const PipelineResult res = pipeline_run(ins, cfg);
  REQUIRE(res.report.all_stages_valid);
  REQUIRE(res.report.max_subproblem_spins <= 49);
  REQUIRE(res.tour.order.size() == 30);
  REQUIRE(res.report.final_length <= res.report.stitched_length + 1e-9);
  double prev = res.report.stitched_length;
  for (double len : res.report.pass_lengths) {
    REQUIRE(len <= prev + 1e-9);
    prev = len;
  }
}

TEST_CASE("berlin52 pipeline lands within 10% of the optimum", "[slow]") {
  const TspInstance ins = load_instance(kData + "berlin52.tsp");
  PipelineConfig cfg;
  cfg.seed = 1;
  const PipelineResult res = pipeline_run(ins, cfg);
  REQUIRE(res.report.all_stages_valid);
  REQUIRE(res.report.max_subproblem_spins <= 81);
  REQUIRE(res.tour.length <= 7542.0 * 1.10);
}

TEST_CASE("spin count report") {
  PipelineConfig cfg;
  cfg.seed = 37;

  SECTION("conventional column is (N-1)^2") {
    REQUIRE(spin_count_report("burma14", 14, cfg).conventional == 169);
    REQUIRE(spin_count_report("berlin52", 52, cfg).conventional == 2601);
    REQUIRE(spin_count_report("st70", 70, cfg).conventional == 4761);
    REQUIRE(spin_count_report("eil76", 76, cfg).conventional == 5625);
    REQUIRE(spin_count_report("eil101", 101, cfg).conventional == 10000);
  }

  SECTION("pipeline demand never exceeds the budget") {
    for (const char* name : {"st70", "berlin52", "eil76", "eil101"}) {
      const TspInstance ins = load_instance(kData + name + std::string(".tsp"));
      const SpinCountRow row = spin_count_report(ins, cfg);
      REQUIRE(row.ours <= cfg.spin_budget);
      REQUIRE(row.ours >= 1);
      REQUIRE(row.conventional == (ins.size() - 1) * (ins.size() - 1));
    }
    REQUIRE(spin_count_report("burma14", 14, cfg).ours <= cfg.spin_budget);
  }
}
