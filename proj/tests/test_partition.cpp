#include "smtj/partition.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "oracles.hpp"
#include "smtj/tsplib.hpp"

using namespace smtj;

namespace {
const std::string kData = std::string(SMTJ_DATA_DIR) + "/tsplib/";
}

TEST_CASE("GP model has one spin per city") {
  Rng rng = make_rng(71);
  const TspInstance ins = oracle::random_instance("gp", 12, rng);
  std::vector<int> subset{0, 2, 4, 6, 8, 10};
  const IsingModel gp = build_gp_ising(ins, subset);
  REQUIRE(gp.size() == subset.size());
}

TEST_CASE("GP optimum splits two separated clusters") {
  // two tight 3-point clusters far apart
  std::vector<std::array<double, 2>> pts{{0.0, 0.0}, {1.0, 0.0}, {0.5, 1.0},
                                         {100.0, 0.0}, {101.0, 0.0},
                                         {100.5, 1.0}};
  const TspInstance ins = TspInstance::from_points("clusters", pts);
  std::vector<int> all{0, 1, 2, 3, 4, 5};
  const IsingModel gp = build_gp_ising(ins, all);

  double best = 1e300;
  for (std::uint64_t st = 0; st < 64; ++st)
    best = std::min(best, gp.energy(oracle::unpack_state(st, 6)));

  // enumeration oracle: expected optimum = the cluster bipartition
  for (std::uint64_t st = 0; st < 64; ++st) {
    const SpinConfiguration s = oracle::unpack_state(st, 6);
    if (gp.energy(s) > best + 1e-9) continue;
    REQUIRE(s[0] == s[1]);
    REQUIRE(s[1] == s[2]);
    REQUIRE(s[3] == s[4]);
    REQUIRE(s[4] == s[5]);
    REQUIRE(s[0] != s[3]);
  }
}

TEST_CASE("balance-free GP with equal similarities allows uniform states") {
  // A = 0 and all pairwise distances equal: cut-free (all-same) states are
  // among the global minimizers
  std::vector<std::array<double, 2>> pts{
      {0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}};
  const TspInstance ins = TspInstance::from_points("tri", pts);
  const IsingModel gp = build_gp_ising(ins, {0, 1, 2}, 0.0);
  double best = 1e300;
  for (std::uint64_t st = 0; st < 8; ++st)
    best = std::min(best, gp.energy(oracle::unpack_state(st, 3)));
  REQUIRE(gp.energy({+1, +1, +1}) == Catch::Approx(best));
  REQUIRE(gp.energy({-1, -1, -1}) == Catch::Approx(best));
}

TEST_CASE("recursive partition obeys the budget rule") {
  GpConfig cfg;
  cfg.spin_budget = 81;
  cfg.seed = 7;

  SECTION("an instance that already fits stays whole") {
    Rng rng = make_rng(72);
    const TspInstance ins = oracle::random_instance("nine", 9, rng);
    const Partition p = recursive_partition(ins, cfg);
    REQUIRE(p.groups.size() == 1);
    REQUIRE(p.groups[0].size() == 9);
    REQUIRE(p.covers(9));
  }

  SECTION("st70 splits into at least 8 groups of at most 9") {
    const TspInstance ins = load_instance(kData + "st70.tsp");
    AnnealCounters counters;
    const Partition p = recursive_partition(ins, cfg, &counters);
    REQUIRE(p.covers(70));
    REQUIRE(p.groups.size() >= 8);
    for (const auto& grp : p.groups) REQUIRE(grp.size() <= 9);
    REQUIRE(counters.max_spins <= 81);
  }

  SECTION("oversized subsets are pre-split geometrically") {
    const TspInstance ins = load_instance(kData + "eil101.tsp");
    AnnealCounters counters;
    const Partition p = recursive_partition(ins, cfg, &counters);
    REQUIRE(p.covers(101));
    for (const auto& grp : p.groups) REQUIRE(grp.size() <= 9);
    REQUIRE(counters.max_spins <= 81);  // the 101-spin root is never annealed
  }
}

TEST_CASE("partition groups are spatially contiguous") {
  Rng rng = make_rng(73);
  const TspInstance ins = oracle::random_instance("spread", 20, rng);
  GpConfig cfg;
  cfg.spin_budget = 25;  // forces max_group 5
  cfg.seed = 3;
  const Partition p = recursive_partition(ins, cfg);
  REQUIRE(p.covers(20));

  // mean intra-group distance is smaller than mean inter-group distance
  std::vector<int> group_of(20, -1);
  for (std::size_t g = 0; g < p.groups.size(); ++g)
    for (int c : p.groups[g]) group_of[c] = static_cast<int>(g);
  double intra = 0.0, inter = 0.0;
  std::size_t n_intra = 0, n_inter = 0;
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = i + 1; j < 20; ++j) {
      if (group_of[i] == group_of[j]) {
        intra += ins.d(i, j);
        ++n_intra;
      } else {
        inter += ins.d(i, j);
        ++n_inter;
      }
    }
  REQUIRE(n_intra > 0);
  REQUIRE(intra / n_intra < inter / n_inter);
}

TEST_CASE("partition is deterministic") {
  Rng rng = make_rng(74);
  const TspInstance ins = oracle::random_instance("det", 24, rng);
  GpConfig cfg;
  cfg.spin_budget = 36;
  cfg.seed = 11;
  const Partition a = recursive_partition(ins, cfg);
  const Partition b = recursive_partition(ins, cfg);
  REQUIRE(a.groups == b.groups);
}

TEST_CASE("degenerate geometry falls back cleanly") {
  // all cities coincide: similarities are all equal, the anneal may return
  // lopsided cuts, and the median fallback must still terminate
  std::vector<std::array<double, 2>> pts(17, {2.0, 2.0});
  const TspInstance ins = TspInstance::from_points("point", pts);
  GpConfig cfg;
  cfg.spin_budget = 16;
  const Partition p = recursive_partition(ins, cfg);
  REQUIRE(p.covers(17));
  for (const auto& g : p.groups) REQUIRE(g.size() <= 4);
}
