#include "smtj/ising.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "oracles.hpp"

using namespace smtj;

TEST_CASE("energy of the empty Hamiltonian is zero") {
  IsingModel m(4);
  SpinConfiguration s{+1, -1, -1, +1};
  REQUIRE(m.energy(s) == 0.0);
}

TEST_CASE("single aligned pair") {
  IsingModel m(2);
  m.set_coupling(0, 1, 1.0);
  REQUIRE(m.energy({+1, +1}) == -1.0);
  REQUIRE(m.energy({+1, -1}) == +1.0);
}

TEST_CASE("offset shifts the energy") {
  IsingModel m(1);
  m.set_offset(2.5);
  m.set_field(0, 1.0);
  REQUIRE(m.energy({+1}) == Catch::Approx(1.5));
}

TEST_CASE("energy matches double-sum re-expansion on random models") {
  Rng rng = make_rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    IsingModel m = oracle::random_model(6, rng);
    m.set_offset(2.0 * uniform01(rng) - 1.0);
    SpinConfiguration s = random_spins(6, rng);
    REQUIRE(m.energy(s) ==
            Catch::Approx(oracle::double_sum_energy(m, s)).epsilon(1e-12));
  }
}

TEST_CASE("local field: field-only and one-neighbour cases") {
  IsingModel m(3);
  m.set_field(1, 0.7);
  SpinConfiguration s{+1, +1, -1};
  REQUIRE(m.local_field(s, 1) == Catch::Approx(0.7));

  IsingModel m2(2);
  m2.set_coupling(0, 1, 1.0);
  REQUIRE(m2.local_field({+1, -1}, 0) == Catch::Approx(-1.0));
}

TEST_CASE("flip-energy identity holds exactly") {
  Rng rng = make_rng(12);
  for (int rep = 0; rep < 20; ++rep) {
    IsingModel m = oracle::random_model(8, rng);
    SpinConfiguration s = random_spins(8, rng);
    const double e0 = m.energy(s);
    for (std::size_t k = 0; k < 8; ++k) {
      SpinConfiguration f = s;
      f[k] = -f[k];
      const double lhs = m.energy(f) - e0;
      const double rhs = 2.0 * s[k] * m.local_field(s, k);
      REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-9).margin(1e-12));
    }
  }
}

TEST_CASE("Z2 symmetry: energy invariant under global spin flip when h=0") {
  Rng rng = make_rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    IsingModel m = oracle::random_model(7, rng, 1.0, 0.0);
    SpinConfiguration s = random_spins(7, rng);
    SpinConfiguration neg = s;
    for (auto& v : neg) v = -v;
    REQUIRE(m.energy(s) == Catch::Approx(m.energy(neg)).epsilon(1e-12));
  }
}

TEST_CASE("flip probability") {
  SECTION("symmetric cases") {
    REQUIRE(flip_probability_up(0.0, 3.7) == Catch::Approx(0.5));
    REQUIRE(flip_probability_up(12.3, 0.0) == Catch::Approx(0.5));
  }
  SECTION("matches the exact one-spin Boltzmann conditional") {
    // one spin, h = 0.5, c = 1: P(+) = e^{c h} / (e^{c h} + e^{-c h})
    const double c = 1.0, h = 0.5;
    const double p = std::exp(c * h) / (std::exp(c * h) + std::exp(-c * h));
    REQUIRE(flip_probability_up(h, c) == Catch::Approx(p).epsilon(1e-14));
    REQUIRE(flip_probability_up(h, c) == Catch::Approx(0.7311).margin(5e-5));
  }
  SECTION("monotone in the local field, bounded in [0,1]") {
    double prev = 0.0;
    for (double L = -30.0; L <= 30.0; L += 0.25) {
      const double p = flip_probability_up(L, 1.3);
      REQUIRE(p >= 0.0);
      REQUIRE(p <= 1.0);
      REQUIRE(p >= prev);
      prev = p;
    }
  }
  SECTION("total on extreme inputs") {
    REQUIRE(flip_probability_up(1e308, 2.0) == 1.0);
    REQUIRE(flip_probability_up(-1e308, 2.0) == 0.0);
  }
}

TEST_CASE("contract violations throw") {
  IsingModel m(3);
  SpinConfiguration bad{+1, -1};
  REQUIRE_THROWS_AS(m.energy(bad), std::invalid_argument);
  SpinConfiguration s{+1, -1, +1};
  REQUIRE_THROWS_AS(m.local_field(s, 3), std::out_of_range);
  REQUIRE_THROWS_AS(m.set_coupling(1, 1, 0.5), std::invalid_argument);
  REQUIRE_NOTHROW(m.set_coupling(1, 1, 0.0));
  REQUIRE_THROWS_AS(m.set_coupling(0, 3, 1.0), std::out_of_range);
}

TEST_CASE("set_coupling keeps J symmetric") {
  IsingModel m(4);
  m.set_coupling(2, 0, -1.25);
  REQUIRE(m.coupling(0, 2) == -1.25);
  REQUIRE(m.coupling(2, 0) == -1.25);
  m.add_coupling(0, 2, 0.25);
  REQUIRE(m.coupling(2, 0) == -1.0);
}

TEST_CASE("reduce pins spins and preserves energies") {
  Rng rng = make_rng(14);
  for (int rep = 0; rep < 10; ++rep) {
    IsingModel m = oracle::random_model(6, rng);
    m.set_offset(0.3);
    // pin spins 1 and 4
    const spin_t v1 = rep % 2 ? spin_t(+1) : spin_t(-1);
    const spin_t v4 = rep % 3 ? spin_t(+1) : spin_t(-1);
    std::vector<std::size_t> map;
    IsingModel red = reduce(m, {{1, v1}, {4, v4}}, &map);
    REQUIRE(red.size() == 4);
    REQUIRE(map[1] == static_cast<std::size_t>(-1));
    for (std::uint64_t st = 0; st < 16; ++st) {
      SpinConfiguration rs = oracle::unpack_state(st, 4);
      SpinConfiguration fs(6);
      for (std::size_t i = 0; i < 6; ++i)
        fs[i] = (i == 1) ? v1 : (i == 4) ? v4 : rs[map[i]];
      REQUIRE(red.energy(rs) == Catch::Approx(m.energy(fs)).epsilon(1e-12));
    }
  }
}

TEST_CASE("sequential heat-bath sampling converges to the Gibbs distribution",
          "[stationarity]") {
  // Small fast version; the acceptance suite runs the full 8-spin variant.
  Rng rng = make_rng(15);
  IsingModel m = oracle::random_model(5, rng);
  const double c = 1.0;
  const auto exact = oracle::gibbs_distribution(m, c);

  SpinConfiguration s = random_spins(5, rng);
  std::vector<double> counts(32, 0.0);
  const int burn = 20000, keep = 300000;
  for (int t = 0; t < burn + keep; ++t) {
    for (std::size_t k = 0; k < 5; ++k) {
      const double p = flip_probability_up(m.local_field(s, k), c);
      s[k] = uniform01(rng) < p ? spin_t(+1) : spin_t(-1);
    }
    if (t >= burn) counts[oracle::pack_state(s)] += 1.0;
  }
  for (auto& v : counts) v /= keep;
  REQUIRE(oracle::tv_distance(counts, exact) < 0.02);
}
