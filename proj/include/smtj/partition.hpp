#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "smtj/annealer.hpp"
#include "smtj/ising.hpp"
#include "smtj/tsp.hpp"

namespace smtj {

/// Disjoint, exhaustive grouping of city indices.
struct Partition {
  std::vector<std::vector<int>> groups;
  std::size_t max_group = 0;

  bool covers(std::size_t n_cities) const {
    std::vector<char> seen(n_cities, 0);
    std::size_t total = 0;
    for (const auto& g : groups)
      for (int c : g) {
        if (c < 0 || static_cast<std::size_t>(c) >= n_cities || seen[c])
          return false;
        seen[c] = 1;
        ++total;
      }
    return total == n_cities;
  }
};

/// Accounting for every annealed sub-problem a pipeline spawns; used to
/// enforce the spin budget and to report total work.
struct AnnealCounters {
  std::size_t sweeps = 0;
  std::size_t spin_updates = 0;
  std::size_t max_spins = 0;

  void note(std::size_t n_spins, std::size_t iterations) {
    sweeps += iterations;
    spin_updates += n_spins * iterations;
    max_spins = std::max(max_spins, n_spins);
  }
};

/// Knobs for the Ising-based recursive bisection.
struct GpConfig {
  std::size_t spin_budget = 81;
  std::size_t iterations = 2000;   // per bisection anneal
  std::size_t retries = 3;         // re-anneals before the median fallback
  double balance_a = -1.0;         // < 0: 2 * max similarity
  double sigma = -1.0;             // < 0: mean pairwise distance of subset
  std::uint64_t seed = 1;
};

namespace detail {

inline double subset_mean_distance(const TspInstance& ins,
                                   const std::vector<int>& subset) {
  double sum = 0.0;
  std::size_t cnt = 0;
  for (std::size_t a = 0; a < subset.size(); ++a)
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      sum += ins.d(subset[a], subset[b]);
      ++cnt;
    }
  return cnt ? sum / static_cast<double>(cnt) : 0.0;
}

}  // namespace detail

/// Min-cut bisection with a size-balance term, as an Ising problem with one
/// spin per city:
///
///   H = A (sum_i s_i)^2 + sum_{i<j} W_ij (1 - s_i s_j) / 2,
///   W_ij = exp(-d_ij / sigma).
///
/// The first term discourages lopsided sides, the second charges each cut
/// edge its similarity, so minimizing cuts weak (distant) pairs. Defaults:
/// sigma = mean pairwise distance, A = 2 max W / n. Scaling the balance by
/// 1/n keeps it comparable to one vertex's similarity row; a constant-A
/// balance forces equal halves even when the geometry has natural clusters
/// of uneven size, which wrecks clustered instances.
inline IsingModel build_gp_ising(const TspInstance& ins,
                                 const std::vector<int>& subset,
                                 double balance_a = -1.0, double sigma = -1.0) {
  const std::size_t m = subset.size();
  if (m < 2)
    throw std::invalid_argument("build_gp_ising: need at least 2 cities");
  if (sigma <= 0.0) sigma = detail::subset_mean_distance(ins, subset);
  if (sigma <= 0.0) sigma = 1.0;  // coincident points: all similarities equal

  std::vector<double> w(m * m, 0.0);
  double max_w = 0.0;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) {
      const double v = std::exp(-ins.d(subset[a], subset[b]) / sigma);
      w[a * m + b] = v;
      max_w = std::max(max_w, v);
    }
  if (balance_a < 0.0) balance_a = 2.0 * max_w / static_cast<double>(m);

  IsingModel gp(m);
  double offset = balance_a * static_cast<double>(m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) {
      const double wij = w[a * m + b];
      // A (sum s)^2 contributes 2A s_a s_b per pair, the cut term -wij/2
      gp.set_coupling(a, b, wij / 2.0 - 2.0 * balance_a);
      offset += wij / 2.0;
    }
  gp.set_offset(offset);
  return gp;
}

namespace detail {

/// Deterministic geometric fallback: split at the coordinate median of the
/// wider bounding-box axis.
inline std::pair<std::vector<int>, std::vector<int>> median_split(
    const TspInstance& ins, const std::vector<int>& subset) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (int c : subset) {
    xmin = std::min(xmin, ins.cities[c][0]);
    xmax = std::max(xmax, ins.cities[c][0]);
    ymin = std::min(ymin, ins.cities[c][1]);
    ymax = std::max(ymax, ins.cities[c][1]);
  }
  const int axis = (xmax - xmin) >= (ymax - ymin) ? 0 : 1;
  std::vector<int> sorted = subset;
  std::stable_sort(sorted.begin(), sorted.end(), [&](int a, int b) {
    if (ins.cities[a][axis] != ins.cities[b][axis])
      return ins.cities[a][axis] < ins.cities[b][axis];
    return a < b;
  });
  const std::size_t half = sorted.size() / 2;
  return {std::vector<int>(sorted.begin(), sorted.begin() + half),
          std::vector<int>(sorted.begin() + half, sorted.end())};
}

inline std::pair<std::vector<int>, std::vector<int>> bisect(
    const TspInstance& ins, const std::vector<int>& subset,
    const GpConfig& cfg, std::uint64_t node_salt, AnnealCounters* counters) {
  // anneal only within the spin budget; oversized subsets fall back to the
  // geometric split until they fit
  if (subset.size() <= cfg.spin_budget) {
    const IsingModel gp =
        build_gp_ising(ins, subset, cfg.balance_a, cfg.sigma);
    // independently seeded anneals; keep the lowest-energy two-sided cut
    std::vector<int> best_left, best_right;
    double best_energy = 0.0;
    for (std::size_t attempt = 0; attempt <= cfg.retries; ++attempt) {
      RunConfig rc;
      // GP local fields scale with the subset's aggregate coupling, so the
      // useful c range sits lower than for the TSP encodings
      rc.schedule = Schedule::linear(0.1, 0.8, cfg.iterations);
      rc.seed = derive_seed(cfg.seed, node_salt * 97 + attempt);
      const RunResult res = run_random(gp, rc);
      if (counters) counters->note(gp.size(), res.iterations_run);
      std::vector<int> left, right;
      const SpinConfiguration& s = res.solution_state();
      for (std::size_t k = 0; k < subset.size(); ++k)
        (s[k] > 0 ? left : right).push_back(subset[k]);
      if (left.empty() || right.empty()) continue;
      if (best_left.empty() || res.solution_energy < best_energy) {
        best_energy = res.solution_energy;
        best_left = std::move(left);
        best_right = std::move(right);
      }
    }
    if (!best_left.empty()) return {best_left, best_right};
  }
  return median_split(ins, subset);
}

}  // namespace detail

/// Recursively bisects the instance until every group holds at most
/// max_group = floor(sqrt(spin_budget)) cities, so each group's fixed-start
/// TSP encoding fits the budget.
inline Partition recursive_partition(const TspInstance& ins,
                                     const GpConfig& cfg,
                                     AnnealCounters* counters = nullptr) {
  Partition part;
  part.max_group =
      static_cast<std::size_t>(std::sqrt(static_cast<double>(cfg.spin_budget)));
  if (part.max_group < 2)
    throw std::invalid_argument("recursive_partition: spin budget too small");

  std::vector<int> all(ins.size());
  for (std::size_t k = 0; k < ins.size(); ++k) all[k] = static_cast<int>(k);

  std::uint64_t node_counter = 0;
  std::vector<std::vector<int>> work{all};
  while (!work.empty()) {
    std::vector<int> subset = std::move(work.back());
    work.pop_back();
    if (subset.size() <= part.max_group) {
      part.groups.push_back(std::move(subset));
      continue;
    }
    auto [left, right] =
        detail::bisect(ins, subset, cfg, node_counter++, counters);
    work.push_back(std::move(right));
    work.push_back(std::move(left));
  }
  std::sort(part.groups.begin(), part.groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return part;
}

}  // namespace smtj
