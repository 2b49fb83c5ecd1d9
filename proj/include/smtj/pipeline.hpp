#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "smtj/annealer.hpp"
#include "smtj/partition.hpp"
#include "smtj/tsp.hpp"

namespace smtj {

/// Axis-aligned refinement window.
struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  bool contains(const std::array<double, 2>& p) const {
    return p[0] >= x0 && p[0] <= x1 && p[1] >= y0 && p[1] <= y1;
  }
  Rect shrunk(double factor) const {
    const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
    const double hw = 0.5 * (x1 - x0) * factor, hh = 0.5 * (y1 - y0) * factor;
    return {cx - hw, cy - hh, cx + hw, cy + hh};
  }
};

/// Ordered window rectangles covering the instance bounding box.
struct WindowPlan {
  std::vector<Rect> rects;
  double overlap = 0.5;
};

/// Grid of windows sized so the expected city count per window stays near
/// `target_cities`, with the given overlap fraction between neighbours.
/// `shift_frac` displaces the grid origin by that fraction of a window so
/// successive passes cut the tour at fresh places.
inline WindowPlan make_window_plan(const TspInstance& ins,
                                   std::size_t target_cities, double overlap,
                                   double shift_frac = 0.0) {
  if (!(overlap >= 0.0 && overlap < 1.0))
    throw std::invalid_argument("make_window_plan: overlap must be in [0,1)");
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& p : ins.cities) {
    xmin = std::min(xmin, p[0]);
    xmax = std::max(xmax, p[0]);
    ymin = std::min(ymin, p[1]);
    ymax = std::max(ymax, p[1]);
  }
  const double pad = 1e-9 + 1e-9 * std::max(xmax - xmin, ymax - ymin);
  xmin -= pad, ymin -= pad, xmax += pad, ymax += pad;

  const double cells = std::ceil(std::sqrt(
      static_cast<double>(ins.size()) / std::max<std::size_t>(target_cities, 1)));
  const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(cells));
  const double wx = (xmax - xmin) / static_cast<double>(k);
  const double wy = (ymax - ymin) / static_cast<double>(k);
  const double sx = wx * (1.0 - overlap);
  const double sy = wy * (1.0 - overlap);

  WindowPlan plan;
  plan.overlap = overlap;
  for (double y = ymin - shift_frac * wy;; y += sy) {
    const double y1 = std::min(y + wy, ymax);
    for (double x = xmin - shift_frac * wx;; x += sx) {
      const double x1 = std::min(x + wx, xmax);
      plan.rects.push_back({x, y, x1, y1});
      if (x + wx >= xmax) break;
    }
    if (y + wy >= ymax) break;
  }
  return plan;
}

/// All knobs of the compression pipeline. Negative values mean "use the
/// derived default" (w, theta, sigma, balance).
struct PipelineConfig {
  std::size_t spin_budget = 81;
  double w = -1.0;
  double theta = -1.0;
  double balance_a = -1.0;
  double sigma = -1.0;
  std::size_t gp_iterations = 2000;
  std::size_t gp_retries = 4;       // best-of-(retries+1) bisection anneals
  std::size_t group_iterations = 20000;
  std::size_t group_retries = 3;
  std::size_t window_iterations = 3000;
  std::size_t window_retries = 0;
  std::size_t window_passes = 8;
  std::size_t window_target_cities = 8;
  double window_overlap = 0.8;  // slide step = 20% of the window size
  double window_hold = 0.7;     // hold level of the window anneals
  std::uint64_t seed = 1;

  void validate() const {
    if (spin_budget < 16)
      throw std::invalid_argument("PipelineConfig: spin_budget must be >= 16");
    if (!(window_overlap >= 0.0 && window_overlap < 1.0))
      throw std::invalid_argument("PipelineConfig: overlap must be in [0,1)");
  }

  std::size_t max_group() const {
    return static_cast<std::size_t>(
        std::sqrt(static_cast<double>(spin_budget)));
  }
  /// Largest sub-tour a window may re-solve: (m-1)^2 spins must fit.
  std::size_t max_window_cities() const {
    return static_cast<std::size_t>(
               std::sqrt(static_cast<double>(spin_budget))) + 1;
  }

  GpConfig gp() const {
    GpConfig g;
    g.spin_budget = spin_budget;
    g.iterations = gp_iterations;
    g.retries = gp_retries;
    g.balance_a = balance_a;
    g.sigma = sigma;
    g.seed = derive_seed(seed, 0xA11);
    return g;
  }
};

/// Per-stage record of one pipeline execution.
struct StageReport {
  std::vector<std::size_t> group_sizes;
  std::vector<double> group_lengths;
  double stitched_length = 0.0;
  std::vector<double> pass_lengths;
  double final_length = 0.0;
  std::size_t windows_attempted = 0;
  std::size_t windows_accepted = 0;
  std::size_t total_sweeps = 0;
  std::size_t total_spin_updates = 0;
  std::size_t max_subproblem_spins = 0;
  bool all_stages_valid = true;
};

struct PipelineResult {
  Tour tour;
  Partition partition;
  StageReport report;
};

namespace detail {

inline std::vector<int> nearest_neighbor_tour(const TspInstance& ins) {
  const std::size_t n = ins.size();
  std::vector<int> order;
  order.reserve(n);
  std::vector<char> used(n, 0);
  int cur = 0;
  order.push_back(0);
  used[0] = 1;
  for (std::size_t step = 1; step < n; ++step) {
    int best = -1;
    double best_d = 1e300;
    for (std::size_t c = 0; c < n; ++c)
      if (!used[c] && ins.d(cur, c) < best_d) {
        best_d = ins.d(cur, c);
        best = static_cast<int>(c);
      }
    order.push_back(best);
    used[best] = 1;
    cur = best;
  }
  return order;
}

/// Annealed TSP solve of a whole (sub-)instance with validity retries and a
/// deterministic nearest-neighbour fallback.
inline Tour solve_tsp_annealed(const TspInstance& ins,
                               const PipelineConfig& cfg, std::uint64_t salt,
                               std::size_t iterations,
                               AnnealCounters* counters) {
  const std::size_t n = ins.size();
  if (n <= 3) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    return {order, n < 2 ? 0.0 : tour_length(ins, order)};
  }
  const double w = cfg.w > 0.0 ? cfg.w : default_weight(ins);
  const TspEncoding enc = build_tsp(ins, TspVariant::fixed_start, w);
  for (std::size_t attempt = 0; attempt <= cfg.group_retries; ++attempt) {
    RunConfig rc;
    rc.schedule = Schedule::solve_default(iterations);
    rc.seed = derive_seed(cfg.seed, salt * 131 + attempt);
    const RunResult res = run_random(enc.model, rc);
    if (counters) counters->note(enc.model.size(), res.iterations_run);
    const Decoded dec = decode(enc, res.solution_state());
    if (dec.valid()) return *dec.tour;
  }
  std::vector<int> order = nearest_neighbor_tour(ins);
  return {order, tour_length(ins, order)};
}

/// One way of opening a cyclic group tour into a directed path: drop one
/// edge, pick an orientation.
struct Opening {
  std::vector<int> path;  // globally indexed cities
  double intra = 0.0;     // path length (tour length minus the dropped edge)
};

inline std::vector<Opening> tour_openings(const TspInstance& ins,
                                          const std::vector<int>& tour) {
  const std::size_t m = tour.size();
  std::vector<Opening> out;
  if (m == 1) {
    out.push_back({{tour[0]}, 0.0});
    return out;
  }
  if (m == 2) {
    const double d = ins.d(tour[0], tour[1]);
    out.push_back({{tour[0], tour[1]}, d});
    out.push_back({{tour[1], tour[0]}, d});
    return out;
  }
  double full = 0.0;
  for (std::size_t k = 0; k < m; ++k)
    full += ins.d(tour[k], tour[(k + 1) % m]);
  for (std::size_t cut = 0; cut < m; ++cut) {
    std::vector<int> path(m);
    for (std::size_t k = 0; k < m; ++k) path[k] = tour[(cut + 1 + k) % m];
    const double intra = full - ins.d(tour[cut], tour[(cut + 1) % m]);
    out.push_back({path, intra});
    std::reverse(path.begin(), path.end());
    out.push_back({std::move(path), intra});
  }
  return out;
}

}  // namespace detail

/// Integrates per-group closed tours into one global closed tour: orders the
/// groups along a greedy nearest-centroid cycle, opens each group tour at the
/// edge whose removal best exposes endpoints toward its neighbours, and
/// concatenates.
inline Tour stitch_groups(const TspInstance& ins, const Partition& part,
                          const std::vector<Tour>& group_tours) {
  if (part.groups.size() != group_tours.size())
    throw std::invalid_argument("stitch_groups: one tour per group required");
  if (group_tours.size() == 1) return group_tours[0];

  const std::size_t g = part.groups.size();
  std::vector<std::array<double, 2>> centroid(g, {0.0, 0.0});
  for (std::size_t k = 0; k < g; ++k) {
    for (int c : part.groups[k]) {
      centroid[k][0] += ins.cities[c][0];
      centroid[k][1] += ins.cities[c][1];
    }
    centroid[k][0] /= static_cast<double>(part.groups[k].size());
    centroid[k][1] /= static_cast<double>(part.groups[k].size());
  }
  auto cdist = [&](std::size_t a, std::size_t b) {
    const double dx = centroid[a][0] - centroid[b][0];
    const double dy = centroid[a][1] - centroid[b][1];
    return std::sqrt(dx * dx + dy * dy);
  };

  // greedy nearest-centroid cycle, best over all starting groups
  auto greedy_cycle = [&](std::size_t start) {
    std::vector<std::size_t> cycle{start};
    std::vector<char> used(g, 0);
    used[start] = 1;
    while (cycle.size() < g) {
      const std::size_t cur = cycle.back();
      std::size_t best = g;
      double best_d = 1e300;
      for (std::size_t k = 0; k < g; ++k)
        if (!used[k] && cdist(cur, k) < best_d) {
          best_d = cdist(cur, k);
          best = k;
        }
      cycle.push_back(best);
      used[best] = 1;
    }
    return cycle;
  };

  // exact concatenation for a fixed group order: dynamic program over every
  // (dropped edge, orientation) opening of every group tour, closing the
  // cycle for each choice of the first group's opening
  auto assemble = [&](const std::vector<std::size_t>& cycle) {
    std::vector<std::vector<detail::Opening>> opts(g);
    for (std::size_t k = 0; k < g; ++k)
      opts[k] = detail::tour_openings(ins, group_tours[cycle[k]].order);

    double best_total = 1e300;
    std::vector<std::size_t> best_choice;
    for (std::size_t first = 0; first < opts[0].size(); ++first) {
      // prev_idx[t] is the stage-(k-1) option behind dp[t]
      std::vector<std::size_t> prev_idx{first};
      std::vector<double> dp{opts[0][first].intra};
      std::vector<std::vector<std::size_t>> parent(g);
      for (std::size_t k = 1; k < g; ++k) {
        std::vector<double> next_dp(opts[k].size(), 1e300);
        parent[k].assign(opts[k].size(), 0);
        for (std::size_t j = 0; j < opts[k].size(); ++j) {
          const int head = opts[k][j].path.front();
          for (std::size_t t = 0; t < dp.size(); ++t) {
            const int tail = opts[k - 1][prev_idx[t]].path.back();
            const double cand = dp[t] + ins.d(tail, head) + opts[k][j].intra;
            if (cand < next_dp[j]) {
              next_dp[j] = cand;
              parent[k][j] = prev_idx[t];
            }
          }
        }
        dp = std::move(next_dp);
        prev_idx.resize(opts[k].size());
        std::iota(prev_idx.begin(), prev_idx.end(), std::size_t{0});
      }
      // close the cycle back to the first opening
      const int first_head = opts[0][first].path.front();
      for (std::size_t j = 0; j < dp.size(); ++j) {
        const double total =
            dp[j] + ins.d(opts[g - 1][j].path.back(), first_head);
        if (total < best_total) {
          best_total = total;
          best_choice.assign(g, 0);
          best_choice[0] = first;
          best_choice[g - 1] = j;
          for (std::size_t k = g - 1; k > 1; --k)
            best_choice[k - 1] = parent[k][best_choice[k]];
        }
      }
    }

    std::vector<int> order;
    order.reserve(ins.size());
    for (std::size_t k = 0; k < g; ++k) {
      const auto& path = opts[k][best_choice[k]].path;
      order.insert(order.end(), path.begin(), path.end());
    }
    return Tour{order, tour_length(ins, order)};
  };

  Tour best = assemble(greedy_cycle(0));
  for (std::size_t start = 1; start < g; ++start) {
    Tour cand = assemble(greedy_cycle(start));
    if (cand.length < best.length) best = std::move(cand);
  }
  return best;
}

namespace detail {

struct Segment {
  std::size_t start = 0;   // index into the tour order
  std::size_t count = 0;   // number of consecutive tour cities in the window
  double path_length = 0;  // sum of edge lengths inside the segment
};

inline std::vector<Segment> window_segments(const TspInstance& ins,
                                            const std::vector<int>& order,
                                            const Rect& rect) {
  const std::size_t n = order.size();
  std::vector<char> inside(n, 0);
  std::size_t inside_total = 0;
  for (std::size_t k = 0; k < n; ++k) {
    inside[k] = rect.contains(ins.cities[order[k]]);
    inside_total += inside[k];
  }
  std::vector<Segment> segs;
  if (inside_total == 0) return segs;
  if (inside_total == n) {
    // whole tour inside: one "segment" covering everything
    segs.push_back({0, n, 0.0});
    for (std::size_t k = 0; k + 1 < n; ++k)
      segs.back().path_length += ins.d(order[k], order[k + 1]);
    return segs;
  }
  // walk cyclically from a position outside the window
  std::size_t origin = 0;
  while (inside[origin]) ++origin;
  for (std::size_t off = 0; off < n; ++off) {
    const std::size_t k = (origin + off) % n;
    if (!inside[k]) continue;
    Segment s{k, 1, 0.0};
    std::size_t off2 = off + 1;
    while (off2 < n && inside[(origin + off2) % n]) {
      const std::size_t a = (origin + off2 - 1) % n;
      const std::size_t b = (origin + off2) % n;
      s.path_length += ins.d(order[a], order[b]);
      ++s.count;
      ++off2;
    }
    segs.push_back(s);
    off = off2;
  }
  return segs;
}

}  // namespace detail

/// One sliding-window refinement step. The window cuts the tour into
/// disconnected segments; the two longest are joined into a temporary closed
/// sub-tour whose boundary adjacencies are pinned by CTSP constraints, the
/// sub-tour is re-annealed, and the result is spliced back. The move is
/// accepted only if the global length does not increase. Windows whose
/// sub-problem exceeds the spin budget shrink until it fits; windows holding
/// fewer than two segments (or under four cities) leave the tour unchanged.
inline Tour window_refine(const TspInstance& ins, const Tour& tour,
                          const Rect& window, const PipelineConfig& cfg,
                          std::uint64_t salt, AnnealCounters* counters = nullptr,
                          bool* accepted = nullptr) {
  if (accepted) *accepted = false;
  const std::vector<int>& order = tour.order;
  const std::size_t n = order.size();
  Rect rect = window;

  for (int shrink = 0; shrink < 24; ++shrink, rect = rect.shrunk(0.85)) {
    auto segs = detail::window_segments(ins, order, rect);
    if (segs.size() < 2) {
      if (segs.size() == 1 && segs[0].count == n && n > 4) {
        // whole tour inside the window: shrink to expose structure
        continue;
      }
      return tour;
    }
    // two longest lines by path length; ties by city count, then by the
    // lowest city index for determinism
    std::sort(segs.begin(), segs.end(),
              [&](const detail::Segment& a, const detail::Segment& b) {
                if (a.path_length != b.path_length)
                  return a.path_length > b.path_length;
                if (a.count != b.count) return a.count > b.count;
                return order[a.start] < order[b.start];
              });
    detail::Segment s1 = segs[0], s2 = segs[1];
    const std::size_t m = s1.count + s2.count;
    if (m < 4) return tour;
    if ((m - 1) * (m - 1) > cfg.spin_budget) continue;  // shrink and retry

    // tour-order the two segments: s1 first
    if ((s2.start + n - s1.start) % n > (s1.start + n - s2.start) % n)
      std::swap(s1, s2);

    // local sub-instance: s1 cities then s2 cities
    std::vector<int> local_cities;
    local_cities.reserve(m);
    for (std::size_t k = 0; k < s1.count; ++k)
      local_cities.push_back(order[(s1.start + k) % n]);
    for (std::size_t k = 0; k < s2.count; ++k)
      local_cities.push_back(order[(s2.start + k) % n]);
    const TspInstance sub = subinstance(ins, local_cities);

    const int a1 = 0;
    const int b1 = static_cast<int>(s1.count) - 1;
    const int a2 = static_cast<int>(s1.count);
    const int b2 = static_cast<int>(m) - 1;

    // constrained sub-solves need the smaller constrained-safe weight;
    // a user override is honoured only up to that bound
    double w = default_ctsp_weight(sub);
    if (cfg.w > 0.0) w = std::min(cfg.w, w);
    const TspEncoding base = build_tsp(sub, TspVariant::fixed_start, w);
    CtspConstraint constraint;
    constraint.theta = cfg.theta > 0.0 ? cfg.theta : default_theta(base);
    constraint.pairs.push_back({b1, a2, CtspConstraint::Direction::either});
    constraint.pairs.push_back({b2, a1, CtspConstraint::Direction::either});
    const TspEncoding enc = build_ctsp(base, constraint);

    // warm start from the current arrangement (a valid constrained cycle)
    std::vector<int> ident(m);
    std::iota(ident.begin(), ident.end(), 0);
    const SpinConfiguration initial = encode_tour(enc, ident);

    // independent re-anneals; keep the best feasible sub-cycle seen
    std::vector<int> best_local;
    double best_local_energy = 0.0;
    for (std::size_t attempt = 0; attempt <= cfg.window_retries; ++attempt) {
      RunConfig rc;
      rc.schedule =
          Schedule::ramp_hold(0.2, cfg.window_hold, 50, cfg.window_iterations);
      rc.seed = derive_seed(cfg.seed, salt * 193 + attempt);
      const RunResult res = run(enc.model, initial, rc);
      if (counters) counters->note(enc.model.size(), res.iterations_run);
      const Decoded dec = decode(enc, res.solution_state());
      if (!dec.valid()) continue;
      const auto& lo = dec.tour->order;
      auto has_edge = [&](int a, int b) {
        for (std::size_t k = 0; k < lo.size(); ++k) {
          const int u = lo[k], v = lo[(k + 1) % lo.size()];
          if ((u == a && v == b) || (u == b && v == a)) return true;
        }
        return false;
      };
      if (!has_edge(b1, a2) || !has_edge(b2, a1)) continue;
      if (best_local.empty() || res.solution_energy < best_local_energy) {
        best_local = lo;
        best_local_energy = res.solution_energy;
      }
    }
    if (best_local.empty()) return tour;

    // splice: walk the refined local cycle and expand the two pinned edges
    // back into the outside chains they stand for
    std::vector<int> out1, out2;  // outside chains following b1 and b2
    for (std::size_t k = (s1.start + s1.count) % n; k != s2.start;
         k = (k + 1) % n)
      out2.push_back(order[k]);
    for (std::size_t k = (s2.start + s2.count) % n; k != s1.start;
         k = (k + 1) % n)
      out1.push_back(order[k]);

    std::vector<int> next_order;
    next_order.reserve(n);
    for (std::size_t k = 0; k < best_local.size(); ++k) {
      const int u = best_local[k];
      const int v = best_local[(k + 1) % best_local.size()];
      next_order.push_back(local_cities[u]);
      auto append = [&](const std::vector<int>& chain, bool reversed) {
        if (reversed)
          next_order.insert(next_order.end(), chain.rbegin(), chain.rend());
        else
          next_order.insert(next_order.end(), chain.begin(), chain.end());
      };
      if (u == b1 && v == a2) append(out2, false);
      else if (u == a2 && v == b1) append(out2, true);
      else if (u == b2 && v == a1) append(out1, false);
      else if (u == a1 && v == b2) append(out1, true);
    }

    const double new_len = tour_length(ins, next_order);
    if (new_len <= tour.length + 1e-9) {
      if (accepted) *accepted = new_len < tour.length - 1e-12;
      return {next_order, new_len};
    }
    return tour;
  }
  return tour;
}

/// Full compression pipeline: recursive graph bisection, per-group annealed
/// TSP solves, greedy stitching, then repeated sliding-window CTSP passes.
/// An instance that already fits one group degenerates to a single direct
/// solve. Deterministic for a given (instance, config).
inline PipelineResult pipeline_run(const TspInstance& ins,
                                   const PipelineConfig& cfg) {
  cfg.validate();
  ins.validate();
  AnnealCounters counters;
  PipelineResult out;
  StageReport& rep = out.report;

  if (ins.size() <= cfg.max_group()) {
    out.tour = detail::solve_tsp_annealed(ins, cfg, 0x50, cfg.group_iterations,
                                          &counters);
    out.partition.max_group = cfg.max_group();
    std::vector<int> all(ins.size());
    std::iota(all.begin(), all.end(), 0);
    out.partition.groups.push_back(all);
    rep.group_sizes.push_back(ins.size());
    rep.group_lengths.push_back(out.tour.length);
    rep.stitched_length = out.tour.length;
    rep.final_length = out.tour.length;
    rep.total_sweeps = counters.sweeps;
    rep.total_spin_updates = counters.spin_updates;
    rep.max_subproblem_spins = counters.max_spins;
    return out;
  }

  // (a) divide into groups under the budget
  out.partition = recursive_partition(ins, cfg.gp(), &counters);
  rep.all_stages_valid = out.partition.covers(ins.size());

  // (b) solve each group independently
  std::vector<Tour> group_tours;
  for (std::size_t gi = 0; gi < out.partition.groups.size(); ++gi) {
    const auto& group = out.partition.groups[gi];
    const TspInstance sub = subinstance(ins, group);
    Tour local = detail::solve_tsp_annealed(sub, cfg, 0x100 + gi,
                                            cfg.group_iterations, &counters);
    // map back to global city indices; the cyclic length is unchanged
    // because sub-instance distances are copies of the parent's
    for (auto& c : local.order) c = group[c];
    rep.group_sizes.push_back(group.size());
    rep.group_lengths.push_back(local.length);
    group_tours.push_back(std::move(local));
  }

  // (c) stitch into one global tour
  Tour tour = stitch_groups(ins, out.partition, group_tours);
  rep.all_stages_valid = rep.all_stages_valid && tour.order.size() == ins.size();
  rep.stitched_length = tour.length;

  // (d) sliding-window CTSP refinement. Each pass slides a phase-shifted
  // grid over the map, then revisits the regions where stitching does its
  // damage: every group's bounding box and every edge that crosses between
  // groups gets a window of its own.
  std::vector<int> group_of(ins.size(), 0);
  for (std::size_t gi = 0; gi < out.partition.groups.size(); ++gi)
    for (int c : out.partition.groups[gi]) group_of[c] = static_cast<int>(gi);
  auto padded_rect = [&](const std::vector<int>& cities, double pad) {
    Rect r{1e300, 1e300, -1e300, -1e300};
    for (int c : cities) {
      r.x0 = std::min(r.x0, ins.cities[c][0]);
      r.y0 = std::min(r.y0, ins.cities[c][1]);
      r.x1 = std::max(r.x1, ins.cities[c][0]);
      r.y1 = std::max(r.y1, ins.cities[c][1]);
    }
    r.x0 -= pad, r.y0 -= pad, r.x1 += pad, r.y1 += pad;
    return r;
  };
  double span = 0.0;
  {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& p : ins.cities) {
      xmin = std::min(xmin, p[0]);
      xmax = std::max(xmax, p[0]);
      ymin = std::min(ymin, p[1]);
      ymax = std::max(ymax, p[1]);
    }
    span = std::max(xmax - xmin, ymax - ymin);
  }

  std::uint64_t salt = 0x1000;
  static constexpr double kPhases[4] = {0.0, 0.25, 0.125, 0.375};
  for (std::size_t pass = 0; pass < cfg.window_passes; ++pass) {
    const std::size_t target = pass % 2 ? cfg.window_target_cities + 2
                                        : cfg.window_target_cities;
    WindowPlan plan = make_window_plan(ins, target, cfg.window_overlap,
                                       kPhases[pass % 4]);
    for (const auto& grp : out.partition.groups)
      plan.rects.push_back(padded_rect(grp, 0.04 * span));
    for (std::size_t k = 0; k < tour.order.size(); ++k) {
      const int u = tour.order[k];
      const int v = tour.order[(k + 1) % tour.order.size()];
      if (group_of[u] != group_of[v])
        plan.rects.push_back(padded_rect({u, v}, 0.08 * span));
    }
    for (const Rect& rect : plan.rects) {
      ++rep.windows_attempted;
      bool accepted = false;
      Tour next = window_refine(ins, tour, rect, cfg, salt++, &counters,
                                &accepted);
      if (next.length > tour.length + 1e-9) rep.all_stages_valid = false;
      rep.windows_accepted += accepted;
      tour = std::move(next);
    }
    rep.pass_lengths.push_back(tour.length);
  }

  rep.final_length = tour.length;
  rep.total_sweeps = counters.sweeps;
  rep.total_spin_updates = counters.spin_updates;
  rep.max_subproblem_spins = counters.max_spins;
  rep.all_stages_valid =
      rep.all_stages_valid && tour.order.size() == ins.size();
  out.tour = std::move(tour);
  return out;
}

/// One row of the hardware-demand comparison: spins needed by the direct
/// (N-1)^2 mapping versus the largest sub-problem this pipeline would anneal.
struct SpinCountRow {
  std::string name;
  std::size_t n_cities = 0;
  std::size_t conventional = 0;
  std::size_t ours = 0;
};

/// Computes the spin demand of an instance without running the full solve:
/// the partition stage runs for real (it is cheap), group and window demands
/// follow from the group sizes and the window plan.
inline SpinCountRow spin_count_report(const TspInstance& ins,
                                      const PipelineConfig& cfg) {
  SpinCountRow row;
  row.name = ins.name;
  row.n_cities = ins.size();
  row.conventional = (ins.size() - 1) * (ins.size() - 1);
  if (ins.size() <= cfg.max_group()) {
    row.ours = row.conventional;
    return row;
  }
  AnnealCounters counters;
  const Partition part = recursive_partition(ins, cfg.gp(), &counters);
  std::size_t ours = counters.max_spins;
  for (const auto& g : part.groups)
    ours = std::max(ours, (g.size() - 1) * (g.size() - 1));
  const WindowPlan plan =
      make_window_plan(ins, cfg.window_target_cities, cfg.window_overlap);
  for (const Rect& r : plan.rects) {
    std::size_t inside = 0;
    for (const auto& p : ins.cities) inside += r.contains(p);
    const std::size_t m = std::min(inside, cfg.max_window_cities());
    if (m >= 4) ours = std::max(ours, (m - 1) * (m - 1));
  }
  row.ours = ours;
  return row;
}

/// Dimension-only row (e.g. GEO instances): the conventional demand follows
/// from N alone and the pipeline never exceeds its budget.
inline SpinCountRow spin_count_report(const std::string& name,
                                      std::size_t n_cities,
                                      const PipelineConfig& cfg) {
  SpinCountRow row;
  row.name = name;
  row.n_cities = n_cities;
  row.conventional = (n_cities - 1) * (n_cities - 1);
  row.ours = std::min(row.conventional, cfg.spin_budget);
  return row;
}

}  // namespace smtj
