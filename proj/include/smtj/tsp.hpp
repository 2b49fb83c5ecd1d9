#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "smtj/ising.hpp"

namespace smtj {

/// Symmetric TSP instance: city coordinates plus the distance matrix that is
/// actually optimized (the two may disagree, e.g. when distances are rounded
/// to integers by the file loader).
struct TspInstance {
  std::string name;
  std::vector<std::array<double, 2>> cities;
  std::vector<double> dist;  // n x n, row-major

  std::size_t size() const { return cities.size(); }

  double d(std::size_t i, std::size_t j) const {
    return dist[i * size() + j];
  }

  double max_distance() const {
    double m = 0.0;
    for (double v : dist) m = std::max(m, v);
    return m;
  }

  static TspInstance from_points(std::string name,
                                 std::vector<std::array<double, 2>> pts) {
    TspInstance ins;
    ins.name = std::move(name);
    ins.cities = std::move(pts);
    const std::size_t n = ins.cities.size();
    ins.dist.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = ins.cities[i][0] - ins.cities[j][0];
        const double dy = ins.cities[i][1] - ins.cities[j][1];
        const double d = std::sqrt(dx * dx + dy * dy);
        ins.dist[i * n + j] = d;
        ins.dist[j * n + i] = d;
      }
    return ins;
  }

  void validate() const {
    const std::size_t n = size();
    if (dist.size() != n * n)
      throw std::invalid_argument("TspInstance: distance matrix size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
      if (d(i, i) != 0.0)
        throw std::invalid_argument("TspInstance: nonzero self-distance");
      for (std::size_t j = 0; j < n; ++j) {
        if (d(i, j) < 0.0)
          throw std::invalid_argument("TspInstance: negative distance");
        if (d(i, j) != d(j, i))
          throw std::invalid_argument("TspInstance: asymmetric distance");
      }
    }
  }
};

/// Random benchmark instance: cities drawn uniformly from a square. The
/// default side keeps the default weight comfortably inside (0, 1); TSP is
/// scale-free, so only w * d products matter.
inline TspInstance synthetic_instance(std::string name, std::size_t n,
                                      Rng& rng, double side = 20.0) {
  std::vector<std::array<double, 2>> pts(n);
  for (auto& p : pts) p = {side * uniform01(rng), side * uniform01(rng)};
  return TspInstance::from_points(std::move(name), std::move(pts));
}

/// Sub-instance over a subset of cities; distances are copied, not
/// recomputed, so rounded metrics survive.
inline TspInstance subinstance(const TspInstance& ins,
                               const std::vector<int>& idx) {
  TspInstance out;
  out.name = ins.name + "/sub" + std::to_string(idx.size());
  const std::size_t m = idx.size();
  out.cities.resize(m);
  out.dist.assign(m * m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    out.cities[a] = ins.cities[idx[a]];
    for (std::size_t b = 0; b < m; ++b)
      out.dist[a * m + b] = ins.d(idx[a], idx[b]);
  }
  return out;
}

/// full: N^2 spins, city x visiting position. fixed_start: city 0 is pinned
/// to position 0 and its row/column are folded away, (N-1)^2 spins.
enum class TspVariant { full, fixed_start };

/// Pairs of cities whose visits must be consecutive; the tour energy of any
/// path containing such an adjacency is lowered by theta per pair.
struct CtspConstraint {
  enum class Direction { either, a_then_b };
  struct Pair {
    int a = 0;
    int b = 0;
    Direction dir = Direction::either;
  };
  std::vector<Pair> pairs;
  double theta = 0.0;
};

struct Tour {
  std::vector<int> order;  // permutation of 0..N-1, cyclic
  double length = 0.0;
};

/// Cyclic tour length under the instance's distance matrix.
inline double tour_length(const TspInstance& ins, const std::vector<int>& order) {
  const std::size_t n = ins.size();
  if (order.size() != n)
    throw std::invalid_argument("tour_length: order is not a permutation");
  std::vector<char> seen(n, 0);
  for (int c : order) {
    if (c < 0 || static_cast<std::size_t>(c) >= n || seen[c])
      throw std::invalid_argument("tour_length: order is not a permutation");
    seen[c] = 1;
  }
  double len = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    len += ins.d(order[k], order[(k + 1) % n]);
  return len;
}

/// Decode outcome: a tour when the one-hot constraints hold, otherwise the
/// violation counts. Violating configurations are ordinary data (annealing
/// trajectories pass through them), not errors.
struct Decoded {
  std::optional<Tour> tour;
  int row_violations = 0;  // cities without exactly one position
  int col_violations = 0;  // positions without exactly one city
  bool valid() const { return tour.has_value(); }
};

/// Row/column quadratic penalty values of the mapped Hamiltonian; both are
/// zero exactly on valid tours.
struct PenaltyValues {
  double row_term = 0.0;
  double col_term = 0.0;
};

/// An Ising encoding of a (C)TSP instance.
///
/// Spins s(i,j) = +1 mean "city i is the j-th visit". With visit bits
/// b = (s+1)/2, the Hamiltonian is
///
///   H = sum_i (sum_j s_ij + (N-2))^2 + sum_j (sum_i s_ij + (N-2))^2
///       + w sum_j sum_{i != i'} d(i,i') b_ij b_i'(j+1)
///       - theta sum_pairs sum_j 4 (b_Aj b_B(j+1) [+ b_Bj b_A(j+1)])
///
/// with position j+1 taken mod N (closed tours). The constraint term pays
/// out only when a pair's visits are actually adjacent (4 theta per realized
/// adjacency, which shifts the adjacent-position couplings by exactly
/// +theta); a raw +-1 product sum would instead hand its maximum reward to
/// configurations that skip the constrained cities altogether. Expanded into
/// (J, h, offset) so that model.energy equals H for every configuration;
/// valid tours make both penalties vanish, leaving w * tour length
/// (minus 4 theta per satisfied pair).
struct TspEncoding {
  TspInstance instance;
  TspVariant variant = TspVariant::full;
  double w = 0.0;
  CtspConstraint constraints;  // empty pair list for plain TSP
  IsingModel model;

  std::size_t n_cities() const { return instance.size(); }
  std::size_t n_spins() const { return model.size(); }

  /// Flat spin index of (city, pos); npos when the coordinate is pinned by
  /// the fixed_start variant.
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t spin_index(std::size_t city, std::size_t pos) const {
    const std::size_t n = n_cities();
    if (city >= n || pos >= n)
      throw std::out_of_range("TspEncoding::spin_index out of range");
    if (variant == TspVariant::full) return city * n + pos;
    if (city == 0 || pos == 0) return npos;
    return (city - 1) * (n - 1) + (pos - 1);
  }

  /// Value of coordinate (city, pos) under configuration s, resolving pinned
  /// coordinates of the fixed_start variant.
  spin_t spin_value(const SpinConfiguration& s, std::size_t city,
                    std::size_t pos) const {
    const std::size_t idx = spin_index(city, pos);
    if (idx != npos) return s[idx];
    return (city == 0 && pos == 0) ? spin_t(+1) : spin_t(-1);
  }
};

/// Default distance weight w = 3.75 / max d, clamped below 1.
///
/// Soundness: the cheapest one-hot violation (one surplus plus one deficit
/// row or column) costs 8 energy units, while the largest distance saving
/// any such defect can buy is under 2 w max d = 7.5, so every global
/// minimizer remains a valid tour. Annealing quality: the Boltzmann bias
/// between tours scales with c w (length gap); weights much below this
/// leave tour selection too flat to converge within useful iteration
/// budgets (measured directly on 9-city instances).
inline double default_weight(const TspInstance& ins) {
  const double m = ins.max_distance();
  return m > 3.75 / 0.95 ? 3.75 / m : 0.95;
}

/// Distance weight for encodings that carry consecutive-visit constraints.
///
/// The adjacency reward must both force the edge (4 theta larger than any
/// insertion detour, bounded by 2 w max d) and stay unprofitable to collect
/// twice by duplicating a constrained city (4 theta + 2 w max d below the
/// one-hot cost 8). Both hold only when w max d < 2; 1.7 leaves margin on
/// each side with theta at the window's midpoint.
inline double default_ctsp_weight(const TspInstance& ins) {
  const double m = ins.max_distance();
  return m > 1.7 / 0.95 ? 1.7 / m : 0.95;
}

/// Default constraint reward: the midpoint of the sound window
/// (w max d / 2, 2 - w max d / 2) for the default constrained weight.
inline double default_theta(const TspEncoding& enc) {
  (void)enc;
  return 1.0;
}

namespace detail {

inline IsingModel assemble_tsp_model(const TspInstance& ins, TspVariant variant,
                                     double w, const CtspConstraint& ctsp) {
  const std::size_t n = ins.size();
  const double K = static_cast<double>(n) - 2.0;
  auto fi = [n](std::size_t city, std::size_t pos) { return city * n + pos; };

  IsingModel full(n * n);
  // one-hot penalties: rows (one position per city), columns (one city per
  // position)
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t j2 = j + 1; j2 < n; ++j2)
        full.add_coupling(fi(i, j), fi(i, j2), -2.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t i2 = i + 1; i2 < n; ++i2)
        full.add_coupling(fi(i, j), fi(i2, j), -2.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      full.add_field(fi(i, j), -4.0 * K);
  full.add_offset(2.0 * n * (n + K * K));

  // distance term between adjacent visiting positions (cyclic)
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t jn = (j + 1) % n;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t i2 = 0; i2 < n; ++i2) {
        if (i == i2) continue;
        const double coeff = w * ins.d(i, i2) / 4.0;
        if (coeff == 0.0) continue;
        full.add_coupling(fi(i, j), fi(i2, jn), -coeff);
        full.add_field(fi(i, j), -coeff);
        full.add_field(fi(i2, jn), -coeff);
        full.add_offset(coeff);
      }
  }

  // constrained adjacencies: reward 4 theta whenever A and B sit in adjacent
  // positions (one direction only for a_then_b). Each term is
  // -theta (s s' + s + s' + 1), i.e. a one-hot product, so only realized
  // adjacencies score while the coupling entry itself moves by +theta.
  for (const auto& pr : ctsp.pairs) {
    const auto a = static_cast<std::size_t>(pr.a);
    const auto b = static_cast<std::size_t>(pr.b);
    auto reward = [&](std::size_t p, std::size_t q) {
      full.add_coupling(p, q, ctsp.theta);
      full.add_field(p, ctsp.theta);
      full.add_field(q, ctsp.theta);
      full.add_offset(-ctsp.theta);
    };
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t jn = (j + 1) % n;
      reward(fi(a, j), fi(b, jn));
      if (pr.dir == CtspConstraint::Direction::either)
        reward(fi(b, j), fi(a, jn));
    }
  }

  if (variant == TspVariant::full) return full;

  // fixed_start: pin city 0 to position 0
  std::vector<std::pair<std::size_t, spin_t>> pinned;
  pinned.reserve(2 * n - 1);
  pinned.push_back({fi(0, 0), spin_t(+1)});
  for (std::size_t j = 1; j < n; ++j) pinned.push_back({fi(0, j), spin_t(-1)});
  for (std::size_t i = 1; i < n; ++i) pinned.push_back({fi(i, 0), spin_t(-1)});
  return reduce(full, pinned);
}

inline void check_constraint(const TspInstance& ins, const CtspConstraint& c) {
  const auto n = static_cast<int>(ins.size());
  for (std::size_t x = 0; x < c.pairs.size(); ++x) {
    const auto& p = c.pairs[x];
    if (p.a < 0 || p.a >= n || p.b < 0 || p.b >= n)
      throw std::invalid_argument("CtspConstraint: unknown city index");
    if (p.a == p.b)
      throw std::invalid_argument("CtspConstraint: pair must join two cities");
    for (std::size_t y = x + 1; y < c.pairs.size(); ++y) {
      const auto& q = c.pairs[y];
      if ((q.a == p.a && q.b == p.b) || (q.a == p.b && q.b == p.a))
        throw std::invalid_argument("CtspConstraint: duplicate pair");
    }
  }
  if (!c.pairs.empty() && !(c.theta >= 0.0))
    throw std::invalid_argument("CtspConstraint: theta must be >= 0");
}

}  // namespace detail

/// Builds the TSP Ising encoding. w sets the distance term's strength
/// relative to the one-hot penalties and must stay in (0, 1); the default
/// 1/(2 max d) keeps any single tour edge cheaper than the cheapest
/// constraint violation.
inline TspEncoding build_tsp(const TspInstance& ins, TspVariant variant,
                             double w) {
  ins.validate();
  if (ins.size() < 3)
    throw std::invalid_argument("build_tsp: need at least 3 cities");
  if (!(w > 0.0 && w < 1.0))
    throw std::invalid_argument("build_tsp: w must be in (0, 1)");
  TspEncoding enc;
  enc.instance = ins;
  enc.variant = variant;
  enc.w = w;
  enc.model = detail::assemble_tsp_model(ins, variant, w, enc.constraints);
  return enc;
}

inline TspEncoding build_tsp(const TspInstance& ins,
                             TspVariant variant = TspVariant::fixed_start) {
  return build_tsp(ins, variant, default_weight(ins));
}

/// Adds consecutive-visit constraints to an existing encoding. The spin
/// count is unchanged; couplings between the constrained cities' adjacent
/// positions move by +theta (with the matching one-hot field terms), so the
/// reward binds to realized adjacencies only. Rejects (w, theta) outside the
/// sound window 4 theta + 2 w max d < 8, where duplicating a constrained
/// city would pay for itself.
inline TspEncoding build_ctsp(const TspEncoding& base,
                              const CtspConstraint& constraint) {
  detail::check_constraint(base.instance, constraint);
  if (!constraint.pairs.empty() &&
      4.0 * constraint.theta +
              2.0 * base.w * base.instance.max_distance() >=
          8.0)
    throw std::invalid_argument(
        "build_ctsp: 4 theta + 2 w max_d must stay below 8 (the one-hot "
        "defect cost); lower w (default_ctsp_weight) or theta");
  TspEncoding enc;
  enc.instance = base.instance;
  enc.variant = base.variant;
  enc.w = base.w;
  enc.constraints = constraint;
  enc.model = detail::assemble_tsp_model(enc.instance, enc.variant, enc.w,
                                         constraint);
  return enc;
}

/// Maps +1 spins to (city, position) assignments. Returns a Tour iff every
/// city row and position column is exactly one-hot; otherwise reports the
/// violation counts.
inline Decoded decode(const TspEncoding& enc, const SpinConfiguration& s) {
  if (s.size() != enc.n_spins())
    throw std::invalid_argument("decode: configuration size mismatch");
  const std::size_t n = enc.n_cities();
  Decoded out;
  std::vector<int> city_of_pos(n, -1);
  std::vector<int> row_count(n, 0), col_count(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (enc.spin_value(s, i, j) > 0) {
        ++row_count[i];
        ++col_count[j];
        city_of_pos[j] = static_cast<int>(i);
      }
  for (std::size_t i = 0; i < n; ++i) {
    if (row_count[i] != 1) ++out.row_violations;
    if (col_count[i] != 1) ++out.col_violations;
  }
  if (out.row_violations == 0 && out.col_violations == 0) {
    Tour t;
    t.order.assign(city_of_pos.begin(), city_of_pos.end());
    t.length = tour_length(enc.instance, t.order);
    out.tour = std::move(t);
  }
  return out;
}

/// Spin configuration representing a tour (city order[k] visited k-th).
/// For fixed_start the order is rotated so city 0 sits at position 0.
inline SpinConfiguration encode_tour(const TspEncoding& enc,
                                     std::vector<int> order) {
  const std::size_t n = enc.n_cities();
  if (order.size() != n)
    throw std::invalid_argument("encode_tour: order is not a permutation");
  if (enc.variant == TspVariant::fixed_start) {
    auto it = std::find(order.begin(), order.end(), 0);
    if (it == order.end())
      throw std::invalid_argument("encode_tour: order is not a permutation");
    std::rotate(order.begin(), it, order.end());
  }
  SpinConfiguration s(enc.n_spins(), spin_t(-1));
  for (std::size_t j = 0; j < n; ++j) {
    const auto idx = enc.spin_index(order[j], j);
    if (idx != TspEncoding::npos) s[idx] = +1;
  }
  return s;
}

/// Values of the two one-hot penalty terms under configuration s.
inline PenaltyValues penalty_terms(const TspEncoding& enc,
                                   const SpinConfiguration& s) {
  const std::size_t n = enc.n_cities();
  const double K = static_cast<double>(n) - 2.0;
  PenaltyValues pv;
  for (std::size_t i = 0; i < n; ++i) {
    double row = K, col = K;
    for (std::size_t j = 0; j < n; ++j) {
      row += enc.spin_value(s, i, j);
      col += enc.spin_value(s, j, i);
    }
    pv.row_term += row * row;
    pv.col_term += col * col;
  }
  return pv;
}

}  // namespace smtj
