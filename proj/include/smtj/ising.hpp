#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "smtj/rng.hpp"

namespace smtj {

using spin_t = std::int8_t;

/// Spin values, one of -1 / +1 per site.
using SpinConfiguration = std::vector<spin_t>;

inline SpinConfiguration random_spins(std::size_t n, Rng& rng) {
  SpinConfiguration s(n);
  for (auto& v : s) v = uniform01(rng) < 0.5 ? spin_t(-1) : spin_t(+1);
  return s;
}

inline bool is_spin_configuration(const SpinConfiguration& s) {
  for (auto v : s)
    if (v != -1 && v != 1) return false;
  return true;
}

/// Dense Ising model
///
///   E(s) = offset - sum_{i<j} J(i,j) s_i s_j - sum_i h_i s_i
///
/// J is symmetric with zero diagonal and every pair is counted once in the
/// energy. Energies are dimensionless (units of kT). The offset carries the
/// constant terms produced when quadratic constraint expressions are expanded
/// into (J, h), so mapped Hamiltonians evaluate to their textbook value.
///
/// Immutable after construction by convention: builders fill it, runs only
/// read it, so one model may be shared across concurrent runs.
class IsingModel {
 public:
  IsingModel() = default;
  explicit IsingModel(std::size_t n)
      : n_(n), j_(n * n, 0.0), h_(n, 0.0), offset_(0.0) {}

  std::size_t size() const { return n_; }

  double coupling(std::size_t i, std::size_t j) const {
    check_index(i);
    check_index(j);
    return j_[i * n_ + j];
  }

  /// Sets J(i,j) and J(j,i). The diagonal must stay zero.
  void set_coupling(std::size_t i, std::size_t j, double v) {
    check_index(i);
    check_index(j);
    if (i == j) {
      if (v != 0.0)
        throw std::invalid_argument("IsingModel: diagonal coupling must be 0");
      return;
    }
    j_[i * n_ + j] = v;
    j_[j * n_ + i] = v;
  }

  void add_coupling(std::size_t i, std::size_t j, double v) {
    set_coupling(i, j, coupling(i, j) + v);
  }

  double field(std::size_t i) const {
    check_index(i);
    return h_[i];
  }
  void set_field(std::size_t i, double v) {
    check_index(i);
    h_[i] = v;
  }
  void add_field(std::size_t i, double v) {
    check_index(i);
    h_[i] += v;
  }

  double offset() const { return offset_; }
  void set_offset(double v) { offset_ = v; }
  void add_offset(double v) { offset_ += v; }

  /// Row of J as a raw pointer; hot loops index it directly.
  const double* row(std::size_t i) const { return j_.data() + i * n_; }

  double energy(const SpinConfiguration& s) const {
    if (s.size() != n_)
      throw std::invalid_argument(
          "IsingModel::energy: configuration has " + std::to_string(s.size()) +
          " spins, model has " + std::to_string(n_));
    double e = offset_;
    for (std::size_t i = 0; i < n_; ++i) {
      const double* jr = row(i);
      double acc = 0.0;
      for (std::size_t j = i + 1; j < n_; ++j) acc += jr[j] * s[j];
      e -= s[i] * (acc + h_[i]);
    }
    return e;
  }

  /// Local field  L_k = sum_j J(k,j) s_j + h_k.
  /// Flipping spin k changes the energy by exactly 2 s_k L_k.
  double local_field(const SpinConfiguration& s, std::size_t k) const {
    if (s.size() != n_)
      throw std::invalid_argument("IsingModel::local_field: size mismatch");
    if (k >= n_)
      throw std::out_of_range("IsingModel::local_field: spin index " +
                              std::to_string(k) + " out of range");
    const double* jr = row(k);
    double acc = 0.0;
    for (std::size_t j = 0; j < n_; ++j) acc += jr[j] * s[j];
    return acc + h_[k];
  }

 private:
  void check_index(std::size_t i) const {
    if (i >= n_)
      throw std::out_of_range("IsingModel: index " + std::to_string(i) +
                              " out of range for n=" + std::to_string(n_));
  }

  std::size_t n_ = 0;
  std::vector<double> j_;  // row-major n x n, symmetric, zero diagonal
  std::vector<double> h_;
  double offset_ = 0.0;
};

/// Conditional probability that a spin takes value +1 given local field L at
/// effective inverse temperature c (heat-bath rule):
///
///   P(s = +1 | rest) = 1 / (1 + exp(-2 c L))
///
/// Sequential sampling with this rule is stationary for the Gibbs
/// distribution proportional to exp(-c E).
inline double flip_probability_up(double local_field, double c) {
  return 1.0 / (1.0 + std::exp(-2.0 * c * local_field));
}

/// Pins the listed spins to fixed values and folds their couplings into the
/// fields and offset of the remaining model. `old_to_new[i]` maps an index of
/// the input model to the reduced one (npos for pinned spins).
inline IsingModel reduce(const IsingModel& m,
                         const std::vector<std::pair<std::size_t, spin_t>>& pinned,
                         std::vector<std::size_t>* old_to_new = nullptr) {
  constexpr auto npos = static_cast<std::size_t>(-1);
  const std::size_t n = m.size();
  std::vector<spin_t> value(n, 0);  // 0 = free
  for (auto [idx, v] : pinned) {
    if (idx >= n) throw std::out_of_range("reduce: pinned index out of range");
    if (v != -1 && v != 1)
      throw std::invalid_argument("reduce: pinned value must be -1 or +1");
    value[idx] = v;
  }
  std::vector<std::size_t> map(n, npos);
  std::size_t n_free = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (value[i] == 0) map[i] = n_free++;

  IsingModel out(n_free);
  double off = m.offset();
  for (std::size_t i = 0; i < n; ++i) {
    if (value[i] != 0) {
      off -= m.field(i) * value[i];
      continue;
    }
    double h = m.field(i);
    const double* jr = m.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (value[j] != 0) {
        h += jr[j] * value[j];
      } else if (j > i) {
        out.set_coupling(map[i], map[j], jr[j]);
      }
    }
    out.set_field(map[i], h);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (value[i] != 0 && value[j] != 0)
        off -= m.coupling(i, j) * value[i] * value[j];
  out.set_offset(off);
  if (old_to_new) *old_to_new = std::move(map);
  return out;
}

}  // namespace smtj
