#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "smtj/device.hpp"
#include "smtj/ising.hpp"
#include "smtj/schedule.hpp"

namespace smtj {

/// Spin visit order within one sweep. Sequential modes let each spin see its
/// neighbours' freshest values; synchronous updates every spin from the
/// pre-sweep snapshot, mimicking hardware that reads all junctions before
/// writing any bias current.
enum class UpdateOrder { sequential_random, sequential_fixed, synchronous };

/// ideal: each read is a fresh Bernoulli draw from the sigmoid (read interval
/// much longer than the device correlation time). faithful: each spin owns a
/// telegraph chain advanced by iteration_interval per sweep, so short
/// intervals re-read stale states.
enum class DeviceMode { ideal, faithful };

struct RunConfig {
  Schedule schedule = Schedule::constant(1.0, 1);
  UpdateOrder update_order = UpdateOrder::sequential_random;
  DeviceMode device_mode = DeviceMode::ideal;
  DeviceParams device{};
  /// Per-spin parameter overrides; empty means all spins use `device`.
  std::vector<DeviceParams> per_spin_device;
  double iteration_interval = 1e-4;  // s of device time per sweep (faithful)
  std::uint64_t seed = 0;
  bool record_trajectory = false;
  std::size_t trajectory_stride = 1;
  /// When set, RunResult::first_hit_iteration reports the first sweep whose
  /// energy reaches this value.
  std::optional<double> target_energy;

  void validate(std::size_t n_spins) const {
    schedule.validate();
    if (trajectory_stride < 1)
      throw std::invalid_argument("RunConfig: trajectory_stride must be >= 1");
    if (!per_spin_device.empty() && per_spin_device.size() != n_spins)
      throw std::invalid_argument(
          "RunConfig: per_spin_device must be empty or one entry per spin");
    if (device_mode == DeviceMode::faithful && !(iteration_interval > 0.0))
      throw std::invalid_argument(
          "RunConfig: faithful mode needs iteration_interval > 0");
  }
};

struct TrajectoryPoint {
  std::size_t iteration;
  double c;
  double energy;
  double best_energy;
};

/// Outcome of one annealing run. Two memories are kept: the minimum-energy
/// state seen during the run and the final state; the reported solution is
/// the better of the two.
struct RunResult {
  SpinConfiguration best_state;
  double best_energy = std::numeric_limits<double>::infinity();
  SpinConfiguration final_state;
  double final_energy = std::numeric_limits<double>::infinity();
  double solution_energy = std::numeric_limits<double>::infinity();
  std::size_t iterations_run = 0;
  std::optional<std::size_t> first_hit_iteration;
  std::vector<TrajectoryPoint> trajectory;
  std::uint64_t seed = 0;

  const SpinConfiguration& solution_state() const {
    return best_energy <= final_energy ? best_state : final_state;
  }
};

namespace detail {

inline const DeviceParams& device_for(const RunConfig& cfg, std::size_t k) {
  return cfg.per_spin_device.empty() ? cfg.device : cfg.per_spin_device[k];
}

inline spin_t read_spin(const RunConfig& cfg, std::size_t k, double field,
                        double c, Rng& rng, std::vector<MtjState>* chains) {
  const DeviceParams& dev = device_for(cfg, k);
  const double current = current_for_field(dev, field, c);
  MtjState st;
  if (cfg.device_mode == DeviceMode::ideal || chains == nullptr) {
    st = sample_ideal(dev, current, rng);
  } else {
    st = telegraph_step(dev, (*chains)[k], current, cfg.iteration_interval, rng);
    (*chains)[k] = st;
  }
  return st == MtjState::AP ? spin_t(+1) : spin_t(-1);
}

}  // namespace detail

/// One iteration: every spin's local field is turned into a bias current,
/// the device is read, and the spin takes the device state (AP = +1).
/// `chains` carries per-spin telegraph states for faithful mode; pass
/// nullptr (or run in ideal mode) for memoryless reads.
inline void sweep(const IsingModel& model, SpinConfiguration& s, double c,
                  const RunConfig& cfg, Rng& rng,
                  std::vector<MtjState>* chains = nullptr) {
  const std::size_t n = model.size();
  if (s.size() != n) throw std::invalid_argument("sweep: size mismatch");
  switch (cfg.update_order) {
    case UpdateOrder::synchronous: {
      const SpinConfiguration snapshot = s;
      for (std::size_t k = 0; k < n; ++k) {
        const double field = model.local_field(snapshot, k);
        s[k] = detail::read_spin(cfg, k, field, c, rng, chains);
      }
      break;
    }
    case UpdateOrder::sequential_fixed: {
      for (std::size_t k = 0; k < n; ++k) {
        const double field = model.local_field(s, k);
        s[k] = detail::read_spin(cfg, k, field, c, rng, chains);
      }
      break;
    }
    case UpdateOrder::sequential_random: {
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), std::size_t{0});
      for (std::size_t i = n; i > 1; --i)
        std::swap(order[i - 1], order[uniform_below(rng, i)]);
      for (std::size_t k : order) {
        const double field = model.local_field(s, k);
        s[k] = detail::read_spin(cfg, k, field, c, rng, chains);
      }
      break;
    }
  }
}

/// Runs the full schedule from the given initial configuration.
/// Deterministic: identical (model, initial, config) give identical results.
inline RunResult run(const IsingModel& model, SpinConfiguration initial,
                     const RunConfig& cfg) {
  cfg.validate(model.size());
  if (initial.size() != model.size())
    throw std::invalid_argument("run: initial configuration size mismatch");
  Rng rng = make_rng(cfg.seed);

  RunResult res;
  res.seed = cfg.seed;
  SpinConfiguration s = std::move(initial);

  std::vector<MtjState> chains;
  std::vector<MtjState>* chain_ptr = nullptr;
  if (cfg.device_mode == DeviceMode::faithful) {
    chains.resize(s.size());
    for (std::size_t k = 0; k < s.size(); ++k)
      chains[k] = s[k] > 0 ? MtjState::AP : MtjState::P;
    chain_ptr = &chains;
  }

  double energy = model.energy(s);
  res.best_state = s;
  res.best_energy = energy;

  const std::size_t total = cfg.schedule.total_iterations;
  double target_tol = 0.0;
  if (cfg.target_energy)
    target_tol = 1e-9 * std::max(1.0, std::abs(*cfg.target_energy));
  if (cfg.record_trajectory) res.trajectory.reserve(total / cfg.trajectory_stride + 1);

  for (std::size_t t = 0; t < total; ++t) {
    const double c = cfg.schedule.at(t);
    sweep(model, s, c, cfg, rng, chain_ptr);
    energy = model.energy(s);
    if (energy < res.best_energy) {
      res.best_energy = energy;
      res.best_state = s;
    }
    if (cfg.target_energy && !res.first_hit_iteration &&
        energy <= *cfg.target_energy + target_tol)
      res.first_hit_iteration = t;
    if (cfg.record_trajectory && t % cfg.trajectory_stride == 0)
      res.trajectory.push_back({t, c, energy, res.best_energy});
  }

  res.final_state = std::move(s);
  res.final_energy = energy;
  res.solution_energy = std::min(res.best_energy, res.final_energy);
  res.iterations_run = total;
  return res;
}

/// Runs from a random initial configuration drawn from the run's own seed.
inline RunResult run_random(const IsingModel& model, const RunConfig& cfg) {
  Rng init_rng = make_rng(derive_seed(cfg.seed, 0x1717));
  return run(model, random_spins(model.size(), init_rng), cfg);
}

/// Fraction of independently seeded runs whose reported solution reaches
/// `target_energy`. Trial k runs with seed derive_seed(cfg.seed, k).
inline double success_probability(const IsingModel& model, double target_energy,
                                  std::size_t trials, const RunConfig& cfg) {
  if (trials < 1)
    throw std::invalid_argument("success_probability: trials must be >= 1");
  const double tol = 1e-9 * std::max(1.0, std::abs(target_energy));
  std::size_t hits = 0;
  for (std::size_t k = 0; k < trials; ++k) {
    RunConfig trial_cfg = cfg;
    trial_cfg.seed = derive_seed(cfg.seed, k);
    trial_cfg.record_trajectory = false;
    const RunResult r = run_random(model, trial_cfg);
    if (r.solution_energy <= target_energy + tol) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

}  // namespace smtj
