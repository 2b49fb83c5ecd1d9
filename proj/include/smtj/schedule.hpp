#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace smtj {

/// Effective-inverse-temperature schedule c(t) over a run of
/// `total_iterations` sweeps, t = 0 .. total_iterations-1.
///
/// linear:    c(t) = c_start + (c_end - c_start) * t / (total_iterations - 1)
/// constant:  c(t) = c_start
/// piecewise: linear interpolation between (iteration, c) breakpoints,
///            clamped outside the listed range.
struct Schedule {
  enum class Kind { constant, linear, piecewise };

  Kind kind = Kind::constant;
  double c_start = 1.0;
  double c_end = 1.0;
  std::size_t total_iterations = 1;
  std::vector<std::pair<std::size_t, double>> breakpoints;

  static Schedule constant(double c, std::size_t iterations) {
    Schedule s;
    s.kind = Kind::constant;
    s.c_start = s.c_end = c;
    s.total_iterations = iterations;
    s.validate();
    return s;
  }

  static Schedule linear(double c0, double c1, std::size_t iterations) {
    Schedule s;
    s.kind = Kind::linear;
    s.c_start = c0;
    s.c_end = c1;
    s.total_iterations = iterations;
    s.validate();
    return s;
  }

  static Schedule piecewise(std::vector<std::pair<std::size_t, double>> pts,
                            std::size_t iterations) {
    Schedule s;
    s.kind = Kind::piecewise;
    s.breakpoints = std::move(pts);
    s.total_iterations = iterations;
    if (!s.breakpoints.empty()) {
      s.c_start = s.breakpoints.front().second;
      s.c_end = s.breakpoints.back().second;
    }
    s.validate();
    return s;
  }

  /// Fast ramp from c0 to c_hold over `ramp` sweeps, then hold: the annealer
  /// is driven quickly to a moderate inverse temperature and left to its
  /// intrinsic fluctuations, with the two-memory rule catching the best
  /// state it passes through.
  static Schedule ramp_hold(double c0, double c_hold, std::size_t ramp,
                            std::size_t iterations) {
    ramp = std::min(ramp, iterations > 0 ? iterations - 1 : 0);
    return piecewise({{0, c0}, {ramp, c_hold}}, iterations);
  }

  /// Default single-solve schedule. The hold level is tuned jointly with the
  /// default distance weight: at w max_d = 3.75, c = 0.7 keeps the chain
  /// mobile across tours while biasing it firmly toward short ones.
  static Schedule solve_default(std::size_t iterations) {
    return ramp_hold(0.2, 0.7, 50, iterations);
  }

  void validate() const {
    if (total_iterations < 1)
      throw std::invalid_argument("Schedule: total_iterations must be >= 1");
    auto nonneg = [](double c) { return c >= 0.0; };
    if (kind == Kind::piecewise) {
      if (breakpoints.empty())
        throw std::invalid_argument("Schedule: piecewise needs breakpoints");
      for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        if (!nonneg(breakpoints[i].second))
          throw std::invalid_argument("Schedule: c must be >= 0");
        if (i > 0 && breakpoints[i].first <= breakpoints[i - 1].first)
          throw std::invalid_argument(
              "Schedule: breakpoints must be sorted by iteration");
      }
    } else if (!nonneg(c_start) || !nonneg(c_end)) {
      throw std::invalid_argument("Schedule: c must be >= 0");
    }
  }

  double at(std::size_t t) const {
    switch (kind) {
      case Kind::constant:
        return c_start;
      case Kind::linear:
        if (total_iterations <= 1) return c_start;
        return c_start + (c_end - c_start) * static_cast<double>(t) /
                             static_cast<double>(total_iterations - 1);
      case Kind::piecewise: {
        if (t <= breakpoints.front().first) return breakpoints.front().second;
        if (t >= breakpoints.back().first) return breakpoints.back().second;
        for (std::size_t i = 1; i < breakpoints.size(); ++i) {
          if (t <= breakpoints[i].first) {
            const auto [t0, c0] = breakpoints[i - 1];
            const auto [t1, c1] = breakpoints[i];
            return c0 + (c1 - c0) * static_cast<double>(t - t0) /
                            static_cast<double>(t1 - t0);
          }
        }
        return breakpoints.back().second;
      }
    }
    return c_start;
  }
};

}  // namespace smtj
