#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "smtj/errors.hpp"
#include "smtj/rng.hpp"

namespace smtj {

/// Resistance state of a superparamagnetic tunnel junction.
enum class MtjState : std::uint8_t { P = 0, AP = 1 };

/// Sigmoid switching law and dwell-time scale of one junction.
///
/// The steady-state antiparallel occupancy under a bias current I (uA) is
///   p_AP(I) = 1 / (1 + exp(-a (I - b)))
/// with slope a (1/uA) and center b (uA). tau0 is the mean dwell time of
/// either state at I = b, in seconds. The resistances are descriptive
/// metadata only; nothing in the emulation depends on them.
struct DeviceParams {
  double a = 4.67;      // sigmoid slope, 1/uA
  double b = 3.9;       // sigmoid center, uA
  double tau0 = 1e-4;   // mean dwell time at I = b, s
  double r_ap = 2.4e3;  // AP resistance, ohm (descriptive)
  double r_p = 1.2e3;   // P resistance, ohm (descriptive)

  void validate() const {
    if (!(a > 0.0)) throw std::invalid_argument("DeviceParams: a must be > 0");
    if (!(tau0 > 0.0))
      throw std::invalid_argument("DeviceParams: tau0 must be > 0");
    if (!(r_ap > r_p && r_p > 0.0))
      throw std::invalid_argument("DeviceParams: need r_ap > r_p > 0");
  }
};

/// Steady-state probability of the AP state at bias current `current` (uA).
inline double p_ap(const DeviceParams& d, double current) {
  return 1.0 / (1.0 + std::exp(-d.a * (current - d.b)));
}

/// Bias current that makes the device's AP probability equal the heat-bath
/// probability of spin +1 for local field L at inverse temperature c:
///
///   I = (2 c / a) L + b   so that   p_ap(I) = 1 / (1 + exp(-2 c L)).
///
/// This is the bridge between the Ising update rule and the device: the AP
/// state plays the role of spin +1.
inline double current_for_field(const DeviceParams& d, double local_field,
                                double c) {
  return (2.0 * c / d.a) * local_field + d.b;
}

/// One memoryless read: AP with probability p_ap(I). Models a device whose
/// read interval is much longer than its correlation time.
inline MtjState sample_ideal(const DeviceParams& d, double current, Rng& rng) {
  return uniform01(rng) < p_ap(d, current) ? MtjState::AP : MtjState::P;
}

/// Advances a random-telegraph chain by dt seconds at fixed current and
/// returns the state at the end of the interval.
///
/// Rates are split so the stationary AP occupancy equals p_ap(I) while the
/// total fluctuation rate stays current-independent at 2/tau0:
///   lambda(P->AP) = p_ap * 2/tau0,   lambda(AP->P) = (1 - p_ap) * 2/tau0.
/// At I = b both mean dwell times equal tau0. The state after dt is drawn
/// from the exact two-state transition matrix, so dt may be arbitrary.
inline MtjState telegraph_step(const DeviceParams& d, MtjState state,
                               double current, double dt, Rng& rng) {
  if (!(dt > 0.0))
    throw std::invalid_argument("telegraph_step: dt must be > 0");
  const double pi_ap = p_ap(d, current);
  const double decay = std::exp(-2.0 * dt / d.tau0);
  const double p_now_ap = state == MtjState::AP
                              ? pi_ap + (1.0 - pi_ap) * decay
                              : pi_ap * (1.0 - decay);
  return uniform01(rng) < p_now_ap ? MtjState::AP : MtjState::P;
}

/// Time series of one junction at a fixed bias current.
struct TelegraphTrace {
  struct Sample {
    double time;  // seconds, strictly increasing
    MtjState state;
  };
  double current = 0.0;  // uA
  std::vector<Sample> samples;

  double ap_occupancy() const {
    if (samples.empty()) return 0.0;
    std::size_t ap = 0;
    for (const auto& s : samples) ap += s.state == MtjState::AP;
    return static_cast<double>(ap) / static_cast<double>(samples.size());
  }
};

/// Samples a telegraph chain every dt seconds for `steps` reads.
inline TelegraphTrace simulate_trace(const DeviceParams& d, double current,
                                     double dt, std::size_t steps, Rng& rng,
                                     MtjState initial = MtjState::P) {
  TelegraphTrace tr;
  tr.current = current;
  tr.samples.reserve(steps);
  MtjState st = initial;
  for (std::size_t k = 0; k < steps; ++k) {
    st = telegraph_step(d, st, current, dt, rng);
    tr.samples.push_back({static_cast<double>(k + 1) * dt, st});
  }
  return tr;
}

/// Occupancy measurement aggregated from a trace (or supplied directly).
struct OccupancyPoint {
  double current = 0.0;   // uA
  double ap_fraction = 0.0;
  double weight = 1.0;    // number of reads behind the fraction
};

namespace detail {

inline double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace detail

/// Maximum-likelihood logistic fit of AP occupancy against current.
/// Returns DeviceParams with fitted (a, b); tau0 and resistances keep their
/// defaults. Points at duplicate currents are merged. Throws fit_error when
/// the data cannot pin down a finite sigmoid (fewer than two distinct
/// currents, or no current with occupancy strictly between 0 and 1).
inline DeviceParams calibrate(std::vector<OccupancyPoint> points) {
  // merge duplicates
  std::vector<OccupancyPoint> pts;
  for (const auto& p : points) {
    bool merged = false;
    for (auto& q : pts) {
      if (q.current == p.current) {
        const double w = q.weight + p.weight;
        q.ap_fraction = (q.ap_fraction * q.weight + p.ap_fraction * p.weight) / w;
        q.weight = w;
        merged = true;
        break;
      }
    }
    if (!merged) pts.push_back(p);
  }
  if (pts.size() < 2)
    throw fit_error("calibrate: need at least two distinct currents");
  bool any_mixed = false;
  for (const auto& p : pts)
    if (p.ap_fraction > 0.0 && p.ap_fraction < 1.0) any_mixed = true;
  if (!any_mixed)
    throw fit_error(
        "calibrate: occupancy is saturated at every current; sigmoid "
        "slope is unbounded");

  // Two mixed points determine the logistic exactly.
  if (pts.size() == 2 && pts[0].ap_fraction > 0.0 && pts[0].ap_fraction < 1.0 &&
      pts[1].ap_fraction > 0.0 && pts[1].ap_fraction < 1.0) {
    const double z0 = detail::logit(pts[0].ap_fraction);
    const double z1 = detail::logit(pts[1].ap_fraction);
    const double a = (z1 - z0) / (pts[1].current - pts[0].current);
    if (!(a > 0.0)) throw fit_error("calibrate: fitted slope is not positive");
    DeviceParams out;
    out.a = a;
    out.b = pts[0].current - z0 / a;
    return out;
  }

  // Newton-Raphson on the binomial log-likelihood in (slope, intercept),
  // z = slope * I + intercept.
  double slope = 1.0, intercept = 0.0;
  {
    // crude starting point from the extreme mixed points
    const OccupancyPoint *lo = nullptr, *hi = nullptr;
    for (const auto& p : pts) {
      if (p.ap_fraction <= 0.0 || p.ap_fraction >= 1.0) continue;
      if (!lo || p.current < lo->current) lo = &p;
      if (!hi || p.current > hi->current) hi = &p;
    }
    if (lo && hi && lo != hi) {
      slope = (detail::logit(hi->ap_fraction) - detail::logit(lo->ap_fraction)) /
              (hi->current - lo->current);
      if (!std::isfinite(slope) || slope == 0.0) slope = 1.0;
      intercept = detail::logit(lo->ap_fraction) - slope * lo->current;
    }
  }
  bool converged = false;
  for (int iter = 0; iter < 200; ++iter) {
    double g0 = 0, g1 = 0, h00 = 0, h01 = 0, h11 = 0;
    for (const auto& p : pts) {
      const double z = slope * p.current + intercept;
      const double mu = 1.0 / (1.0 + std::exp(-z));
      const double r = p.weight * (p.ap_fraction - mu);
      const double v = p.weight * mu * (1.0 - mu);
      g0 += r * p.current;
      g1 += r;
      h00 += v * p.current * p.current;
      h01 += v * p.current;
      h11 += v;
    }
    const double det = h00 * h11 - h01 * h01;
    if (!(std::abs(det) > 1e-300))
      throw fit_error("calibrate: singular Hessian, data is degenerate");
    const double ds = (g0 * h11 - g1 * h01) / det;
    const double di = (g1 * h00 - g0 * h01) / det;
    slope += ds;
    intercept += di;
    if (std::abs(ds) < 1e-12 && std::abs(di) < 1e-12) {
      converged = true;
      break;
    }
    if (!std::isfinite(slope) || !std::isfinite(intercept) ||
        std::abs(slope) > 1e8)
      throw fit_error("calibrate: fit diverged (data may be separated)");
  }
  if (!converged) throw fit_error("calibrate: no convergence");
  if (!(slope > 0.0)) throw fit_error("calibrate: fitted slope is not positive");
  DeviceParams out;
  out.a = slope;
  out.b = -intercept / slope;
  return out;
}

/// Calibration from raw traces, one per current.
inline DeviceParams calibrate(const std::vector<TelegraphTrace>& traces) {
  std::vector<OccupancyPoint> pts;
  pts.reserve(traces.size());
  for (const auto& tr : traces)
    pts.push_back({tr.current, tr.ap_occupancy(),
                   static_cast<double>(tr.samples.size())});
  return calibrate(std::move(pts));
}

}  // namespace smtj
