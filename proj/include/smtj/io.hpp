#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "smtj/annealer.hpp"
#include "smtj/device.hpp"
#include "smtj/errors.hpp"
#include "smtj/pipeline.hpp"

namespace smtj {

using nlohmann::json;

// ---- json mappings (nlohmann ADL hooks) ----------------------------------

inline void to_json(json& j, const DeviceParams& d) {
  j = json{{"a", d.a}, {"b", d.b}, {"tau0", d.tau0},
           {"r_ap", d.r_ap}, {"r_p", d.r_p}};
}
inline void from_json(const json& j, DeviceParams& d) {
  j.at("a").get_to(d.a);
  j.at("b").get_to(d.b);
  j.at("tau0").get_to(d.tau0);
  j.at("r_ap").get_to(d.r_ap);
  j.at("r_p").get_to(d.r_p);
}

NLOHMANN_JSON_SERIALIZE_ENUM(Schedule::Kind,
                             {{Schedule::Kind::constant, "constant"},
                              {Schedule::Kind::linear, "linear"},
                              {Schedule::Kind::piecewise, "piecewise"}})
NLOHMANN_JSON_SERIALIZE_ENUM(UpdateOrder,
                             {{UpdateOrder::sequential_random,
                               "sequential_random"},
                              {UpdateOrder::sequential_fixed,
                               "sequential_fixed"},
                              {UpdateOrder::synchronous, "synchronous"}})
NLOHMANN_JSON_SERIALIZE_ENUM(DeviceMode, {{DeviceMode::ideal, "ideal"},
                                          {DeviceMode::faithful, "faithful"}})

inline void to_json(json& j, const Schedule& s) {
  j = json{{"kind", s.kind},
           {"c_start", s.c_start},
           {"c_end", s.c_end},
           {"total_iterations", s.total_iterations}};
  if (s.kind == Schedule::Kind::piecewise) {
    json pts = json::array();
    for (const auto& [it, c] : s.breakpoints) pts.push_back({it, c});
    j["breakpoints"] = pts;
  }
}
inline void from_json(const json& j, Schedule& s) {
  j.at("kind").get_to(s.kind);
  j.at("c_start").get_to(s.c_start);
  j.at("c_end").get_to(s.c_end);
  j.at("total_iterations").get_to(s.total_iterations);
  s.breakpoints.clear();
  if (j.contains("breakpoints"))
    for (const auto& p : j.at("breakpoints"))
      s.breakpoints.emplace_back(p.at(0).get<std::size_t>(),
                                 p.at(1).get<double>());
  s.validate();
}

inline void to_json(json& j, const RunConfig& cfg) {
  j = json{{"schedule", cfg.schedule},
           {"update_order", cfg.update_order},
           {"device_mode", cfg.device_mode},
           {"device", cfg.device},
           {"iteration_interval", cfg.iteration_interval},
           {"seed", cfg.seed},
           {"record_trajectory", cfg.record_trajectory},
           {"trajectory_stride", cfg.trajectory_stride}};
  if (!cfg.per_spin_device.empty()) j["per_spin_device"] = cfg.per_spin_device;
  if (cfg.target_energy) j["target_energy"] = *cfg.target_energy;
}
inline void from_json(const json& j, RunConfig& cfg) {
  j.at("schedule").get_to(cfg.schedule);
  j.at("update_order").get_to(cfg.update_order);
  j.at("device_mode").get_to(cfg.device_mode);
  j.at("device").get_to(cfg.device);
  j.at("iteration_interval").get_to(cfg.iteration_interval);
  j.at("seed").get_to(cfg.seed);
  j.at("record_trajectory").get_to(cfg.record_trajectory);
  j.at("trajectory_stride").get_to(cfg.trajectory_stride);
  cfg.per_spin_device.clear();
  if (j.contains("per_spin_device"))
    j.at("per_spin_device").get_to(cfg.per_spin_device);
  cfg.target_energy.reset();
  if (j.contains("target_energy"))
    cfg.target_energy = j.at("target_energy").get<double>();
}

inline json spins_to_json(const SpinConfiguration& s) {
  json arr = json::array();
  for (auto v : s) arr.push_back(static_cast<int>(v));
  return arr;
}
inline SpinConfiguration spins_from_json(const json& arr) {
  SpinConfiguration s;
  s.reserve(arr.size());
  for (const auto& v : arr) s.push_back(static_cast<spin_t>(v.get<int>()));
  return s;
}

inline void to_json(json& j, const RunResult& r) {
  j = json{{"best_energy", r.best_energy},
           {"final_energy", r.final_energy},
           {"solution_energy", r.solution_energy},
           {"iterations_run", r.iterations_run},
           {"seed", r.seed},
           {"best_state", spins_to_json(r.best_state)},
           {"final_state", spins_to_json(r.final_state)}};
  if (r.first_hit_iteration) j["first_hit_iteration"] = *r.first_hit_iteration;
}

inline void to_json(json& j, const StageReport& rep) {
  j = json{{"group_sizes", rep.group_sizes},
           {"group_lengths", rep.group_lengths},
           {"stitched_length", rep.stitched_length},
           {"pass_lengths", rep.pass_lengths},
           {"final_length", rep.final_length},
           {"windows_attempted", rep.windows_attempted},
           {"windows_accepted", rep.windows_accepted},
           {"total_sweeps", rep.total_sweeps},
           {"total_spin_updates", rep.total_spin_updates},
           {"max_subproblem_spins", rep.max_subproblem_spins},
           {"all_stages_valid", rep.all_stages_valid}};
}

inline void to_json(json& j, const PipelineConfig& cfg) {
  j = json{{"spin_budget", cfg.spin_budget},
           {"w", cfg.w},
           {"theta", cfg.theta},
           {"balance_a", cfg.balance_a},
           {"sigma", cfg.sigma},
           {"gp_iterations", cfg.gp_iterations},
           {"gp_retries", cfg.gp_retries},
           {"group_iterations", cfg.group_iterations},
           {"group_retries", cfg.group_retries},
           {"window_iterations", cfg.window_iterations},
           {"window_retries", cfg.window_retries},
           {"window_passes", cfg.window_passes},
           {"window_target_cities", cfg.window_target_cities},
           {"window_overlap", cfg.window_overlap},
           {"seed", cfg.seed}};
}
inline void from_json(const json& j, PipelineConfig& cfg) {
  j.at("spin_budget").get_to(cfg.spin_budget);
  j.at("w").get_to(cfg.w);
  j.at("theta").get_to(cfg.theta);
  j.at("balance_a").get_to(cfg.balance_a);
  j.at("sigma").get_to(cfg.sigma);
  j.at("gp_iterations").get_to(cfg.gp_iterations);
  j.at("gp_retries").get_to(cfg.gp_retries);
  j.at("group_iterations").get_to(cfg.group_iterations);
  j.at("group_retries").get_to(cfg.group_retries);
  j.at("window_iterations").get_to(cfg.window_iterations);
  j.at("window_retries").get_to(cfg.window_retries);
  j.at("window_passes").get_to(cfg.window_passes);
  j.at("window_target_cities").get_to(cfg.window_target_cities);
  j.at("window_overlap").get_to(cfg.window_overlap);
  j.at("seed").get_to(cfg.seed);
}

namespace io {

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_json(const std::string& path, const json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

inline json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw parse_error(std::string("bad JSON in ") + path + ": " + e.what());
  }
  return doc;
}

inline std::string trajectory_csv(const std::vector<TrajectoryPoint>& traj) {
  std::ostringstream os;
  os.precision(17);
  os << "iteration,c,energy,best_energy\n";
  for (const auto& p : traj)
    os << p.iteration << ',' << p.c << ',' << p.energy << ','
       << p.best_energy << '\n';
  return os.str();
}

inline void write_trajectory_csv(const std::string& path,
                                 const std::vector<TrajectoryPoint>& traj) {
  write_text_file(path, trajectory_csv(traj));
}

/// time_s,state with state 1 = AP, 0 = P.
inline std::string trace_csv(const TelegraphTrace& tr) {
  std::ostringstream os;
  os.precision(17);
  os << "time_s,state\n";
  for (const auto& s : tr.samples)
    os << s.time << ',' << (s.state == MtjState::AP ? 1 : 0) << '\n';
  return os.str();
}

inline void write_trace_csv(const std::string& path, const TelegraphTrace& tr) {
  write_text_file(path, trace_csv(tr));
}

/// row,col,value triples of the coupling matrix (heatmap-ready).
inline std::string coupling_csv(const IsingModel& m) {
  std::ostringstream os;
  os.precision(17);
  os << "row,col,value\n";
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      os << i << ',' << j << ',' << m.coupling(i, j) << '\n';
  return os.str();
}

inline void write_coupling_csv(const std::string& path, const IsingModel& m) {
  write_text_file(path, coupling_csv(m));
}

}  // namespace io
}  // namespace smtj
