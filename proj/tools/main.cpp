// smtj-ising: benchmark harness for the SMTJ Ising annealer emulation.
//
// Subcommands: solve-tsp, solve-ctsp, pipeline, success-curve, device-trace,
// spin-report, calibrate. All outputs are plain JSON/CSV. Every experiment is
// reproducible from its seed; artifacts record config and seed.
//
// Exit codes: 0 success, 1 solver failure, 2 usage/parse error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smtj/annealer.hpp"
#include "smtj/io.hpp"
#include "smtj/pipeline.hpp"
#include "smtj/tsplib.hpp"

namespace fs = std::filesystem;
using namespace smtj;

namespace {

struct CommonOpts {
  std::string input;
  std::size_t synthetic_n = 0;
  std::uint64_t seed = 1;
  std::string out_dir;
};

std::string default_out_dir() {
  const char* env = std::getenv("SMTJ_ISING_OUT");
  return env ? env : "";
}

void add_common(CLI::App* cmd, CommonOpts& o, bool wants_instance) {
  if (wants_instance) {
    cmd->add_option("--input", o.input, "TSPLIB file (EUC_2D)");
    cmd->add_option("--n", o.synthetic_n,
                    "synthetic instance size (cities uniform in the unit "
                    "square, drawn from --seed)");
  }
  cmd->add_option("--seed", o.seed, "experiment seed");
  cmd->add_option("--out", o.out_dir,
                  "output directory (default: $SMTJ_ISING_OUT)")
      ->default_val(default_out_dir());
}

TspInstance resolve_instance(const CommonOpts& o) {
  if (!o.input.empty()) return load_instance(o.input);
  if (o.synthetic_n >= 3) {
    Rng rng = make_rng(derive_seed(o.seed, 0xC171e5));
    return synthetic_instance("synthetic" + std::to_string(o.synthetic_n),
                              o.synthetic_n, rng);
  }
  throw std::runtime_error("need --input FILE or --n SIZE");
}

Schedule parse_schedule(const std::string& text, std::size_t iters) {
  if (text.empty()) return Schedule::solve_default(iters);
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  try {
    if (parts.size() == 2 && parts[0] == "constant")
      return Schedule::constant(std::stod(parts[1]), iters);
    if (parts.size() == 3 && parts[0] == "linear")
      return Schedule::linear(std::stod(parts[1]), std::stod(parts[2]), iters);
    if (parts.size() == 4 && parts[0] == "ramp")
      return Schedule::ramp_hold(std::stod(parts[1]), std::stod(parts[2]),
                                 std::stoul(parts[3]), iters);
  } catch (const std::invalid_argument&) {
  }
  throw CLI::ValidationError(
      "--schedule", "expected constant:C, linear:C0:C1 or ramp:C0:C1:RAMP");
}

fs::path ensure_out_dir(const std::string& dir) {
  if (dir.empty())
    throw std::runtime_error("no output directory (--out or $SMTJ_ISING_OUT)");
  fs::create_directories(dir);
  return fs::path(dir);
}

void report_tour(const TspEncoding& enc, const RunResult& res) {
  const Decoded best = decode(enc, res.solution_state());
  const Decoded fin = decode(enc, res.final_state);
  std::cout << "solution_energy " << res.solution_energy << "\n";
  if (fin.valid()) std::cout << "final_length " << fin.tour->length << "\n";
  if (best.valid()) {
    std::cout << "best_length " << best.tour->length << "\n";
    std::cout << "tour";
    for (int c : best.tour->order) std::cout << ' ' << c;
    std::cout << "\n";
  } else {
    std::cout << "best state violates constraints: " << best.row_violations
              << " rows, " << best.col_violations << " cols\n";
  }
}

json run_artifact(const std::string& kind, const json& config,
                  const json& results) {
  return json{{"kind", kind}, {"config", config}, {"results", results}};
}

// ---- solve-tsp / solve-ctsp ------------------------------------------------

struct SolveOpts {
  CommonOpts common;
  std::size_t iters = 10000;
  std::string schedule;
  double w = -1.0;
  double theta = -1.0;
  std::size_t budget = 81;
  std::string mode = "ideal";
  bool trajectory = false;
  std::vector<std::string> pairs;  // A:B or A:B:directed (solve-ctsp)
};

int cmd_solve(const SolveOpts& o, bool ctsp) {
  const TspInstance ins = resolve_instance(o.common);
  const double w =
      o.w > 0.0 ? o.w : (ctsp ? default_ctsp_weight(ins) : default_weight(ins));
  TspEncoding enc = build_tsp(ins, TspVariant::fixed_start, w);
  if (enc.n_spins() > o.budget) {
    std::cerr << "error: direct encoding needs " << enc.n_spins()
              << " spins but --budget is " << o.budget
              << " (use the pipeline subcommand for compressed solves)\n";
    return 1;
  }
  CtspConstraint constraint;
  if (ctsp) {
    for (const auto& pair_text : o.pairs) {
      std::stringstream ss(pair_text);
      std::string a, b, dir;
      std::getline(ss, a, ':');
      std::getline(ss, b, ':');
      std::getline(ss, dir, ':');
      CtspConstraint::Pair p;
      p.a = std::stoi(a);
      p.b = std::stoi(b);
      p.dir = dir == "directed" ? CtspConstraint::Direction::a_then_b
                                : CtspConstraint::Direction::either;
      constraint.pairs.push_back(p);
    }
    if (constraint.pairs.empty())
      throw std::runtime_error("solve-ctsp needs at least one --pair A:B");
    constraint.theta = o.theta > 0.0 ? o.theta : default_theta(enc);
    enc = build_ctsp(enc, constraint);
  }

  RunConfig rc;
  rc.schedule = parse_schedule(o.schedule, o.iters);
  rc.seed = o.common.seed;
  rc.device_mode = o.mode == "faithful" ? DeviceMode::faithful
                                        : DeviceMode::ideal;
  rc.record_trajectory = o.trajectory;

  const RunResult res = run_random(enc.model, rc);
  report_tour(enc, res);
  if (ctsp) {
    const Decoded dec = decode(enc, res.solution_state());
    if (dec.valid())
      for (const auto& p : constraint.pairs) {
        bool ok = false;
        const auto& ord = dec.tour->order;
        for (std::size_t k = 0; k < ord.size(); ++k) {
          const int u = ord[k], v = ord[(k + 1) % ord.size()];
          if (p.dir == CtspConstraint::Direction::either
                  ? ((u == p.a && v == p.b) || (u == p.b && v == p.a))
                  : (u == p.a && v == p.b))
            ok = true;
        }
        std::cout << "pair " << p.a << "-" << p.b
                  << (ok ? " satisfied" : " VIOLATED") << "\n";
      }
  }

  if (!o.common.out_dir.empty()) {
    const fs::path dir = ensure_out_dir(o.common.out_dir);
    json doc = run_artifact(ctsp ? "solve_ctsp" : "solve_tsp",
                            json{{"run", rc},
                                 {"w", w},
                                 {"theta", constraint.theta},
                                 {"budget", o.budget},
                                 {"instance", ins.name},
                                 {"n", ins.size()}},
                            json(res));
    io::write_json((dir / "run.json").string(), doc);
    if (o.trajectory)
      io::write_trajectory_csv((dir / "trajectory.csv").string(),
                               res.trajectory);
    io::write_coupling_csv((dir / "coupling.csv").string(), enc.model);
    std::cout << "artifacts in " << dir.string() << "\n";
  }
  const Decoded solution = decode(enc, res.solution_state());
  return solution.valid() ? 0 : 1;
}

// ---- pipeline ----------------------------------------------------------------

struct PipelineOpts {
  CommonOpts common;
  PipelineConfig cfg;
};

int cmd_pipeline(const PipelineOpts& o) {
  const TspInstance ins = resolve_instance(o.common);
  PipelineConfig cfg = o.cfg;
  cfg.seed = o.common.seed;
  const PipelineResult res = pipeline_run(ins, cfg);

  std::cout << "groups " << res.partition.groups.size() << "\n";
  std::cout << "stitched_length " << res.report.stitched_length << "\n";
  for (std::size_t p = 0; p < res.report.pass_lengths.size(); ++p)
    std::cout << "pass" << p + 1 << "_length " << res.report.pass_lengths[p]
              << "\n";
  std::cout << "final_length " << res.report.final_length << "\n";
  std::cout << "total_sweeps " << res.report.total_sweeps << "\n";
  std::cout << "max_subproblem_spins " << res.report.max_subproblem_spins
            << "\n";
  if (!res.report.all_stages_valid) {
    std::cerr << "error: a pipeline stage produced an invalid tour\n";
    return 1;
  }

  if (!o.common.out_dir.empty()) {
    const fs::path dir = ensure_out_dir(o.common.out_dir);
    json doc = run_artifact("pipeline",
                            json{{"pipeline", cfg},
                                 {"instance", ins.name},
                                 {"n", ins.size()}},
                            json{{"report", res.report},
                                 {"groups", res.partition.groups},
                                 {"tour", res.tour.order},
                                 {"length", res.tour.length}});
    io::write_json((dir / "pipeline.json").string(), doc);
    std::cout << "artifacts in " << dir.string() << "\n";
  }
  return 0;
}

// ---- success-curve -------------------------------------------------------

struct CurveOpts {
  CommonOpts common;
  std::size_t n_low = 9, n_high = 9;
  std::size_t trials = 50;
  std::size_t iters = 10000;
  std::string schedule;
};

int cmd_success_curve(const CurveOpts& o) {
  std::ostringstream csv;
  csv << "nodes,iterations,success_probability\n";
  for (std::size_t n = o.n_low; n <= o.n_high; ++n) {
    CommonOpts c = o.common;
    c.synthetic_n = n;
    c.input.clear();
    const TspInstance ins = resolve_instance(c);
    if (ins.size() > 10)
      throw std::runtime_error(
          "success-curve needs n <= 10 (exhaustive reference search)");
    const TspEncoding enc = build_tsp(ins, TspVariant::fixed_start);

    // brute-force optimum fixes the success target
    std::vector<int> rest(ins.size() - 1);
    std::iota(rest.begin(), rest.end(), 1);
    std::vector<int> order(ins.size());
    order[0] = 0;
    double best_len = 1e300;
    do {
      std::copy(rest.begin(), rest.end(), order.begin() + 1);
      best_len = std::min(best_len, tour_length(ins, order));
    } while (std::next_permutation(rest.begin(), rest.end()));

    std::vector<std::size_t> checkpoints;
    for (std::size_t cp = 100; cp < o.iters; cp *= 10)
      checkpoints.push_back(cp);
    checkpoints.push_back(o.iters);

    std::vector<std::size_t> hit_counts(checkpoints.size(), 0);
    for (std::size_t trial = 0; trial < o.trials; ++trial) {
      RunConfig rc;
      rc.schedule = parse_schedule(o.schedule, o.iters);
      rc.seed = derive_seed(o.common.seed, trial);
      rc.target_energy = enc.w * best_len;
      const RunResult res = run_random(enc.model, rc);
      if (!res.first_hit_iteration) continue;
      for (std::size_t k = 0; k < checkpoints.size(); ++k)
        if (*res.first_hit_iteration < checkpoints[k]) ++hit_counts[k];
    }
    for (std::size_t k = 0; k < checkpoints.size(); ++k)
      csv << n << ',' << checkpoints[k] << ','
          << static_cast<double>(hit_counts[k]) / o.trials << "\n";
    std::cout << "n=" << n << " success@" << o.iters << " = "
              << static_cast<double>(hit_counts.back()) / o.trials << "\n";
  }
  if (!o.common.out_dir.empty()) {
    const fs::path dir = ensure_out_dir(o.common.out_dir);
    io::write_text_file((dir / "success_curve.csv").string(), csv.str());
    std::cout << "artifacts in " << dir.string() << "\n";
  } else {
    std::cout << csv.str();
  }
  return 0;
}

// ---- device-trace ----------------------------------------------------------

struct TraceOpts {
  CommonOpts common;
  std::vector<double> currents{3.0, 3.9, 5.0};
  double dt = 0.5e-4;
  std::size_t steps = 200000;
  double a = 4.67, b = 3.9, tau0 = 1e-4;
};

int cmd_device_trace(const TraceOpts& o) {
  DeviceParams dev;
  dev.a = o.a;
  dev.b = o.b;
  dev.tau0 = o.tau0;
  dev.validate();
  const fs::path dir = ensure_out_dir(o.common.out_dir);
  std::cout << "current_uA,occupancy,p_ap\n";
  for (std::size_t k = 0; k < o.currents.size(); ++k) {
    Rng rng = make_rng(derive_seed(o.common.seed, k));
    const TelegraphTrace tr =
        simulate_trace(dev, o.currents[k], o.dt, o.steps, rng);
    std::ostringstream name;
    name << "trace_" << o.currents[k] << ".csv";
    io::write_trace_csv((dir / name.str()).string(), tr);
    std::cout << o.currents[k] << ',' << tr.ap_occupancy() << ','
              << p_ap(dev, o.currents[k]) << "\n";
  }
  std::cout << "artifacts in " << dir.string() << "\n";
  return 0;
}

// ---- spin-report -----------------------------------------------------------

struct ReportOpts {
  CommonOpts common;
  std::vector<std::string> inputs;
  std::size_t budget = 81;
};

int cmd_spin_report(const ReportOpts& o) {
  PipelineConfig cfg;
  cfg.spin_budget = o.budget;
  cfg.seed = o.common.seed;
  std::ostringstream csv;
  csv << "name,cities,conventional_spins,our_spins\n";
  for (const auto& path : o.inputs) {
    const TsplibFile file = load_tsplib(path);
    SpinCountRow row;
    if (file.edge_weight_type == "EUC_2D") {
      row = spin_count_report(to_instance(file), cfg);
    } else {
      // dimension-only path (e.g. GEO): the conventional count needs only N
      row = spin_count_report(file.name, file.dimension, cfg);
    }
    csv << row.name << ',' << row.n_cities << ',' << row.conventional << ','
        << row.ours << "\n";
  }
  std::cout << csv.str();
  if (!o.common.out_dir.empty()) {
    const fs::path dir = ensure_out_dir(o.common.out_dir);
    io::write_text_file((dir / "spin_report.csv").string(), csv.str());
    std::cout << "artifacts in " << dir.string() << "\n";
  }
  return 0;
}

// ---- calibrate -------------------------------------------------------------

struct CalibrateOpts {
  CommonOpts common;
  std::string from_dir;  // directory of trace_*.csv from device-trace
  std::vector<double> currents{2.9, 3.4, 3.9, 4.4, 4.9};
  std::size_t steps = 20000;
  double a = 4.67, b = 3.9, tau0 = 1e-4;
};

TelegraphTrace read_trace_csv(const fs::path& path, double current) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  TelegraphTrace tr;
  tr.current = current;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw parse_error("bad trace line in " + path.string());
    tr.samples.push_back({std::stod(line.substr(0, comma)),
                          line.substr(comma + 1) == "1" ? MtjState::AP
                                                        : MtjState::P});
  }
  return tr;
}

int cmd_calibrate(const CalibrateOpts& o) {
  std::vector<TelegraphTrace> traces;
  if (!o.from_dir.empty()) {
    for (const auto& entry : fs::directory_iterator(o.from_dir)) {
      const std::string fname = entry.path().filename().string();
      if (fname.rfind("trace_", 0) != 0 || entry.path().extension() != ".csv")
        continue;
      const double current =
          std::stod(fname.substr(6, fname.size() - 6 - 4));
      traces.push_back(read_trace_csv(entry.path(), current));
    }
    if (traces.empty())
      throw std::runtime_error("no trace_*.csv files in " + o.from_dir);
  } else {
    // synthetic calibration set from the given ground-truth device
    DeviceParams truth;
    truth.a = o.a;
    truth.b = o.b;
    truth.tau0 = o.tau0;
    truth.validate();
    for (std::size_t k = 0; k < o.currents.size(); ++k) {
      Rng rng = make_rng(derive_seed(o.common.seed, 0xCA1 + k));
      traces.push_back(simulate_trace(truth, o.currents[k], 5.0 * truth.tau0,
                                      o.steps, rng));
    }
  }
  const DeviceParams fit = calibrate(traces);
  std::cout << "a " << fit.a << "\n";
  std::cout << "b " << fit.b << "\n";
  if (!o.common.out_dir.empty()) {
    const fs::path dir = ensure_out_dir(o.common.out_dir);
    io::write_json((dir / "calibration.json").string(),
                   json{{"a", fit.a}, {"b", fit.b}});
    std::cout << "artifacts in " << dir.string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SMTJ-based Ising annealer emulation and TSP benchmark"};
  app.require_subcommand(1);

  SolveOpts solve;
  CLI::App* solve_tsp =
      app.add_subcommand("solve-tsp", "direct (unpartitioned) TSP anneal");
  add_common(solve_tsp, solve.common, true);
  solve_tsp->add_option("--iters", solve.iters, "sweeps to run");
  solve_tsp->add_option("--schedule", solve.schedule,
                        "constant:C | linear:C0:C1 | ramp:C0:C1:RAMP");
  solve_tsp->add_option("--w", solve.w, "distance weight (default 1/(2 max d))");
  solve_tsp->add_option("--budget", solve.budget, "spin budget");
  solve_tsp->add_option("--mode", solve.mode, "ideal|faithful")
      ->check(CLI::IsMember({"ideal", "faithful"}));
  solve_tsp->add_flag("--traj", solve.trajectory, "record trajectory CSV");

  SolveOpts ctsp = solve;
  CLI::App* solve_ctsp = app.add_subcommand(
      "solve-ctsp", "TSP with forced consecutive visits (CTSP)");
  add_common(solve_ctsp, ctsp.common, true);
  solve_ctsp->add_option("--iters", ctsp.iters, "sweeps to run");
  solve_ctsp->add_option("--schedule", ctsp.schedule,
                         "constant:C | linear:C0:C1 | ramp:C0:C1:RAMP");
  solve_ctsp->add_option("--w", ctsp.w, "distance weight");
  solve_ctsp->add_option("--theta", ctsp.theta,
                         "constraint reward (default 2 w max_d + 1)");
  solve_ctsp->add_option("--budget", ctsp.budget, "spin budget");
  solve_ctsp->add_option("--mode", ctsp.mode, "ideal|faithful")
      ->check(CLI::IsMember({"ideal", "faithful"}));
  solve_ctsp->add_flag("--traj", ctsp.trajectory, "record trajectory CSV");
  solve_ctsp
      ->add_option("--pair", ctsp.pairs,
                   "constrained pair A:B or A:B:directed (repeatable)")
      ->expected(-1);

  PipelineOpts pipe;
  CLI::App* pipeline = app.add_subcommand(
      "pipeline", "graph-partition + sliding-window compressed solve");
  add_common(pipeline, pipe.common, true);
  pipeline->add_option("--budget", pipe.cfg.spin_budget, "spin budget");
  pipeline->add_option("--w", pipe.cfg.w, "distance weight override");
  pipeline->add_option("--theta", pipe.cfg.theta, "CTSP reward override");
  pipeline->add_option("--gp-iters", pipe.cfg.gp_iterations,
                       "sweeps per bisection");
  pipeline->add_option("--group-iters", pipe.cfg.group_iterations,
                       "sweeps per group solve");
  pipeline->add_option("--window-iters", pipe.cfg.window_iterations,
                       "sweeps per window solve");
  pipeline->add_option("--passes", pipe.cfg.window_passes, "window passes");

  CurveOpts curve;
  CLI::App* success = app.add_subcommand(
      "success-curve", "success probability vs iterations (synthetic TSP)");
  add_common(success, curve.common, false);
  success->add_option("--n", curve.n_low, "node count")->required();
  success->add_option("--n-high", curve.n_high,
                      "sweep node sizes n..n-high (default: just --n)");
  success->add_option("--trials", curve.trials, "independent runs per size");
  success->add_option("--iters", curve.iters, "sweeps per run");
  success->add_option("--schedule", curve.schedule,
                      "constant:C | linear:C0:C1 | ramp:C0:C1:RAMP");

  TraceOpts trace;
  CLI::App* device = app.add_subcommand(
      "device-trace", "random-telegraph traces of the emulated junction");
  add_common(device, trace.common, false);
  device->add_option("--currents", trace.currents, "bias currents in uA")
      ->expected(-1);
  device->add_option("--dt", trace.dt, "read interval in seconds");
  device->add_option("--steps", trace.steps, "reads per trace");
  device->add_option("--a", trace.a, "sigmoid slope 1/uA");
  device->add_option("--b", trace.b, "sigmoid center uA");
  device->add_option("--tau0", trace.tau0, "mean dwell at I=b, seconds");

  ReportOpts report;
  CLI::App* spin_report = app.add_subcommand(
      "spin-report", "spin demand: conventional (N-1)^2 vs this pipeline");
  add_common(spin_report, report.common, false);
  spin_report->add_option("--input", report.inputs, "TSPLIB files")
      ->required()
      ->expected(-1);
  spin_report->add_option("--budget", report.budget, "spin budget");

  CalibrateOpts cal;
  CLI::App* calibrate_cmd = app.add_subcommand(
      "calibrate", "logistic fit of AP occupancy vs current");
  add_common(calibrate_cmd, cal.common, false);
  calibrate_cmd->add_option("--from", cal.from_dir,
                            "directory holding trace_*.csv files");
  calibrate_cmd->add_option("--currents", cal.currents,
                            "synthetic calibration currents")
      ->expected(-1);
  calibrate_cmd->add_option("--steps", cal.steps, "reads per synthetic trace");
  calibrate_cmd->add_option("--a", cal.a, "ground-truth slope");
  calibrate_cmd->add_option("--b", cal.b, "ground-truth center");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(solve_tsp)) return cmd_solve(solve, false);
    if (app.got_subcommand(solve_ctsp)) return cmd_solve(ctsp, true);
    if (app.got_subcommand(pipeline)) return cmd_pipeline(pipe);
    if (app.got_subcommand(success)) return cmd_success_curve(curve);
    if (app.got_subcommand(device)) return cmd_device_trace(trace);
    if (app.got_subcommand(spin_report)) return cmd_spin_report(report);
    if (app.got_subcommand(calibrate_cmd)) return cmd_calibrate(cal);
  } catch (const CLI::ParseError& e) {
    // flag values that fail late validation are usage errors all the same
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
