#include "smtj/io.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "smtj/tsplib.hpp"

using namespace smtj;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("smtj_io_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("run artifacts round-trip exactly") {
  Rng rng = make_rng(91);
  const TspInstance ins = synthetic_instance("io", 6, rng);
  const TspEncoding enc = build_tsp(ins, TspVariant::fixed_start);

  RunConfig cfg;
  cfg.schedule = Schedule::solve_default(500);
  cfg.seed = 424242;
  cfg.record_trajectory = true;
  cfg.trajectory_stride = 10;
  const RunResult res = run_random(enc.model, cfg);

  TempDir tmp;
  const std::string path = (tmp.path / "run.json").string();
  io::write_json(path, json{{"config", cfg}, {"result", res}});
  const json doc = io::read_json(path);

  SECTION("scalar fields survive byte-exactly") {
    REQUIRE(doc["result"]["solution_energy"].get<double>() ==
            res.solution_energy);
    REQUIRE(doc["result"]["best_energy"].get<double>() == res.best_energy);
    REQUIRE(doc["result"]["final_energy"].get<double>() == res.final_energy);
    REQUIRE(doc["result"]["seed"].get<std::uint64_t>() == res.seed);
    REQUIRE(doc["config"]["seed"].get<std::uint64_t>() == cfg.seed);
  }

  SECTION("rerunning from the recorded config reproduces the solution") {
    const RunConfig replay = doc["config"].get<RunConfig>();
    const RunResult again = run_random(enc.model, replay);
    REQUIRE(again.solution_energy == res.solution_energy);
    REQUIRE(again.best_state == res.best_state);
    REQUIRE(again.final_state == res.final_state);
  }

  SECTION("states round-trip through json") {
    const SpinConfiguration s = spins_from_json(doc["result"]["best_state"]);
    REQUIRE(s == res.best_state);
  }
}

TEST_CASE("schedule json mapping") {
  const Schedule s = Schedule::piecewise({{0, 0.2}, {50, 0.7}, {999, 1.3}}, 1000);
  const json j = s;
  const Schedule back = j.get<Schedule>();
  REQUIRE(back.kind == s.kind);
  REQUIRE(back.total_iterations == s.total_iterations);
  REQUIRE(back.breakpoints == s.breakpoints);
  for (std::size_t t : {0u, 25u, 500u, 999u}) REQUIRE(back.at(t) == s.at(t));
}

TEST_CASE("trajectory csv has the fixed schema") {
  std::vector<TrajectoryPoint> traj{{0, 0.25, 1.5, 1.5},
                                    {10, 0.5, -2.25, -2.25}};
  const std::string text = io::trajectory_csv(traj);
  REQUIRE(text.rfind("iteration,c,energy,best_energy\n", 0) == 0);
  REQUIRE(text.find("10,0.5,-2.25,-2.25") != std::string::npos);
}

TEST_CASE("telegraph trace csv") {
  TelegraphTrace tr;
  tr.current = 3.9;
  tr.samples = {{1e-4, MtjState::AP}, {2e-4, MtjState::P}};
  const std::string text = io::trace_csv(tr);
  REQUIRE(text.rfind("time_s,state\n", 0) == 0);
  REQUIRE(text.find(",1\n") != std::string::npos);
  REQUIRE(text.find(",0\n") != std::string::npos);
}

TEST_CASE("coupling csv enumerates the matrix") {
  IsingModel m(2);
  m.set_coupling(0, 1, -2.5);
  const std::string text = io::coupling_csv(m);
  REQUIRE(text.rfind("row,col,value\n", 0) == 0);
  REQUIRE(text.find("0,1,-2.5") != std::string::npos);
  REQUIRE(text.find("1,0,-2.5") != std::string::npos);
}

TEST_CASE("pipeline report serializes") {
  Rng rng = make_rng(92);
  const TspInstance ins = synthetic_instance("rep", 12, rng);
  PipelineConfig cfg;
  cfg.spin_budget = 16;
  cfg.group_iterations = 2000;
  cfg.window_iterations = 500;
  cfg.window_passes = 2;
  cfg.seed = 5;
  const PipelineResult res = pipeline_run(ins, cfg);
  const json j{{"config", cfg}, {"report", res.report}, {"tour", res.tour.order}};
  REQUIRE(j["report"]["final_length"].get<double>() == res.report.final_length);
  REQUIRE(j["report"]["total_sweeps"].get<std::size_t>() ==
          res.report.total_sweeps);
  const PipelineConfig back = j["config"].get<PipelineConfig>();
  REQUIRE(back.spin_budget == cfg.spin_budget);
  REQUIRE(back.seed == cfg.seed);
}

TEST_CASE("io failures carry the path") {
  REQUIRE_THROWS_WITH(
      io::write_text_file("/nonexistent_dir_xyz/file.txt", "x"),
      Catch::Matchers::ContainsSubstring("/nonexistent_dir_xyz/file.txt"));
  REQUIRE_THROWS_AS(io::read_json("/nonexistent_dir_xyz/file.json"),
                    std::runtime_error);
  TempDir tmp;
  const std::string bad = (tmp.path / "bad.json").string();
  io::write_text_file(bad, "{ not json");
  REQUIRE_THROWS_AS(io::read_json(bad), parse_error);
}
