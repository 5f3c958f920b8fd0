// Command-line front end: scenario generation, single closed-loop missions,
// planner benchmarks, SVG plots and trace replays.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "inav/harness.hpp"
#include "inav/system.hpp"

using namespace inav;
namespace fs = std::filesystem;

namespace {

struct Source {
  std::string file;
  std::string cls = "room";
  uint64_t seed = 1;
};

void add_source_flags(CLI::App* cmd, Source& src) {
  cmd->add_option("--scenario", src.file, "scenario file (overrides --class/--seed)");
  cmd->add_option("--class", src.cls, "scenario class: room, room_with_objects, office, tunnel");
  cmd->add_option("--seed", src.seed, "generation seed");
}

Scenario load_source(const Source& src) {
  if (!src.file.empty()) return Scenario::load(src.file);
  return generate_scenario(scenario_class_from_name(src.cls), src.seed);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  std::cerr << "wrote " << path.string() << "\n";
}

std::vector<Point2> trajectory_from_csv(const std::string& csv) {
  std::vector<Point2> out;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() < 4) continue;
    out.push_back({std::stod(fields[2]), std::stod(fields[3])});
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"interactive navigation toolbox"};
  app.require_subcommand(1);
  app.set_config("--config");

  // gen
  Source gen_src;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "generate a scenario");
  gen->add_option("--class", gen_src.cls, "scenario class: room, room_with_objects, office, tunnel");
  gen->add_option("--seed", gen_src.seed, "generation seed");
  gen->add_option("-o,--out", gen_out, "output file (default stdout)");

  // run
  Source run_src;
  int run_task = 0;
  double ticks_per_sec = 10.0;
  int run_max_ticks = 4000;
  std::string run_out_dir = ".";
  auto* run = app.add_subcommand("run", "run one closed-loop mission");
  add_source_flags(run, run_src);
  run->add_option("--task", run_task, "task index");
  run->add_option("--ticks-per-sec", ticks_per_sec, "control rate [Hz]")->check(CLI::PositiveNumber);
  run->add_option("--max-ticks", run_max_ticks, "tick budget");
  run->add_option("--out-dir", run_out_dir, "directory for trace, graph and plot");

  // bench
  Source bench_src;
  std::string bench_planner = "ours";
  int bench_max_tasks = -1;
  std::string bench_out_dir;
  bool bench_plots = false;
  double bench_tps = 10.0;
  int bench_max_ticks = 4000;
  auto* bench = app.add_subcommand("bench", "run every task with one planner");
  add_source_flags(bench, bench_src);
  bench->add_option("--planner", bench_planner, "ours, far_like or grid_astar");
  bench->add_option("--max-tasks", bench_max_tasks, "limit on tasks, -1 = all");
  bench->add_option("--ticks-per-sec", bench_tps, "control rate [Hz]")->check(CLI::PositiveNumber);
  bench->add_option("--max-ticks", bench_max_ticks, "tick budget per task");
  bench->add_option("--out-dir", bench_out_dir, "write metrics.json (and plots) here");
  bench->add_flag("--plots", bench_plots, "emit one SVG per task");

  // plot
  Source plot_src;
  std::string plot_out = "scenario.svg";
  bool plot_graph = false;
  int plot_task = -1;
  auto* plot = app.add_subcommand("plot", "render a scenario to SVG");
  add_source_flags(plot, plot_src);
  plot->add_option("-o,--out", plot_out, "output SVG file");
  plot->add_flag("--graph", plot_graph, "overlay the fully-explored visibility graph");
  plot->add_option("--task", plot_task, "mark this task's start and goal");

  // replay
  Source replay_src;
  std::string replay_trace, replay_out = "replay.svg";
  int replay_task = -1;
  auto* replay = app.add_subcommand("replay", "render a recorded trace CSV");
  add_source_flags(replay, replay_src);
  replay->add_option("--trace", replay_trace, "trace CSV from a run")->required();
  replay->add_option("-o,--out", replay_out, "output SVG file");
  replay->add_option("--task", replay_task, "mark this task's start and goal");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      Scenario s = load_source(gen_src);
      if (gen_out.empty())
        std::cout << s.serialize();
      else
        write_file(gen_out, s.serialize());
      return 0;
    }

    if (run->parsed()) {
      Scenario s = load_source(run_src);
      if (run_task < 0 || run_task >= static_cast<int>(s.tasks.size()))
        throw std::runtime_error("task index out of range");
      RunConfig rc;
      rc.tick_dt = 1.0 / ticks_per_sec;
      rc.max_ticks = run_max_ticks;
      World world(s);
      RunResult r = run_mission(world, s.tasks[run_task], rc);
      fs::create_directories(run_out_dir);
      fs::path dir(run_out_dir);
      std::string stem = s.name + "_task" + std::to_string(run_task);
      write_file(dir / (stem + "_trace.csv"), r.trace_csv);
      write_file(dir / (stem + "_graph.txt"), r.graph_text);
      write_file(dir / (stem + ".svg"), render_svg(s, &r, nullptr, &s.tasks[run_task]));
      std::cout << (r.success ? "success" : "failure") << "  distance " << r.distance
                << " m  sim time " << r.sim_time << " s  ticks " << r.ticks << "  replans "
                << r.replans << "\n";
      return r.success ? 0 : 1;
    }

    if (bench->parsed()) {
      Scenario s = load_source(bench_src);
      BenchmarkOptions opt;
      opt.run.tick_dt = 1.0 / bench_tps;
      opt.run.max_ticks = bench_max_ticks;
      opt.max_tasks = bench_max_tasks;
      std::vector<RunResult> traces;
      if (bench_plots) opt.traces = &traces;
      Metrics m = run_benchmark(s, planner_from_name(bench_planner), opt);
      std::cout << m.table();
      if (!bench_out_dir.empty()) {
        fs::create_directories(bench_out_dir);
        write_file(fs::path(bench_out_dir) / (s.name + "_" + m.planner + "_metrics.json"),
                   m.to_json());
        if (bench_plots) emit_plots(s, traces, bench_out_dir);
      }
      return 0;
    }

    if (plot->parsed()) {
      Scenario s = load_source(plot_src);
      DVGraph g;
      if (plot_graph) g = full_map_graph(s);
      const Task* task = nullptr;
      if (plot_task >= 0 && plot_task < static_cast<int>(s.tasks.size()))
        task = &s.tasks[plot_task];
      write_file(plot_out, render_svg(s, nullptr, plot_graph ? &g : nullptr, task));
      return 0;
    }

    if (replay->parsed()) {
      Scenario s = load_source(replay_src);
      std::ifstream in(replay_trace);
      if (!in) throw std::runtime_error("cannot read " + replay_trace);
      std::stringstream ss;
      ss << in.rdbuf();
      RunResult r;
      r.trajectory = trajectory_from_csv(ss.str());
      const Task* task = nullptr;
      if (replay_task >= 0 && replay_task < static_cast<int>(s.tasks.size()))
        task = &s.tasks[replay_task];
      write_file(replay_out, render_svg(s, &r, nullptr, task));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
