// tactonctl: headless batch commands and the live gateway.

#include <deque>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tacton/gateway/server.hpp"
#include "tacton/tacton.hpp"

namespace {

using namespace tacton;

std::string overrides_path;

Catalog load_catalog(const std::string& path) {
  auto c = path.empty() ? Catalog::builtin() : Catalog::parse(gateway::read_file(path));
  if (!overrides_path.empty()) {
    try {
      c.apply_overrides(nlohmann::json::parse(gateway::read_file(overrides_path)));
    } catch (const nlohmann::json::exception& e) {
      throw Error("malformed overrides " + overrides_path + ": " + e.what());
    }
  }
  return c;
}

// Forward BFS from the start, kept separate from the maze's own distance field.
int bfs_start_to_exit(const MazeWorld& maze, Cell from) {
  std::vector<std::vector<int>> dist(maze.rows(), std::vector<int>(maze.cols(), -1));
  std::deque<Cell> q{from};
  dist[from.row][from.col] = 0;
  while (!q.empty()) {
    auto c = q.front();
    q.pop_front();
    if (c == maze.exit()) return dist[c.row][c.col];
    for (auto d : kRadialDirections) {
      auto n = step(c, d);
      if (maze.is_floor(n) && dist[n.row][n.col] < 0) {
        dist[n.row][n.col] = dist[c.row][c.col] + 1;
        q.push_back(n);
      }
    }
  }
  return -1;
}

int cmd_render(const std::string& catalog_path, const std::string& name, Millis until, Millis cap, bool ascii) {
  const auto catalog = load_catalog(catalog_path);
  const auto t = catalog.resolve(name);
  if (ascii) {
    VirtualClock clock;
    TerminalRenderer renderer(std::cout);
    auto s = play(t, renderer, clock, cap);
    clock.set(until);
    s.advance();
    return 0;
  }
  std::cout << format_schedule(render_schedule(t, until, cap));
  return 0;
}

int cmd_simulate(const std::string& catalog_path, const std::string& space_id, std::size_t participants,
                 const std::string& model_path, std::uint64_t seed, std::size_t trials, const std::string& mode,
                 const std::string& out_path) {
  const auto catalog = load_catalog(catalog_path);
  const auto space = catalog.space(space_id);
  const auto model = ResponderModel::parse(gateway::read_file(model_path));
  auto block = replication_block(space_id);
  if (trials) block.trials = trials;
  if (!mode.empty()) block.mode = sampling_mode_from(mode);
  if (participants == 0) throw Error("need at least one participant");
  std::vector<std::string> ids;
  for (std::size_t i = 1; i <= participants; ++i) ids.push_back("p" + std::to_string(i));
  std::vector<TrialRecord> records;
  for (const auto& plan : make_plans(ids, {block}, seed)) {
    auto r = simulate_responder(space, model, plan.stimuli(catalog, 0), derive_seed(plan.seed, 1000), plan.participant,
                                space_id);
    records.insert(records.end(), r.begin(), r.end());
  }
  if (out_path.empty()) {
    write_trial_log(std::cout, records);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw Error("cannot write " + out_path);
    write_trial_log(out, records);
  }
  return 0;
}

int cmd_analyze(const std::string& csv_path) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw Error("cannot open " + csv_path);
  const auto report = analyze(read_trial_log(in));
  std::cout << report.to_json().dump(2) << "\n";
  return 0;
}

int cmd_maze_walk(const std::vector<std::string>& files, bool mirror, bool all_starts) {
  bool ok = true;
  for (const auto& file : files) {
    auto maze = MazeWorld::parse(gateway::read_file(file));
    if (mirror) maze = maze.mirrored();
    std::vector<Cell> starts{maze.start()};
    if (all_starts) starts = maze.floor_cells();
    for (auto s : starts) {
      if (s == maze.exit()) continue;
      maze.set_current(s);
      const int limit = maze.rows() * maze.cols();
      int steps = 0, blocked = 0;
      while (auto d = guidance_direction(maze)) {
        if (maze.move(*d) == MoveOutcome::blocked) ++blocked;
        if (++steps > limit) break;
      }
      const int bfs = bfs_start_to_exit(maze, s);
      const bool good = steps == bfs && blocked == 0;
      ok = ok && good;
      if (!all_starts || !good) {
        std::cout << file << ": steps = " << steps << ", BFS distance = " << bfs << (good ? ", OK" : ", MISMATCH")
                  << "\n";
      }
    }
    if (all_starts) std::cout << file << ": " << starts.size() << " start cells checked\n";
  }
  return ok ? 0 : 1;
}

int cmd_serve(const std::string& config_path, int port, bool virtual_time, const std::string& world_dir,
              const std::string& catalog_path) {
  auto config = config_path.empty() ? gateway::ServerConfig{} : gateway::ServerConfig::load(config_path);
  config.apply_env();
  if (port >= 0) config.port = static_cast<unsigned short>(port);
  if (virtual_time) config.virtual_time = true;
  if (!world_dir.empty()) config.world_dir = world_dir;
  if (!catalog_path.empty()) config.catalog_path = catalog_path;
  const auto catalog = load_catalog(config.catalog_path);
  gateway::Server server(config, catalog);
  std::cout << "listening on " << config.listen_address << ":" << server.port()
            << (config.virtual_time ? " (virtual time)" : "") << std::endl;
  server.run();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pin-array Tacton engine"};
  app.require_subcommand(1);

  std::string catalog_path;
  app.add_option("--catalog", catalog_path, "Catalog JSON file (default: built-in)");
  app.add_option("--overrides", overrides_path, "JSON with speed_tempos and/or replacement tactons");

  auto* render = app.add_subcommand("render", "Print the presentation schedule of a Tacton");
  std::string tacton_name;
  Millis until = 1000, cap = kDefaultCapMs;
  bool ascii = false;
  render->add_option("--tacton", tacton_name, "Catalog name, e.g. set9/NE or s3/N/large/medium")->required();
  render->add_option("--until", until, "Virtual time to render up to (ms)");
  render->add_option("--cap", cap, "Stimulus cap (ms)");
  render->add_flag("--ascii", ascii, "Print frames as ASCII art");

  auto* simulate = app.add_subcommand("simulate", "Simulate participants and emit a trial-log CSV");
  std::string space_id = "s3", model_path, mode, out_path;
  std::size_t participants = 10, trials = 0;
  std::uint64_t seed = 1;
  simulate->add_option("--space", space_id, "Tacton space (set1..set11p, s2, s3)");
  simulate->add_option("--participants", participants, "Number of simulated participants");
  simulate->add_option("--model", model_path, "Responder model JSON")->required();
  simulate->add_option("--seed", seed, "Random seed");
  simulate->add_option("--trials", trials, "Trials per participant (default 100, or 96 for s2/s3)");
  simulate->add_option("--mode", mode, "uniform or balanced (default uniform, balanced for s2/s3)");
  simulate->add_option("--out", out_path, "Write CSV here instead of stdout");

  auto* analyze_cmd = app.add_subcommand("analyze", "Compute error rates, medians and information transmission");
  std::string csv_path;
  analyze_cmd->add_option("csv", csv_path, "Trial-log CSV")->required();

  auto* maze_walk = app.add_subcommand("maze-walk", "Run the guided walker and check it against BFS");
  std::vector<std::string> maze_files;
  bool mirror = false, all_starts = false;
  maze_walk->add_option("maze", maze_files, "Maze text files")->required();
  maze_walk->add_flag("--mirror", mirror, "Walk the mirrored maze");
  maze_walk->add_flag("--all-starts", all_starts, "Walk from every floor cell");

  auto* serve = app.add_subcommand("serve", "Serve UI sessions over WebSocket");
  std::string config_path, world_dir;
  int port = -1;
  bool virtual_time = false;
  serve->add_option("--config", config_path, "Config JSON (listen_address, port, catalog_path, world_dir)");
  serve->add_option("--port", port, "Listen port (overrides config and TACTON_PORT)");
  serve->add_option("--world-dir", world_dir, "Directory with mazes/ and circuits/");
  serve->add_flag("--virtual-time", virtual_time, "Stream whole schedules instantly");

  auto* catalog_cmd = app.add_subcommand("catalog", "Catalog utilities");
  catalog_cmd->require_subcommand(1);
  auto* dump = catalog_cmd->add_subcommand("dump", "Write the catalog as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*render) return cmd_render(catalog_path, tacton_name, until, cap, ascii);
    if (*simulate) return cmd_simulate(catalog_path, space_id, participants, model_path, seed, trials, mode, out_path);
    if (*analyze_cmd) return cmd_analyze(csv_path);
    if (*maze_walk) return cmd_maze_walk(maze_files, mirror, all_starts);
    if (*serve) return cmd_serve(config_path, port, virtual_time, world_dir, catalog_path);
    if (*dump) {
      std::cout << load_catalog(catalog_path).dump();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
