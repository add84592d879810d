#pragma once

// One logical UI session: parses client envelopes, drives experiments and
// guidance worlds, and streams frame messages at pattern-change instants.
// Transport-agnostic; the WebSocket server feeds it text and pumps `tick`.

#include <cctype>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "tacton/core.hpp"
#include "tacton/experiments.hpp"
#include "tacton/guidance.hpp"
#include "tacton/library.hpp"
#include "tacton/player.hpp"

namespace tacton::gateway {

inline constexpr int kProtocolVersion = 1;

// Guidance cues are not stimuli and keep playing until replaced.
inline constexpr Millis kGuidanceCapMs = 3'600'000;

using Json = nlohmann::ordered_json;

struct Envelope {
  std::string type;
  std::string session_id;
  std::uint64_t seq = 0;
  nlohmann::json payload = nlohmann::json::object();
};

inline std::string encode(const Envelope& e) {
  Json j;
  j["v"] = kProtocolVersion;
  j["type"] = e.type;
  j["session_id"] = e.session_id;
  j["seq"] = e.seq;
  j["payload"] = e.payload;
  return j.dump();
}

inline Envelope decode(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception&) {
    throw Error("message is not valid JSON");
  }
  if (!j.is_object()) throw Error("message must be a JSON object");
  if (j.contains("v") && j["v"] != kProtocolVersion) throw Error("unsupported protocol version");
  if (!j.contains("type") || !j["type"].is_string()) throw Error("message lacks a type");
  Envelope e;
  e.type = j["type"].get<std::string>();
  if (j.contains("session_id") && j["session_id"].is_string()) e.session_id = j["session_id"].get<std::string>();
  if (j.contains("seq") && j["seq"].is_number_unsigned()) e.seq = j["seq"].get<std::uint64_t>();
  if (j.contains("payload")) {
    if (!j["payload"].is_object()) throw Error("payload must be an object");
    e.payload = j["payload"];
  }
  return e;
}

struct GatewayContext {
  const Catalog* catalog = nullptr;
  std::filesystem::path world_dir = "data";
  GuidanceConfig guidance;
  bool virtual_time = false;
  Millis cap_ms = kDefaultCapMs;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// World names are plain identifiers resolved inside the world directory.
inline std::filesystem::path world_file(const std::filesystem::path& dir, std::string_view kind, std::string_view name,
                                        std::string_view ext) {
  if (name.empty() || name.size() > 64) throw Error("invalid world name");
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') throw Error("invalid world name");
  }
  return dir / kind / (std::string(name) + std::string(ext));
}

class GatewaySession {
 public:
  using Sink = std::function<void(const std::string&)>;

  GatewaySession(std::string id, GatewayContext ctx, const Clock& wall_clock, Sink sink)
      : id_{std::move(id)}, ctx_{std::move(ctx)}, wall_clock_{&wall_clock}, sink_{std::move(sink)}, device_{*this} {
    if (!ctx_.catalog) throw Error("gateway session needs a catalog");
  }

  GatewaySession(const GatewaySession&) = delete;
  GatewaySession& operator=(const GatewaySession&) = delete;

  const std::string& id() const { return id_; }

  void open() { send("control", {{"event", "hello"}, {"virtual_time", ctx_.virtual_time}, {"cap_ms", ctx_.cap_ms}}); }

  // Malformed or failing messages are answered with a control error; the
  // session keeps its state.
  void handle(std::string_view text) {
    try {
      dispatch(decode(text));
    } catch (const std::exception& e) {
      send("control", {{"event", "error"}, {"message", e.what()}});
    }
  }

  // Presents every pattern change due by now (real-time mode).
  void tick() {
    if (!playback_) return;
    playback_->advance();
    after_playback_step();
  }

  // Absolute clock instant of the next scheduled presentation.
  std::optional<Millis> next_wakeup_ms() const {
    if (!playback_) return std::nullopt;
    auto rel = playback_->next_event_ms();
    if (!rel) return std::nullopt;
    return playback_->start_ms() + *rel;
  }

  std::uint64_t last_seq() const { return seq_; }

 private:
  class FrameDevice final : public PinArrayDevice {
   public:
    explicit FrameDevice(GatewaySession& s) : session_{s} {}
    void present(Millis t_ms, const Pattern& pattern) override {
      session_.send("frame", {{"playback", session_.playback_id_}, {"t_ms", t_ms}, {"mask", to_bitmask(pattern)}});
    }

   private:
    GatewaySession& session_;
  };

  struct Experiment {
    TactonSpace space;
    std::string participant;
    std::vector<ValueTuple> stimuli;
    std::size_t next = 0;
    bool in_trial = false;
    Millis onset = 0;
    std::optional<Millis> exposure;
    std::vector<TrialRecord> records;
  };

  enum class CircuitLevel { global, local };

  const Clock& clock() const { return ctx_.virtual_time ? static_cast<const Clock&>(virtual_clock_) : *wall_clock_; }

  void send(const std::string& type, nlohmann::json payload) {
    sink_(encode(Envelope{type, id_, ++seq_, std::move(payload)}));
  }

  void dispatch(const Envelope& e) {
    if (e.type == "answer") return on_answer(e.payload);
    if (e.type != "control") throw Error("unsupported message type '" + e.type + "'");
    const auto cmd = e.payload.value("cmd", std::string{});
    if (cmd == "start_experiment") return on_start_experiment(e.payload);
    if (cmd == "start_trial") return on_start_trial();
    if (cmd == "release") return on_release();
    if (cmd == "play") return on_play(e.payload);
    if (cmd == "stop") {
      stop_playback();
      return send("control", {{"event", "stopped"}});
    }
    if (cmd == "load_maze") return on_load_maze(e.payload);
    if (cmd == "maze_move") return on_maze_move(e.payload);
    if (cmd == "load_circuit") return on_load_circuit(e.payload);
    if (cmd == "circuit_move") return on_circuit_move(e.payload);
    if (cmd == "circuit_level") return on_circuit_level(e.payload);
    if (cmd == "ping") return send("control", {{"event", "pong"}});
    throw Error("unknown control command '" + cmd + "'");
  }

  void start_playback(const Tacton& t, Millis cap_ms) {
    stop_playback();
    ++playback_id_;
    playback_ = std::make_unique<PlaybackSession>(t, device_, clock(), cap_ms);
    playback_->start();
    if (ctx_.virtual_time) {
      // stream the whole schedule at once
      Millis horizon = cap_ms;
      if (cap_ms >= kGuidanceCapMs) horizon = t.cycle_length_ms().value_or(1) - 1;
      virtual_clock_.set(playback_->start_ms() + horizon);
      playback_->advance();
    }
    after_playback_step();
  }

  void stop_playback() {
    if (playback_) playback_->stop();
  }

  void after_playback_step() {
    if (playback_ && experiment_ && experiment_->in_trial && playback_->state() == PlaybackState::capped &&
        !experiment_->exposure) {
      experiment_->exposure = playback_->cap_ms();
      send("control", {{"event", "stimulus_capped"}, {"exposure_ms", playback_->cap_ms()}});
    }
  }

  void on_start_experiment(const nlohmann::json& p) {
    const auto space_id = p.value("space", std::string("set4"));
    auto space = ctx_.catalog->space(space_id);
    const auto block = replication_block(space_id);
    const auto trials = p.value("trials", block.trials);
    const auto mode = sampling_mode_from(p.value("mode", to_string(block.mode)));
    const auto seed = p.value("seed", std::uint64_t{1});
    auto stimuli = generate_trials(space, trials, seed, mode);
    stop_playback();
    experiment_ = Experiment{space, p.value("participant", id_), std::move(stimuli), 0, false, 0, std::nullopt, {}};
    nlohmann::json dims = nlohmann::json::array();
    for (const auto& d : space.dimensions()) dims.push_back({{"name", d.name}, {"values", d.values}});
    send("control", {{"event", "experiment_started"}, {"space", space_id}, {"trials", trials}, {"dimensions", dims}});
  }

  void on_start_trial() {
    if (!experiment_) throw Error("no experiment running");
    auto& ex = *experiment_;
    if (ex.in_trial) throw Error("a trial is already in progress");
    if (ex.next >= ex.stimuli.size()) throw Error("experiment is complete");
    ex.in_trial = true;
    ex.exposure.reset();
    const auto& stim = ex.stimuli[ex.next];
    ex.onset = clock().now_ms();
    send("trial_start", {{"trial", ex.next + 1}, {"of", ex.stimuli.size()}, {"playback", playback_id_ + 1}});
    start_playback(ex.space.compose(stim), ctx_.cap_ms);
  }

  // Key release ends the stimulus early.
  void on_release() {
    if (!experiment_ || !experiment_->in_trial) throw Error("no stimulus to release");
    if (!experiment_->exposure) experiment_->exposure = playback_ ? playback_->stop() : 0;
    send("control", {{"event", "stimulus_stopped"}, {"exposure_ms", *experiment_->exposure}});
  }

  void on_answer(const nlohmann::json& p) {
    if (!experiment_ || !experiment_->in_trial) {
      send("control", {{"event", "error"}, {"code", "late_answer"}, {"message", "answer outside a trial"}});
      return;
    }
    auto& ex = *experiment_;
    const auto response_text = p.at("response").get<std::string>();
    const auto& dims = ex.space.dimensions();
    const auto response = parse_tuple(dims, response_text);
    ex.space.validate(response);
    Millis rt = clock().now_ms() - ex.onset;
    if (ctx_.virtual_time && p.contains("response_time_ms")) rt = p["response_time_ms"].get<Millis>();
    if (rt < 0) throw Error("response time must be non-negative");
    if (!ex.exposure) ex.exposure = playback_ ? playback_->stop() : 0;
    const Millis exposure = std::min(*ex.exposure, rt);
    stop_playback();
    ex.records.push_back(TrialRecord{ex.participant, ex.space.id(), ex.next + 1, format_tuple(dims, ex.stimuli[ex.next]),
                                     format_tuple(dims, response), rt, exposure});
    ex.in_trial = false;
    ++ex.next;
    // no correctness feedback until the end of the block
    send("trial_result", {{"trial", ex.next},
                          {"response_time_ms", rt},
                          {"exposure_ms", exposure},
                          {"remaining", ex.stimuli.size() - ex.next}});
    if (ex.next == ex.stimuli.size()) {
      const auto report = analyze(ex.records);
      Json payload;
      payload["event"] = "report";
      payload["error_rate"] = report.participants.front().error_rate;
      payload["it_bits"] = report.participants.front().it_bits;
      payload["report"] = report.to_json();
      send("control", nlohmann::json::parse(payload.dump()));
    }
  }

  void on_play(const nlohmann::json& p) {
    const auto name = p.at("tacton").get<std::string>();
    const auto t = ctx_.catalog->resolve(name);
    send("control", {{"event", "playing"}, {"tacton", name}, {"playback", playback_id_ + 1}});
    start_playback(t, p.value("cap_ms", ctx_.cap_ms));
  }

  nlohmann::json maze_state(std::optional<MoveOutcome> outcome) const {
    const auto& m = *maze_;
    const auto g = guidance_direction(m);
    nlohmann::json j{{"rows", m.rows()},
                     {"cols", m.cols()},
                     {"position", {m.current().row, m.current().col}},
                     {"exit", {m.exit().row, m.exit().col}},
                     {"steps", maze_steps_},
                     {"guidance", g ? to_string(*g) : ""},
                     {"done", m.current() == m.exit()}};
    if (outcome) j["outcome"] = to_string(*outcome);
    if (!hidden_maze_) j["grid"] = m.to_text();
    return j;
  }

  void cue_maze() {
    if (auto g = guidance_direction(*maze_)) {
      start_playback(maze_cue(*ctx_.catalog, guidance_, *g), kGuidanceCapMs);
    } else {
      stop_playback();
    }
  }

  void on_load_maze(const nlohmann::json& p) {
    auto maze = MazeWorld::parse(read_file(world_file(ctx_.world_dir, "mazes", p.at("name").get<std::string>(), ".txt")));
    if (p.value("mirror", false)) maze = maze.mirrored();
    guidance_ = ctx_.guidance;
    if (p.contains("family")) guidance_.maze_family = maze_cue_family_from(p["family"].get<std::string>());
    hidden_maze_ = p.value("hidden", false);
    maze_ = std::move(maze);
    maze_steps_ = 0;
    send("maze_state", maze_state(std::nullopt));
    cue_maze();
  }

  void on_maze_move(const nlohmann::json& p) {
    if (!maze_) throw Error("no maze loaded");
    const auto d = direction_from(p.at("dir").get<std::string>());
    const auto outcome = maze_->move(d);
    if (outcome != MoveOutcome::blocked) ++maze_steps_;
    send("maze_state", maze_state(outcome));
    cue_maze();
  }

  nlohmann::json circuit_state() const {
    const auto& c = *circuit_;
    nlohmann::json dirs = nlohmann::json::array();
    for (auto d : c.available_directions()) dirs.push_back(to_string(d));
    const auto& n = c.at_cursor();
    return {{"cursor", c.cursor()},
            {"x", n.x},
            {"y", n.y},
            {"kind", to_string(n.kind)},
            {"directions", dirs},
            {"level", circuit_level_ == CircuitLevel::global ? "global" : "local"}};
  }

  void cue_circuit() {
    const auto t = circuit_level_ == CircuitLevel::global
                       ? available_directions_tacton(*circuit_, *ctx_.catalog, ctx_.guidance)
                       : local_tacton(*circuit_, *ctx_.catalog);
    start_playback(t, kGuidanceCapMs);
  }

  void on_load_circuit(const nlohmann::json& p) {
    circuit_ = CircuitGraph::parse(
        read_file(world_file(ctx_.world_dir, "circuits", p.at("name").get<std::string>(), ".json")));
    circuit_level_ = CircuitLevel::global;
    send("circuit_state", circuit_state());
    cue_circuit();
  }

  void on_circuit_move(const nlohmann::json& p) {
    if (!circuit_) throw Error("no circuit loaded");
    const bool moved = circuit_->move_cursor(direction_from(p.at("dir").get<std::string>()));
    auto state = circuit_state();
    state["moved"] = moved;
    send("circuit_state", state);
    if (moved) cue_circuit();
  }

  void on_circuit_level(const nlohmann::json& p) {
    if (!circuit_) throw Error("no circuit loaded");
    const auto level = p.at("level").get<std::string>();
    if (level == "global") {
      circuit_level_ = CircuitLevel::global;
    } else if (level == "local") {
      circuit_level_ = CircuitLevel::local;
    } else {
      throw Error("level must be 'global' or 'local'");
    }
    send("circuit_state", circuit_state());
    cue_circuit();
  }

  std::string id_;
  GatewayContext ctx_;
  const Clock* wall_clock_;
  VirtualClock virtual_clock_;
  Sink sink_;
  FrameDevice device_;
  std::uint64_t seq_ = 0;
  std::uint64_t playback_id_ = 0;
  std::unique_ptr<PlaybackSession> playback_;
  std::optional<Experiment> experiment_;
  std::optional<MazeWorld> maze_;
  GuidanceConfig guidance_;
  bool hidden_maze_ = false;
  int maze_steps_ = 0;
  std::optional<CircuitGraph> circuit_;
  CircuitLevel circuit_level_ = CircuitLevel::global;
};

}  // namespace tacton::gateway
