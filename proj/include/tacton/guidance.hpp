#pragma once

// Guidance worlds: a grid maze navigated by direction cues, and an electric
// circuit explored at a global level (available directions) and a local
// level (component under the cursor).

#include <array>
#include <deque>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tacton/core.hpp"
#include "tacton/library.hpp"

namespace tacton {

struct Cell {
  int row = 0;
  int col = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

inline Cell step(Cell c, Direction d) {
  auto [dr, dc] = step_of(d);
  return {c.row + dr, c.col + dc};
}

enum class MoveOutcome { moved, blocked, exited };

inline std::string to_string(MoveOutcome o) {
  switch (o) {
    case MoveOutcome::moved: return "moved";
    case MoveOutcome::blocked: return "blocked";
    case MoveOutcome::exited: return "exited";
  }
  return "?";
}

using DirectionPriority = std::array<Direction, 4>;
inline constexpr DirectionPriority kDefaultPriority = {Direction::N, Direction::E, Direction::S, Direction::W};

inline DirectionPriority mirrored(const DirectionPriority& p) {
  return {mirrored(p[0]), mirrored(p[1]), mirrored(p[2]), mirrored(p[3])};
}

// Text grid: '#' wall, '.' floor, 'S' start, 'E' exit. Cells outside the grid
// count as walls.
class MazeWorld {
 public:
  static MazeWorld parse(std::string_view text) {
    MazeWorld m;
    std::vector<std::string> lines;
    std::stringstream ss{std::string(text)};
    std::string line;
    while (std::getline(ss, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      lines.push_back(line);
    }
    if (lines.empty()) throw Error("maze is empty");
    m.rows_ = static_cast<int>(lines.size());
    m.cols_ = static_cast<int>(lines.front().size());
    std::optional<Cell> start, exit;
    for (int r = 0; r < m.rows_; ++r) {
      if (static_cast<int>(lines[r].size()) != m.cols_) throw Error("maze is not rectangular");
      for (int c = 0; c < m.cols_; ++c) {
        const char ch = lines[r][c];
        switch (ch) {
          case '#': m.floor_.push_back(0); break;
          case '.': m.floor_.push_back(1); break;
          case 'S':
            if (start) throw Error("maze has more than one start");
            start = Cell{r, c};
            m.floor_.push_back(1);
            break;
          case 'E':
            if (exit) throw Error("maze has more than one exit");
            exit = Cell{r, c};
            m.floor_.push_back(1);
            break;
          default: throw Error(std::string("illegal maze character '") + ch + "'");
        }
      }
    }
    if (!start || !exit) throw Error("maze needs a start and an exit");
    m.start_ = *start;
    m.exit_ = *exit;
    m.finish();
    return m;
  }

  std::string to_text() const {
    std::string out;
    for (int r = 0; r < rows_; ++r) {
      for (int c = 0; c < cols_; ++c) {
        const Cell cell{r, c};
        out.push_back(cell == start_ ? 'S' : cell == exit_ ? 'E' : is_floor(cell) ? '.' : '#');
      }
      out.push_back('\n');
    }
    return out;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Cell start() const { return start_; }
  Cell exit() const { return exit_; }
  Cell current() const { return current_; }

  bool is_floor(Cell c) const {
    return c.row >= 0 && c.row < rows_ && c.col >= 0 && c.col < cols_ && floor_[index(c)] != 0;
  }

  void set_current(Cell c) {
    if (!is_floor(c)) throw Error("current cell must be floor");
    current_ = c;
  }

  void reset() { current_ = start_; }

  std::vector<Cell> floor_cells() const {
    std::vector<Cell> out;
    for (int r = 0; r < rows_; ++r) {
      for (int c = 0; c < cols_; ++c) {
        if (is_floor({r, c})) out.push_back({r, c});
      }
    }
    return out;
  }

  // Steps to the exit along floor cells, -1 when unreachable.
  int distance_to_exit(Cell c) const { return is_floor(c) ? dist_[index(c)] : -1; }

  MoveOutcome move(Direction d) {
    if (!is_radial(d)) throw Error("maze moves are N, S, E or W");
    const Cell next = step(current_, d);
    if (!is_floor(next)) return MoveOutcome::blocked;
    current_ = next;
    return current_ == exit_ ? MoveOutcome::exited : MoveOutcome::moved;
  }

  // West-east reflection; the current cell is reflected too.
  MazeWorld mirrored() const {
    MazeWorld m = *this;
    auto flip = [&](Cell c) { return Cell{c.row, cols_ - 1 - c.col}; };
    for (int r = 0; r < rows_; ++r) {
      for (int c = 0; c < cols_; ++c) m.floor_[index({r, c})] = floor_[index(flip({r, c}))];
    }
    m.start_ = flip(start_);
    m.exit_ = flip(exit_);
    m.finish();
    m.current_ = flip(current_);
    return m;
  }

  friend bool operator==(const MazeWorld& a, const MazeWorld& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.floor_ == b.floor_ && a.start_ == b.start_ &&
           a.exit_ == b.exit_ && a.current_ == b.current_;
  }

 private:
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.row * cols_ + c.col); }

  void finish() {
    if (start_ == exit_) throw Error("maze start and exit coincide");
    dist_.assign(floor_.size(), -1);
    std::deque<Cell> queue{exit_};
    dist_[index(exit_)] = 0;
    while (!queue.empty()) {
      const Cell c = queue.front();
      queue.pop_front();
      for (auto d : kRadialDirections) {
        const Cell n = step(c, d);
        if (is_floor(n) && dist_[index(n)] < 0) {
          dist_[index(n)] = dist_[index(c)] + 1;
          queue.push_back(n);
        }
      }
    }
    if (dist_[index(start_)] < 0) throw Error("maze exit is unreachable from the start");
    current_ = start_;
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint8_t> floor_;
  std::vector<int> dist_;
  Cell start_, exit_, current_;
};

// First move of a shortest path from the current cell to the exit, ties
// broken by `priority`. None at the exit.
inline std::optional<Direction> guidance_direction(const MazeWorld& maze,
                                                   const DirectionPriority& priority = kDefaultPriority) {
  const Cell here = maze.current();
  if (here == maze.exit()) return std::nullopt;
  const int d = maze.distance_to_exit(here);
  if (d < 0) throw Error("maze exit is unreachable from the current cell");
  for (auto dir : priority) {
    const Cell n = step(here, dir);
    if (maze.is_floor(n) && maze.distance_to_exit(n) == d - 1) return dir;
  }
  throw Error("no shortest-path move found");
}

enum class MazeCueFamily { static_set4_radials, wave_set3_radials };

inline MazeCueFamily maze_cue_family_from(std::string_view s) {
  if (s == "static_set4_radials" || s == "static") return MazeCueFamily::static_set4_radials;
  if (s == "wave_set3_radials" || s == "wave") return MazeCueFamily::wave_set3_radials;
  throw Error("unknown maze cue family '" + std::string(s) + "'");
}

struct GuidanceConfig {
  MazeCueFamily maze_family = MazeCueFamily::static_set4_radials;
  std::string circuit_direction_set = "set4";
};

inline Tacton maze_cue(const Catalog& catalog, const GuidanceConfig& config, Direction d) {
  if (!is_radial(d)) throw Error("maze cues cover N, S, E and W only");
  return catalog.member(config.maze_family == MazeCueFamily::static_set4_radials ? "set4" : "set3", d);
}

struct CircuitNode {
  int x = 0;  // east
  int y = 0;  // south
  CircuitComponentKind kind = CircuitComponentKind::wire;
};

// Components on grid positions joined by unit-length wire edges.
class CircuitGraph {
 public:
  CircuitGraph(std::vector<CircuitNode> nodes, std::vector<std::pair<std::size_t, std::size_t>> edges)
      : nodes_{std::move(nodes)}, edges_{std::move(edges)} {
    if (nodes_.empty()) throw Error("circuit has no nodes");
    adjacency_.assign(nodes_.size(), {});
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (nodes_[i].x == nodes_[j].x && nodes_[i].y == nodes_[j].y) throw Error("two circuit nodes share a position");
      }
    }
    for (auto [a, b] : edges_) {
      if (a >= nodes_.size() || b >= nodes_.size()) throw Error("circuit edge endpoint is not a node");
      const auto d = direction_between(a, b);
      if (!d) throw Error("circuit edges must join adjacent positions");
      auto& slot_a = adjacency_[a][slot(*d)];
      auto& slot_b = adjacency_[b][slot(opposite(*d))];
      if (slot_a || slot_b) throw Error("duplicate circuit edge");
      slot_a = b;
      slot_b = a;
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].kind == CircuitComponentKind::junction && degree(i) < 3) {
        throw Error("junction node " + std::to_string(i) + " has degree < 3");
      }
    }
    check_connected();
  }

  static CircuitGraph from_json(const nlohmann::json& j) {
    std::vector<CircuitNode> nodes;
    for (const auto& jn : j.at("nodes")) {
      nodes.push_back({jn.at("x").get<int>(), jn.at("y").get<int>(), component_from(jn.at("kind").get<std::string>())});
    }
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (const auto& je : j.at("edges")) {
      if (!je.is_array() || je.size() != 2) throw Error("circuit edge must be an index pair");
      edges.emplace_back(je[0].get<std::size_t>(), je[1].get<std::size_t>());
    }
    CircuitGraph g(std::move(nodes), std::move(edges));
    g.set_cursor(j.value("cursor", std::size_t{0}));
    return g;
  }

  static CircuitGraph parse(std::string_view text) {
    try {
      return from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
      throw Error(std::string("malformed circuit: ") + e.what());
    }
  }

  const std::vector<CircuitNode>& nodes() const { return nodes_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }
  std::size_t cursor() const { return cursor_; }

  void set_cursor(std::size_t i) {
    if (i >= nodes_.size()) throw Error("cursor outside the circuit");
    cursor_ = i;
  }

  std::size_t degree(std::size_t i) const {
    std::size_t n = 0;
    for (const auto& s : adjacency_.at(i)) n += s.has_value();
    return n;
  }

  // Directions with an incident edge, clockwise from north.
  std::vector<Direction> available_directions(std::size_t i) const {
    std::vector<Direction> out;
    for (auto d : kClockwise) {
      if (adjacency_.at(i)[slot(d)]) out.push_back(d);
    }
    return out;
  }
  std::vector<Direction> available_directions() const { return available_directions(cursor_); }

  // Cursor moves along edges only.
  bool move_cursor(Direction d) {
    if (!is_radial(d)) return false;
    const auto& next = adjacency_[cursor_][slot(d)];
    if (!next) return false;
    cursor_ = *next;
    return true;
  }

  const CircuitNode& at_cursor() const { return nodes_[cursor_]; }

 private:
  static constexpr std::array<Direction, 4> kClockwise = {Direction::N, Direction::E, Direction::S, Direction::W};

  static std::size_t slot(Direction d) {
    for (std::size_t i = 0; i < kClockwise.size(); ++i) {
      if (kClockwise[i] == d) return i;
    }
    throw Error("circuit directions are N, E, S or W");
  }

  std::optional<Direction> direction_between(std::size_t a, std::size_t b) const {
    const int dx = nodes_[b].x - nodes_[a].x;
    const int dy = nodes_[b].y - nodes_[a].y;
    for (auto d : kClockwise) {
      auto [dr, dc] = step_of(d);
      if (dr == dy && dc == dx) return d;
    }
    return std::nullopt;
  }

  void check_connected() const {
    std::vector<bool> seen(nodes_.size(), false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const auto i = stack.back();
      stack.pop_back();
      for (const auto& n : adjacency_[i]) {
        if (n && !seen[*n]) {
          seen[*n] = true;
          stack.push_back(*n);
        }
      }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) throw Error("circuit is not connected");
  }

  std::vector<CircuitNode> nodes_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  std::vector<std::array<std::optional<std::size_t>, 4>> adjacency_;
  std::size_t cursor_ = 0;
};

// Set-4 radial patterns of each available direction in clockwise order,
// durations 1 at the set tempo.
inline Tacton available_directions_tacton(const CircuitGraph& circuit, const Catalog& catalog,
                                          const GuidanceConfig& config = {}) {
  const auto dirs = circuit.available_directions();
  if (dirs.empty()) throw Error("cursor node has no incident edge");
  std::vector<Frame> frames;
  for (auto d : dirs) {
    const auto& t = catalog.member(config.circuit_direction_set, d);
    frames.push_back(Frame{t.is_static() ? t.pattern() : t.frame_at(0), 1});
  }
  return Tacton::make_dynamic(std::move(frames), kSetTempoMs);
}

inline Tacton local_tacton(const CircuitGraph& circuit, const Catalog& catalog) {
  return catalog.component(circuit.at_cursor().kind);
}

}  // namespace tacton
