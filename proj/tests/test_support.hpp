#pragma once

// Test-only generators and independent oracles.

#include <cmath>
#include <deque>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tacton/core.hpp"
#include "tacton/guidance.hpp"

namespace testing_support {

using namespace tacton;

inline Pattern random_pattern(std::mt19937& rng, int rows, int cols) {
  Pattern p(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) p.set(r, c, rng() % 2 == 0);
  }
  return p;
}

inline Tacton random_dynamic(std::mt19937& rng, bool allow_gap = true) {
  const int frames = 1 + static_cast<int>(rng() % 9);
  std::vector<Frame> fs;
  for (int i = 0; i < frames; ++i) fs.push_back({random_pattern(rng, 4, 4), 1 + static_cast<int>(rng() % 4)});
  const Millis tempo = 1 + static_cast<Millis>(rng() % 300);
  const Millis gap = allow_gap && rng() % 4 == 0 ? static_cast<Millis>(rng() % 200) : 0;
  return Tacton::make_dynamic(fs, tempo, gap);
}

// Per-millisecond schedule of one full cycle, built directly from the frame
// list without going through frame_at.
inline std::vector<Pattern> materialize(const Tacton& t) {
  std::vector<Pattern> out;
  for (const auto& f : t.frames()) {
    for (Millis i = 0; i < f.duration * t.tempo_ms(); ++i) out.push_back(f.pattern);
  }
  for (Millis i = 0; i < t.gap_ms(); ++i) out.push_back(Pattern(t.rows(), t.cols()));
  return out;
}

// Offsets within a cycle where a frame (or the gap) begins.
inline std::set<Millis> frame_starts(const Tacton& t) {
  std::set<Millis> s;
  Millis at = 0;
  for (const auto& f : t.frames()) {
    s.insert(at);
    at += f.duration * t.tempo_ms();
  }
  if (t.gap_ms() > 0) s.insert(at);
  return s;
}

// Presentation schedule by stepping the materialized schedule one millisecond
// at a time and logging changes; the cap blanks at cap_ms.
inline std::vector<std::pair<Millis, std::uint16_t>> brute_force_presentations(const Tacton& t, Millis until,
                                                                               Millis cap_ms) {
  std::vector<std::pair<Millis, std::uint16_t>> out;
  std::vector<Pattern> schedule;
  if (t.is_dynamic()) schedule = materialize(t);
  auto at = [&](Millis x) {
    return t.is_static() ? t.pattern() : schedule[static_cast<std::size_t>(x % static_cast<Millis>(schedule.size()))];
  };
  std::optional<std::uint16_t> last;
  for (Millis x = 0; x <= until && x < cap_ms; ++x) {
    const auto m = to_bitmask(at(x));
    if (!last || *last != m) out.emplace_back(x, m);
    last = m;
  }
  if (until >= cap_ms && last && *last != 0) out.emplace_back(cap_ms, 0);
  return out;
}

// Mutual information by direct summation over the joint distribution.
inline double brute_force_it(const std::vector<std::vector<double>>& counts) {
  double n = 0;
  for (const auto& row : counts) {
    for (double c : row) n += c;
  }
  const std::size_t rows = counts.size(), cols = counts.front().size();
  double t = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (counts[i][j] == 0) continue;
      double pi = 0, pj = 0;
      for (std::size_t k = 0; k < cols; ++k) pi += counts[i][k] / n;
      for (std::size_t k = 0; k < rows; ++k) pj += counts[k][j] / n;
      const double p = counts[i][j] / n;
      t += p * std::log2(p / (pi * pj));
    }
  }
  return t;
}

// Forward BFS from `from` to the maze exit; -1 when unreachable.
inline int bfs_distance(const MazeWorld& m, Cell from) {
  std::vector<int> dist(static_cast<std::size_t>(m.rows() * m.cols()), -1);
  auto idx = [&](Cell c) { return static_cast<std::size_t>(c.row * m.cols() + c.col); };
  std::deque<Cell> q{from};
  dist[idx(from)] = 0;
  const std::pair<int, int> deltas[] = {{-1, 0}, {1, 0}, {0, 1}, {0, -1}};
  while (!q.empty()) {
    const Cell c = q.front();
    q.pop_front();
    if (c == m.exit()) return dist[idx(c)];
    for (auto [dr, dc] : deltas) {
      const Cell n{c.row + dr, c.col + dc};
      if (m.is_floor(n) && dist[idx(n)] < 0) {
        dist[idx(n)] = dist[idx(c)] + 1;
        q.push_back(n);
      }
    }
  }
  return -1;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string data_dir() { return TACTON_DATA_DIR; }

}  // namespace testing_support
