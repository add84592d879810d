#pragma once

// Pin-array Tacton model: patterns, frames, static and dynamic Tactons,
// timeline evaluation and multi-dimensional composition.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace tacton {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Millis = std::int64_t;

// Binary pin grid. Row 0 is the north edge of the array, column 0 the west.
class Pattern {
 public:
  Pattern() = default;

  Pattern(int rows, int cols) : rows_{rows}, cols_{cols} {
    if (rows <= 0 || cols <= 0) {
      throw Error("pattern dimensions must be positive");
    }
    pins_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0);
  }

  Pattern(int rows, int cols, std::initializer_list<std::pair<int, int>> raised) : Pattern(rows, cols) {
    for (auto [r, c] : raised) {
      set(r, c, true);
    }
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return pins_.size(); }

  bool at(int r, int c) const { return pins_[index(r, c)] != 0; }
  void set(int r, int c, bool up) { pins_[index(r, c)] = up ? 1 : 0; }

  bool contains(int r, int c) const { return r >= 0 && r < rows_ && c >= 0 && c < cols_; }

  std::size_t raised_count() const {
    return static_cast<std::size_t>(std::count(pins_.begin(), pins_.end(), std::uint8_t{1}));
  }
  bool is_blank() const { return raised_count() == 0; }

  bool same_shape(const Pattern& other) const { return rows_ == other.rows_ && cols_ == other.cols_; }

  bool overlaps(const Pattern& other) const {
    require_same_shape(other);
    for (std::size_t i = 0; i < pins_.size(); ++i) {
      if (pins_[i] && other.pins_[i]) return true;
    }
    return false;
  }

  Pattern operator|(const Pattern& other) const {
    require_same_shape(other);
    Pattern out = *this;
    for (std::size_t i = 0; i < pins_.size(); ++i) {
      out.pins_[i] = pins_[i] | other.pins_[i];
    }
    return out;
  }

  std::size_t hamming(const Pattern& other) const {
    require_same_shape(other);
    std::size_t d = 0;
    for (std::size_t i = 0; i < pins_.size(); ++i) {
      d += pins_[i] != other.pins_[i];
    }
    return d;
  }

  // Quarter turn clockwise; only defined for square arrays.
  Pattern rotated_cw() const {
    if (rows_ != cols_) throw Error("rotation requires a square pattern");
    Pattern out(rows_, cols_);
    for (int r = 0; r < rows_; ++r) {
      for (int c = 0; c < cols_; ++c) {
        out.set(r, c, at(rows_ - 1 - c, r));
      }
    }
    return out;
  }

  Pattern rotated_cw(int quarter_turns) const {
    Pattern out = *this;
    for (int i = 0; i < ((quarter_turns % 4) + 4) % 4; ++i) out = out.rotated_cw();
    return out;
  }

  // West-east reflection.
  Pattern mirrored() const {
    Pattern out(rows_, cols_);
    for (int r = 0; r < rows_; ++r) {
      for (int c = 0; c < cols_; ++c) out.set(r, cols_ - 1 - c, at(r, c));
    }
    return out;
  }

  friend bool operator==(const Pattern&, const Pattern&) = default;

 private:
  std::size_t index(int r, int c) const {
    if (!contains(r, c)) throw Error("pin (" + std::to_string(r) + "," + std::to_string(c) + ") out of range");
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c);
  }

  void require_same_shape(const Pattern& other) const {
    if (!same_shape(other)) throw Error("pattern dimensions differ");
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint8_t> pins_;
};

inline Pattern blank_like(const Pattern& p) { return Pattern(p.rows(), p.cols()); }

// Text format: one line per row, 'o' raised and '.' lowered, north row first.
inline Pattern pattern_from_text(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  // one trailing newline is tolerated
  if (lines.size() > 1 && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines.front().empty()) throw Error("pattern text is empty");

  const auto cols = lines.front().size();
  Pattern p(static_cast<int>(lines.size()), static_cast<int>(cols));
  for (std::size_t r = 0; r < lines.size(); ++r) {
    if (lines[r].size() != cols) {
      throw Error("pattern text has ragged lines (line " + std::to_string(r) + ")");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      const char ch = lines[r][c];
      if (ch != 'o' && ch != '.') {
        throw Error(std::string("illegal pattern character '") + ch + "'");
      }
      p.set(static_cast<int>(r), static_cast<int>(c), ch == 'o');
    }
  }
  return p;
}

inline std::string pattern_to_text(const Pattern& p) {
  std::string out;
  out.reserve(p.size() + static_cast<std::size_t>(p.rows()));
  for (int r = 0; r < p.rows(); ++r) {
    if (r) out.push_back('\n');
    for (int c = 0; c < p.cols(); ++c) out.push_back(p.at(r, c) ? 'o' : '.');
  }
  return out;
}

// Wire encoding of a 4x4 array: bit k is pin (k / 4, k % 4), bit 0 the north-west pin.
inline std::uint16_t to_bitmask(const Pattern& p) {
  if (p.rows() != 4 || p.cols() != 4) throw Error("bitmask encoding needs a 4x4 pattern");
  std::uint16_t mask = 0;
  for (int k = 0; k < 16; ++k) {
    if (p.at(k / 4, k % 4)) mask = static_cast<std::uint16_t>(mask | (1u << k));
  }
  return mask;
}

inline Pattern pattern_from_bitmask(std::uint16_t mask) {
  Pattern p(4, 4);
  for (int k = 0; k < 16; ++k) p.set(k / 4, k % 4, ((mask >> k) & 1u) != 0);
  return p;
}

struct Frame {
  Pattern pattern;
  int duration = 1;  // unitless; displayed for duration x tempo

  friend bool operator==(const Frame&, const Frame&) = default;
};

class Tacton {
 public:
  static Tacton make_static(Pattern pattern) {
    if (pattern.size() == 0) throw Error("static Tacton needs a pattern");
    Tacton t;
    t.body_ = std::move(pattern);
    return t;
  }

  // gap_ms inserts an all-down pause after each cycle; 0 repeats immediately.
  static Tacton make_dynamic(std::vector<Frame> frames, Millis tempo_ms, Millis gap_ms = 0) {
    if (frames.empty()) throw Error("dynamic Tacton needs at least one frame");
    if (tempo_ms <= 0) throw Error("tempo must be positive");
    if (gap_ms < 0) throw Error("cycle gap must be non-negative");
    for (const auto& f : frames) {
      if (f.duration < 1) throw Error("frame duration must be >= 1");
      if (!f.pattern.same_shape(frames.front().pattern) || f.pattern.size() == 0) {
        throw Error("frames of one Tacton must share dimensions");
      }
    }
    Tacton t;
    t.body_ = Dynamic{std::move(frames), tempo_ms, gap_ms};
    return t;
  }

  bool is_static() const { return std::holds_alternative<Pattern>(body_); }
  bool is_dynamic() const { return !is_static(); }

  const Pattern& pattern() const { return std::get<Pattern>(body_); }
  const std::vector<Frame>& frames() const { return dynamic().frames; }
  Millis tempo_ms() const { return dynamic().tempo_ms; }
  Millis gap_ms() const { return dynamic().gap_ms; }

  int rows() const { return is_static() ? pattern().rows() : frames().front().pattern.rows(); }
  int cols() const { return is_static() ? pattern().cols() : frames().front().pattern.cols(); }

  std::optional<Millis> cycle_length_ms() const {
    if (is_static()) return std::nullopt;
    const auto& d = dynamic();
    Millis units = 0;
    for (const auto& f : d.frames) units += f.duration;
    return units * d.tempo_ms + d.gap_ms;
  }

  // Pattern shown at t_ms after onset. Frame intervals are half-open, so a
  // boundary instant belongs to the later frame.
  Pattern frame_at(Millis t_ms) const {
    if (is_static()) return pattern();
    const auto& d = dynamic();
    Millis t = t_ms % *cycle_length_ms();
    if (t < 0) t += *cycle_length_ms();
    for (const auto& f : d.frames) {
      const Millis shown = f.duration * d.tempo_ms;
      if (t < shown) return f.pattern;
      t -= shown;
    }
    return blank_like(d.frames.front().pattern);
  }

  // Smallest instant strictly after t_ms at which the frame schedule moves to
  // another frame (or into/out of the gap). None for static Tactons.
  std::optional<Millis> next_boundary_after(Millis t_ms) const {
    if (is_static()) return std::nullopt;
    const auto& d = dynamic();
    const Millis cycle = *cycle_length_ms();
    Millis base = t_ms - (((t_ms % cycle) + cycle) % cycle);
    Millis edge = base;
    for (const auto& f : d.frames) {
      edge += f.duration * d.tempo_ms;
      if (edge > t_ms) return edge;
    }
    return base + cycle;  // end of the gap
  }

  friend bool operator==(const Tacton&, const Tacton&) = default;

 private:
  struct Dynamic {
    std::vector<Frame> frames;
    Millis tempo_ms = 100;
    Millis gap_ms = 0;
    friend bool operator==(const Dynamic&, const Dynamic&) = default;
  };

  const Dynamic& dynamic() const {
    if (!is_dynamic()) throw Error("static Tacton has no frames or tempo");
    return std::get<Dynamic>(body_);
  }

  std::variant<Pattern, Dynamic> body_;
};

struct BlinkRhythm {
  int d_up = 1;    // units the pattern is shown
  int d_down = 1;  // units the blank is shown
};

inline Tacton make_blinking(const Pattern& pattern, BlinkRhythm rhythm, Millis tempo_ms) {
  if (pattern.is_blank()) throw Error("blinking an all-down pattern is invisible");
  if (rhythm.d_up < 1 || rhythm.d_down < 1) throw Error("blink durations must be >= 1");
  return Tacton::make_dynamic({Frame{pattern, rhythm.d_up}, Frame{blank_like(pattern), rhythm.d_down}}, tempo_ms);
}

// One value per dimension, in dimension order.
using ValueTuple = std::vector<std::string>;

struct DimensionDef {
  std::string name;
  std::vector<std::string> values;

  std::optional<std::size_t> index_of(std::string_view value) const {
    auto it = std::find(values.begin(), values.end(), value);
    if (it == values.end()) return std::nullopt;
    return static_cast<std::size_t>(it - values.begin());
  }
};

// Ordered dimensions plus an encoder from value tuples to Tactons.
class TactonSpace {
 public:
  using Encoder = std::function<Tacton(const ValueTuple&)>;

  TactonSpace() = default;
  TactonSpace(std::string id, std::vector<DimensionDef> dims, Encoder encoder)
      : id_{std::move(id)}, dims_{std::move(dims)}, encoder_{std::move(encoder)} {
    if (dims_.empty()) throw Error("a Tacton space needs at least one dimension");
    for (const auto& d : dims_) {
      if (d.values.empty()) throw Error("dimension '" + d.name + "' has no values");
    }
  }

  const std::string& id() const { return id_; }
  const std::vector<DimensionDef>& dimensions() const { return dims_; }

  std::size_t cardinality() const {
    std::size_t n = 1;
    for (const auto& d : dims_) n *= d.values.size();
    return n;
  }

  void validate(const ValueTuple& tuple) const {
    if (tuple.size() != dims_.size()) {
      throw Error("expected " + std::to_string(dims_.size()) + " dimension values, got " + std::to_string(tuple.size()));
    }
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      if (!dims_[i].index_of(tuple[i])) {
        throw Error("unknown value '" + tuple[i] + "' for dimension '" + dims_[i].name + "'");
      }
    }
  }

  Tacton compose(const ValueTuple& tuple) const {
    validate(tuple);
    return encoder_(tuple);
  }

  // Mixed-radix order, last dimension fastest.
  ValueTuple tuple_at(std::size_t index) const {
    if (index >= cardinality()) throw Error("tuple index out of range");
    ValueTuple t(dims_.size());
    for (std::size_t i = dims_.size(); i-- > 0;) {
      const auto n = dims_[i].values.size();
      t[i] = dims_[i].values[index % n];
      index /= n;
    }
    return t;
  }

  std::size_t index_of(const ValueTuple& tuple) const {
    validate(tuple);
    std::size_t index = 0;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      index = index * dims_[i].values.size() + *dims_[i].index_of(tuple[i]);
    }
    return index;
  }

  std::vector<ValueTuple> enumerate() const {
    std::vector<ValueTuple> out;
    out.reserve(cardinality());
    for (std::size_t i = 0; i < cardinality(); ++i) out.push_back(tuple_at(i));
    return out;
  }

 private:
  std::string id_;
  std::vector<DimensionDef> dims_;
  Encoder encoder_;
};

// "dir=N;size=large;speed=medium"
inline std::string format_tuple(const std::vector<DimensionDef>& dims, const ValueTuple& tuple) {
  if (dims.size() != tuple.size()) throw Error("tuple does not match dimensions");
  std::string out;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) out.push_back(';');
    out += dims[i].name + "=" + tuple[i];
  }
  return out;
}

inline ValueTuple parse_tuple(const std::vector<DimensionDef>& dims, std::string_view text) {
  ValueTuple out;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    auto end = text.find(';', pos);
    if (end == std::string_view::npos) end = text.size();
    auto item = text.substr(pos, end - pos);
    auto eq = item.find('=');
    if (eq == std::string_view::npos || item.substr(0, eq) != dims[i].name) {
      throw Error("expected '" + dims[i].name + "=' in tuple '" + std::string(text) + "'");
    }
    out.emplace_back(item.substr(eq + 1));
    pos = end + 1;
  }
  if (pos < text.size()) throw Error("trailing fields in tuple '" + std::string(text) + "'");
  return out;
}

}  // namespace tacton
