#pragma once

// Catalog of directional Tacton sets, the direction/size/speed spaces and the
// circuit component Tactons, all on a 4x4 array.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tacton/core.hpp"

namespace tacton {

inline constexpr int kArraySize = 4;
inline constexpr Millis kSetTempoMs = 100;

enum class Direction { N, S, E, W, NE, NW, SE, SW };

inline constexpr std::array<Direction, 8> kAllDirections = {Direction::N,  Direction::S,  Direction::E,  Direction::W,
                                                            Direction::NE, Direction::NW, Direction::SE, Direction::SW};
inline constexpr std::array<Direction, 4> kRadialDirections = {Direction::N, Direction::S, Direction::E, Direction::W};
// Clockwise compass order starting at north.
inline constexpr std::array<Direction, 8> kCompassOrder = {Direction::N, Direction::NE, Direction::E, Direction::SE,
                                                           Direction::S, Direction::SW, Direction::W, Direction::NW};

inline bool is_radial(Direction d) {
  return d == Direction::N || d == Direction::S || d == Direction::E || d == Direction::W;
}

inline Direction opposite(Direction d) {
  switch (d) {
    case Direction::N: return Direction::S;
    case Direction::S: return Direction::N;
    case Direction::E: return Direction::W;
    case Direction::W: return Direction::E;
    case Direction::NE: return Direction::SW;
    case Direction::SW: return Direction::NE;
    case Direction::NW: return Direction::SE;
    case Direction::SE: return Direction::NW;
  }
  return d;
}

// West-east reflection.
inline Direction mirrored(Direction d) {
  switch (d) {
    case Direction::E: return Direction::W;
    case Direction::W: return Direction::E;
    case Direction::NE: return Direction::NW;
    case Direction::NW: return Direction::NE;
    case Direction::SE: return Direction::SW;
    case Direction::SW: return Direction::SE;
    default: return d;
  }
}

inline std::string to_string(Direction d) {
  switch (d) {
    case Direction::N: return "N";
    case Direction::S: return "S";
    case Direction::E: return "E";
    case Direction::W: return "W";
    case Direction::NE: return "NE";
    case Direction::NW: return "NW";
    case Direction::SE: return "SE";
    case Direction::SW: return "SW";
  }
  return "?";
}

inline std::optional<Direction> parse_direction(std::string_view s) {
  for (auto d : kAllDirections) {
    if (to_string(d) == s) return d;
  }
  return std::nullopt;
}

inline Direction direction_from(std::string_view s) {
  if (auto d = parse_direction(s)) return *d;
  throw Error("unknown direction '" + std::string(s) + "'");
}

// Grid step (row delta, column delta); north is row -1.
inline std::pair<int, int> step_of(Direction d) {
  switch (d) {
    case Direction::N: return {-1, 0};
    case Direction::S: return {1, 0};
    case Direction::E: return {0, 1};
    case Direction::W: return {0, -1};
    case Direction::NE: return {-1, 1};
    case Direction::NW: return {-1, -1};
    case Direction::SE: return {1, 1};
    case Direction::SW: return {1, -1};
  }
  return {0, 0};
}

enum class Size { small, large };
enum class Speed { slow, medium, fast };

inline std::string to_string(Size s) { return s == Size::small ? "small" : "large"; }
inline std::string to_string(Speed s) {
  switch (s) {
    case Speed::slow: return "slow";
    case Speed::medium: return "medium";
    case Speed::fast: return "fast";
  }
  return "?";
}

inline Size size_from(std::string_view s) {
  if (s == "small") return Size::small;
  if (s == "large") return Size::large;
  throw Error("unknown size '" + std::string(s) + "'");
}

inline Speed speed_from(std::string_view s) {
  if (s == "slow") return Speed::slow;
  if (s == "medium") return Speed::medium;
  if (s == "fast") return Speed::fast;
  throw Error("unknown speed '" + std::string(s) + "'");
}

// Label-to-tempo mapping, literal default slow=40, medium=200, fast=500 ms.
struct SpeedTempos {
  Millis slow = 40;
  Millis medium = 200;
  Millis fast = 500;
};

inline Millis speed_tempo(Speed speed, const SpeedTempos& tempos = {}) {
  switch (speed) {
    case Speed::slow: return tempos.slow;
    case Speed::medium: return tempos.medium;
    case Speed::fast: return tempos.fast;
  }
  return tempos.medium;
}

enum class CircuitComponentKind { battery, capacitor, lamp, resistor, junction, wire };

inline constexpr std::array<CircuitComponentKind, 6> kAllComponents = {
    CircuitComponentKind::battery,  CircuitComponentKind::capacitor, CircuitComponentKind::lamp,
    CircuitComponentKind::resistor, CircuitComponentKind::junction,  CircuitComponentKind::wire};

inline std::string to_string(CircuitComponentKind k) {
  switch (k) {
    case CircuitComponentKind::battery: return "battery";
    case CircuitComponentKind::capacitor: return "capacitor";
    case CircuitComponentKind::lamp: return "lamp";
    case CircuitComponentKind::resistor: return "resistor";
    case CircuitComponentKind::junction: return "junction";
    case CircuitComponentKind::wire: return "wire";
  }
  return "?";
}

inline CircuitComponentKind component_from(std::string_view s) {
  for (auto k : kAllComponents) {
    if (to_string(k) == s) return k;
  }
  throw Error("unknown circuit component '" + std::string(s) + "'");
}

namespace shapes {

// Every directional shape is drawn for N (radials) or NE (diagonals) and
// rotated clockwise into place: N->E->S->W and NE->SE->SW->NW.
inline int quarter_turns(Direction d) {
  switch (d) {
    case Direction::N:
    case Direction::NE: return 0;
    case Direction::E:
    case Direction::SE: return 1;
    case Direction::S:
    case Direction::SW: return 2;
    case Direction::W:
    case Direction::NW: return 3;
  }
  return 0;
}

inline Pattern oriented(Direction d, const Pattern& north, const Pattern& north_east) {
  return (is_radial(d) ? north : north_east).rotated_cw(quarter_turns(d));
}

inline Pattern grid(std::initializer_list<std::pair<int, int>> raised) {
  return Pattern(kArraySize, kArraySize, raised);
}

// Full line along the named edge; radial directions only.
inline Pattern edge_line(Direction d) {
  if (!is_radial(d)) throw Error("edge lines exist for radial directions only");
  return grid({{0, 0}, {0, 1}, {0, 2}, {0, 3}}).rotated_cw(quarter_turns(d));
}

// Corner angle whose arms run `arm` pins along the edge row and edge column.
inline Pattern corner_angle(Direction d, int arm) {
  Pattern ne(kArraySize, kArraySize);
  for (int i = 0; i < arm; ++i) {
    ne.set(0, kArraySize - 1 - i, true);
    ne.set(i, kArraySize - 1, true);
  }
  return ne.rotated_cw(quarter_turns(d));
}

// Two-pin marker: centered edge pair for radials, corner plus its inward
// neighbour for diagonals.
inline Pattern two_pin(Direction d) {
  return oriented(d, grid({{0, 1}, {0, 2}}), grid({{0, 3}, {1, 2}}));
}

inline Pattern center_square() { return grid({{1, 1}, {1, 2}, {2, 1}, {2, 2}}); }

// Line perpendicular to the direction of travel at sweep position `step`;
// radials have 4 positions, diagonals 7 (one per anti-diagonal).
inline Pattern sweep_line(Direction d, int step) {
  Pattern north(kArraySize, kArraySize);
  Pattern north_east(kArraySize, kArraySize);
  if (is_radial(d)) {
    const int row = kArraySize - 1 - step;
    for (int c = 0; c < kArraySize; ++c) north.set(row, c, true);
  } else {
    // cells with col - row == k travel toward NE as k grows from -3 to 3
    const int k = step - (kArraySize - 1);
    for (int r = 0; r < kArraySize; ++r) {
      const int c = r + k;
      if (c >= 0 && c < kArraySize) north_east.set(r, c, true);
    }
  }
  return oriented(d, north, north_east);
}

}  // namespace shapes

// Direction x size shapes of the multi-dimensional space.
inline Pattern static_directional(Direction d, Size size) {
  if (size == Size::large) {
    return is_radial(d) ? shapes::edge_line(d) : shapes::corner_angle(d, kArraySize);
  }
  return is_radial(d) ? shapes::two_pin(d) : shapes::corner_angle(d, 2);
}

inline std::vector<Frame> unit_frames(const std::vector<Pattern>& patterns) {
  std::vector<Frame> frames;
  frames.reserve(patterns.size());
  for (const auto& p : patterns) frames.push_back(Frame{p, 1});
  return frames;
}

inline const std::array<std::string, 3> kWaveSets = {"set3", "set8", "set9"};
inline const std::array<std::string, 4> kMixedSets = {"set10", "set10p", "set11", "set11p"};

namespace detail {

// Line sweep over `positions` consecutive steps ending at the leading edge,
// followed by two blank frames marking the cycle boundary.
inline Tacton sweep_wave(Direction d, int positions) {
  const int total = is_radial(d) ? kArraySize : 2 * kArraySize - 1;
  std::vector<Pattern> ps;
  for (int s = total - positions; s < total; ++s) ps.push_back(shapes::sweep_line(d, s));
  const Pattern blank(kArraySize, kArraySize);
  ps.push_back(blank);
  ps.push_back(blank);
  return Tacton::make_dynamic(unit_frames(ps), kSetTempoMs);
}

// Shape that grows while moving toward the direction; 4 shapes + 2 blanks.
inline Tacton growing_wave(Direction d) {
  std::vector<Pattern> north;
  north.push_back(shapes::grid({{3, 1}, {3, 2}}));
  north.push_back(shapes::grid({{2, 1}, {2, 2}}));
  north.push_back(shapes::grid({{1, 0}, {1, 1}, {1, 2}, {1, 3}}));
  north.push_back(shapes::grid({{0, 0}, {0, 1}, {0, 2}, {0, 3}}));
  std::vector<Pattern> north_east;
  for (int s = 1; s <= kArraySize; ++s) {
    // NE-facing angle of the s x s square anchored at the south-west corner
    Pattern p(kArraySize, kArraySize);
    const int top = kArraySize - s;
    for (int i = 0; i < s; ++i) {
      p.set(top, i, true);
      p.set(top + i, s - 1, true);
    }
    north_east.push_back(p);
  }
  std::vector<Pattern> ps;
  for (std::size_t i = 0; i < north.size(); ++i) ps.push_back(shapes::oriented(d, north[i], north_east[i]));
  ps.emplace_back(kArraySize, kArraySize);
  ps.emplace_back(kArraySize, kArraySize);
  return Tacton::make_dynamic(unit_frames(ps), kSetTempoMs);
}

}  // namespace detail

inline Tacton wave(std::string_view set_id, Direction d) {
  if (set_id == "set3") return detail::sweep_wave(d, 4);
  if (set_id == "set8") return is_radial(d) ? detail::sweep_wave(d, 4) : detail::growing_wave(d);
  if (set_id == "set9") return detail::sweep_wave(d, is_radial(d) ? 4 : 2 * kArraySize - 1);
  throw Error("unknown wave set '" + std::string(set_id) + "'");
}

// Superimpose a blinking part on a static part; the two must not share pins.
inline Tacton make_mixed(const Pattern& blinking, const Pattern& steady, Millis tempo_ms = kSetTempoMs) {
  if (blinking.overlaps(steady)) throw Error("blinking and static parts overlap");
  if (blinking.is_blank()) throw Error("blinking part is empty");
  return Tacton::make_dynamic({Frame{blinking | steady, 1}, Frame{steady, 1}}, tempo_ms);
}

inline Tacton mixed(std::string_view set_id, Direction d) {
  // set-4 shapes with diagonals spanning the whole edge
  const Pattern direction = static_directional(d, Size::large);
  if (set_id == "set10") return make_mixed(direction, shapes::center_square());
  if (set_id == "set10p") return make_mixed(shapes::center_square(), direction);
  if (set_id == "set11") return make_mixed(direction, shapes::two_pin(opposite(d)));
  if (set_id == "set11p") return make_mixed(shapes::two_pin(opposite(d)), direction);
  throw Error("unknown mixed set '" + std::string(set_id) + "'");
}

// Pairwise Hamming distance >= 2 between any two of these.
inline Tacton circuit_component(CircuitComponentKind kind) {
  switch (kind) {
    case CircuitComponentKind::battery: return Tacton::make_static(pattern_from_text("....\noooo\n.oo.\n...."));
    case CircuitComponentKind::capacitor: return Tacton::make_static(pattern_from_text("o..o\no..o\no..o\no..o"));
    case CircuitComponentKind::lamp: return Tacton::make_static(pattern_from_text(".oo.\no..o\no..o\n.oo."));
    case CircuitComponentKind::resistor: return Tacton::make_static(pattern_from_text("oooo\no..o\noooo\n...."));
    case CircuitComponentKind::junction: return Tacton::make_static(pattern_from_text(".o..\noooo\n.o..\n.o.."));
    case CircuitComponentKind::wire: return Tacton::make_static(pattern_from_text("....\noooo\n....\n...."));
  }
  throw Error("unknown circuit component");
}

inline std::string family_entry_name(std::string_view set_id, Direction d) {
  return std::string(set_id) + "/" + to_string(d);
}

struct CatalogEntry {
  std::string name;
  Tacton tacton;
  bool reconstructed = false;
};

inline nlohmann::ordered_json tacton_to_json(const std::string& name, const Tacton& t, bool reconstructed) {
  nlohmann::ordered_json j;
  j["name"] = name;
  if (t.is_static()) {
    j["kind"] = "static";
    j["pattern"] = pattern_to_text(t.pattern());
  } else {
    j["kind"] = "dynamic";
    auto frames = nlohmann::ordered_json::array();
    for (const auto& f : t.frames()) {
      nlohmann::ordered_json jf;
      jf["pattern"] = pattern_to_text(f.pattern);
      jf["duration"] = f.duration;
      frames.push_back(jf);
    }
    j["frames"] = frames;
    j["tempo_ms"] = t.tempo_ms();
    if (t.gap_ms() != 0) j["gap_ms"] = t.gap_ms();
  }
  if (reconstructed) j["reconstructed"] = true;
  return j;
}

inline Tacton tacton_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "static") return Tacton::make_static(pattern_from_text(j.at("pattern").get<std::string>()));
  if (kind == "dynamic") {
    std::vector<Frame> frames;
    for (const auto& jf : j.at("frames")) {
      frames.push_back(Frame{pattern_from_text(jf.at("pattern").get<std::string>()), jf.at("duration").get<int>()});
    }
    return Tacton::make_dynamic(std::move(frames), j.at("tempo_ms").get<Millis>(), j.value("gap_ms", Millis{0}));
  }
  throw Error("unknown Tacton kind '" + kind + "'");
}

// Named registry. Directional families are entries "<set>/<dir>", the size
// shapes are "shape/<size>/<dir>", components are "circuit/<kind>".
class Catalog {
 public:
  static inline const std::vector<std::string> kDirectionalSets = {"set1", "set2",  "set3",   "set4",  "set5",  "set6",
                                                                   "set7", "set8",  "set9",   "set10", "set10p", "set11",
                                                                   "set11p"};
  static inline const std::vector<std::string> kReconstructedSets = {"set1", "set2", "set5", "set6", "set7"};

  static Catalog builtin(SpeedTempos tempos = {}) {
    Catalog c;
    c.tempos_ = tempos;
    for (const auto& set : kDirectionalSets) {
      const bool recon = std::find(kReconstructedSets.begin(), kReconstructedSets.end(), set) != kReconstructedSets.end();
      for (auto d : kAllDirections) {
        c.put(family_entry_name(set, d), builtin_member(set, d), recon);
      }
    }
    for (auto size : {Size::large, Size::small}) {
      for (auto d : kAllDirections) {
        c.put("shape/" + to_string(size) + "/" + to_string(d), Tacton::make_static(static_directional(d, size)), false);
      }
    }
    for (auto k : kAllComponents) c.put("circuit/" + to_string(k), circuit_component(k), false);
    return c;
  }

  static Catalog from_json(const nlohmann::json& j) {
    Catalog c;
    if (j.contains("speed_tempos")) {
      const auto& st = j.at("speed_tempos");
      c.tempos_ = SpeedTempos{st.at("slow").get<Millis>(), st.at("medium").get<Millis>(), st.at("fast").get<Millis>()};
    }
    for (const auto& e : j.at("tactons")) {
      c.put(e.at("name").get<std::string>(), tacton_from_json(e), e.value("reconstructed", false));
    }
    c.check_complete();
    return c;
  }

  static Catalog parse(std::string_view text) {
    try {
      return from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
      throw Error(std::string("malformed catalog: ") + e.what());
    }
  }

  // Replace (or add) the named entries, e.g. with transcribed figure layouts.
  void apply_overrides(const nlohmann::json& j) {
    if (j.contains("speed_tempos")) {
      const auto& st = j.at("speed_tempos");
      tempos_.slow = st.value("slow", tempos_.slow);
      tempos_.medium = st.value("medium", tempos_.medium);
      tempos_.fast = st.value("fast", tempos_.fast);
    }
    if (j.contains("tactons")) {
      for (const auto& e : j.at("tactons")) {
        put(e.at("name").get<std::string>(), tacton_from_json(e), e.value("reconstructed", false));
      }
    }
    check_complete();
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["speed_tempos"] = {{"slow", tempos_.slow}, {"medium", tempos_.medium}, {"fast", tempos_.fast}};
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : entries_) arr.push_back(tacton_to_json(e.name, e.tacton, e.reconstructed));
    j["tactons"] = arr;
    return j;
  }

  std::string dump() const { return to_json().dump(2) + "\n"; }

  const std::vector<CatalogEntry>& entries() const { return entries_; }
  const SpeedTempos& speed_tempos() const { return tempos_; }

  const CatalogEntry* find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? nullptr : &entries_[it->second];
  }

  const Tacton& get(std::string_view name) const {
    if (const auto* e = find(name)) return e->tacton;
    throw Error("unknown catalog entry '" + std::string(name) + "'");
  }

  bool is_reconstructed(std::string_view name) const {
    if (const auto* e = find(name)) return e->reconstructed;
    throw Error("unknown catalog entry '" + std::string(name) + "'");
  }

  const Tacton& member(std::string_view set_id, Direction d) const { return get(family_entry_name(set_id, d)); }
  const Tacton& component(CircuitComponentKind k) const { return get("circuit/" + to_string(k)); }
  Pattern shape(Direction d, Size s) const { return get("shape/" + to_string(s) + "/" + to_string(d)).pattern(); }

  // Named entry, or a tuple of a space written "<space>/<v1>/<v2>/...".
  Tacton resolve(std::string_view name) const {
    if (const auto* e = find(name)) return e->tacton;
    const auto slash = name.find('/');
    if (slash != std::string_view::npos) {
      const auto id = std::string(name.substr(0, slash));
      if (has_space(id)) {
        ValueTuple tuple;
        std::size_t pos = slash + 1;
        while (pos <= name.size()) {
          auto end = name.find('/', pos);
          if (end == std::string_view::npos) end = name.size();
          tuple.emplace_back(name.substr(pos, end - pos));
          pos = end + 1;
        }
        return space(id).compose(tuple);
      }
    }
    throw Error("unknown Tacton '" + std::string(name) + "'");
  }

  bool has_space(std::string_view id) const {
    if (id == "s2" || id == "s3") return true;
    return std::find(kDirectionalSets.begin(), kDirectionalSets.end(), id) != kDirectionalSets.end();
  }

  std::vector<std::string> space_ids() const {
    std::vector<std::string> ids = kDirectionalSets;
    ids.emplace_back("s2");
    ids.emplace_back("s3");
    return ids;
  }

  // One-dimensional spaces for the directional sets ("dir"), and the
  // direction x size x speed spaces s2 (slow, fast) and s3 (slow, medium, fast).
  TactonSpace space(std::string_view id) const {
    std::vector<std::string> dirs;
    for (auto d : kAllDirections) dirs.push_back(to_string(d));
    if (id == "s2" || id == "s3") {
      std::vector<std::string> speeds =
          id == "s2" ? std::vector<std::string>{"slow", "fast"} : std::vector<std::string>{"slow", "medium", "fast"};
      std::map<std::pair<Direction, Size>, Pattern> patterns;
      for (auto d : kAllDirections) {
        for (auto s : {Size::small, Size::large}) patterns.emplace(std::pair{d, s}, shape(d, s));
      }
      auto tempos = tempos_;
      return TactonSpace(std::string(id),
                         {DimensionDef{"dir", dirs}, DimensionDef{"size", {"small", "large"}}, DimensionDef{"speed", speeds}},
                         [patterns, tempos](const ValueTuple& v) {
                           // rhythm fixed at 1/1
                           const auto& p = patterns.at({direction_from(v[0]), size_from(v[1])});
                           return make_blinking(p, BlinkRhythm{1, 1}, speed_tempo(speed_from(v[2]), tempos));
                         });
    }
    if (!has_space(id)) throw Error("unknown Tacton space '" + std::string(id) + "'");
    std::map<std::string, Tacton> members;
    for (auto d : kAllDirections) members.emplace(to_string(d), member(id, d));
    return TactonSpace(std::string(id), {DimensionDef{"dir", dirs}},
                       [members](const ValueTuple& v) { return members.at(v[0]); });
  }

 private:
  static Tacton builtin_member(const std::string& set, Direction d) {
    if (set == "set1") return make_blinking(shapes::two_pin(d), BlinkRhythm{1, 1}, kSetTempoMs);
    if (set == "set2") return Tacton::make_static(shapes::two_pin(d));
    if (set == "set4") return Tacton::make_static(static_directional(d, is_radial(d) ? Size::large : Size::small));
    if (set == "set5") return detail::growing_wave(d);
    if (set == "set6") {
      // shape clustered around the center, no edge anchor
      return Tacton::make_static(shapes::oriented(d, shapes::center_square() | shapes::grid({{0, 1}, {0, 2}}),
                                                  shapes::center_square() | shapes::grid({{0, 2}, {0, 3}, {1, 3}})));
    }
    if (set == "set7") {
      return Tacton::make_static(shapes::oriented(d, shapes::grid({{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 0}, {1, 3}}),
                                                  shapes::grid({{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}})));
    }
    if (std::find(kWaveSets.begin(), kWaveSets.end(), set) != kWaveSets.end()) return wave(set, d);
    return mixed(set, d);
  }

  void put(std::string name, Tacton t, bool reconstructed) {
    if (auto it = index_.find(name); it != index_.end()) {
      entries_[it->second] = CatalogEntry{std::move(name), std::move(t), reconstructed};
      return;
    }
    index_.emplace(name, entries_.size());
    entries_.push_back(CatalogEntry{std::move(name), std::move(t), reconstructed});
  }

  void check_complete() const {
    for (const auto& e : entries_) {
      if (e.tacton.rows() != kArraySize || e.tacton.cols() != kArraySize) {
        throw Error("catalog entry '" + e.name + "' is not 4x4");
      }
    }
    for (const auto& set : kDirectionalSets) {
      for (auto d : kAllDirections) {
        if (!find(family_entry_name(set, d))) throw Error("catalog family " + set + " lacks " + to_string(d));
      }
    }
    for (auto size : {Size::large, Size::small}) {
      for (auto d : kAllDirections) {
        const auto* e = find("shape/" + to_string(size) + "/" + to_string(d));
        if (!e || !e->tacton.is_static()) throw Error("catalog lacks static shape " + to_string(size) + "/" + to_string(d));
      }
    }
    for (auto k : kAllComponents) {
      const auto* e = find("circuit/" + to_string(k));
      if (!e || !e->tacton.is_static()) throw Error("catalog lacks static component " + to_string(k));
    }
  }

  SpeedTempos tempos_;
  std::vector<CatalogEntry> entries_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace tacton
