#include <set>

#include <gtest/gtest.h>

#include "tacton/library.hpp"

using namespace tacton;

namespace {

const Catalog& catalog() {
  static const Catalog c = Catalog::builtin();
  return c;
}

std::size_t frame_count(const Tacton& t) { return t.is_static() ? 1 : t.frames().size(); }

}  // namespace

TEST(Direction, OppositeIsInvolution) {
  for (auto d : kAllDirections) {
    EXPECT_EQ(opposite(opposite(d)), d);
    EXPECT_NE(opposite(d), d);
    EXPECT_EQ(is_radial(d), is_radial(opposite(d)));
  }
  EXPECT_EQ(opposite(Direction::NE), Direction::SW);
  EXPECT_EQ(opposite(Direction::NW), Direction::SE);
  EXPECT_EQ(direction_from("SW"), Direction::SW);
  EXPECT_THROW(direction_from("up"), Error);
}

TEST(StaticDirectional, LargeNorthIsTopRow) {
  EXPECT_EQ(static_directional(Direction::N, Size::large), pattern_from_text("oooo\n....\n....\n...."));
}

TEST(StaticDirectional, LargeNorthEastIsSevenPinAngle) {
  const auto p = static_directional(Direction::NE, Size::large);
  EXPECT_EQ(p.raised_count(), 7u);
  EXPECT_EQ(p, pattern_from_text("oooo\n...o\n...o\n...o"));
}

TEST(StaticDirectional, SmallShapes) {
  EXPECT_EQ(static_directional(Direction::NE, Size::small), pattern_from_text("..oo\n...o\n....\n...."));
  EXPECT_EQ(static_directional(Direction::W, Size::small), pattern_from_text("....\no...\no...\n...."));
  for (auto d : kAllDirections) {
    EXPECT_EQ(static_directional(d, Size::small).raised_count(), is_radial(d) ? 2u : 3u);
    EXPECT_EQ(static_directional(d, Size::large).raised_count(), is_radial(d) ? 4u : 7u);
  }
}

TEST(StaticDirectional, OppositeIsHalfTurn) {
  for (const auto& set : {"set2", "set4", "set6", "set7"}) {
    for (auto d : kAllDirections) {
      EXPECT_EQ(catalog().member(set, d).pattern(), catalog().member(set, opposite(d)).pattern().rotated_cw(2))
          << set << " " << to_string(d);
    }
  }
  for (auto size : {Size::small, Size::large}) {
    for (auto d : kAllDirections) {
      EXPECT_EQ(static_directional(d, size), static_directional(opposite(d), size).rotated_cw(2));
    }
  }
}

TEST(Wave, Set9FrameCounts) {
  EXPECT_EQ(*wave("set9", Direction::E).cycle_length_ms(), 600);
  EXPECT_EQ(*wave("set9", Direction::NE).cycle_length_ms(), 900);
  for (auto d : kAllDirections) {
    EXPECT_EQ(wave("set9", d).frames().size(), is_radial(d) ? 6u : 9u);
  }
}

TEST(Wave, Set3EqualFrameCounts) {
  for (auto d : kAllDirections) {
    EXPECT_EQ(wave("set3", d).frames().size(), wave("set3", Direction::N).frames().size());
  }
  EXPECT_EQ(wave("set3", Direction::N).frames().size(), wave("set3", Direction::NE).frames().size());
}

TEST(Wave, Set8CombinesSet3RadialsAndSet5Diagonals) {
  for (auto d : kAllDirections) {
    const auto& expected = is_radial(d) ? catalog().member("set3", d) : catalog().member("set5", d);
    EXPECT_EQ(wave("set8", d), expected);
  }
  EXPECT_EQ(*catalog().member("set5", Direction::N).cycle_length_ms(), 600);
}

TEST(Wave, NorthLineSweepsTowardNorth) {
  const auto t = wave("set9", Direction::N);
  EXPECT_EQ(t.frames()[0].pattern, pattern_from_text("....\n....\n....\noooo"));
  EXPECT_EQ(t.frames()[3].pattern, pattern_from_text("oooo\n....\n....\n...."));
  EXPECT_TRUE(t.frames()[4].pattern.is_blank());
  const auto ne = wave("set9", Direction::NE);
  EXPECT_EQ(ne.frames()[0].pattern, pattern_from_text("....\n....\n....\no..."));
  EXPECT_EQ(ne.frames()[6].pattern, pattern_from_text("...o\n....\n....\n...."));
  EXPECT_THROW(wave("set4", Direction::N), Error);
}

TEST(Mixed, Set11PrimeNorth) {
  const auto t = mixed("set11p", Direction::N);
  ASSERT_EQ(t.frames().size(), 2u);
  EXPECT_EQ(t.tempo_ms(), 100);
  // static top row, blinking south marker
  EXPECT_EQ(t.frames()[0].pattern, pattern_from_text("oooo\n....\n....\n.oo."));
  EXPECT_EQ(t.frames()[1].pattern, pattern_from_text("oooo\n....\n....\n...."));
}

TEST(Mixed, Set10West) {
  const auto t = mixed("set10", Direction::W);
  EXPECT_EQ(t.frames()[0].pattern, pattern_from_text("o...\nooo.\nooo.\no..."));
  EXPECT_EQ(t.frames()[1].pattern, pattern_from_text("....\n.oo.\n.oo.\n...."));
}

TEST(Mixed, UnionIsDirectionPlusCenter) {
  for (auto d : kAllDirections) {
    const auto t = mixed("set10", d);
    Pattern all(4, 4);
    for (const auto& f : t.frames()) all = all | f.pattern;
    EXPECT_EQ(all, static_directional(d, Size::large) | shapes::center_square());
  }
}

TEST(Mixed, OverlapRejected) {
  EXPECT_THROW(make_mixed(pattern_from_text("oo\n.."), pattern_from_text("o.\n..")), Error);
  EXPECT_THROW(mixed("set12", Direction::N), Error);
}

TEST(SpeedTempo, LiteralMapping) {
  EXPECT_EQ(speed_tempo(Speed::slow), 40);
  EXPECT_EQ(speed_tempo(Speed::medium), 200);
  EXPECT_EQ(speed_tempo(Speed::fast), 500);
  EXPECT_EQ(speed_tempo(Speed::slow, SpeedTempos{500, 200, 40}), 500);
}

TEST(CircuitComponents, DistinctAndSeparated) {
  std::vector<Pattern> ps;
  for (auto k : kAllComponents) {
    const auto t = circuit_component(k);
    ASSERT_TRUE(t.is_static());
    ps.push_back(t.pattern());
  }
  ASSERT_EQ(ps.size(), 6u);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      EXPECT_GE(ps[i].hamming(ps[j]), 2u) << to_string(kAllComponents[i]) << " vs " << to_string(kAllComponents[j]);
    }
  }
  EXPECT_NE(circuit_component(CircuitComponentKind::wire), circuit_component(CircuitComponentKind::junction));
}

TEST(Catalog, FamiliesInjectiveAndTotal) {
  for (const auto& set : Catalog::kDirectionalSets) {
    std::vector<Tacton> seen;
    for (auto d : kAllDirections) {
      const auto& t = catalog().member(set, d);
      for (const auto& s : seen) EXPECT_FALSE(s == t) << set << " " << to_string(d);
      seen.push_back(t);
    }
  }
}

TEST(Catalog, SetTactonsUseTempo100) {
  for (const auto& set : Catalog::kDirectionalSets) {
    for (auto d : kAllDirections) {
      const auto& t = catalog().member(set, d);
      if (t.is_dynamic()) {
        EXPECT_EQ(t.tempo_ms(), 100) << set;
      }
    }
  }
}

TEST(Catalog, ReconstructedFlags) {
  EXPECT_TRUE(catalog().is_reconstructed("set1/N"));
  EXPECT_TRUE(catalog().is_reconstructed("set7/SW"));
  EXPECT_FALSE(catalog().is_reconstructed("set4/N"));
  EXPECT_FALSE(catalog().is_reconstructed("set11p/N"));
}

TEST(Catalog, SpacesHaveExpectedCardinality) {
  const auto s2 = catalog().space("s2");
  const auto s3 = catalog().space("s3");
  EXPECT_EQ(s2.cardinality(), 32u);
  EXPECT_EQ(s3.cardinality(), 48u);
  for (const auto* space : {&s2, &s3}) {
    std::vector<Tacton> all;
    for (const auto& v : space->enumerate()) all.push_back(space->compose(v));
    EXPECT_EQ(all.size(), space->cardinality());
    for (std::size_t i = 0; i < all.size(); ++i) {
      for (std::size_t j = i + 1; j < all.size(); ++j) ASSERT_FALSE(all[i] == all[j]);
    }
  }
  EXPECT_EQ(catalog().space("set4").cardinality(), 8u);
  EXPECT_THROW(catalog().space("s4"), Error);
}

TEST(Catalog, ComposeNorthLargeMedium) {
  const auto t = catalog().space("s3").compose({"N", "large", "medium"});
  EXPECT_EQ(t, make_blinking(static_directional(Direction::N, Size::large), {1, 1}, 200));
  EXPECT_THROW(catalog().space("s3").compose({"N", "large", "turbo"}), Error);
  EXPECT_EQ(catalog().resolve("s3/N/large/medium"), t);
}

TEST(Catalog, DumpLoadDumpIsBitIdentical) {
  const auto text = catalog().dump();
  const auto reloaded = Catalog::parse(text);
  EXPECT_EQ(reloaded.dump(), text);
  for (const auto& e : catalog().entries()) {
    EXPECT_EQ(reloaded.get(e.name), e.tacton) << e.name;
    EXPECT_EQ(reloaded.is_reconstructed(e.name), e.reconstructed);
  }
}

TEST(Catalog, OverridesReplaceEntries) {
  auto c = Catalog::builtin();
  const auto override_json = nlohmann::json::parse(R"({
    "speed_tempos": {"slow": 500, "fast": 40},
    "tactons": [{"name": "shape/large/N", "kind": "static", "pattern": "oooo\noooo\n....\n...."}]
  })");
  c.apply_overrides(override_json);
  EXPECT_EQ(c.shape(Direction::N, Size::large).raised_count(), 8u);
  const auto t = c.space("s3").compose({"N", "large", "slow"});
  EXPECT_EQ(t.tempo_ms(), 500);
  EXPECT_EQ(t.frames().front().pattern.raised_count(), 8u);
}

TEST(Catalog, IncompleteOrMalformedFilesRejected) {
  EXPECT_THROW(Catalog::parse("{\"tactons\": []}"), Error);
  EXPECT_THROW(Catalog::parse("not json"), Error);
  EXPECT_THROW(catalog().get("set99/N"), Error);
  EXPECT_THROW(catalog().resolve("nope"), Error);
}

TEST(Catalog, FrameCountHelper) { EXPECT_EQ(frame_count(catalog().member("set4", Direction::N)), 1u); }
