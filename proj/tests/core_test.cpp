#include <random>

#include <gtest/gtest.h>

#include "tacton/core.hpp"
#include "test_support.hpp"

using namespace tacton;

TEST(PatternText, TopRowIsNorth) {
  const auto p = pattern_from_text("oooo\n....\n....\n....");
  ASSERT_EQ(p.rows(), 4);
  ASSERT_EQ(p.cols(), 4);
  EXPECT_EQ(p.raised_count(), 4u);
  for (int c = 0; c < 4; ++c) EXPECT_TRUE(p.at(0, c));
  EXPECT_FALSE(p.at(1, 0));
}

TEST(PatternText, AllDown) {
  const auto p = pattern_from_text("....\n....\n....\n....");
  EXPECT_TRUE(p.is_blank());
  EXPECT_EQ(p.size(), 16u);
}

TEST(PatternText, Errors) {
  EXPECT_THROW(pattern_from_text("oo\noo."), Error);
  EXPECT_THROW(pattern_from_text("oox\n..."), Error);
  EXPECT_THROW(pattern_from_text(""), Error);
  EXPECT_THROW(pattern_from_text("\n"), Error);
}

TEST(PatternText, TrailingNewlineTolerated) {
  EXPECT_EQ(pattern_from_text("o.\n.o\n"), pattern_from_text("o.\n.o"));
}

TEST(PatternText, RoundTripRandomPatterns) {
  std::mt19937 rng(7);
  for (int i = 0; i < 500; ++i) {
    const auto p = testing_support::random_pattern(rng, 1 + static_cast<int>(rng() % 6), 1 + static_cast<int>(rng() % 6));
    EXPECT_EQ(pattern_from_text(pattern_to_text(p)), p);
  }
}

TEST(Bitmask, NorthWestIsBitZero) {
  const auto nw = pattern_from_text("o...\n....\n....\n....");
  EXPECT_EQ(to_bitmask(nw), 0x0001);
  const auto top = pattern_from_text("oooo\n....\n....\n....");
  EXPECT_EQ(to_bitmask(top), 0x000f);
  const auto se = pattern_from_text("....\n....\n....\n...o");
  EXPECT_EQ(to_bitmask(se), 0x8000);
  EXPECT_THROW(to_bitmask(Pattern(3, 3)), Error);
}

TEST(Bitmask, RoundTripsEveryMask) {
  for (std::uint32_t m = 0; m <= 0xffff; ++m) {
    ASSERT_EQ(to_bitmask(pattern_from_bitmask(static_cast<std::uint16_t>(m))), m);
  }
}

TEST(Pattern, RotationAndMirror) {
  const auto north = pattern_from_text("oooo\n....\n....\n....");
  const auto east = pattern_from_text("...o\n...o\n...o\n...o");
  EXPECT_EQ(north.rotated_cw(), east);
  EXPECT_EQ(north.rotated_cw(4), north);
  EXPECT_EQ(east.mirrored(), pattern_from_text("o...\no...\no...\no..."));
  EXPECT_THROW(Pattern(2, 3).rotated_cw(), Error);
}

TEST(Tacton, StaticIsTimeInvariant) {
  const auto p = pattern_from_text("o..o\n....\n....\no..o");
  const auto t = Tacton::make_static(p);
  EXPECT_EQ(t.frame_at(1'000'000'000), p);
  EXPECT_FALSE(t.cycle_length_ms().has_value());
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) EXPECT_EQ(t.frame_at(static_cast<Millis>(rng() % 10'000'000)), p);
}

TEST(Tacton, BlinkingAt150IsBlank) {
  const auto p = pattern_from_text("oooo\n....\n....\n....");
  const auto t = make_blinking(p, {1, 1}, 100);
  EXPECT_EQ(t.frame_at(0), p);
  EXPECT_EQ(t.frame_at(99), p);
  EXPECT_TRUE(t.frame_at(150).is_blank());
  EXPECT_EQ(t.frame_at(200), p);
  EXPECT_EQ(*t.cycle_length_ms(), 200);
}

TEST(Tacton, SixFrameWaveBoundaries) {
  std::vector<Frame> frames;
  for (int i = 0; i < 6; ++i) frames.push_back({pattern_from_bitmask(static_cast<std::uint16_t>(1u << i)), 1});
  const auto t = Tacton::make_dynamic(frames, 100);
  EXPECT_EQ(*t.cycle_length_ms(), 600);
  EXPECT_EQ(t.frame_at(599), frames[5].pattern);
  EXPECT_EQ(t.frame_at(600), frames[0].pattern);
  EXPECT_EQ(t.frame_at(100), frames[1].pattern);  // boundary belongs to the later frame
}

TEST(Tacton, CycleLengthBlink31At40) {
  const auto p = pattern_from_text("o.\n..");
  const auto t = make_blinking(p, {3, 1}, 40);
  EXPECT_EQ(*t.cycle_length_ms(), 160);
  // smallest period of the per-ms schedule, found by brute force
  const auto schedule = testing_support::materialize(t);
  Millis period = 0;
  for (Millis cand = 1; cand <= 1000; ++cand) {
    bool ok = true;
    for (Millis x = 0; x < 1000 && ok; ++x) ok = t.frame_at(x) == t.frame_at(x + cand);
    if (ok) {
      period = cand;
      break;
    }
  }
  EXPECT_EQ(period, 160);
  EXPECT_EQ(static_cast<Millis>(schedule.size()), 160);
}

TEST(Tacton, MakeBlinkingErrors) {
  EXPECT_THROW(make_blinking(Pattern(4, 4), {1, 1}, 100), Error);
  EXPECT_THROW(make_blinking(pattern_from_text("o"), {0, 1}, 100), Error);
  const auto t = make_blinking(pattern_from_text("o."), {1, 1}, 40);
  EXPECT_EQ(*t.cycle_length_ms(), 80);
}

TEST(Tacton, ConstructionErrors) {
  EXPECT_THROW(Tacton::make_dynamic({}, 100), Error);
  EXPECT_THROW(Tacton::make_dynamic({{Pattern(2, 2), 1}}, 0), Error);
  EXPECT_THROW(Tacton::make_dynamic({{Pattern(2, 2), 0}}, 100), Error);
  EXPECT_THROW(Tacton::make_dynamic({{Pattern(2, 2), 1}, {Pattern(2, 3), 1}}, 100), Error);
  EXPECT_THROW(Tacton::make_static(Pattern{}), Error);
}

TEST(Tacton, FrameAtMatchesMaterializedSchedule) {
  std::mt19937 rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto t = testing_support::random_dynamic(rng);
    const auto schedule = testing_support::materialize(t);
    ASSERT_EQ(static_cast<Millis>(schedule.size()), *t.cycle_length_ms());
    for (int k = 0; k < 50; ++k) {
      const Millis x = static_cast<Millis>(rng() % 100'000);
      ASSERT_EQ(t.frame_at(x), schedule[static_cast<std::size_t>(x % *t.cycle_length_ms())]);
    }
  }
}

TEST(Tacton, NextBoundaryMatchesBruteForce) {
  std::mt19937 rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto t = testing_support::random_dynamic(rng);
    const auto schedule = testing_support::materialize(t);
    const auto starts = testing_support::frame_starts(t);
    for (int k = 0; k < 30; ++k) {
      const Millis x = static_cast<Millis>(rng() % 5'000);
      Millis expect = x + 1;
      while (!starts.count(expect % *t.cycle_length_ms())) ++expect;
      ASSERT_EQ(*t.next_boundary_after(x), expect);
    }
  }
  EXPECT_FALSE(Tacton::make_static(Pattern(1, 1)).next_boundary_after(5).has_value());
}

TEST(Tacton, CycleGapShowsBlank) {
  const auto p = pattern_from_text("oo");
  const auto t = Tacton::make_dynamic({{p, 1}}, 100, 50);
  EXPECT_EQ(*t.cycle_length_ms(), 150);
  EXPECT_EQ(t.frame_at(99), p);
  EXPECT_TRUE(t.frame_at(100).is_blank());
  EXPECT_EQ(t.frame_at(150), p);
  EXPECT_EQ(*t.next_boundary_after(100), 150);
}

TEST(TactonSpace, EnumeratesProductAndComposes) {
  const TactonSpace space("toy", {{"a", {"x", "y"}}, {"b", {"1", "2", "3"}}}, [](const ValueTuple& v) {
    Pattern p(2, 3);
    p.set(v[0] == "x" ? 0 : 1, std::stoi(v[1]) - 1, true);
    return Tacton::make_static(p);
  });
  EXPECT_EQ(space.cardinality(), 6u);
  const auto all = space.enumerate();
  ASSERT_EQ(all.size(), 6u);
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(space.index_of(all[i]), i);
  EXPECT_EQ(all[1], (ValueTuple{"x", "2"}));
  EXPECT_THROW(space.compose({"x", "4"}), Error);
  EXPECT_THROW(space.compose({"x"}), Error);
}

TEST(TupleFormat, RoundTrip) {
  const std::vector<DimensionDef> dims{{"dir", {"N"}}, {"size", {"large"}}, {"speed", {"medium"}}};
  const ValueTuple v{"N", "large", "medium"};
  EXPECT_EQ(format_tuple(dims, v), "dir=N;size=large;speed=medium");
  EXPECT_EQ(parse_tuple(dims, "dir=N;size=large;speed=medium"), v);
  EXPECT_THROW(parse_tuple(dims, "size=large;dir=N;speed=medium"), Error);
  EXPECT_THROW(parse_tuple(dims, "dir=N;size=large;speed=medium;x=1"), Error);
}
