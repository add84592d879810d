#pragma once

// Playback of Tactons onto an abstract pin-array device under an injectable
// clock, with a stimulus cap and an event queue.

#include <chrono>
#include <cstdio>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "tacton/core.hpp"

namespace tacton {

inline constexpr Millis kDefaultCapMs = 10'000;

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Millis now_ms() const = 0;
};

class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(Millis start = 0) : now_{start} {}
  Millis now_ms() const override { return now_; }
  void advance(Millis ms) {
    if (ms < 0) throw Error("virtual clock cannot run backwards");
    now_ += ms;
  }
  void set(Millis t) {
    if (t < now_) throw Error("virtual clock cannot run backwards");
    now_ = t;
  }

 private:
  Millis now_;
};

class SteadyClock final : public Clock {
 public:
  Millis now_ms() const override {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
  }
};

// Sink for pin states. `t_ms` is the scheduled instant relative to onset.
class PinArrayDevice {
 public:
  virtual ~PinArrayDevice() = default;
  virtual void present(Millis t_ms, const Pattern& pattern) = 0;
};

struct Presentation {
  Millis t_ms = 0;
  std::uint16_t mask = 0;
  friend bool operator==(const Presentation&, const Presentation&) = default;
};

inline std::string format_presentation(const Presentation& p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld\t0x%04x", static_cast<long long>(p.t_ms), static_cast<unsigned>(p.mask));
  return buf;
}

// Dump format: one "t_ms<TAB>0xhhhh" line per presentation.
inline std::string format_schedule(const std::vector<Presentation>& log) {
  std::string out;
  for (const auto& p : log) {
    out += format_presentation(p);
    out.push_back('\n');
  }
  return out;
}

class VirtualRecorder final : public PinArrayDevice {
 public:
  void present(Millis t_ms, const Pattern& pattern) override { log_.push_back({t_ms, to_bitmask(pattern)}); }
  const std::vector<Presentation>& log() const { return log_; }
  std::string dump() const { return format_schedule(log_); }

 private:
  std::vector<Presentation> log_;
};

class TerminalRenderer final : public PinArrayDevice {
 public:
  explicit TerminalRenderer(std::ostream& os) : os_{os} {}
  void present(Millis t_ms, const Pattern& pattern) override {
    os_ << "t=" << t_ms << " ms\n" << pattern_to_text(pattern) << "\n\n";
  }

 private:
  std::ostream& os_;
};

enum class PlaybackState { idle, playing, stopped, capped };

inline std::string to_string(PlaybackState s) {
  switch (s) {
    case PlaybackState::idle: return "idle";
    case PlaybackState::playing: return "playing";
    case PlaybackState::stopped: return "stopped";
    case PlaybackState::capped: return "capped";
  }
  return "?";
}

struct PlaybackEvent {
  enum class Kind { presented, stopped, capped, error };
  Kind kind;
  Millis t_ms = 0;
  std::uint16_t mask = 0;
  std::string message;
};

// Thread-safe queue for handing playback events to another thread of control.
class EventQueue {
 public:
  void push(PlaybackEvent e) {
    std::lock_guard lock(mutex_);
    events_.push_back(std::move(e));
  }
  std::vector<PlaybackEvent> drain() {
    std::lock_guard lock(mutex_);
    std::vector<PlaybackEvent> out(std::make_move_iterator(events_.begin()), std::make_move_iterator(events_.end()));
    events_.clear();
    return out;
  }

 private:
  std::mutex mutex_;
  std::deque<PlaybackEvent> events_;
};

// Single-owner playback of one Tacton on one device. `advance` brings the
// device up to the clock; every pattern change up to now is presented at its
// exact scheduled instant.
class PlaybackSession {
 public:
  PlaybackSession(Tacton tacton, PinArrayDevice& device, const Clock& clock, Millis cap_ms = kDefaultCapMs)
      : tacton_{std::move(tacton)}, device_{&device}, clock_{&clock}, cap_ms_{cap_ms} {
    if (cap_ms_ <= 0) throw Error("stimulus cap must be positive");
  }

  PlaybackSession(const PlaybackSession&) = delete;
  PlaybackSession& operator=(const PlaybackSession&) = delete;
  PlaybackSession(PlaybackSession&&) = default;
  PlaybackSession& operator=(PlaybackSession&&) = default;

  void start() {
    if (state_ != PlaybackState::idle) throw Error("playback already started");
    start_ = clock_->now_ms();
    state_ = PlaybackState::playing;
    emit(0, tacton_.frame_at(0));
    cursor_ = 0;
    advance();
  }

  void advance() {
    if (state_ != PlaybackState::playing) return;
    const Millis elapsed = clock_->now_ms() - start_;
    while (state_ == PlaybackState::playing) {
      auto next = tacton_.next_boundary_after(cursor_);
      if (!next || *next >= cap_ms_) break;
      if (*next > elapsed) break;
      cursor_ = *next;
      emit(cursor_, tacton_.frame_at(cursor_));
    }
    if (state_ == PlaybackState::playing && elapsed >= cap_ms_) {
      blank(cap_ms_);
      elapsed_ = cap_ms_;
      state_ = PlaybackState::capped;
      events_->push({PlaybackEvent::Kind::capped, cap_ms_, 0, {}});
    }
  }

  // Idempotent; returns the exposure duration.
  Millis stop() {
    if (state_ != PlaybackState::playing) return elapsed_;
    advance();
    if (state_ != PlaybackState::playing) return elapsed_;
    elapsed_ = clock_->now_ms() - start_;
    blank(elapsed_);
    state_ = PlaybackState::stopped;
    events_->push({PlaybackEvent::Kind::stopped, elapsed_, 0, {}});
    return elapsed_;
  }

  // Relative instant of the next scheduled presentation (frame change or cap).
  std::optional<Millis> next_event_ms() const {
    if (state_ != PlaybackState::playing) return std::nullopt;
    Millis probe = cursor_;
    while (true) {
      auto next = tacton_.next_boundary_after(probe);
      if (!next || *next >= cap_ms_) return cap_ms_;
      if (!(tacton_.frame_at(*next) == last_)) return *next;
      probe = *next;
    }
  }

  PlaybackState state() const { return state_; }
  Millis start_ms() const { return start_; }
  Millis cap_ms() const { return cap_ms_; }
  const Tacton& tacton() const { return tacton_; }
  EventQueue& events() { return *events_; }
  const std::optional<std::string>& error() const { return error_; }

 private:
  void emit(Millis t, const Pattern& p) {
    if (has_last_ && p == last_) return;
    try {
      device_->present(t, p);
    } catch (const std::exception& e) {
      error_ = e.what();
      events_->push({PlaybackEvent::Kind::error, t, 0, e.what()});
      elapsed_ = t;
      state_ = PlaybackState::stopped;
      return;
    }
    last_ = p;
    has_last_ = true;
    events_->push({PlaybackEvent::Kind::presented, t, p.rows() == 4 && p.cols() == 4 ? to_bitmask(p) : std::uint16_t{0}, {}});
  }

  void blank(Millis t) { emit(t, Pattern(tacton_.rows(), tacton_.cols())); }

  Tacton tacton_;
  PinArrayDevice* device_;
  const Clock* clock_;
  Millis cap_ms_;
  PlaybackState state_ = PlaybackState::idle;
  Millis start_ = 0;
  Millis cursor_ = 0;
  Millis elapsed_ = 0;
  Pattern last_;
  bool has_last_ = false;
  std::optional<std::string> error_;
  std::unique_ptr<EventQueue> events_ = std::make_unique<EventQueue>();
};

inline PlaybackSession play(const Tacton& tacton, PinArrayDevice& device, const Clock& clock,
                            Millis cap_ms = kDefaultCapMs) {
  PlaybackSession s(tacton, device, clock, cap_ms);
  s.start();
  return s;
}

// Presentation schedule of a Tacton under virtual time, up to `until_ms`
// (inclusive) or the cap, whichever comes first.
inline std::vector<Presentation> render_schedule(const Tacton& tacton, Millis until_ms, Millis cap_ms = kDefaultCapMs) {
  VirtualClock clock;
  VirtualRecorder recorder;
  auto session = play(tacton, recorder, clock, cap_ms);
  clock.set(until_ms);
  session.advance();
  return recorder.log();
}

// Drives a session on the wall clock, polling at most every `poll`.
inline Millis run_realtime(PlaybackSession& session, const Clock& clock, Millis run_for_ms,
                           std::chrono::milliseconds poll = std::chrono::milliseconds(5)) {
  const Millis deadline = clock.now_ms() + run_for_ms;
  while (session.state() == PlaybackState::playing && clock.now_ms() < deadline) {
    session.advance();
    std::this_thread::sleep_for(poll);
  }
  return session.stop();
}

}  // namespace tacton
