#pragma once

// Identification-experiment harness: trial generation, counterbalancing,
// confusion matrices, error and information-transmission metrics, simulated
// responders and the trial-log / report formats.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tacton/core.hpp"
#include "tacton/library.hpp"
#include "tacton/player.hpp"

namespace tacton {

inline constexpr std::size_t kSingleDimensionTrials = 100;
inline constexpr std::size_t kMultiDimensionTrials = 96;

// mt19937_64 output is fixed by the standard; the draws below avoid the
// implementation-defined std distributions so logs are identical everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_{seed} {}

  std::size_t below(std::size_t n) {
    if (n == 0) throw Error("cannot draw from an empty range");
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
  }

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

// splitmix64 step, for deriving independent sub-seeds.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum class SamplingMode {
  uniform,   // independent draws with replacement
  balanced,  // every tuple floor(n/|space|) or ceil(n/|space|) times, shuffled
};

inline SamplingMode sampling_mode_from(std::string_view s) {
  if (s == "uniform") return SamplingMode::uniform;
  if (s == "balanced") return SamplingMode::balanced;
  throw Error("unknown sampling mode '" + std::string(s) + "'");
}

inline std::string to_string(SamplingMode m) { return m == SamplingMode::uniform ? "uniform" : "balanced"; }

inline std::vector<ValueTuple> generate_trials(const TactonSpace& space, std::size_t n, std::uint64_t seed,
                                               SamplingMode mode = SamplingMode::uniform) {
  if (n == 0) throw Error("trial count must be at least 1");
  const std::size_t k = space.cardinality();
  if (k == 0) throw Error("cannot draw trials from an empty space");
  Rng rng(seed);
  std::vector<std::size_t> picks;
  picks.reserve(n);
  if (mode == SamplingMode::uniform) {
    for (std::size_t i = 0; i < n; ++i) picks.push_back(rng.below(k));
  } else {
    for (std::size_t rep = 0; rep < n / k; ++rep) {
      for (std::size_t i = 0; i < k; ++i) picks.push_back(i);
    }
    std::vector<std::size_t> extra(k);
    for (std::size_t i = 0; i < k; ++i) extra[i] = i;
    rng.shuffle(extra);
    picks.insert(picks.end(), extra.begin(), extra.begin() + static_cast<std::ptrdiff_t>(n % k));
    rng.shuffle(picks);
  }
  std::vector<ValueTuple> out;
  out.reserve(n);
  for (auto i : picks) out.push_back(space.tuple_at(i));
  return out;
}

// Block orders for each participant. A balanced (Williams) Latin square when
// the participant count is a multiple of the block count, cyclic rotation
// otherwise.
inline std::vector<std::vector<std::size_t>> counterbalance(std::size_t participants, std::size_t blocks) {
  if (blocks == 0) throw Error("counterbalancing needs at least one block");
  if (participants < blocks) throw Error("need at least as many participants as blocks");
  std::vector<std::vector<std::size_t>> rows;
  if (participants % blocks == 0) {
    std::vector<std::size_t> first;
    for (std::size_t j = 0, lo = 1, hi = blocks - 1; j < blocks; ++j) {
      if (j == 0) {
        first.push_back(0);
      } else if (j % 2 == 1) {
        first.push_back(lo++);
      } else {
        first.push_back(hi--);
      }
    }
    for (std::size_t i = 0; i < blocks; ++i) {
      std::vector<std::size_t> row;
      for (auto f : first) row.push_back((f + i) % blocks);
      rows.push_back(row);
    }
    if (blocks % 2 == 1) {
      for (std::size_t i = 0; i < blocks; ++i) {
        auto row = rows[i];
        std::reverse(row.begin(), row.end());
        rows.push_back(row);
      }
    }
  } else {
    for (std::size_t i = 0; i < blocks; ++i) {
      std::vector<std::size_t> row;
      for (std::size_t j = 0; j < blocks; ++j) row.push_back((i + j) % blocks);
      rows.push_back(row);
    }
  }
  std::vector<std::vector<std::size_t>> orders;
  orders.reserve(participants);
  for (std::size_t p = 0; p < participants; ++p) orders.push_back(rows[p % rows.size()]);
  return orders;
}

struct BlockSpec {
  std::string space_id;
  std::size_t trials = kSingleDimensionTrials;
  bool training = false;
  SamplingMode mode = SamplingMode::uniform;
};

// 100 uniformly drawn trials for a directional set, 96 balanced trials for
// the direction x size x speed spaces.
inline BlockSpec replication_block(const std::string& space_id) {
  if (space_id == "s2" || space_id == "s3") return {space_id, kMultiDimensionTrials, false, SamplingMode::balanced};
  return {space_id, kSingleDimensionTrials, false, SamplingMode::uniform};
}

struct TrialPlan {
  std::string participant;
  std::uint64_t seed = 0;
  std::vector<BlockSpec> blocks;
  std::vector<std::size_t> order;  // indices into blocks

  // Stimuli of the block at position `position` of this participant's order;
  // training blocks have none.
  std::vector<ValueTuple> stimuli(const Catalog& catalog, std::size_t position) const {
    const auto& b = blocks.at(order.at(position));
    if (b.training) return {};
    return generate_trials(catalog.space(b.space_id), b.trials, derive_seed(seed, order.at(position)), b.mode);
  }
};

inline std::vector<TrialPlan> make_plans(const std::vector<std::string>& participants, const std::vector<BlockSpec>& blocks,
                                         std::uint64_t seed) {
  const auto orders = counterbalance(participants.size(), blocks.size());
  std::vector<TrialPlan> plans;
  for (std::size_t i = 0; i < participants.size(); ++i) {
    plans.push_back(TrialPlan{participants[i], derive_seed(seed, i), blocks, orders[i]});
  }
  return plans;
}

class ConfusionMatrix {
 public:
  ConfusionMatrix(std::vector<std::string> stimuli, std::vector<std::string> responses)
      : stimuli_{std::move(stimuli)}, responses_{std::move(responses)}, counts_(stimuli_.size() * responses_.size(), 0) {
    for (std::size_t i = 0; i < stimuli_.size(); ++i) stim_index_.emplace(stimuli_[i], i);
    for (std::size_t j = 0; j < responses_.size(); ++j) resp_index_.emplace(responses_[j], j);
    if (stim_index_.size() != stimuli_.size() || resp_index_.size() != responses_.size()) {
      throw Error("duplicate class label in confusion matrix");
    }
  }

  static ConfusionMatrix square(std::vector<std::string> classes) {
    auto copy = classes;
    return ConfusionMatrix(std::move(classes), std::move(copy));
  }

  static ConfusionMatrix from_counts(const std::vector<std::vector<std::uint64_t>>& counts) {
    std::vector<std::string> rows, cols;
    for (std::size_t i = 0; i < counts.size(); ++i) rows.push_back(std::to_string(i));
    const std::size_t width = counts.empty() ? 0 : counts.front().size();
    for (std::size_t j = 0; j < width; ++j) cols.push_back(std::to_string(j));
    ConfusionMatrix m(rows, cols);
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i].size() != width) throw Error("ragged count matrix");
      for (std::size_t j = 0; j < width; ++j) m.add(i, j, counts[i][j]);
    }
    return m;
  }

  void add(std::size_t stimulus, std::size_t response, std::uint64_t n = 1) {
    if (stimulus >= stimuli_.size() || response >= responses_.size()) throw Error("class index out of range");
    counts_[stimulus * responses_.size() + response] += n;
    total_ += n;
  }

  void add(const std::string& stimulus, const std::string& response) {
    auto si = stim_index_.find(stimulus);
    auto ri = resp_index_.find(response);
    if (si == stim_index_.end()) throw Error("unknown stimulus class '" + stimulus + "'");
    if (ri == resp_index_.end()) throw Error("unknown response class '" + response + "'");
    add(si->second, ri->second);
  }

  std::uint64_t count(std::size_t i, std::size_t j) const { return counts_[i * responses_.size() + j]; }
  std::uint64_t total() const { return total_; }
  const std::vector<std::string>& stimuli() const { return stimuli_; }
  const std::vector<std::string>& responses() const { return responses_; }

  std::uint64_t row_total(std::size_t i) const {
    std::uint64_t s = 0;
    for (std::size_t j = 0; j < responses_.size(); ++j) s += count(i, j);
    return s;
  }
  std::uint64_t col_total(std::size_t j) const {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < stimuli_.size(); ++i) s += count(i, j);
    return s;
  }

  // Count on the diagonal, matching stimulus and response labels.
  std::uint64_t correct() const {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < stimuli_.size(); ++i) {
      if (auto it = resp_index_.find(stimuli_[i]); it != resp_index_.end()) s += count(i, it->second);
    }
    return s;
  }

  const std::map<std::string, std::size_t>& response_index() const { return resp_index_; }

 private:
  std::vector<std::string> stimuli_;
  std::vector<std::string> responses_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
  std::map<std::string, std::size_t> stim_index_;
  std::map<std::string, std::size_t> resp_index_;
};

inline void require_nonempty(const ConfusionMatrix& m) {
  if (m.total() == 0) throw Error("confusion matrix is empty");
}

inline double error_rate(const ConfusionMatrix& m) {
  require_nonempty(m);
  return 1.0 - static_cast<double>(m.correct()) / static_cast<double>(m.total());
}

// Error fraction per stimulus row; rows with no trials report 0.
inline std::vector<double> per_class_errors(const ConfusionMatrix& m) {
  require_nonempty(m);
  std::vector<double> out;
  for (std::size_t i = 0; i < m.stimuli().size(); ++i) {
    const auto n = m.row_total(i);
    if (n == 0) {
      out.push_back(0.0);
      continue;
    }
    std::uint64_t hit = 0;
    if (auto it = m.response_index().find(m.stimuli()[i]); it != m.response_index().end()) hit = m.count(i, it->second);
    out.push_back(1.0 - static_cast<double>(hit) / static_cast<double>(n));
  }
  return out;
}

inline double entropy_bits(const std::vector<std::uint64_t>& counts) {
  std::uint64_t n = 0;
  for (auto c : counts) n += c;
  if (n == 0) return 0.0;
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(n);
    h -= p * std::log2(p);
  }
  return h;
}

inline double stimulus_entropy(const ConfusionMatrix& m) {
  std::vector<std::uint64_t> c;
  for (std::size_t i = 0; i < m.stimuli().size(); ++i) c.push_back(m.row_total(i));
  return entropy_bits(c);
}

inline double response_entropy(const ConfusionMatrix& m) {
  std::vector<std::uint64_t> c;
  for (std::size_t j = 0; j < m.responses().size(); ++j) c.push_back(m.col_total(j));
  return entropy_bits(c);
}

// Maximum-likelihood transmitted information (bits per Tacton):
// sum over cells of p_ij * log2(p_ij / (p_i. * p_.j)), empty cells contribute 0.
inline double information_transmission(const ConfusionMatrix& m) {
  require_nonempty(m);
  const double n = static_cast<double>(m.total());
  std::vector<double> row(m.stimuli().size()), col(m.responses().size());
  for (std::size_t i = 0; i < row.size(); ++i) row[i] = static_cast<double>(m.row_total(i)) / n;
  for (std::size_t j = 0; j < col.size(); ++j) col[j] = static_cast<double>(m.col_total(j)) / n;
  double t = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    for (std::size_t j = 0; j < col.size(); ++j) {
      const auto c = m.count(i, j);
      if (c == 0) continue;
      const double p = static_cast<double>(c) / n;
      t += p * std::log2(p / (row[i] * col[j]));
    }
  }
  // rounding can leave a tiny negative residue for independent data
  return std::max(t, 0.0);
}

struct TrialRecord {
  std::string participant;
  std::string block;
  std::size_t trial = 0;
  std::string stimulus;  // "dir=N;size=large;speed=medium"
  std::string response;
  Millis response_time_ms = 0;
  Millis exposure_ms = 0;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

inline const char* kTrialLogHeader = "participant,block,trial,stimulus,response,response_time_ms,exposure_ms";

inline void write_trial_log(std::ostream& os, const std::vector<TrialRecord>& records) {
  os << kTrialLogHeader << '\n';
  for (const auto& r : records) {
    os << r.participant << ',' << r.block << ',' << r.trial << ',' << r.stimulus << ',' << r.response << ','
       << r.response_time_ms << ',' << r.exposure_ms << '\n';
  }
}

inline std::vector<TrialRecord> read_trial_log(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error("trial log is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTrialLogHeader) throw Error("trial log header mismatch");
  std::vector<TrialRecord> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 7) throw Error("trial log line " + std::to_string(lineno) + ": expected 7 fields");
    try {
      TrialRecord r{f[0], f[1], std::stoul(f[2]), f[3], f[4], std::stoll(f[5]), std::stoll(f[6])};
      if (r.response_time_ms < 0 || r.exposure_ms < 0) throw Error("negative time");
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw Error("trial log line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

inline ConfusionMatrix matrix_from_records(const std::vector<TrialRecord>& records) {
  std::set<std::string> s, r;
  for (const auto& rec : records) {
    s.insert(rec.stimulus);
    r.insert(rec.response);
  }
  ConfusionMatrix m({s.begin(), s.end()}, {r.begin(), r.end()});
  for (const auto& rec : records) m.add(rec.stimulus, rec.response);
  return m;
}

// Splits "a=1;b=2" into ordered (name, value) pairs.
inline std::vector<std::pair<std::string, std::string>> split_tuple(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw Error("malformed tuple field '" + item + "'");
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return out;
}

// Even counts take the mean of the two middle values.
inline double median(std::vector<double> v) {
  if (v.empty()) throw Error("median of an empty sample");
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// How a simulated participant confuses one dimension: with probability p the
// response moves to a uniformly chosen neighbour in `order`.
struct DimensionConfusion {
  double p = 0.0;
  bool ring = false;
  std::vector<std::string> order;  // empty: the dimension's own value order
};

struct ResponderModel {
  std::map<std::string, DimensionConfusion> dimensions;
  Millis rt_median_ms = 2000;
  Millis rt_jitter_ms = 500;

  void validate() const {
    for (const auto& [name, c] : dimensions) {
      if (!(c.p >= 0.0 && c.p <= 1.0)) throw Error("confusion probability for '" + name + "' outside [0,1]");
    }
    if (rt_median_ms < 0 || rt_jitter_ms < 0 || rt_jitter_ms > rt_median_ms) throw Error("invalid response time model");
  }

  static ResponderModel from_json(const nlohmann::json& j) {
    ResponderModel m;
    for (const auto& [name, jc] : j.at("dimensions").items()) {
      DimensionConfusion c;
      c.p = jc.at("p").get<double>();
      const auto topo = jc.value("topology", std::string("linear"));
      if (topo != "ring" && topo != "linear") throw Error("unknown topology '" + topo + "'");
      c.ring = topo == "ring";
      if (jc.contains("order")) c.order = jc.at("order").get<std::vector<std::string>>();
      if (c.order.empty() && name == "dir") c.order = compass(c.p).order;
      m.dimensions.emplace(name, std::move(c));
    }
    if (j.contains("response_time_ms")) {
      m.rt_median_ms = j["response_time_ms"].value("median", m.rt_median_ms);
      m.rt_jitter_ms = j["response_time_ms"].value("jitter", m.rt_jitter_ms);
    }
    m.validate();
    return m;
  }

  static ResponderModel parse(std::string_view text) {
    try {
      return from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
      throw Error(std::string("malformed responder model: ") + e.what());
    }
  }

  // Adjacent-direction confusion on the compass ring.
  static DimensionConfusion compass(double p) {
    DimensionConfusion c{p, true, {}};
    for (auto d : kCompassOrder) c.order.push_back(to_string(d));
    return c;
  }
};

// Responses of one simulated participant to the given stimuli. Dimensions are
// perturbed independently; the draw order per trial is fixed (dimensions in
// space order, then the response time) so output is a function of the seed.
inline std::vector<TrialRecord> simulate_responder(const TactonSpace& space, const ResponderModel& model,
                                                   const std::vector<ValueTuple>& stimuli, std::uint64_t seed,
                                                   const std::string& participant = "p1", const std::string& block = "",
                                                   Millis cap_ms = kDefaultCapMs) {
  model.validate();
  Rng rng(seed);
  const auto& dims = space.dimensions();
  std::vector<std::vector<std::string>> orders;
  for (const auto& d : dims) {
    auto it = model.dimensions.find(d.name);
    orders.push_back(it != model.dimensions.end() && !it->second.order.empty() ? it->second.order : d.values);
  }
  std::vector<TrialRecord> out;
  out.reserve(stimuli.size());
  for (std::size_t t = 0; t < stimuli.size(); ++t) {
    const auto& stim = stimuli[t];
    space.validate(stim);
    ValueTuple resp = stim;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      auto it = model.dimensions.find(dims[i].name);
      const double u = rng.uniform01();
      if (it == model.dimensions.end() || u >= it->second.p) continue;
      const auto& order = orders[i];
      // neighbours restricted to values present in this space
      auto present = [&](const std::string& v) { return dims[i].index_of(v).has_value(); };
      std::vector<std::string> filtered;
      for (const auto& v : order) {
        if (present(v)) filtered.push_back(v);
      }
      auto pos = std::find(filtered.begin(), filtered.end(), stim[i]);
      if (pos == filtered.end()) throw Error("value '" + stim[i] + "' missing from confusion order");
      const auto k = static_cast<std::size_t>(pos - filtered.begin());
      const auto n = filtered.size();
      std::vector<std::string> neighbours;
      if (it->second.ring && n > 2) {
        neighbours = {filtered[(k + n - 1) % n], filtered[(k + 1) % n]};
      } else {
        if (k > 0) neighbours.push_back(filtered[k - 1]);
        if (k + 1 < n) neighbours.push_back(filtered[k + 1]);
      }
      if (neighbours.empty()) continue;
      resp[i] = neighbours[rng.below(neighbours.size())];
    }
    const Millis rt = model.rt_median_ms - model.rt_jitter_ms +
                      static_cast<Millis>(rng.below(static_cast<std::size_t>(2 * model.rt_jitter_ms + 1)));
    out.push_back(TrialRecord{participant, block.empty() ? space.id() : block, t + 1, format_tuple(dims, stim),
                              format_tuple(dims, resp), rt, std::min(rt, cap_ms)});
  }
  return out;
}

struct ParticipantMetrics {
  std::string participant;
  std::string block;
  std::size_t trials = 0;
  double error_rate = 0.0;
  double median_response_time_ms = 0.0;
  double it_bits = 0.0;
  std::map<std::string, double> dimension_error_rates;
};

struct BlockSummary {
  std::string block;
  std::size_t participants = 0;
  double median_error_rate = 0.0;
  double median_response_time_ms = 0.0;
  double median_it_bits = 0.0;
  std::map<std::string, double> median_dimension_error_rates;
};

struct SessionReport {
  std::vector<ParticipantMetrics> participants;
  std::vector<BlockSummary> blocks;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    auto ps = nlohmann::ordered_json::array();
    for (const auto& p : participants) {
      nlohmann::ordered_json jp;
      jp["participant"] = p.participant;
      jp["block"] = p.block;
      jp["trials"] = p.trials;
      jp["error_rate"] = p.error_rate;
      jp["median_response_time_ms"] = p.median_response_time_ms;
      jp["it_bits"] = p.it_bits;
      jp["dimension_error_rates"] = p.dimension_error_rates;
      ps.push_back(jp);
    }
    auto bs = nlohmann::ordered_json::array();
    for (const auto& b : blocks) {
      nlohmann::ordered_json jb;
      jb["block"] = b.block;
      jb["participants"] = b.participants;
      jb["median_error_rate"] = b.median_error_rate;
      jb["median_response_time_ms"] = b.median_response_time_ms;
      jb["median_it_bits"] = b.median_it_bits;
      jb["median_dimension_error_rates"] = b.median_dimension_error_rates;
      bs.push_back(jb);
    }
    j["participants"] = ps;
    j["medians"] = bs;
    return j;
  }
};

inline ParticipantMetrics participant_metrics(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw Error("no trials to analyze");
  ParticipantMetrics m;
  m.participant = records.front().participant;
  m.block = records.front().block;
  m.trials = records.size();
  const auto matrix = matrix_from_records(records);
  m.error_rate = error_rate(matrix);
  m.it_bits = information_transmission(matrix);
  std::vector<double> rts;
  std::map<std::string, std::size_t> dim_errors;
  std::vector<std::string> dim_names;
  for (const auto& r : records) {
    rts.push_back(static_cast<double>(r.response_time_ms));
    const auto s = split_tuple(r.stimulus);
    const auto a = split_tuple(r.response);
    if (s.size() != a.size()) throw Error("stimulus and response have different dimensions");
    if (dim_names.empty()) {
      for (const auto& [name, v] : s) dim_names.push_back(name);
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i].first != a[i].first) throw Error("stimulus and response dimension names differ");
      dim_errors[s[i].first] += s[i].second != a[i].second;
    }
  }
  m.median_response_time_ms = median(rts);
  for (const auto& name : dim_names) {
    m.dimension_error_rates[name] = static_cast<double>(dim_errors[name]) / static_cast<double>(records.size());
  }
  return m;
}

// Groups records by (block, participant) in first-seen order.
inline SessionReport analyze(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw Error("no trials to analyze");
  std::vector<std::pair<std::string, std::string>> keys;
  std::map<std::pair<std::string, std::string>, std::vector<TrialRecord>> groups;
  for (const auto& r : records) {
    auto key = std::pair{r.block, r.participant};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) keys.push_back(key);
    it->second.push_back(r);
  }
  SessionReport report;
  std::vector<std::string> block_order;
  for (const auto& key : keys) {
    report.participants.push_back(participant_metrics(groups.at(key)));
    if (std::find(block_order.begin(), block_order.end(), key.first) == block_order.end()) block_order.push_back(key.first);
  }
  for (const auto& block : block_order) {
    BlockSummary s;
    s.block = block;
    std::vector<double> er, rt, it;
    std::map<std::string, std::vector<double>> dims;
    for (const auto& p : report.participants) {
      if (p.block != block) continue;
      ++s.participants;
      er.push_back(p.error_rate);
      rt.push_back(p.median_response_time_ms);
      it.push_back(p.it_bits);
      for (const auto& [name, v] : p.dimension_error_rates) dims[name].push_back(v);
    }
    s.median_error_rate = median(er);
    s.median_response_time_ms = median(rt);
    s.median_it_bits = median(it);
    for (auto& [name, v] : dims) s.median_dimension_error_rates[name] = median(v);
    report.blocks.push_back(std::move(s));
  }
  return report;
}

}  // namespace tacton
