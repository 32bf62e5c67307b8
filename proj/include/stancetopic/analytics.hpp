#pragma once

// Stance time series, spike detection, per-state stance shares and
// stance-conditioned topic profiles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stancetopic/corpus.hpp"
#include "stancetopic/dates.hpp"
#include "stancetopic/error.hpp"
#include "stancetopic/geo.hpp"
#include "stancetopic/lda.hpp"
#include "stancetopic/stance.hpp"

namespace stancetopic {

enum class Granularity { Day, Week };

inline std::string_view to_string(Granularity g) { return g == Granularity::Day ? "day" : "week"; }

struct BucketCounts {
  Day start;
  std::uint64_t overall = 0;
  std::uint64_t control = 0;
  std::uint64_t rights = 0;

  std::uint64_t count(Stance s) const {
    switch (s) {
    case Stance::Control: return control;
    case Stance::Rights: return rights;
    case Stance::Unlabeled: return overall - control - rights;
    }
    return 0;
  }
};

// Contiguous, zero-filled buckets. Weekly buckets start on Monday (UTC).
struct TimeSeries {
  Granularity granularity = Granularity::Week;
  std::vector<BucketCounts> buckets;

  std::vector<double> series(Stance s) const {
    std::vector<double> out;
    out.reserve(buckets.size());
    for (const auto &b : buckets) out.push_back(static_cast<double>(b.count(s)));
    return out;
  }
};

inline Day bucket_start(Day d, Granularity g) { return g == Granularity::Week ? dates::week_start(d) : d; }

// Raw (unnormalized) counts per bucket, covering the collection window and any
// records outside it.
inline TimeSeries aggregate_counts(const CorpusStore &store, std::span<const Stance> labels, Granularity granularity,
                                   const CollectionWindow &window = {}) {
  if (labels.size() != store.size()) throw ArgumentError("aggregate_counts: labels not parallel to store");
  Day first = window.first_day(), last = window.last_day();
  for (const auto &t : store) {
    first = std::min(first, t.day());
    last = std::max(last, t.day());
  }
  const Day b0 = bucket_start(first, granularity);
  const Day bn = bucket_start(last, granularity);
  const int step = granularity == Granularity::Week ? 7 : 1;
  TimeSeries ts;
  ts.granularity = granularity;
  for (Day d = b0; d <= bn; d += std::chrono::days{step}) ts.buckets.push_back({d});
  for (std::size_t i = 0; i < store.size(); ++i) {
    const auto idx = static_cast<std::size_t>((bucket_start(store[i].day(), granularity) - b0).count() / step);
    auto &b = ts.buckets[idx];
    ++b.overall;
    if (labels[i] == Stance::Control) ++b.control;
    else if (labels[i] == Stance::Rights) ++b.rights;
  }
  return ts;
}

struct SpikeParams {
  std::size_t trailing_window = 8;
  double z_threshold = 2.0;
  double stddev_floor = 1.0;
};

struct Spike {
  std::size_t bucket = 0;
  Day start;
  Stance stance = Stance::Control;
  double count = 0.0;
  double trailing_mean = 0.0;
  double trailing_stddev = 0.0;
  double z = 0.0;
};

// Indices b >= W where x[b] exceeds mean + z·sd of the W preceding values
// (population sd, floored) and x[b] is a local maximum: strictly above its
// left neighbour (so the earlier of two equal peaks wins) and not below its
// right neighbour.
inline std::vector<Spike> detect_spikes(std::span<const double> counts, const SpikeParams &params = {}) {
  const std::size_t W = params.trailing_window;
  if (W < 1) throw ArgumentError("detect_spikes: trailing_window must be >= 1");
  if (counts.size() < W + 1) throw ArgumentError("detect_spikes: need at least trailing_window + 1 buckets");
  std::vector<Spike> out;
  for (std::size_t b = W; b < counts.size(); ++b) {
    double mean = 0.0;
    for (std::size_t j = b - W; j < b; ++j) mean += counts[j];
    mean /= static_cast<double>(W);
    double var = 0.0;
    for (std::size_t j = b - W; j < b; ++j) var += (counts[j] - mean) * (counts[j] - mean);
    const double sd = std::sqrt(var / static_cast<double>(W));
    const double sd_used = std::max(sd, params.stddev_floor);
    const double x = counts[b];
    if (!(x > mean + params.z_threshold * sd_used)) continue;
    if (!(x > counts[b - 1])) continue;
    if (b + 1 < counts.size() && x < counts[b + 1]) continue;
    Spike s;
    s.bucket = b;
    s.count = x;
    s.trailing_mean = mean;
    s.trailing_stddev = sd;
    s.z = (x - mean) / sd_used;
    out.push_back(s);
  }
  return out;
}

// Control and Rights spikes of a series, ordered by bucket then stance.
inline std::vector<Spike> detect_spikes(const TimeSeries &series, const SpikeParams &params = {}) {
  std::vector<Spike> out;
  for (Stance s : {Stance::Control, Stance::Rights}) {
    const auto xs = series.series(s);
    for (auto sp : detect_spikes(std::span<const double>(xs), params)) {
      sp.stance = s;
      sp.start = series.buckets[sp.bucket].start;
      out.push_back(sp);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Spike &a, const Spike &b) { return a.bucket < b.bucket; });
  return out;
}

struct StateShare {
  double control_share = 0.0;
  std::uint64_t n_control = 0;
  std::uint64_t n_rights = 0;
};

struct StateProportions {
  std::map<StateCode, StateShare> shares;
  // States with some labeled tweets but fewer than min_support.
  std::map<StateCode, StateShare> excluded;
};

// control_share = n_control / (n_control + n_rights) per resolved state.
// `include`, when non-empty, masks records (e.g. a poll window).
inline StateProportions state_stance_proportion(std::span<const Stance> labels,
                                                std::span<const std::optional<StateCode>> states,
                                                std::uint64_t min_support = 25, std::span<const bool> include = {}) {
  if (labels.size() != states.size()) throw ArgumentError("state_stance_proportion: inputs not parallel");
  if (!include.empty() && include.size() != labels.size()) {
    throw ArgumentError("state_stance_proportion: mask not parallel");
  }
  std::map<StateCode, StateShare> tally;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!states[i] || labels[i] == Stance::Unlabeled) continue;
    if (!include.empty() && !include[i]) continue;
    auto &s = tally[*states[i]];
    if (labels[i] == Stance::Control) ++s.n_control;
    else ++s.n_rights;
  }
  StateProportions out;
  for (auto &[state, s] : tally) {
    const auto n = s.n_control + s.n_rights;
    s.control_share = static_cast<double>(s.n_control) / static_cast<double>(n);
    (n < min_support ? out.excluded : out.shares).emplace(state, s);
  }
  return out;
}

enum class TopicWeighting { Token, Document };

// P(k | stance) = Σ_d w_d θ_dk / Σ_d w_d over documents with that stance,
// w_d = n_d (token weighting) or 1. If every selected document is empty the
// token weighting degrades to uniform weights.
inline TopicDistribution stance_topic_distribution(Stance stance, std::span<const Stance> labels,
                                                   std::span<const TopicDistribution> thetas,
                                                   std::span<const std::size_t> doc_lengths,
                                                   TopicWeighting weighting = TopicWeighting::Token,
                                                   std::span<const bool> include = {}) {
  if (labels.size() != thetas.size() || labels.size() != doc_lengths.size()) {
    throw ArgumentError("stance_topic_distribution: inputs not parallel");
  }
  std::vector<std::size_t> docs;
  for (std::size_t d = 0; d < labels.size(); ++d) {
    if (labels[d] == stance && (include.empty() || include[d])) docs.push_back(d);
  }
  if (docs.empty()) throw ArgumentError("stance_topic_distribution: no documents for stance " + std::string(to_string(stance)));
  const std::size_t K = thetas[docs.front()].size();
  double total_weight = 0.0;
  if (weighting == TopicWeighting::Token) {
    for (auto d : docs) total_weight += static_cast<double>(doc_lengths[d]);
  }
  const bool uniform = weighting == TopicWeighting::Document || total_weight == 0.0;
  if (uniform) total_weight = static_cast<double>(docs.size());
  TopicDistribution out(K, 0.0);
  for (auto d : docs) {
    if (thetas[d].size() != K) throw ArgumentError("stance_topic_distribution: inconsistent theta length");
    const double w = uniform ? 1.0 : static_cast<double>(doc_lengths[d]);
    for (std::size_t k = 0; k < K; ++k) out[k] += w * thetas[d][k];
  }
  for (auto &x : out) x /= total_weight;
  return out;
}

struct TopicProfile {
  std::vector<TopicId> topic_ids;
  std::vector<double> proportions;

  bool empty() const { return topic_ids.empty(); }
};

// Projects a distribution onto the given topics and renormalizes.
inline TopicProfile project_profile(std::span<const double> distribution, std::span<const TopicId> topic_ids) {
  TopicProfile p;
  p.topic_ids.assign(topic_ids.begin(), topic_ids.end());
  double mass = 0.0;
  for (auto k : topic_ids) {
    if (k >= distribution.size()) throw ArgumentError("project_profile: topic id out of range");
    p.proportions.push_back(distribution[k]);
    mass += distribution[k];
  }
  if (!(mass > 0.0)) throw ArgumentError("project_profile: selected topics carry no mass");
  for (auto &x : p.proportions) x /= mass;
  return p;
}

// The n most probable topics (ties to the lower index), renormalized.
inline TopicProfile top_topics(std::span<const double> distribution, std::size_t n = 10) {
  if (n > distribution.size()) throw ArgumentError("top_topics: n exceeds number of topics");
  std::vector<TopicId> order(distribution.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](TopicId a, TopicId b) { return distribution[a] > distribution[b]; });
  order.resize(n);
  return project_profile(distribution, order);
}

// The 7 days centred on `date`.
struct EventWindow {
  std::string name;
  Day date;

  Day first_day() const { return date - std::chrono::days{3}; }
  Day last_day() const { return date + std::chrono::days{3}; }
  bool contains(Day d) const { return d >= first_day() && d <= last_day(); }
};

// TSV: YYYY-MM-DD<TAB>name; '#' comments.
inline std::vector<EventWindow> load_events(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open events file: " + path);
  std::vector<EventWindow> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(path, lineno, "expected date<TAB>name");
    auto d = dates::parse_date(line.substr(0, tab));
    if (!d) throw ParseError(path, lineno, "bad date '" + line.substr(0, tab) + "'");
    out.push_back({line.substr(tab + 1), *d});
  }
  return out;
}

struct EventProfile {
  TopicProfile profile;
  std::size_t documents = 0;
  std::optional<std::string> warning;
};

// Stance-conditioned topic distribution over documents inside the event
// window, projected onto `topic_ids`.
inline EventProfile event_topic_profile(const EventWindow &event, Stance stance, std::span<const TopicId> topic_ids,
                                        std::span<const Stance> labels, std::span<const TopicDistribution> thetas,
                                        std::span<const std::size_t> doc_lengths, std::span<const Day> doc_days,
                                        TopicWeighting weighting = TopicWeighting::Token) {
  if (doc_days.size() != labels.size()) throw ArgumentError("event_topic_profile: inputs not parallel");
  std::unique_ptr<bool[]> mask(new bool[labels.size()]);
  EventProfile out;
  for (std::size_t d = 0; d < labels.size(); ++d) {
    mask[d] = event.contains(doc_days[d]);
    if (mask[d] && labels[d] == stance) ++out.documents;
  }
  if (out.documents == 0) {
    out.warning = "event '" + event.name + "': no " + std::string(to_string(stance)) + " documents in window";
    return out;
  }
  const auto dist = stance_topic_distribution(stance, labels, thetas, doc_lengths, weighting,
                                              std::span<const bool>(mask.get(), labels.size()));
  out.profile = project_profile(dist, topic_ids);
  return out;
}

} // namespace stancetopic
