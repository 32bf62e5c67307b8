#pragma once

// Seeded synthetic data: LDA corpora with known topics, and a tweet corpus
// whose per-state Control shares track a set of poll fractions.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "stancetopic/dates.hpp"
#include "stancetopic/geo_data.hpp"
#include "stancetopic/rng.hpp"
#include "stancetopic/stats.hpp"
#include "stancetopic/text.hpp"

namespace stancetopic::synth {

// Marsaglia-Tsang gamma(shape, 1).
inline double gamma_variate(CounterRng &rng, double shape) {
  if (shape < 1.0) {
    const double u = rng.uniform();
    return gamma_variate(rng, shape + 1.0) * std::pow(u > 0.0 ? u : 1e-300, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

inline std::vector<double> dirichlet(CounterRng &rng, std::size_t n, double concentration) {
  std::vector<double> out(n);
  double sum = 0.0;
  for (auto &x : out) {
    x = gamma_variate(rng, concentration);
    sum += x;
  }
  if (sum <= 0.0) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(n));
  } else {
    for (auto &x : out) x /= sum;
  }
  return out;
}

inline std::size_t categorical(CounterRng &rng, std::span<const double> probs) {
  const double u = rng.uniform();
  double cum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cum += probs[i];
    if (u < cum) return i;
  }
  return probs.size() - 1;
}

struct LdaCorpusSpec {
  std::size_t num_docs = 500;
  std::size_t doc_length = 50;
  std::size_t num_topics = 2;
  // Words per topic when disjoint; otherwise total vocabulary size.
  std::size_t words = 50;
  bool disjoint = true;
  double doc_concentration = 0.5;
  double topic_concentration = 1.0;
  std::uint64_t seed = 2013;
};

struct LdaCorpus {
  std::vector<EncodedDoc> docs;
  // true_phi[k][w] over the full vocabulary.
  std::vector<std::vector<double>> true_phi;
  std::vector<std::vector<double>> true_theta;
  std::size_t vocab_size = 0;
};

// Draws documents from the LDA generative process with known parameters.
inline LdaCorpus generate_lda_corpus(const LdaCorpusSpec &spec) {
  CounterRng rng(stream_key(spec.seed, 0x6C6461ULL));
  LdaCorpus out;
  const std::size_t K = spec.num_topics;
  out.vocab_size = spec.disjoint ? K * spec.words : spec.words;
  out.true_phi.assign(K, std::vector<double>(out.vocab_size, 0.0));
  for (std::size_t k = 0; k < K; ++k) {
    const auto block = dirichlet(rng, spec.words, spec.topic_concentration);
    const std::size_t offset = spec.disjoint ? k * spec.words : 0;
    for (std::size_t j = 0; j < spec.words; ++j) out.true_phi[k][offset + j] = block[j];
  }
  for (std::size_t d = 0; d < spec.num_docs; ++d) {
    auto theta = dirichlet(rng, K, spec.doc_concentration);
    EncodedDoc doc(spec.doc_length);
    for (auto &w : doc) {
      const auto k = categorical(rng, theta);
      w = static_cast<WordId>(categorical(rng, out.true_phi[k]));
    }
    out.docs.push_back(std::move(doc));
    out.true_theta.push_back(std::move(theta));
  }
  return out;
}

inline double cosine(std::span<const double> a, std::span<const double> b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

// The 20 state-level polls (16 states) with their closing dates; support
// fractions are left empty.
inline std::vector<PollRecord> poll_table_fixture() {
  const std::array<std::pair<const char *, const char *>, 20> rows{{
      {"AK", "2013-04-26"}, {"AZ", "2013-04-26"}, {"AR", "2013-05-23"}, {"GA", "2013-05-23"},
      {"GA", "2013-08-05"}, {"IA", "2013-06-07"}, {"LA", "2013-05-01"}, {"LA", "2013-08-19"},
      {"MI", "2013-06-02"}, {"MN", "2013-05-19"}, {"MT", "2013-06-23"}, {"NV", "2013-04-26"},
      {"NC", "2013-05-01"}, {"NC", "2013-07-14"}, {"OH", "2013-04-26"}, {"OH", "2013-08-19"},
      {"TN", "2013-05-23"}, {"TX", "2013-07-01"}, {"VA", "2013-07-14"}, {"WY", "2013-07-21"},
  }};
  std::vector<PollRecord> out;
  for (auto [s, d] : rows) out.push_back({s, *dates::parse_date(d), std::nullopt});
  return out;
}

struct TweetCorpusSpec {
  std::uint64_t seed = 7;
  // Stance-labeled, geocodable tweets per polled state.
  std::size_t labeled_per_state = 400;
  double share_noise = 0.05;
  // Unlabeled keyword tweets (mixed locations).
  std::size_t unlabeled = 3000;
  // Extra stance tweets injected in the week of each event.
  std::size_t event_burst = 600;
  // Records that should be rejected at ingest (no keyword, out of window, malformed).
  std::size_t noise_records = 200;
};

struct TweetCorpus {
  std::string ndjson;
  std::vector<PollRecord> polls;
  std::vector<std::pair<Day, std::string>> events;
  // The Control share each polled state was generated with (before rounding).
  std::map<StateCode, double> target_share;
};

namespace detail {

inline constexpr std::array<const char *, 6> kKeywords{"gun", "guns", "second amendment", "2nd amendment",
                                                      "firearm", "firearms"};
inline constexpr std::array<const char *, 11> kControlTags{
    "gunsense", "gunsensepatriot", "votegunsense", "guncontrolnow", "momsdemandaction", "momsdemand",
    "demandaplan", "nowaynra", "gunskillpeople", "gunviolence", "endgunviolence"};
inline constexpr std::array<const char *, 11> kRightsTags{
    "gunrights", "protect2a", "molonlabe", "molonlab", "noguncontrol", "progun",
    "nogunregistry", "votegunrights", "firearmrights", "gungrab", "gunfriendly"};
inline constexpr std::array<const char *, 16> kControlWords{
    "background", "checks", "universal", "moms", "demand", "action", "sense", "laws",
    "congress", "violence", "sign", "petition", "loophole", "sales", "senate", "vote"};
inline constexpr std::array<const char *, 16> kRightsWords{
    "constitution", "liberty", "freedom", "registry", "tyranny", "defend", "protect", "owners",
    "militia", "carry", "selfdefense", "patriots", "ammo", "confiscation", "shall", "infringed"};
inline constexpr std::array<const char *, 12> kNeutralWords{
    "news", "today", "shooting", "police", "store", "range", "show", "week",
    "report", "people", "country", "america"};

template <std::size_t N>
const char *pick(CounterRng &rng, const std::array<const char *, N> &xs) {
  return xs[rng.below(N)];
}

inline std::string state_name_title(std::string_view code) {
  for (const auto &s : geo_data::kStates) {
    if (s.state == code) {
      std::string name(s.name);
      bool up = true;
      for (auto &c : name) {
        if (up && c >= 'a' && c <= 'z') c = static_cast<char>(c - 32);
        up = c == ' ';
      }
      return name;
    }
  }
  return std::string(code);
}

} // namespace detail

// Builds an NDJSON corpus where each polled state's Control share equals the
// mean of its polls' support plus N(0, share_noise) noise.
inline TweetCorpus generate_tweet_corpus(const TweetCorpusSpec &spec) {
  using namespace detail;
  CounterRng rng(stream_key(spec.seed, 0x7477656574ULL));
  TweetCorpus out;
  out.polls = poll_table_fixture();
  std::map<StateCode, std::vector<double>> by_state;
  std::map<StateCode, double> first_poll;
  for (auto &p : out.polls) {
    auto [it, fresh] = first_poll.emplace(p.state, 0.0);
    if (fresh) {
      it->second = 0.35 + 0.6 * rng.uniform();
      p.support_fraction = it->second;
    } else {
      p.support_fraction = std::clamp(it->second + 0.02 * rng.normal(), 0.0, 1.0);
    }
    p.support_fraction = std::round(*p.support_fraction * 1000.0) / 1000.0;
    by_state[p.state].push_back(*p.support_fraction);
  }
  for (auto &[state, fracs] : by_state) {
    double mean = 0.0;
    for (double f : fracs) mean += f;
    mean /= static_cast<double>(fracs.size());
    out.target_share[state] = std::clamp(mean + spec.share_noise * rng.normal(), 0.02, 0.98);
  }

  out.events = {{*dates::parse_date("2013-03-14"), "Assault weapons ban clears committee"},
                {*dates::parse_date("2013-04-17"), "Background check bill defeated"},
                {*dates::parse_date("2013-07-01"), "Colorado magazine ban takes effect"}};

  const Day year_start = *dates::parse_date("2013-01-01");
  std::uint64_t next_id = 300000000000000000ULL;
  std::ostringstream os;
  auto emit = [&](Seconds ts, const std::string &text, const std::optional<std::string> &loc) {
    nlohmann::json j;
    j["id"] = (next_id % 2 == 0) ? nlohmann::json(std::to_string(next_id)) : nlohmann::json(next_id);
    ++next_id;
    j["created_at"] = dates::format_rfc3339(ts);
    j["text"] = text;
    j["user_location"] = loc ? nlohmann::json(*loc) : nlohmann::json(nullptr);
    os << j.dump() << '\n';
  };
  auto random_time = [&](Day first, std::size_t span_days) {
    const Day d = first + std::chrono::days{rng.below(span_days)};
    return Seconds{d} + std::chrono::seconds{rng.below(86400)};
  };
  auto stance_text = [&](bool control) {
    std::string t = std::string("RT @user: ") + pick(rng, kKeywords);
    const std::size_t words = 4 + rng.below(5);
    for (std::size_t i = 0; i < words; ++i) {
      t += ' ';
      if (rng.uniform() < 0.75) t += control ? pick(rng, kControlWords) : pick(rng, kRightsWords);
      else t += pick(rng, kNeutralWords);
    }
    t += control ? std::string(" #") + pick(rng, kControlTags) : std::string(" #") + pick(rng, kRightsTags);
    if (rng.uniform() < 0.3) {
      // Occasional second tag, same side, sometimes upper-cased.
      std::string tag = control ? pick(rng, kControlTags) : pick(rng, kRightsTags);
      if (rng.uniform() < 0.5) std::transform(tag.begin(), tag.end(), tag.begin(), ::toupper);
      t += " #" + tag;
    }
    t += " http://t.co/x" + std::to_string(rng.below(1000));
    return t;
  };
  auto location_for = [&](const StateCode &s) -> std::string {
    switch (rng.below(3)) {
    case 0: return state_name_title(s);
    case 1: return "Smallville, " + s;
    default: return "somewhere in " + state_name_title(s);
    }
  };

  for (const auto &[state, share] : out.target_share) {
    const auto n = spec.labeled_per_state;
    const auto n_control = static_cast<std::size_t>(std::llround(share * static_cast<double>(n)));
    for (std::size_t i = 0; i < n; ++i) emit(random_time(year_start, 365), stance_text(i < n_control), location_for(state));
  }
  for (std::size_t i = 0; i < spec.unlabeled; ++i) {
    std::string t = std::string("Talking about ") + pick(rng, kKeywords);
    for (std::size_t j = 0; j < 5; ++j) t += std::string(" ") + pick(rng, kNeutralWords);
    std::optional<std::string> loc;
    switch (rng.below(4)) {
    case 0: loc = "worldwide"; break;
    case 1: loc = "Springfield"; break;
    case 2: loc = std::nullopt; break;
    default: loc = detail::state_name_title(geo_data::kStates[rng.below(geo_data::kStates.size())].state); break;
    }
    emit(random_time(year_start, 365), t, loc);
  }
  // Event bursts lean Control, except the second event which leans Rights.
  for (std::size_t e = 0; e < out.events.size(); ++e) {
    const Day first = out.events[e].first - std::chrono::days{3};
    for (std::size_t i = 0; i < spec.event_burst; ++i) {
      const bool control = e == 1 ? rng.uniform() < 0.25 : rng.uniform() < 0.8;
      emit(random_time(first, 7), stance_text(control), std::nullopt);
    }
  }
  for (std::size_t i = 0; i < spec.noise_records; ++i) {
    switch (i % 3) {
    case 0: emit(random_time(year_start, 365), "we begun early, nothing to see", std::nullopt); break;
    case 1: emit(Seconds{*dates::parse_date("2012-11-01")}, "guns guns guns", std::nullopt); break;
    default: os << "{\"id\": \"not-a-number\", \"text\": \"gun\"}\n"; break;
    }
  }
  out.ndjson = os.str();
  return out;
}

// Renders an LDA corpus as NDJSON records, word id w becoming the token "w<w>".
// Records are spread one hour apart from 2013-01-01 and carry no location.
inline std::string lda_corpus_ndjson(const LdaCorpus &corpus) {
  std::ostringstream os;
  const Seconds t0{*dates::parse_date("2013-01-01")};
  for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
    std::string text;
    for (auto w : corpus.docs[d]) {
      if (!text.empty()) text += ' ';
      text += "w" + std::to_string(w);
    }
    nlohmann::json j;
    j["id"] = 1000 + d;
    j["created_at"] = dates::format_rfc3339(t0 + std::chrono::hours{d});
    j["text"] = text;
    j["user_location"] = nullptr;
    os << j.dump() << '\n';
  }
  return os.str();
}

} // namespace stancetopic::synth
