#pragma once

// Tweet records, keyword-filtered ingestion from newline-delimited JSON, the
// persisted corpus store and deterministic Bernoulli subsampling.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "json.hpp"

#include "stancetopic/binio.hpp"
#include "stancetopic/dates.hpp"
#include "stancetopic/error.hpp"
#include "stancetopic/rng.hpp"
#include "stancetopic/text.hpp"
#include "stancetopic/unicode.hpp"

namespace stancetopic {

using TweetId = std::uint64_t;

// Tags are the maximal runs of alphanumerics/underscore directly after a '#',
// lowercased, in order, duplicates kept.
inline std::vector<std::string> extract_hashtags(std::string_view text) {
  std::vector<std::string> tags;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] != '#') {
      unicode::next_code_point(text, pos);
      continue;
    }
    ++pos;
    std::string tag;
    while (pos < text.size()) {
      std::size_t next = pos;
      const char32_t cp = unicode::next_code_point(text, next);
      if (cp != U'_' && !unicode::is_alnum(cp)) break;
      unicode::append_utf8(tag, unicode::to_lower(cp));
      pos = next;
    }
    if (!tag.empty()) tags.push_back(std::move(tag));
  }
  return tags;
}

struct Tweet {
  TweetId id = 0;
  Seconds created_at{};
  std::string text;
  std::optional<std::string> profile_location;
  std::vector<std::string> hashtags;

  Tweet() = default;
  Tweet(TweetId id_, Seconds created, std::string text_, std::optional<std::string> location = std::nullopt)
      : id(id_), created_at(created), text(std::move(text_)), profile_location(std::move(location)),
        hashtags(extract_hashtags(text)) {}

  Day day() const { return dates::day_of(created_at); }

  friend bool operator==(const Tweet &, const Tweet &) = default;
};

class KeywordFilter {
public:
  // The six "General" collection keywords.
  static KeywordFilter general() {
    return KeywordFilter({"gun", "guns", "second amendment", "2nd amendment", "firearm", "firearms"});
  }

  explicit KeywordFilter(const std::vector<std::string> &phrases) {
    for (const auto &p : phrases) {
      auto toks = split_tokens(p);
      if (toks.empty()) throw ArgumentError("keyword phrase has no alphanumeric tokens: '" + p + "'");
      phrases_.push_back(std::move(toks));
    }
  }

  // Every phrase word must align with a whole token, consecutively. An empty
  // filter accepts everything.
  bool matches_tokens(const TokenSequence &tokens) const {
    if (phrases_.empty()) return true;
    for (const auto &phrase : phrases_) {
      if (phrase.size() > tokens.size()) continue;
      auto it = std::search(tokens.begin(), tokens.end(), phrase.begin(), phrase.end());
      if (it != tokens.end()) return true;
    }
    return false;
  }
  bool matches(std::string_view text) const { return matches_tokens(split_tokens(text)); }

  const std::vector<TokenSequence> &phrases() const { return phrases_; }

private:
  std::vector<TokenSequence> phrases_;
};

// Append-only record sequence with a per-UTC-day index of byte offsets into
// the persisted log.
class CorpusStore {
public:
  static constexpr char kLogMagic[5] = "STCL";
  static constexpr char kIndexMagic[5] = "STCI";
  static constexpr std::uint8_t kFormatVersion = 1;
  static constexpr std::uint64_t kHeaderBytes = 5;

  void append(Tweet t) {
    const std::uint64_t offset = next_offset_;
    next_offset_ += 4 + payload_size(t);
    day_index_[t.day()].push_back(offset);
    offsets_.push_back(offset);
    records_.push_back(std::move(t));
  }

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const std::vector<Tweet> &records() const { return records_; }
  const Tweet &operator[](std::size_t i) const { return records_[i]; }
  auto begin() const { return records_.begin(); }
  auto end() const { return records_.end(); }

  const std::map<Day, std::vector<std::uint64_t>> &day_index() const { return day_index_; }

  // Record positions (insertion ordinals) stored on the given day.
  std::vector<std::size_t> records_on(Day d) const {
    std::vector<std::size_t> out;
    auto it = day_index_.find(d);
    if (it == day_index_.end()) return out;
    for (auto off : it->second) {
      auto pos = std::lower_bound(offsets_.begin(), offsets_.end(), off);
      out.push_back(static_cast<std::size_t>(pos - offsets_.begin()));
    }
    return out;
  }

  // Writes `path` (record log) and `path.idx` (day index).
  void save(const std::string &path) const {
    {
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (!out) throw InputError("cannot write corpus log: " + path);
      binio::put_magic(out, kLogMagic, kFormatVersion);
      for (const auto &t : records_) write_record(out, t);
      if (!out) throw InputError("write failed: " + path);
    }
    std::ofstream idx(path + ".idx", std::ios::binary | std::ios::trunc);
    if (!idx) throw InputError("cannot write corpus index: " + path + ".idx");
    binio::put_magic(idx, kIndexMagic, kFormatVersion);
    binio::put<std::uint64_t>(idx, day_index_.size());
    for (const auto &[day, offs] : day_index_) {
      binio::put<std::int32_t>(idx, static_cast<std::int32_t>(day.time_since_epoch().count()));
      binio::put<std::uint64_t>(idx, offs.size());
      for (auto o : offs) binio::put<std::uint64_t>(idx, o);
    }
  }

  // Loads the log and cross-checks the sidecar index against it.
  static CorpusStore load(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open corpus log: " + path + " (run ingest first)");
    if (binio::expect_magic(in, kLogMagic, path) != kFormatVersion) {
      throw InputError(path + ": unsupported corpus format version");
    }
    CorpusStore store;
    while (in.peek() != std::char_traits<char>::eof()) store.append(read_record(in, path));

    std::ifstream idx(path + ".idx", std::ios::binary);
    if (!idx) throw InputError("cannot open corpus index: " + path + ".idx");
    if (binio::expect_magic(idx, kIndexMagic, path + ".idx") != kFormatVersion) {
      throw InputError(path + ".idx: unsupported index format version");
    }
    std::map<Day, std::vector<std::uint64_t>> loaded;
    const auto days = binio::get<std::uint64_t>(idx, "day count");
    for (std::uint64_t i = 0; i < days; ++i) {
      const Day d{std::chrono::days{binio::get<std::int32_t>(idx, "day")}};
      const auto n = binio::get<std::uint64_t>(idx, "offset count");
      auto &offs = loaded[d];
      for (std::uint64_t j = 0; j < n; ++j) offs.push_back(binio::get<std::uint64_t>(idx, "offset"));
    }
    if (loaded != store.day_index_) throw InputError(path + ".idx: day index does not match record log");
    return store;
  }

private:
  static std::uint64_t payload_size(const Tweet &t) {
    std::uint64_t n = 8 + 8 + 4 + t.text.size() + 1;
    if (t.profile_location) n += 4 + t.profile_location->size();
    return n;
  }

  static void write_record(std::ostream &out, const Tweet &t) {
    binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(payload_size(t)));
    binio::put<std::uint64_t>(out, t.id);
    binio::put<std::int64_t>(out, dates::to_unix(t.created_at));
    binio::put_bytes(out, t.text);
    binio::put<std::uint8_t>(out, t.profile_location ? 1 : 0);
    if (t.profile_location) binio::put_bytes(out, *t.profile_location);
  }

  static Tweet read_record(std::istream &in, const std::string &source) {
    const auto len = binio::get<std::uint32_t>(in, "record length");
    const auto id = binio::get<std::uint64_t>(in, "id");
    const auto ts = binio::get<std::int64_t>(in, "timestamp");
    auto text = binio::get_bytes(in, "text");
    std::optional<std::string> loc;
    if (binio::get<std::uint8_t>(in, "location flag") != 0) loc = binio::get_bytes(in, "location");
    Tweet t(id, dates::from_unix(ts), std::move(text), std::move(loc));
    if (payload_size(t) != len) throw InputError(source + ": record length prefix mismatch");
    return t;
  }

  std::vector<Tweet> records_;
  std::vector<std::uint64_t> offsets_;
  std::map<Day, std::vector<std::uint64_t>> day_index_;
  std::uint64_t next_offset_ = kHeaderBytes;
};

// Parses one NDJSON record: id (integer or decimal string), created_at
// (RFC 3339), text, user_location (string or null). Returns nullopt when the
// record is malformed.
inline std::optional<Tweet> parse_record(std::string_view line) {
  using nlohmann::json;
  json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  auto id_it = j.find("id");
  auto ts_it = j.find("created_at");
  auto text_it = j.find("text");
  if (id_it == j.end() || ts_it == j.end() || text_it == j.end()) return std::nullopt;
  if (!ts_it->is_string() || !text_it->is_string()) return std::nullopt;

  TweetId id = 0;
  if (id_it->is_number_unsigned()) {
    id = id_it->get<std::uint64_t>();
  } else if (id_it->is_number_integer()) {
    const auto v = id_it->get<std::int64_t>();
    if (v < 0) return std::nullopt;
    id = static_cast<TweetId>(v);
  } else if (id_it->is_string()) {
    const auto &s = id_it->get_ref<const std::string &>();
    if (s.empty() || s.size() > 20 || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      return std::nullopt;
    }
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), id);
    if (ec != std::errc{}) return std::nullopt;
  } else {
    return std::nullopt;
  }

  auto ts = dates::parse_rfc3339(ts_it->get_ref<const std::string &>());
  if (!ts) return std::nullopt;

  std::optional<std::string> loc;
  if (auto loc_it = j.find("user_location"); loc_it != j.end()) {
    if (loc_it->is_string()) {
      loc = loc_it->get<std::string>();
    } else if (!loc_it->is_null()) {
      return std::nullopt;
    }
  }
  return Tweet(id, *ts, text_it->get<std::string>(), std::move(loc));
}

struct IngestReport {
  std::size_t lines = 0;
  std::size_t accepted = 0;
  std::size_t malformed = 0;
  std::size_t no_keyword = 0;
  std::size_t out_of_window = 0;
};

struct IngestOptions {
  CollectionWindow window{};
  // >0 replays the stream at `replay_speed`x real time, pacing accepted
  // records by their timestamp gaps.
  double replay_speed = 0.0;
  std::function<void(std::chrono::duration<double>)> sleep = [](std::chrono::duration<double> d) {
    std::this_thread::sleep_for(d);
  };
};

inline IngestReport ingest(std::istream &reader, const KeywordFilter &filter, CorpusStore &store,
                           const IngestOptions &opts = {}) {
  if (!reader) throw InputError("ingest: unreadable input stream");
  IngestReport report;
  std::optional<Seconds> last_ts;
  std::string line;
  while (std::getline(reader, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++report.lines;
    auto tweet = parse_record(line);
    if (!tweet) {
      ++report.malformed;
      continue;
    }
    if (!opts.window.contains(tweet->created_at)) {
      ++report.out_of_window;
      continue;
    }
    if (!filter.matches(tweet->text)) {
      ++report.no_keyword;
      continue;
    }
    if (opts.replay_speed > 0.0) {
      if (last_ts && tweet->created_at > *last_ts) {
        opts.sleep(std::chrono::duration<double>((tweet->created_at - *last_ts).count() / opts.replay_speed));
      }
      last_ts = tweet->created_at;
    }
    store.append(std::move(*tweet));
    ++report.accepted;
  }
  if (reader.bad()) throw InputError("ingest: read error");
  return report;
}

inline IngestReport ingest_file(const std::string &path, const KeywordFilter &filter, CorpusStore &store,
                                const IngestOptions &opts = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open input: " + path);
  return ingest(in, filter, store, opts);
}

// Independent Bernoulli(fraction) selection per record, in store order.
inline std::vector<std::size_t> sample_indices(const CorpusStore &store, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ArgumentError("sample: fraction must be in (0, 1]");
  if (store.empty()) throw ArgumentError("sample: empty store");
  CounterRng rng(stream_key(seed, 0x73616D706C65ULL));
  std::vector<std::size_t> out;
  out.reserve(static_cast<std::size_t>(fraction * static_cast<double>(store.size())) + 16);
  for (std::size_t i = 0; i < store.size(); ++i) {
    if (fraction >= 1.0 || rng.uniform() < fraction) out.push_back(i);
  }
  return out;
}

inline std::vector<Tweet> sample(const CorpusStore &store, double fraction, std::uint64_t seed) {
  std::vector<Tweet> out;
  for (auto i : sample_indices(store, fraction, seed)) out.push_back(store[i]);
  return out;
}

} // namespace stancetopic
