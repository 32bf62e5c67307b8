#pragma once

// Pipeline configuration: line-oriented `key = value` under [section]
// headers, '#' comments. Relative paths resolve against the config file's
// directory.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "stancetopic/analytics.hpp"
#include "stancetopic/dates.hpp"
#include "stancetopic/error.hpp"
#include "stancetopic/lda.hpp"
#include "stancetopic/rng.hpp"

namespace stancetopic {

inline constexpr const char *kToolVersion = "0.1.0";

struct PipelineConfig {
  // [paths]
  std::vector<std::string> corpus_files;
  std::string stoplist, lexicon, gazetteer, ambiguity, polls, events;
  std::string output_dir = "out";

  // [collection]
  CollectionWindow window{};
  std::vector<std::string> keywords{"gun", "guns", "second amendment", "2nd amendment", "firearm", "firearms"};

  // [sample]
  double sample_fraction = 0.085;
  std::uint64_t sample_seed = 1;
  double heldout_fraction = 0.015;

  // [lda]
  TrainConfig train{};
  std::size_t max_types = kDefaultMaxTypes;
  std::size_t infer_iterations = 200;
  std::vector<std::size_t> sweep_topics{25, 50, 100, 250, 500};
  std::vector<double> sweep_alpha{0.25, 1.0, 10.0};

  // [analytics]
  Granularity granularity = Granularity::Week;
  SpikeParams spikes{};
  std::uint64_t min_support = 25;
  std::size_t top_n = 10;
  TopicWeighting weighting = TopicWeighting::Token;
  // 0 = shares over the whole collection; otherwise only the N days ending
  // at each poll's end date.
  std::size_t poll_window_days = 0;

  // [run]
  std::size_t workers = 1;

  std::uint64_t hash = 0;
  std::string source;

  std::vector<GridPoint> grid() const {
    std::vector<GridPoint> g;
    for (auto k : sweep_topics) {
      for (auto a : sweep_alpha) g.push_back({k, a});
    }
    return g;
  }
};

namespace config_detail {

inline std::string trim(const std::string &s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline std::vector<std::string> split_list(const std::string &v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

} // namespace config_detail

// Raw section.key -> (value, line) map; validates syntax only.
struct RawConfig {
  std::map<std::string, std::pair<std::string, std::size_t>> entries;
  std::string source;

  static RawConfig parse(std::istream &in, const std::string &source) {
    using config_detail::trim;
    RawConfig raw;
    raw.source = source;
    std::string section;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') throw ParseError(source, lineno, "unterminated section header");
        section = trim(line.substr(1, line.size() - 2));
        if (section.empty()) throw ParseError(source, lineno, "empty section name");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ParseError(source, lineno, "expected key = value");
      if (section.empty()) throw ParseError(source, lineno, "key outside of a [section]");
      const auto key = trim(line.substr(0, eq));
      if (key.empty()) throw ParseError(source, lineno, "empty key");
      const auto full = section + "." + key;
      if (raw.entries.contains(full)) throw ParseError(source, lineno, "duplicate key " + full);
      raw.entries[full] = {trim(line.substr(eq + 1)), lineno};
    }
    return raw;
  }
};

inline PipelineConfig build_config(const RawConfig &raw, const std::filesystem::path &base_dir) {
  using config_detail::split_list;
  PipelineConfig cfg;
  cfg.source = raw.source;
  std::set<std::string> used;

  auto fail = [&](const std::string &key, const std::string &why) -> ParseError {
    return ParseError(raw.source, raw.entries.at(key).second, key + ": " + why);
  };
  auto get = [&](const std::string &key) -> const std::string * {
    auto it = raw.entries.find(key);
    if (it == raw.entries.end()) return nullptr;
    used.insert(key);
    return &it->second.first;
  };
  auto path = [&](const std::string &key, std::string &dst) {
    if (auto v = get(key); v && !v->empty()) {
      std::filesystem::path p(*v);
      dst = (p.is_absolute() ? p : base_dir / p).lexically_normal().string();
    }
  };
  auto as_u64 = [&](const std::string &key, auto &dst) {
    if (auto v = get(key)) {
      try {
        std::size_t used_chars = 0;
        const auto x = std::stoull(*v, &used_chars);
        if (used_chars != v->size() || v->front() == '-') throw std::invalid_argument("");
        dst = static_cast<std::remove_reference_t<decltype(dst)>>(x);
      } catch (const std::logic_error &) {
        throw fail(key, "expected a non-negative integer, got '" + *v + "'");
      }
    }
  };
  auto as_double = [&](const std::string &key, double &dst) {
    if (auto v = get(key)) {
      try {
        std::size_t used_chars = 0;
        dst = std::stod(*v, &used_chars);
        if (used_chars != v->size()) throw std::invalid_argument("");
      } catch (const std::logic_error &) {
        throw fail(key, "expected a number, got '" + *v + "'");
      }
    }
  };
  auto as_bool = [&](const std::string &key, bool &dst) {
    if (auto v = get(key)) {
      if (*v == "true" || *v == "yes" || *v == "1") dst = true;
      else if (*v == "false" || *v == "no" || *v == "0") dst = false;
      else throw fail(key, "expected true/false");
    }
  };

  if (auto v = get("paths.corpus")) {
    for (const auto &f : split_list(*v)) {
      std::filesystem::path p(f);
      cfg.corpus_files.push_back((p.is_absolute() ? p : base_dir / p).lexically_normal().string());
    }
  }
  path("paths.stoplist", cfg.stoplist);
  path("paths.lexicon", cfg.lexicon);
  path("paths.gazetteer", cfg.gazetteer);
  path("paths.ambiguity", cfg.ambiguity);
  path("paths.polls", cfg.polls);
  path("paths.events", cfg.events);
  path("paths.output", cfg.output_dir);

  if (auto v = get("collection.window_start")) {
    auto t = dates::parse_rfc3339(*v);
    if (!t) throw fail("collection.window_start", "expected an RFC 3339 timestamp");
    cfg.window.begin = *t;
  }
  if (auto v = get("collection.window_end")) {
    auto t = dates::parse_rfc3339(*v);
    if (!t) throw fail("collection.window_end", "expected an RFC 3339 timestamp");
    cfg.window.end = *t;
  }
  if (auto v = get("collection.keywords")) cfg.keywords = split_list(*v);

  as_double("sample.fraction", cfg.sample_fraction);
  as_u64("sample.seed", cfg.sample_seed);
  as_double("sample.heldout_fraction", cfg.heldout_fraction);

  as_u64("lda.topics", cfg.train.num_topics);
  as_double("lda.alpha_init", cfg.train.alpha_init);
  as_bool("lda.alpha_init_is_sum", cfg.train.alpha_init_is_sum);
  as_double("lda.beta", cfg.train.beta);
  as_u64("lda.burn_in", cfg.train.burn_in);
  as_u64("lda.iterations", cfg.train.total_iterations);
  as_u64("lda.hyperopt_interval", cfg.train.hyperopt_interval);
  as_u64("lda.seed", cfg.train.seed);
  as_u64("lda.loglik_interval", cfg.train.loglik_interval);
  as_u64("lda.max_types", cfg.max_types);
  as_u64("lda.infer_iterations", cfg.infer_iterations);
  if (auto v = get("lda.sweep_topics")) {
    cfg.sweep_topics.clear();
    for (const auto &s : split_list(*v)) {
      try {
        cfg.sweep_topics.push_back(std::stoull(s));
      } catch (const std::logic_error &) {
        throw fail("lda.sweep_topics", "bad integer '" + s + "'");
      }
    }
  }
  if (auto v = get("lda.sweep_alpha")) {
    cfg.sweep_alpha.clear();
    for (const auto &s : split_list(*v)) {
      try {
        cfg.sweep_alpha.push_back(std::stod(s));
      } catch (const std::logic_error &) {
        throw fail("lda.sweep_alpha", "bad number '" + s + "'");
      }
    }
  }

  if (auto v = get("analytics.granularity")) {
    if (*v == "week") cfg.granularity = Granularity::Week;
    else if (*v == "day") cfg.granularity = Granularity::Day;
    else throw fail("analytics.granularity", "expected day or week");
  }
  as_u64("analytics.spike_window", cfg.spikes.trailing_window);
  as_double("analytics.spike_z", cfg.spikes.z_threshold);
  as_double("analytics.spike_stddev_floor", cfg.spikes.stddev_floor);
  as_u64("analytics.min_support", cfg.min_support);
  as_u64("analytics.top_n", cfg.top_n);
  if (auto v = get("analytics.topic_weighting")) {
    if (*v == "token") cfg.weighting = TopicWeighting::Token;
    else if (*v == "document") cfg.weighting = TopicWeighting::Document;
    else throw fail("analytics.topic_weighting", "expected token or document");
  }

  as_u64("analytics.poll_window_days", cfg.poll_window_days);

  as_u64("run.workers", cfg.workers);

  for (const auto &[key, v] : raw.entries) {
    if (!used.contains(key)) throw ParseError(raw.source, v.second, "unknown key " + key);
  }
  return cfg;
}

// Content hash over the effective settings (output dir excluded), stable
// under reordering, comments and whitespace.
inline std::uint64_t config_hash(const RawConfig &raw, std::size_t effective_workers) {
  std::uint64_t h = fnv1a("stancetopic-config", 18);
  for (const auto &[key, v] : raw.entries) {
    if (key == "paths.output" || key == "run.workers") continue;
    const auto line = key + "=" + v.first + "\n";
    h = fnv1a(line.data(), line.size(), h);
  }
  const auto w = "run.workers=" + std::to_string(effective_workers) + "\n";
  return fnv1a(w.data(), w.size(), h);
}

// Command-line overrides win over the file; workers feed into the hash
// because multi-worker training changes results.
inline PipelineConfig load_config(const std::string &path, std::optional<std::size_t> workers = std::nullopt,
                                  std::optional<std::string> output_dir = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config: " + path);
  const auto raw = RawConfig::parse(in, path);
  auto cfg = build_config(raw, std::filesystem::path(path).parent_path());
  if (workers) cfg.workers = *workers;
  if (output_dir) cfg.output_dir = *output_dir;
  if (cfg.workers == 0) throw ArgumentError("workers must be >= 1");
  cfg.hash = config_hash(raw, cfg.workers);
  return cfg;
}

// Checks every configured input path exists.
inline void check_inputs_exist(const PipelineConfig &cfg) {
  std::vector<std::string> paths = cfg.corpus_files;
  for (const auto *p : {&cfg.stoplist, &cfg.lexicon, &cfg.gazetteer, &cfg.ambiguity, &cfg.polls, &cfg.events}) {
    if (!p->empty()) paths.push_back(*p);
  }
  for (const auto &p : paths) {
    if (!std::filesystem::exists(p)) throw InputError("configured input does not exist: " + p);
  }
}

} // namespace stancetopic
