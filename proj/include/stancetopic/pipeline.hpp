#pragma once

// Batch pipeline behind the CLI. Each command reads its upstream artifacts
// from the output directory and writes TSV files that start with a '#'
// metadata block (tool version, config hash, seeds, parameters).

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stancetopic/analytics.hpp"
#include "stancetopic/config.hpp"
#include "stancetopic/corpus.hpp"
#include "stancetopic/error.hpp"
#include "stancetopic/geo.hpp"
#include "stancetopic/lda.hpp"
#include "stancetopic/stance.hpp"
#include "stancetopic/stats.hpp"
#include "stancetopic/text.hpp"

namespace stancetopic {

class MissingArtifact : public InputError {
public:
  MissingArtifact(const std::string &path, const std::string &command)
      : InputError("missing " + path + ": run " + command + " first"), command_(command) {}
  const std::string &command() const { return command_; }

private:
  std::string command_;
};

namespace artifacts {
inline constexpr const char *kCorpus = "corpus.bin";
inline constexpr const char *kIngestReport = "ingest.tsv";
inline constexpr const char *kSample = "sample.tsv";
inline constexpr const char *kVocab = "vocab.tsv";
inline constexpr const char *kModel = "model.bin";
inline constexpr const char *kTrainLog = "train_loglik.tsv";
inline constexpr const char *kTopicWords = "topic_words.tsv";
inline constexpr const char *kAlpha = "alpha.tsv";
inline constexpr const char *kSweep = "sweep.tsv";
inline constexpr const char *kTheta = "theta.tsv";
inline constexpr const char *kLabels = "labels.tsv";
inline constexpr const char *kLabelSummary = "label_summary.tsv";
inline constexpr const char *kGeo = "geo.tsv";
inline constexpr const char *kGeoSummary = "geo_summary.tsv";
inline constexpr const char *kSpikes = "spikes.tsv";
inline constexpr const char *kStanceTopics = "stance_topics.tsv";
inline constexpr const char *kEvents = "events.tsv";
inline constexpr const char *kStateShares = "state_shares.tsv";
inline constexpr const char *kStateExcluded = "state_shares_excluded.tsv";
inline constexpr const char *kCorrelation = "correlation.tsv";
inline constexpr const char *kCorrelationSummary = "correlation_summary.txt";

inline std::string series(Granularity g) { return "series_" + std::string(to_string(g)) + ".tsv"; }
} // namespace artifacts

namespace pipeline_detail {

inline std::string num(double v, int precision = 9) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

inline std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

inline std::vector<std::string> split_tabs(const std::string &line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

struct Table {
  std::string path;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    throw InputError(path + ": missing column '" + std::string(name) + "'");
  }
};

// Skips '#' lines; the first remaining line is the column header.
inline Table read_table(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  Table t;
  t.path = path;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_tabs(line);
    if (t.columns.empty()) {
      t.columns = std::move(fields);
      continue;
    }
    if (fields.size() != t.columns.size()) {
      throw ParseError(path, lineno, "expected " + std::to_string(t.columns.size()) + " fields");
    }
    t.rows.push_back(std::move(fields));
    t.lines.push_back(lineno);
  }
  return t;
}

inline std::uint64_t parse_u64(const Table &t, std::size_t row, const std::string &s) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw ParseError(t.path, t.lines[row], "bad integer '" + s + "'");
  return v;
}

inline double parse_double(const Table &t, std::size_t row, const std::string &s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::logic_error &) {
  }
  throw ParseError(t.path, t.lines[row], "bad number '" + s + "'");
}

} // namespace pipeline_detail

class Pipeline {
public:
  // level is "info" or "warn".
  using Logger = std::function<void(std::string_view level, const std::string &message)>;

  explicit Pipeline(PipelineConfig cfg, Logger log = {}) : cfg_(std::move(cfg)), log_(std::move(log)) {}

  const PipelineConfig &config() const { return cfg_; }

  std::string artifact(std::string_view name) const {
    return (std::filesystem::path(cfg_.output_dir) / std::string(name)).string();
  }

  IngestReport ingest() {
    using pipeline_detail::num;
    if (cfg_.corpus_files.empty()) throw ArgumentError("paths.corpus lists no input files");
    const KeywordFilter filter(cfg_.keywords);
    IngestOptions opts;
    opts.window = cfg_.window;
    CorpusStore store;
    IngestReport total;
    std::vector<std::pair<std::string, IngestReport>> per_file;
    for (const auto &f : cfg_.corpus_files) {
      const auto r = ingest_file(f, filter, store, opts);
      per_file.emplace_back(f, r);
      total.lines += r.lines;
      total.accepted += r.accepted;
      total.malformed += r.malformed;
      total.no_keyword += r.no_keyword;
      total.out_of_window += r.out_of_window;
    }
    ensure_output_dir();
    store.save(artifact(artifacts::kCorpus));
    auto out = open_output(artifacts::kIngestReport, "ingest",
                           {{"window", dates::format_rfc3339(cfg_.window.begin) + " .. " +
                                           dates::format_rfc3339(cfg_.window.end)},
                            {"keywords", join(cfg_.keywords, ",")}});
    out << "file\tlines\taccepted\tmalformed\tno_keyword\tout_of_window\n";
    auto row = [&](const std::string &name, const IngestReport &r) {
      out << name << '\t' << r.lines << '\t' << r.accepted << '\t' << r.malformed << '\t' << r.no_keyword << '\t'
          << r.out_of_window << '\n';
    };
    for (const auto &[f, r] : per_file) row(std::filesystem::path(f).filename().string(), r);
    row("total", total);
    info("ingest: " + std::to_string(total.accepted) + " of " + std::to_string(total.lines) + " records accepted (" +
         std::to_string(total.malformed) + " malformed, " + std::to_string(total.no_keyword) + " without keyword, " +
         std::to_string(total.out_of_window) + " outside window)");
    return total;
  }

  void sample() {
    const auto store = load_store();
    const auto idx = sample_indices(store, cfg_.sample_fraction, cfg_.sample_seed);
    if (!(cfg_.heldout_fraction >= 0.0 && cfg_.heldout_fraction < 1.0)) {
      throw ArgumentError("sample.heldout_fraction must be in [0, 1)");
    }
    CounterRng rng(stream_key(cfg_.sample_seed, 0x68656C646F7574ULL));
    auto out = open_output(artifacts::kSample, "sample",
                           {{"fraction", pipeline_detail::num(cfg_.sample_fraction)},
                            {"heldout_fraction", pipeline_detail::num(cfg_.heldout_fraction)}});
    out << "index\ttweet_id\tsplit\n";
    std::size_t held = 0;
    for (auto i : idx) {
      const bool h = cfg_.heldout_fraction > 0.0 && rng.uniform() < cfg_.heldout_fraction;
      held += h;
      out << i << '\t' << store[i].id << '\t' << (h ? "heldout" : "train") << '\n';
    }
    info("sample: " + std::to_string(idx.size()) + " of " + std::to_string(store.size()) + " records (" +
         std::to_string(held) + " held out)");
  }

  void train() {
    using pipeline_detail::num;
    const auto store = load_store();
    const auto split = load_sample(store);
    const auto stop = stopwords();
    std::vector<TokenSequence> tokens;
    for (auto i : split.train) tokens.push_back(tokenize(store[i].text, stop));
    const auto vocab = build_vocabulary(tokens, cfg_.max_types, &stop);
    if (vocab.empty()) throw ArgumentError("training sample contains no tokens");
    std::vector<EncodedDoc> docs;
    docs.reserve(tokens.size());
    for (const auto &t : tokens) docs.push_back(encode(t, vocab));

    TrainConfig tc = cfg_.train;
    tc.workers = cfg_.workers;
    info("train: " + std::to_string(docs.size()) + " documents, " + std::to_string(vocab.size()) + " types, K=" +
         std::to_string(tc.num_topics));
    const std::size_t every = std::max<std::size_t>(tc.total_iterations / 10, 1);
    auto result = stancetopic::train(std::move(docs), tc, vocab.size(), vocab.fingerprint(), [&](const SweepStat &s) {
      if (s.iteration % every == 0) info("  sweep " + std::to_string(s.iteration) + " log-likelihood " + num(s.log_likelihood));
    });
    for (const auto &w : result.warnings) warn(w);

    const auto params = train_params(tc);
    {
      auto out = open_output(artifacts::kVocab, "train", {{"max_types", std::to_string(cfg_.max_types)}});
      vocab.save_tsv(out);
    }
    result.model.save(artifact(artifacts::kModel));
    {
      auto out = open_output(artifacts::kTrainLog, "train", params);
      out << "iteration\tlog_likelihood\talpha_sum\n";
      for (const auto &s : result.log) out << s.iteration << '\t' << num(s.log_likelihood, 12) << '\t' << num(s.alpha_sum) << '\n';
    }
    {
      auto out = open_output(artifacts::kAlpha, "train", params);
      out << "topic\talpha\n";
      for (std::size_t k = 0; k < result.model.num_topics(); ++k) out << k << '\t' << num(result.model.alpha()[k]) << '\n';
    }
    {
      auto out = open_output(artifacts::kTopicWords, "train", params);
      out << "topic\trank\tterm\tprob\n";
      for (std::size_t k = 0; k < result.model.num_topics(); ++k) {
        const auto words = top_words(result.model, vocab, k, kReportWords);
        for (std::size_t r = 0; r < words.size(); ++r) {
          out << k << '\t' << r + 1 << '\t' << words[r].term << '\t' << num(words[r].prob) << '\n';
        }
      }
    }
    if (!result.log.empty()) info("train: final log-likelihood " + num(result.log.back().log_likelihood));
  }

  SweepResult sweep() {
    using pipeline_detail::num;
    const auto store = load_store();
    const auto split = load_sample(store);
    if (split.heldout.empty()) throw ArgumentError("no held-out documents; set sample.heldout_fraction > 0 and run sample");
    const auto stop = stopwords();
    std::vector<TokenSequence> tokens;
    for (auto i : split.train) tokens.push_back(tokenize(store[i].text, stop));
    const auto vocab = build_vocabulary(tokens, cfg_.max_types, &stop);
    if (vocab.empty()) throw ArgumentError("training sample contains no tokens");
    std::vector<EncodedDoc> docs, held;
    for (const auto &t : tokens) docs.push_back(encode(t, vocab));
    for (auto i : split.heldout) held.push_back(encode(tokenize(store[i].text, stop), vocab));

    TrainConfig tc = cfg_.train;
    tc.workers = cfg_.workers;
    const auto grid = cfg_.grid();
    info("sweep: " + std::to_string(grid.size()) + " grid points");
    auto result = sweep_hyperparameters(docs, held, grid, tc, vocab.size(), cfg_.infer_iterations);
    auto params = train_params(tc);
    params.emplace_back("infer_iterations", std::to_string(cfg_.infer_iterations));
    auto out = open_output(artifacts::kSweep, "sweep", params);
    out << "topics\talpha_init\theldout_loglik\tper_token\ttokens\tselected\n";
    for (const auto &row : result.table) {
      const bool sel = row.point.num_topics == result.best.num_topics && row.point.alpha_init == result.best.alpha_init;
      out << row.point.num_topics << '\t' << num(row.point.alpha_init) << '\t' << num(row.score.total, 12) << '\t'
          << num(row.score.per_token, 12) << '\t' << row.score.tokens << '\t' << (sel ? "yes" : "no") << '\n';
    }
    info("sweep: selected K=" + std::to_string(result.best.num_topics) + " alpha_init=" + num(result.best.alpha_init));
    return result;
  }

  void infer() {
    using pipeline_detail::num;
    const auto model = load_model();
    const auto vocab = load_vocab();
    model.check_vocabulary(vocab);
    const auto store = load_store();
    const auto stop = stopwords();
    std::vector<EncodedDoc> docs;
    docs.reserve(store.size());
    for (const auto &t : store) docs.push_back(encode(tokenize(t.text, stop), vocab));
    info("infer: " + std::to_string(docs.size()) + " documents, K=" + std::to_string(model.num_topics()));
    const auto thetas = infer_corpus(model, docs, cfg_.infer_iterations, cfg_.train.seed, cfg_.workers);
    auto out = open_output(artifacts::kTheta, "infer", {{"infer_iterations", std::to_string(cfg_.infer_iterations)},
                                                        {"topics", std::to_string(model.num_topics())}});
    out << "tweet_id\ttokens";
    for (std::size_t k = 0; k < model.num_topics(); ++k) out << "\ttopic_" << k;
    out << '\n';
    for (std::size_t d = 0; d < store.size(); ++d) {
      out << store[d].id << '\t' << docs[d].size();
      for (double p : thetas[d]) out << '\t' << num(p, 8);
      out << '\n';
    }
  }

  CorpusLabels label() {
    const auto store = load_store();
    const auto lex = lexicon();
    auto labels = label_corpus(store, lex);
    {
      auto out = open_output(artifacts::kLabels, "label", {});
      out << "tweet_id\tlabel\n";
      for (std::size_t i = 0; i < store.size(); ++i) out << store[i].id << '\t' << to_string(labels.labels[i]) << '\n';
    }
    {
      auto out = open_output(artifacts::kLabelSummary, "label", {});
      out << "label\tcount\n";
      out << "Control\t" << labels.summary.control << "\nRights\t" << labels.summary.rights << "\nUnlabeled\t"
          << labels.summary.unlabeled << "\nTotal\t" << labels.summary.total() << '\n';
    }
    info("label: " + std::to_string(labels.summary.control) + " Control, " + std::to_string(labels.summary.rights) +
         " Rights, " + std::to_string(labels.summary.unlabeled) + " Unlabeled");
    return labels;
  }

  GeocodeResult geocode() {
    using pipeline_detail::num;
    const auto store = load_store();
    const auto gaz = gazetteer();
    auto geo = geocode_corpus(store, gaz);
    {
      auto out = open_output(artifacts::kGeo, "geocode", {});
      out << "tweet_id\tstate\n";
      for (std::size_t i = 0; i < store.size(); ++i) out << store[i].id << '\t' << geo.states[i].value_or("") << '\n';
    }
    std::map<StateCode, std::size_t> per_state;
    for (const auto &s : geo.states) {
      if (s) ++per_state[*s];
    }
    {
      auto out = open_output(artifacts::kGeoSummary, "geocode", {{"records", std::to_string(store.size())},
                                                                {"resolved", std::to_string(geo.resolved)},
                                                                {"coverage", num(geo.coverage(), 6)}});
      out << "state\trecords\n";
      for (const auto &[s, n] : per_state) out << s << '\t' << n << '\n';
    }
    info("geocode: resolved " + std::to_string(geo.resolved) + " of " + std::to_string(store.size()) + " (" +
         num(100.0 * geo.coverage(), 4) + "%)");
    return geo;
  }

  // Writes both daily and weekly series; spikes reads the configured one.
  void trends() {
    const auto store = load_store();
    const auto labels = load_labels(store);
    for (auto g : {Granularity::Day, Granularity::Week}) {
      const auto ts = aggregate_counts(store, labels, g, cfg_.window);
      auto out = open_output(artifacts::series(g), "trends", {{"granularity", std::string(to_string(g))}});
      out << "bucket_start\toverall\tcontrol\trights\n";
      for (const auto &b : ts.buckets) {
        out << dates::format_date(b.start) << '\t' << b.overall << '\t' << b.control << '\t' << b.rights << '\n';
      }
    }
    info("trends: wrote daily and weekly series");
  }

  std::vector<Spike> spikes() {
    using pipeline_detail::num;
    const auto ts = load_series(cfg_.granularity);
    auto found = detect_spikes(ts, cfg_.spikes);
    std::vector<EventWindow> events;
    if (!cfg_.events.empty()) events = load_events(cfg_.events);
    const auto width = std::chrono::days{cfg_.granularity == Granularity::Week ? 7 : 1};
    auto out = open_output(artifacts::kSpikes, "spikes",
                           {{"granularity", std::string(to_string(cfg_.granularity))},
                            {"trailing_window", std::to_string(cfg_.spikes.trailing_window)},
                            {"z_threshold", num(cfg_.spikes.z_threshold)},
                            {"stddev_floor", num(cfg_.spikes.stddev_floor)},
                            {"rule", "count > trailing mean + z * max(population sd, floor), strict left / weak right local maximum"}});
    out << "bucket_start\tstance\tcount\ttrailing_mean\ttrailing_sd\tz\tevents\n";
    for (const auto &s : found) {
      std::vector<std::string> names;
      for (const auto &e : events) {
        if (e.date >= s.start && e.date < s.start + width) names.push_back(e.name);
      }
      out << dates::format_date(s.start) << '\t' << to_string(s.stance) << '\t' << num(s.count) << '\t'
          << num(s.trailing_mean) << '\t' << num(s.trailing_stddev) << '\t' << num(s.z, 6) << '\t' << join(names, "; ")
          << '\n';
    }
    info("spikes: " + std::to_string(found.size()) + " flagged");
    return found;
  }

  void topics() {
    using pipeline_detail::num;
    const auto store = load_store();
    const auto labels = load_labels(store);
    const auto theta = load_theta(store);
    std::optional<LdaModel> model;
    std::optional<Vocabulary> vocab;
    if (std::filesystem::exists(artifact(artifacts::kModel)) && std::filesystem::exists(artifact(artifacts::kVocab))) {
      model = load_model();
      vocab = load_vocab();
      if (model->num_topics() != theta.k) model.reset();
    }
    const std::size_t n = std::min(cfg_.top_n, theta.k);
    auto out = open_output(artifacts::kStanceTopics, "topics",
                           {{"top_n", std::to_string(n)},
                            {"weighting", cfg_.weighting == TopicWeighting::Token ? "token" : "document"}});
    out << "stance\trank\ttopic\tprob\tshare\tterms\n";
    for (Stance s : {Stance::Control, Stance::Rights}) {
      if (std::find(labels.begin(), labels.end(), s) == labels.end()) {
        warn("topics: no " + std::string(to_string(s)) + " documents");
        continue;
      }
      const auto dist = stance_topic_distribution(s, labels, theta.rows, theta.lengths, cfg_.weighting);
      const auto prof = top_topics(dist, n);
      for (std::size_t r = 0; r < prof.topic_ids.size(); ++r) {
        const auto k = prof.topic_ids[r];
        std::string terms;
        if (model) {
          for (const auto &t : top_words(*model, *vocab, k, 5)) terms += (terms.empty() ? "" : " ") + t.term;
        }
        out << to_string(s) << '\t' << r + 1 << '\t' << k << '\t' << num(dist[k]) << '\t' << num(prof.proportions[r])
            << '\t' << terms << '\n';
      }
    }
    info("topics: wrote top " + std::to_string(n) + " topics per stance");
  }

  void events() {
    using pipeline_detail::num;
    if (cfg_.events.empty()) throw ArgumentError("paths.events is not set");
    const auto events = load_events(cfg_.events);
    const auto store = load_store();
    const auto labels = load_labels(store);
    const auto theta = load_theta(store);
    const auto overall = load_stance_topics();
    std::vector<Day> days;
    days.reserve(store.size());
    for (const auto &t : store) days.push_back(t.day());

    std::vector<std::string> warnings;
    std::vector<std::string> rows;
    for (const auto &[stance, prof] : overall) {
      for (std::size_t r = 0; r < prof.topic_ids.size(); ++r) {
        rows.push_back("all\t" + std::string(to_string(stance)) + '\t' + std::to_string(prof.topic_ids[r]) + '\t' +
                       num(prof.proportions[r]));
      }
    }
    for (const auto &e : events) {
      for (const auto &[stance, prof] : overall) {
        const auto ep = event_topic_profile(e, stance, prof.topic_ids, labels, theta.rows, theta.lengths, days,
                                            cfg_.weighting);
        if (ep.warning) {
          warnings.push_back(*ep.warning);
          warn("events: " + *ep.warning);
          continue;
        }
        for (std::size_t r = 0; r < ep.profile.topic_ids.size(); ++r) {
          rows.push_back(e.name + '\t' + std::string(to_string(stance)) + '\t' +
                         std::to_string(ep.profile.topic_ids[r]) + '\t' + num(ep.profile.proportions[r]));
        }
      }
    }
    std::vector<std::pair<std::string, std::string>> params{{"window_days", "7 (event date +/- 3)"}};
    for (const auto &w : warnings) params.emplace_back("warning", w);
    auto out = open_output(artifacts::kEvents, "events", params);
    out << "event\tstance\ttopic\tshare\n";
    for (const auto &r : rows) out << r << '\n';
    info("events: profiled " + std::to_string(events.size()) + " events");
  }

  PollCorrelation correlate() {
    using pipeline_detail::num;
    if (cfg_.polls.empty()) throw ArgumentError("paths.polls is not set");
    const auto polls = load_polls(cfg_.polls);
    const auto store = load_store();
    const auto labels = load_labels(store);
    const auto states = load_geo(store);
    const auto props = state_stance_proportion(labels, states, cfg_.min_support);
    const std::vector<std::pair<std::string, std::string>> params{
        {"min_support", std::to_string(cfg_.min_support)},
        {"poll_window_days", cfg_.poll_window_days == 0 ? "all" : std::to_string(cfg_.poll_window_days)}};
    auto write_shares = [&](const char *name, const std::map<StateCode, StateShare> &m) {
      auto out = open_output(name, "correlate", params);
      out << "state\tcontrol_share\tn_control\tn_rights\n";
      for (const auto &[s, v] : m) out << s << '\t' << num(v.control_share) << '\t' << v.n_control << '\t' << v.n_rights << '\n';
    };
    write_shares(artifacts::kStateShares, props.shares);
    write_shares(artifacts::kStateExcluded, props.excluded);

    PollCorrelation corr;
    if (cfg_.poll_window_days == 0) {
      corr = correlate_polls(polls, props.shares);
    } else {
      std::vector<Day> days;
      days.reserve(store.size());
      for (const auto &t : store) days.push_back(t.day());
      corr = correlate_polls_windowed(polls, labels, states, days, cfg_.poll_window_days, cfg_.min_support);
    }
    for (const auto &p : corr.unmatched) {
      warn("correlate: no state share for poll " + p.state + " " + dates::format_date(p.end_date));
    }
    const auto summary = "r=" + num(corr.r, 6) + " slope=" + num(corr.fit.slope, 6) + " intercept=" +
                         num(corr.fit.intercept, 6) + " r2=" + num(corr.fit.r_squared, 6) +
                         " n=" + std::to_string(corr.pairs.size());
    {
      auto p2 = params;
      p2.emplace_back("summary", summary);
      auto out = open_output(artifacts::kCorrelation, "correlate", p2);
      out << "state\tend_date\tsupport_fraction\tcontrol_share\tn_control\tn_rights\n";
      for (const auto &pp : corr.pairs) {
        out << pp.poll.state << '\t' << dates::format_date(pp.poll.end_date) << '\t' << num(*pp.poll.support_fraction)
            << '\t' << num(pp.control_share) << '\t' << pp.n_control << '\t' << pp.n_rights << '\n';
      }
    }
    {
      std::ofstream out(artifact(artifacts::kCorrelationSummary), std::ios::binary);
      out << summary << '\n';
    }
    info("correlate: " + summary);
    return corr;
  }

  // label -> geocode -> infer -> trends -> spikes -> topics -> events -> correlate.
  // Events and correlate are skipped when their input files are not configured.
  void report() {
    require(artifacts::kCorpus, "ingest");
    require(artifacts::kModel, "train");
    require(artifacts::kVocab, "train");
    label();
    geocode();
    infer();
    trends();
    spikes();
    topics();
    if (cfg_.events.empty()) info("report: paths.events not set, skipping events");
    else events();
    if (cfg_.polls.empty()) info("report: paths.polls not set, skipping correlate");
    else correlate();
  }

  static constexpr std::size_t kReportWords = 20;

private:
  struct SampleSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> heldout;
  };

  struct ThetaTable {
    std::size_t k = 0;
    std::vector<TopicDistribution> rows;
    std::vector<std::size_t> lengths;
  };

  void info(const std::string &m) const {
    if (log_) log_("info", m);
  }
  void warn(const std::string &m) const {
    if (log_) log_("warn", m);
  }

  static std::string join(const std::vector<std::string> &xs, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) out += sep;
      out += xs[i];
    }
    return out;
  }

  void ensure_output_dir() const { std::filesystem::create_directories(cfg_.output_dir); }

  void require(const char *name, const char *command) const {
    if (!std::filesystem::exists(artifact(name))) throw MissingArtifact(artifact(name), command);
  }

  std::ofstream open_output(const std::string &name, const std::string &command,
                            const std::vector<std::pair<std::string, std::string>> &params) const {
    ensure_output_dir();
    const auto path = artifact(name);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << "# tool: stancetopic " << kToolVersion << '\n'
        << "# command: " << command << '\n'
        << "# config_hash: " << pipeline_detail::hex64(cfg_.hash) << '\n'
        << "# seeds: sample=" << cfg_.sample_seed << " lda=" << cfg_.train.seed << '\n'
        << "# workers: " << cfg_.workers << '\n'
        << "# retweets: kept\n";
    for (const auto &[k, v] : params) out << "# " << k << ": " << v << '\n';
    return out;
  }

  std::vector<std::pair<std::string, std::string>> train_params(const TrainConfig &tc) const {
    using pipeline_detail::num;
    return {{"topics", std::to_string(tc.num_topics)},
            {"alpha_init", num(tc.alpha_init) + (tc.alpha_init_is_sum ? " (sum)" : " (per topic)")},
            {"beta", num(tc.beta)},
            {"burn_in", std::to_string(tc.burn_in)},
            {"iterations", std::to_string(tc.total_iterations)},
            {"hyperopt_interval", std::to_string(tc.hyperopt_interval)}};
  }

  StopwordList stopwords() const {
    return cfg_.stoplist.empty() ? StopwordList::english_social() : StopwordList::load(cfg_.stoplist);
  }
  HashtagLexicon lexicon() const {
    return cfg_.lexicon.empty() ? HashtagLexicon::gun_debate() : HashtagLexicon::load(cfg_.lexicon);
  }
  Gazetteer gazetteer() const {
    if (!cfg_.gazetteer.empty()) return Gazetteer::load(cfg_.gazetteer, cfg_.ambiguity);
    auto g = Gazetteer::us_default();
    if (!cfg_.ambiguity.empty()) g.load_ambiguity(cfg_.ambiguity);
    return g;
  }

  CorpusStore load_store() const {
    require(artifacts::kCorpus, "ingest");
    return CorpusStore::load(artifact(artifacts::kCorpus));
  }

  LdaModel load_model() const {
    require(artifacts::kModel, "train");
    return LdaModel::load(artifact(artifacts::kModel));
  }

  Vocabulary load_vocab() const {
    require(artifacts::kVocab, "train");
    return Vocabulary::load_tsv(artifact(artifacts::kVocab));
  }

  // Checks that a per-record table lines up with the current corpus.
  void check_ids(const pipeline_detail::Table &t, const CorpusStore &store, const char *command) const {
    const auto col = t.column("tweet_id");
    bool ok = t.rows.size() == store.size();
    for (std::size_t i = 0; ok && i < t.rows.size(); ++i) {
      ok = pipeline_detail::parse_u64(t, i, t.rows[i][col]) == store[i].id;
    }
    if (!ok) throw InputError(t.path + " does not match the current corpus: run " + command + " again");
  }

  SampleSplit load_sample(const CorpusStore &store) const {
    require(artifacts::kSample, "sample");
    const auto t = pipeline_detail::read_table(artifact(artifacts::kSample));
    const auto ci = t.column("index"), cid = t.column("tweet_id"), cs = t.column("split");
    SampleSplit out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const auto i = pipeline_detail::parse_u64(t, r, t.rows[r][ci]);
      if (i >= store.size() || store[i].id != pipeline_detail::parse_u64(t, r, t.rows[r][cid])) {
        throw InputError(t.path + " does not match the current corpus: run sample again");
      }
      (t.rows[r][cs] == "heldout" ? out.heldout : out.train).push_back(i);
    }
    if (out.train.empty()) throw ArgumentError("sample contains no training documents");
    return out;
  }

  std::vector<Stance> load_labels(const CorpusStore &store) const {
    require(artifacts::kLabels, "label");
    const auto t = pipeline_detail::read_table(artifact(artifacts::kLabels));
    check_ids(t, store, "label");
    const auto cl = t.column("label");
    std::vector<Stance> out;
    out.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      auto s = parse_stance(t.rows[r][cl]);
      if (!s) throw ParseError(t.path, t.lines[r], "unknown label '" + t.rows[r][cl] + "'");
      out.push_back(*s);
    }
    return out;
  }

  std::vector<std::optional<StateCode>> load_geo(const CorpusStore &store) const {
    require(artifacts::kGeo, "geocode");
    const auto t = pipeline_detail::read_table(artifact(artifacts::kGeo));
    check_ids(t, store, "geocode");
    const auto cs = t.column("state");
    std::vector<std::optional<StateCode>> out;
    out.reserve(t.rows.size());
    for (const auto &row : t.rows) {
      if (row[cs].empty()) out.emplace_back();
      else out.emplace_back(row[cs]);
    }
    return out;
  }

  ThetaTable load_theta(const CorpusStore &store) const {
    require(artifacts::kTheta, "infer");
    const auto t = pipeline_detail::read_table(artifact(artifacts::kTheta));
    check_ids(t, store, "infer");
    ThetaTable out;
    out.k = t.columns.size() - 2;
    const auto cn = t.column("tokens");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      out.lengths.push_back(pipeline_detail::parse_u64(t, r, t.rows[r][cn]));
      TopicDistribution th(out.k);
      for (std::size_t k = 0; k < out.k; ++k) th[k] = pipeline_detail::parse_double(t, r, t.rows[r][k + 2]);
      out.rows.push_back(std::move(th));
    }
    return out;
  }

  TimeSeries load_series(Granularity g) const {
    const auto name = artifacts::series(g);
    if (!std::filesystem::exists(artifact(name))) throw MissingArtifact(artifact(name), "trends");
    const auto t = pipeline_detail::read_table(artifact(name));
    const auto cb = t.column("bucket_start"), co = t.column("overall"), cc = t.column("control"),
               cr = t.column("rights");
    TimeSeries ts;
    ts.granularity = g;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      auto d = dates::parse_date(t.rows[r][cb]);
      if (!d) throw ParseError(t.path, t.lines[r], "bad date '" + t.rows[r][cb] + "'");
      ts.buckets.push_back({*d, pipeline_detail::parse_u64(t, r, t.rows[r][co]),
                            pipeline_detail::parse_u64(t, r, t.rows[r][cc]),
                            pipeline_detail::parse_u64(t, r, t.rows[r][cr])});
    }
    return ts;
  }

  std::vector<std::pair<Stance, TopicProfile>> load_stance_topics() const {
    require(artifacts::kStanceTopics, "topics");
    const auto t = pipeline_detail::read_table(artifact(artifacts::kStanceTopics));
    const auto cs = t.column("stance"), ck = t.column("topic"), csh = t.column("share");
    std::vector<std::pair<Stance, TopicProfile>> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      auto s = parse_stance(t.rows[r][cs]);
      if (!s) throw ParseError(t.path, t.lines[r], "unknown stance '" + t.rows[r][cs] + "'");
      if (out.empty() || out.back().first != *s) out.emplace_back(*s, TopicProfile{});
      out.back().second.topic_ids.push_back(static_cast<TopicId>(pipeline_detail::parse_u64(t, r, t.rows[r][ck])));
      out.back().second.proportions.push_back(pipeline_detail::parse_double(t, r, t.rows[r][csh]));
    }
    return out;
  }

  PipelineConfig cfg_;
  Logger log_;
};

} // namespace stancetopic
