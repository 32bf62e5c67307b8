// Batch CLI: `stancetopic --config run.conf <command>`.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <unistd.h>

#include "CLI11.hpp"
#include "stancetopic/config.hpp"
#include "stancetopic/pipeline.hpp"
#include "stancetopic/synth.hpp"

namespace st = stancetopic;

namespace {

bool use_color() { return std::getenv("NO_COLOR") == nullptr && isatty(STDERR_FILENO); }

void log_line(std::string_view level, const std::string &msg) {
  static const bool color = use_color();
  if (color) {
    const char *code = level == "info" ? "\033[36m" : level == "warn" ? "\033[33m" : "\033[31m";
    std::cerr << code << level << "\033[0m " << msg << '\n';
  } else {
    std::cerr << level << ": " << msg << '\n';
  }
}

void write_file(const std::filesystem::path &p, const std::string &content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw st::InputError("cannot write " + p.string());
  out << content;
}

void run_synth(const std::string &kind, const std::string &dir, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path d(dir);
  if (kind == "lda") {
    st::synth::LdaCorpusSpec spec;
    spec.seed = seed;
    const auto corpus = st::synth::generate_lda_corpus(spec);
    write_file(d / "lda_corpus.ndjson", st::synth::lda_corpus_ndjson(corpus));
    log_line("info", "wrote " + std::to_string(corpus.docs.size()) + " documents to " + (d / "lda_corpus.ndjson").string());
    return;
  }
  st::synth::TweetCorpusSpec spec;
  spec.seed = seed;
  const auto corpus = st::synth::generate_tweet_corpus(spec);
  write_file(d / "tweets.ndjson", corpus.ndjson);
  std::string polls = "state,end_date,support_fraction\n";
  for (const auto &p : corpus.polls) {
    polls += p.state + "," + st::dates::format_date(p.end_date) + "," + st::pipeline_detail::num(*p.support_fraction) + "\n";
  }
  write_file(d / "polls.csv", polls);
  std::string events;
  for (const auto &[day, name] : corpus.events) events += st::dates::format_date(day) + "\t" + name + "\n";
  write_file(d / "events.tsv", events);
  std::string shares = "state\ttarget_control_share\n";
  for (const auto &[s, v] : corpus.target_share) shares += s + "\t" + st::pipeline_detail::num(v) + "\n";
  write_file(d / "target_shares.tsv", shares);
  log_line("info", "wrote synthetic tweet corpus, polls and events to " + dir);
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Stance-coded topic analysis of keyword-filtered social-media corpora"};
  app.set_version_flag("--version", std::string("stancetopic ") + st::kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::size_t> workers;
  std::optional<std::string> output;
  app.add_option("-c,--config", config_path, "Pipeline config file");
  app.add_option("-w,--workers", workers, "Worker threads (overrides run.workers)")->check(CLI::PositiveNumber);
  app.add_option("-o,--output", output, "Output directory (overrides paths.output)");

  const std::map<std::string, std::string> commands{
      {"ingest", "Filter NDJSON inputs into the indexed corpus log"},
      {"sample", "Draw the training / held-out sample"},
      {"train", "Train the topic model on the sample"},
      {"sweep", "Grid search over topics and alpha by held-out likelihood"},
      {"infer", "Infer topic mixtures for every corpus record"},
      {"label", "Label records Control / Rights / Unlabeled by hashtag majority"},
      {"geocode", "Resolve profile locations to US states"},
      {"trends", "Daily and weekly stance counts"},
      {"spikes", "Flag spikes in the stance series"},
      {"topics", "Top topics per stance"},
      {"events", "Topic profiles around listed events"},
      {"correlate", "Correlate per-state Control share with polls"},
      {"report", "label, geocode, infer, trends, spikes, topics, events, correlate"},
  };
  for (const auto &[name, help] : commands) app.add_subcommand(name, help);

  auto *synth = app.add_subcommand("synth", "Write a synthetic corpus (tweets with polls, or a 2-topic LDA corpus)");
  std::string synth_kind = "tweets";
  std::string synth_dir = ".";
  std::uint64_t synth_seed = 7;
  synth->add_option("kind", synth_kind, "tweets or lda")->check(CLI::IsMember({"tweets", "lda"}));
  synth->add_option("--dir", synth_dir, "Destination directory");
  synth->add_option("--seed", synth_seed, "Generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      run_synth(synth_kind, synth_dir, synth_seed);
      return 0;
    }
    if (config_path.empty()) {
      log_line("error", "--config is required");
      return 2;
    }
    auto cfg = st::load_config(config_path, workers, output);
    st::check_inputs_exist(cfg);
    st::Pipeline p(std::move(cfg), log_line);
    const auto cmd = app.get_subcommands().front()->get_name();
    if (cmd == "ingest") p.ingest();
    else if (cmd == "sample") p.sample();
    else if (cmd == "train") p.train();
    else if (cmd == "sweep") p.sweep();
    else if (cmd == "infer") p.infer();
    else if (cmd == "label") p.label();
    else if (cmd == "geocode") p.geocode();
    else if (cmd == "trends") p.trends();
    else if (cmd == "spikes") p.spikes();
    else if (cmd == "topics") p.topics();
    else if (cmd == "events") p.events();
    else if (cmd == "correlate") p.correlate();
    else if (cmd == "report") p.report();
  } catch (const std::exception &e) {
    log_line("error", e.what());
    return 1;
  }
  return 0;
}
