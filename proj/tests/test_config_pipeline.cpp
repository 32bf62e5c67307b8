#include <sstream>
#include <string>

#include "catch_amalgamated.hpp"
#include "stancetopic/config.hpp"
#include "stancetopic/pipeline.hpp"
#include "support.hpp"

using namespace stancetopic;

namespace {

RawConfig parse(const std::string &text) {
  std::istringstream in(text);
  return RawConfig::parse(in, "test.conf");
}

std::size_t parse_error_line(const std::string &text) {
  try {
    auto raw = parse(text);
    build_config(raw, ".");
  } catch (const ParseError &e) {
    return e.line();
  }
  return 0;
}

const char *kThreeTweets =
    R"({"id": 1, "created_at": "2013-04-17T10:00:00Z", "text": "guns #GunSense", "user_location": "Austin, TX"})"
    "\n"
    R"({"id": 2, "created_at": "2013-04-17T11:00:00Z", "text": "guns #molonlabe", "user_location": null})"
    "\n"
    R"({"id": 3, "created_at": "2013-04-18T11:00:00Z", "text": "guns today", "user_location": "worldwide"})"
    "\n";

// A tiny working directory with a config pointing at three tweets.
struct Fixture {
  test_support::TempDir dir;
  std::string conf;

  explicit Fixture(const std::string &extra = "") {
    test_support::write_text(dir.file("tweets.ndjson"), kThreeTweets);
    conf = dir.file("run.conf");
    test_support::write_text(conf, "[paths]\ncorpus = tweets.ndjson\noutput = out\n"
                                   "[sample]\nfraction = 1.0\nheldout_fraction = 0\n"
                                   "[lda]\ntopics = 2\nburn_in = 5\niterations = 20\n" +
                                       extra);
  }
  Pipeline pipeline() const { return Pipeline(load_config(conf)); }
  std::string out(const char *name) const { return (dir.path() / "out" / name).string(); }
};

} // namespace

TEST_CASE("config parse errors carry line numbers", "[config]") {
  CHECK(parse_error_line("[lda]\ntopics = 5\n\nnonsense line\n") == 4);
  CHECK(parse_error_line("topics = 5\n") == 1);
  CHECK(parse_error_line("[lda]\ntopics = 5\ntopics = 6\n") == 3);
  CHECK(parse_error_line("[lda]\n# c\ntopicz = 5\n") == 3);
  CHECK(parse_error_line("[lda]\ntopics = five\n") == 2);
  CHECK(parse_error_line("[lda\n") == 1);
  CHECK(parse_error_line("[analytics]\ngranularity = month\n") == 2);
  CHECK(parse_error_line("[collection]\nwindow_start = yesterday\n") == 2);
  CHECK(parse_error_line("[mystery]\nkey = 1\n") == 2);
}

TEST_CASE("config values map onto pipeline settings", "[config]") {
  const auto raw = parse("[paths]\ncorpus = a.ndjson, sub/b.ndjson\nlexicon = /abs/lex.txt\n"
                         "[lda]\ntopics = 7   # trailing comment\nsweep_topics = 2,4\nsweep_alpha = 0.5\n"
                         "[analytics]\ngranularity = day\ntopic_weighting = document\n");
  const auto cfg = build_config(raw, "/base");
  CHECK(cfg.corpus_files == std::vector<std::string>{"/base/a.ndjson", "/base/sub/b.ndjson"});
  CHECK(cfg.lexicon == "/abs/lex.txt");
  CHECK(cfg.train.num_topics == 7);
  CHECK(cfg.granularity == Granularity::Day);
  CHECK(cfg.weighting == TopicWeighting::Document);
  CHECK(cfg.grid().size() == 2);
  CHECK(cfg.sample_fraction == 0.085);
  CHECK(cfg.train.alpha_init == 1.0);
}

TEST_CASE("config hash ignores layout but not settings", "[config]") {
  const auto a = parse("[lda]\ntopics = 5\nseed = 2\n[paths]\noutput = x\n");
  const auto b = parse("# comment\n[paths]\noutput = elsewhere\n\n[lda]\nseed = 2\n   topics=5\n");
  const auto c = parse("[lda]\ntopics = 6\nseed = 2\n");
  CHECK(config_hash(a, 1) == config_hash(b, 1));
  CHECK(config_hash(a, 1) != config_hash(c, 1));
  CHECK(config_hash(a, 1) != config_hash(a, 4));
}

TEST_CASE("load_config applies overrides", "[config]") {
  Fixture fx("[run]\nworkers = 2\n");
  const auto cfg = load_config(fx.conf);
  CHECK(cfg.workers == 2);
  CHECK(load_config(fx.conf, 3, std::string("/tmp/o")).output_dir == "/tmp/o");
  CHECK(load_config(fx.conf, 3).hash != cfg.hash);
  CHECK_THROWS_AS(load_config(fx.conf, 0), ArgumentError);
  CHECK_THROWS_AS(load_config(fx.dir.file("nope.conf")), InputError);

  test_support::write_text(fx.dir.file("missing.conf"), "[paths]\ncorpus = not_there.ndjson\n");
  CHECK_THROWS_AS(check_inputs_exist(load_config(fx.dir.file("missing.conf"))), InputError);
}

TEST_CASE("label writes one row per tweet", "[pipeline]") {
  Fixture fx;
  auto p = fx.pipeline();
  p.ingest();
  p.label();
  const auto t = pipeline_detail::read_table(fx.out(artifacts::kLabels));
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0] == std::vector<std::string>{"1", "Control"});
  CHECK(t.rows[1] == std::vector<std::string>{"2", "Rights"});
  CHECK(t.rows[2] == std::vector<std::string>{"3", "Unlabeled"});

  const auto text = test_support::read_bytes(fx.out(artifacts::kLabels));
  CHECK(text.starts_with("# tool: stancetopic 0.1.0\n# command: label\n# config_hash: "));
  CHECK(text.find("# seeds: sample=1 lda=1\n") != std::string::npos);
}

TEST_CASE("downstream commands name the missing upstream step", "[pipeline]") {
  Fixture fx;
  auto p = fx.pipeline();
  try {
    p.label();
    FAIL("expected a missing artifact");
  } catch (const MissingArtifact &e) {
    CHECK(e.command() == "ingest");
  }
  p.ingest();
  try {
    p.report();
    FAIL("expected a missing artifact");
  } catch (const MissingArtifact &e) {
    CHECK(e.command() == "train");
    CHECK(std::string(e.what()).find("run train first") != std::string::npos);
  }
  CHECK_THROWS_AS(p.train(), MissingArtifact);
}

TEST_CASE("re-running commands reproduces outputs byte for byte", "[pipeline]") {
  Fixture fx;
  auto p = fx.pipeline();
  p.ingest();
  p.sample();
  p.train();
  p.report();
  std::map<std::string, std::string> first;
  for (const auto &e : std::filesystem::directory_iterator(fx.dir.path() / "out")) {
    first[e.path().filename().string()] = test_support::read_bytes(e.path().string());
  }
  CHECK(first.contains(artifacts::kModel));
  CHECK(first.contains(artifacts::kTheta));
  CHECK(first.contains("series_week.tsv"));
  CHECK(first.contains("series_day.tsv"));

  auto q = fx.pipeline();
  q.ingest();
  q.sample();
  q.train();
  q.report();
  for (const auto &[name, bytes] : first) {
    INFO(name);
    CHECK(test_support::read_bytes(fx.out(name.c_str())) == bytes);
  }
}
