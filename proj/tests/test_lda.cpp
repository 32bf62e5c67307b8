#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>

#include "catch_amalgamated.hpp"
#include "stancetopic/lda.hpp"
#include "stancetopic/synth.hpp"
#include "support.hpp"

using namespace stancetopic;

namespace {

// Recomputes P(z_i = k | rest) from raw assignments only.
std::vector<double> conditional_oracle(const std::vector<EncodedDoc> &docs, const GibbsState &st, std::size_t d,
                                       std::size_t i, const std::vector<double> &alpha, double beta) {
  const std::size_t K = st.num_topics(), V = st.vocab_size();
  std::vector<double> ndk(K, 0), nkw(K, 0), nk(K, 0);
  for (std::size_t e = 0; e < docs.size(); ++e) {
    for (std::size_t j = 0; j < docs[e].size(); ++j) {
      if (e == d && j == i) continue;
      const auto k = st.assignments(e)[j];
      nk[k] += 1;
      if (e == d) ndk[k] += 1;
      if (docs[e][j] == docs[d][i]) nkw[k] += 1;
    }
  }
  std::vector<double> p(K);
  for (std::size_t k = 0; k < K; ++k) p[k] = (ndk[k] + alpha[k]) * (nkw[k] + beta) / (nk[k] + V * beta);
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto &x : p) x /= s;
  return p;
}

// The fixed-point step evaluated directly with library digamma.
std::vector<double> alpha_step_oracle(const GibbsState &st, const std::vector<double> &alpha) {
  using boost::math::digamma;
  const double asum = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  double den = 0.0;
  for (std::size_t d = 0; d < st.num_docs(); ++d) den += digamma(st.doc_length(d) + asum) - digamma(asum);
  std::vector<double> out(alpha.size());
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    double num = 0.0;
    for (std::size_t d = 0; d < st.num_docs(); ++d) num += digamma(st.doc_topic(d, k) + alpha[k]) - digamma(alpha[k]);
    out[k] = std::max(alpha[k] * num / den, 1e-8);
  }
  return out;
}

double log_evidence_oracle(const GibbsState &st, const std::vector<double> &alpha) {
  const double asum = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  double ll = 0.0;
  for (std::size_t d = 0; d < st.num_docs(); ++d) {
    ll += std::lgamma(asum) - std::lgamma(st.doc_length(d) + asum);
    for (std::size_t k = 0; k < alpha.size(); ++k) ll += std::lgamma(st.doc_topic(d, k) + alpha[k]) - std::lgamma(alpha[k]);
  }
  return ll;
}

// State whose doc-topic counts are given explicitly, one word type.
GibbsState state_with_counts(const std::vector<std::vector<std::uint32_t>> &counts) {
  std::vector<EncodedDoc> docs;
  std::vector<std::vector<TopicId>> z;
  for (const auto &row : counts) {
    docs.emplace_back();
    z.emplace_back();
    for (std::size_t k = 0; k < row.size(); ++k) {
      for (std::uint32_t c = 0; c < row[k]; ++c) {
        docs.back().push_back(0);
        z.back().push_back(static_cast<TopicId>(k));
      }
    }
  }
  TrainConfig cfg;
  cfg.num_topics = counts.front().size();
  auto st = init_assignments(docs, cfg, 1);
  st.set_assignments(z);
  return st;
}

std::vector<EncodedDoc> random_corpus(std::size_t D, std::size_t len, std::size_t V, std::uint64_t seed) {
  CounterRng rng(stream_key(seed, 4242));
  std::vector<EncodedDoc> docs(D);
  for (auto &d : docs) {
    d.resize(1 + rng.below(len));
    for (auto &w : d) w = static_cast<WordId>(rng.below(V));
  }
  return docs;
}

std::string model_bytes(const LdaModel &m) {
  std::ostringstream out;
  m.save(out);
  return out.str();
}

TrainConfig quick(std::size_t K, std::uint64_t seed = 3) {
  TrainConfig c;
  c.num_topics = K;
  c.burn_in = 20;
  c.total_iterations = 60;
  c.seed = seed;
  c.loglik_interval = 0;
  return c;
}

} // namespace

TEST_CASE("conditional on the hand instance is (0.5, 0.5)", "[lda]") {
  const std::vector<EncodedDoc> docs{{0, 1}};
  auto st = init_assignments(docs, quick(2), 2);
  st.set_assignments({{0, 0}});
  const std::vector<double> alpha{1, 1};
  const auto p = st.conditional(0, 0, alpha, 0.5);
  CHECK(p[0] == Catch::Approx(0.5).margin(1e-15));
  CHECK(p[1] == Catch::Approx(0.5).margin(1e-15));
  const auto q = conditional_oracle(docs, st, 0, 0, alpha, 0.5);
  CHECK(q[0] == Catch::Approx(0.5).margin(1e-15));
  // The token's current topic must not matter.
  st.set_assignments({{1, 0}});
  const auto r = st.conditional(0, 0, alpha, 0.5);
  CHECK(r[0] == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("init_assignments draws uniform seeded topics", "[lda]") {
  const std::vector<EncodedDoc> docs(100, EncodedDoc(100, 0));
  auto one = init_assignments(docs, quick(1), 1);
  CHECK(one.topic_total(0) == 10000);
  for (std::size_t d = 0; d < one.num_docs(); ++d) {
    for (auto k : one.assignments(d)) CHECK(k == 0);
  }

  const auto a = init_assignments(docs, quick(2, 8), 1);
  const auto b = init_assignments(docs, quick(2, 8), 1);
  for (std::size_t d = 0; d < a.num_docs(); ++d) REQUIRE(a.assignments(d) == b.assignments(d));

  for (std::uint64_t seed : {1, 2, 3, 4}) {
    const auto s = init_assignments(docs, quick(2, seed), 1);
    CHECK(std::abs(static_cast<double>(s.topic_total(0)) - 5000.0) <= 3 * 50.0);
    s.check_consistency();
  }
  CHECK_THROWS_AS(init_assignments({}, quick(2)), ArgumentError);
  CHECK_THROWS_AS(init_assignments({{5}}, quick(2), 3), ArgumentError);
}

TEST_CASE("K=1 sweeps leave the state unchanged", "[lda]") {
  const auto docs = random_corpus(20, 10, 7, 1);
  auto st = init_assignments(docs, quick(1), 7);
  const std::vector<double> alpha{1.0};
  gibbs_sweep(st, alpha, 0.01);
  st.check_consistency();
  CHECK(st.topic_total(0) == st.num_tokens());
  CHECK(st.conditional(0, 0, alpha, 0.01) == std::vector<double>{1.0});
}

TEST_CASE("incremental conditionals match the from-scratch oracle", "[lda]") {
  const auto docs = random_corpus(40, 30, 25, 2);
  auto st = init_assignments(docs, quick(4), 25);
  const std::vector<double> alpha{0.3, 1.0, 2.5, 0.1};
  CounterRng rng(stream_key(2, 2));
  for (int sweep = 0; sweep < 5; ++sweep) {
    gibbs_sweep(st, alpha, 0.05);
    st.check_consistency();
    for (int probe = 0; probe < 40; ++probe) {
      const auto d = rng.below(docs.size());
      const auto i = rng.below(docs[d].size());
      const auto inc = st.conditional(d, i, alpha, 0.05);
      const auto ref = conditional_oracle(docs, st, d, i, alpha, 0.05);
      double sum = 0.0;
      for (std::size_t k = 0; k < 4; ++k) {
        REQUIRE(std::abs(inc[k] - ref[k]) <= 1e-12);
        REQUIRE(inc[k] >= 0.0);
        sum += inc[k];
      }
      REQUIRE(sum == Catch::Approx(1.0).margin(1e-12));
    }
  }
}

TEST_CASE("multi-worker sweeps keep counts consistent and are repeatable", "[lda]") {
  const auto docs = random_corpus(60, 20, 30, 3);
  const std::vector<double> alpha(5, 0.5);
  auto a = init_assignments(docs, quick(5), 30);
  auto b = init_assignments(docs, quick(5), 30);
  for (int s = 0; s < 10; ++s) {
    gibbs_sweep(a, alpha, 0.1, 3);
    gibbs_sweep(b, alpha, 0.1, 3);
    a.check_consistency();
  }
  CHECK(a.topic_word_table() == b.topic_word_table());
  for (std::size_t d = 0; d < a.num_docs(); ++d) CHECK(a.assignments(d) == b.assignments(d));
}

TEST_CASE("optimize_alpha matches the digamma fixed point", "[lda]") {
  const auto st = state_with_counts({{5, 0, 2}, {1, 7, 0}, {0, 0, 3}, {4, 4, 4}});
  const std::vector<double> alpha{0.7, 1.3, 0.2};
  const auto got = optimize_alpha(st, alpha);
  const auto ref = alpha_step_oracle(st, alpha);
  CHECK_FALSE(got.warning);
  for (std::size_t k = 0; k < 3; ++k) CHECK(got.alpha[k] == Catch::Approx(ref[k]).epsilon(1e-12));
}

TEST_CASE("optimize_alpha keeps a matched symmetric prior's direction", "[lda]") {
  const auto st = state_with_counts({{4, 4, 4}, {4, 4, 4}, {4, 4, 4}});
  const auto got = optimize_alpha(st, std::vector<double>{2, 2, 2}).alpha;
  CHECK(got[1] / got[0] == Catch::Approx(1.0).margin(1e-6));
  CHECK(got[2] / got[0] == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("optimize_alpha grows the dominant topic's share", "[lda]") {
  const auto st = state_with_counts({{8, 1, 1}, {9, 1, 0}, {7, 2, 1}});
  const std::vector<double> alpha{1, 1, 1};
  const auto got = optimize_alpha(st, alpha).alpha;
  CHECK(got[0] / (got[0] + got[1] + got[2]) > 1.0 / 3.0);
  CHECK(got[0] > got[1]);
  CHECK(got[0] > got[2]);
}

TEST_CASE("log-evidence never decreases under repeated alpha updates", "[lda]") {
  const auto docs = random_corpus(50, 40, 10, 4);
  auto st = init_assignments(docs, quick(6), 10);
  std::vector<double> a0(6, 1.0);
  for (int s = 0; s < 10; ++s) gibbs_sweep(st, a0, 0.1);
  std::vector<double> alpha{0.5, 3.0, 1.0, 0.05, 7.0, 1.0};
  double prev = log_evidence_oracle(st, alpha);
  CHECK(dirichlet_multinomial_log_evidence(st, alpha) == Catch::Approx(prev).epsilon(1e-12));
  for (int u = 0; u < 20; ++u) {
    alpha = optimize_alpha(st, alpha).alpha;
    for (double a : alpha) REQUIRE((a > 0.0 && std::isfinite(a)));
    const double cur = log_evidence_oracle(st, alpha);
    REQUIRE(cur >= prev - 1e-9);
    prev = cur;
  }
}

TEST_CASE("optimize_alpha clamps tiny components and rejects bad input", "[lda]") {
  const auto st = state_with_counts({{5, 0}, {6, 0}});
  const auto got = optimize_alpha(st, std::vector<double>{1.0, 1e-9});
  CHECK(got.alpha[1] >= kAlphaFloor);
  CHECK_THROWS_AS(optimize_alpha(st, std::vector<double>{1.0, 0.0}), ArgumentError);
  CHECK_THROWS_AS(optimize_alpha(st, std::vector<double>{1.0}), ArgumentError);
}

TEST_CASE("K=1 training gives unit theta and smoothed unigram phi", "[lda]") {
  const std::vector<EncodedDoc> docs{{0, 0, 1}, {0, 2}, {2}};
  auto cfg = quick(1);
  cfg.beta = 0.5;
  const auto res = train(docs, cfg, 3);
  for (const auto &th : res.thetas) CHECK(th == TopicDistribution{1.0});
  const double n = 6, V = 3;
  CHECK(res.model.phi(0, 0) == Catch::Approx((3 + 0.5) / (n + V * 0.5)));
  CHECK(res.model.phi(0, 1) == Catch::Approx((1 + 0.5) / (n + V * 0.5)));
  CHECK(res.model.phi(0, 2) == Catch::Approx((2 + 0.5) / (n + V * 0.5)));

  // Held-out score collapses to the smoothed unigram log-likelihood.
  const std::vector<EncodedDoc> held{{0, 1}, {2, 2, 0}};
  double expect = 0.0;
  for (const auto &d : held) {
    for (auto w : d) expect += std::log(res.model.phi(0, w));
  }
  const auto score = held_out_log_likelihood(res.model, held);
  CHECK(score.total == Catch::Approx(expect).epsilon(1e-14));
  CHECK(score.tokens == 5);
  CHECK(score.per_token == Catch::Approx(expect / 5));
}

TEST_CASE("training validates its configuration", "[lda]") {
  auto cfg = quick(2);
  cfg.burn_in = cfg.total_iterations;
  CHECK_THROWS_AS(train({{0}}, cfg), ArgumentError);
  cfg = quick(2);
  cfg.beta = 0;
  CHECK_THROWS_AS(train({{0}}, cfg), ArgumentError);
  cfg = quick(0);
  CHECK_THROWS_AS(train({{0}}, cfg), ArgumentError);
  cfg = quick(4);
  cfg.alpha_init = 2.0;
  cfg.alpha_init_is_sum = true;
  CHECK(cfg.initial_alpha() == std::vector<double>(4, 0.5));
}

TEST_CASE("training logs likelihood, keeps rows normalized and is deterministic", "[lda]") {
  const auto docs = random_corpus(80, 25, 40, 5);
  auto cfg = quick(4);
  cfg.loglik_interval = 10;
  cfg.debug_checks = true;
  const auto a = train(docs, cfg, 40, 99);
  const auto b = train(docs, cfg, 40, 99);
  CHECK(model_bytes(a.model) == model_bytes(b.model));
  CHECK(a.log.size() == 6);
  CHECK(a.log.back().iteration == 60);
  for (std::size_t k = 0; k < 4; ++k) {
    double s = 0.0;
    for (std::size_t w = 0; w < 40; ++w) s += a.model.phi(k, w);
    CHECK(s == Catch::Approx(1.0).margin(1e-9));
  }
  for (const auto &th : a.thetas) {
    CHECK(std::accumulate(th.begin(), th.end(), 0.0) == Catch::Approx(1.0).margin(1e-9));
  }
  for (double al : a.model.alpha()) CHECK(al > 0.0);
  cfg.seed = 4;
  CHECK(model_bytes(train(docs, cfg, 40, 99).model) != model_bytes(a.model));
}

TEST_CASE("separable corpus: topics, inference and held-out ranking", "[lda][slow]") {
  synth::LdaCorpusSpec spec;
  spec.seed = 21;
  const auto corpus = synth::generate_lda_corpus(spec);
  TrainConfig cfg;
  cfg.num_topics = 2;
  cfg.seed = 21;
  cfg.loglik_interval = 0;
  const auto two = train(corpus.docs, cfg, corpus.vocab_size);

  // Which learned topic carries the first block's words?
  double mass0 = 0.0;
  for (std::size_t w = 0; w < 50; ++w) mass0 += two.model.phi(0, w);
  const std::size_t t0 = mass0 > 0.5 ? 0 : 1;

  EncodedDoc doc;
  for (std::size_t i = 0; i < 50; ++i) doc.push_back(static_cast<WordId>(i % 50));
  const auto theta = infer(two.model, doc, 200, 5);
  CHECK(theta[t0] >= 0.9);
  CHECK(infer(two.model, doc, 200, 5) == theta);
  CHECK(std::accumulate(theta.begin(), theta.end(), 0.0) == Catch::Approx(1.0).margin(1e-9));

  const std::vector<EncodedDoc> held(corpus.docs.end() - 50, corpus.docs.end());
  cfg.num_topics = 1;
  const auto one = train(corpus.docs, cfg, corpus.vocab_size);
  CHECK(held_out_log_likelihood(two.model, held).per_token > held_out_log_likelihood(one.model, held).per_token);
}

TEST_CASE("infer fallbacks", "[lda]") {
  const LdaModel m(2, 3, {1.0, 3.0}, 0.1, std::vector<std::uint32_t>(6, 1), 1, 0);
  CHECK(infer(m, EncodedDoc{}) == TopicDistribution{0.25, 0.75});
  const LdaModel one(1, 3, {2.0}, 0.1, std::vector<std::uint32_t>(3, 1), 1, 0);
  CHECK(infer(one, EncodedDoc{0, 1}) == TopicDistribution{1.0});
  CHECK_THROWS_AS(infer(m, EncodedDoc{7}), ArgumentError);
}

TEST_CASE("top_words ranks by phi with lexicographic ties", "[lda]") {
  const Vocabulary vocab({"a", "b"}, {3, 1});
  auto cfg = quick(1);
  cfg.beta = 0.5;
  const auto m = train({{0, 0, 0, 1}}, cfg, 2, vocab.fingerprint()).model;
  CHECK(top_words(m, vocab, 0, 0).empty());
  const auto top = top_words(m, vocab, 0, 5);
  REQUIRE(top.size() == 2);
  CHECK(top[0].term == "a");
  CHECK(top[0].prob == Catch::Approx(0.7));
  CHECK(top[1].term == "b");
  CHECK(top[1].prob == Catch::Approx(0.3));
  CHECK_THROWS_AS(top_words(m, vocab, 1, 2), ArgumentError);

  const Vocabulary tied({"z", "y"}, {1, 1});
  const LdaModel flat(1, 2, {1.0}, 0.5, {1, 1}, 1, tied.fingerprint());
  const auto t = top_words(flat, tied, 0, 2);
  CHECK(t[0].term == "y");
  CHECK(t[0].prob + t[1].prob == Catch::Approx(1.0).margin(1e-9));
  CHECK_THROWS_AS(top_words(flat, vocab, 0, 2), ArgumentError);
}

TEST_CASE("model files round-trip byte for byte", "[lda]") {
  test_support::TempDir dir;
  const auto docs = random_corpus(30, 15, 20, 6);
  const auto m = train(docs, quick(3), 20, 1234).model;
  m.save(dir.file("m.bin"));
  const auto back = LdaModel::load(dir.file("m.bin"));
  CHECK(model_bytes(back) == model_bytes(m));
  CHECK(back.alpha() == m.alpha());
  CHECK(back.vocab_fingerprint() == 1234);
  CHECK(back.seed() == 3);

  auto bytes = test_support::read_bytes(dir.file("m.bin"));
  test_support::write_text(dir.file("trunc.bin"), bytes.substr(0, bytes.size() - 5));
  CHECK_THROWS_AS(LdaModel::load(dir.file("trunc.bin")), InputError);
  bytes[0] = 'X';
  test_support::write_text(dir.file("magic.bin"), bytes);
  CHECK_THROWS_AS(LdaModel::load(dir.file("magic.bin")), InputError);
  CHECK_THROWS_AS(LdaModel::load(dir.file("none.bin")), InputError);
}

TEST_CASE("sweep_hyperparameters picks the best grid point", "[lda]") {
  const auto docs = random_corpus(40, 20, 15, 7);
  const auto held = random_corpus(10, 20, 15, 8);
  const std::vector<GridPoint> single{{3, 0.5}};
  const auto r1 = sweep_hyperparameters(docs, held, single, quick(2), 15, 20);
  CHECK(r1.table.size() == 1);
  CHECK(r1.best.num_topics == 3);
  CHECK(r1.best.alpha_init == 0.5);

  // With K=1 alpha has no effect on the score, so the smaller alpha wins.
  const std::vector<GridPoint> tie{{1, 2.0}, {1, 0.5}, {1, 1.0}};
  const auto r2 = sweep_hyperparameters(docs, held, tie, quick(1), 15, 20);
  CHECK(r2.table.size() == 3);
  CHECK(r2.table[0].score.per_token == r2.table[1].score.per_token);
  CHECK(r2.best.alpha_init == 0.5);
  CHECK_THROWS_AS(sweep_hyperparameters(docs, held, std::vector<GridPoint>{}, quick(1)), ArgumentError);
}
