#pragma once

// Latent Dirichlet allocation by collapsed Gibbs sampling.
//
// Sampler state keeps three count tables in sync with the per-token topic
// assignments z:
//   doc_topic   N_dk  (document-major, D x K)
//   topic_word  N_kw  (word-major, V x K, so one word's K counts are contiguous)
//   topic_total N_k
// Each token is resampled from
//   P(z_i = k | rest) ∝ (N_dk + a_k) (N_kw + b) / (N_k + V b)
// with token i removed from all three tables.
//
// The document-topic prior a is asymmetric and re-estimated with Minka's
// fixed-point iteration. The digamma differences it needs are computed exactly
// from count histograms using Ψ(a + n) − Ψ(a) = Σ_{j<n} 1 / (a + j).
//
// Multi-worker training partitions documents; each worker samples against a
// private copy of N_kw / N_k taken at the start of the sweep and the copies
// are merged by summing deltas afterwards. That is approximate collapsed Gibbs
// (workers see each other's moves only after the sweep); one worker is exact.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "stancetopic/binio.hpp"
#include "stancetopic/error.hpp"
#include "stancetopic/rng.hpp"
#include "stancetopic/text.hpp"

namespace stancetopic {

using TopicId = std::uint32_t;
using TopicDistribution = std::vector<double>;

struct TrainConfig {
  std::size_t num_topics = 250;
  double alpha_init = 1.0;
  // When set, alpha_init is the concentration Σ_k a_k instead of each a_k.
  bool alpha_init_is_sum = false;
  double beta = 0.01;
  std::size_t burn_in = 100;
  std::size_t total_iterations = 500;
  std::size_t hyperopt_interval = 10;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  // Log the collapsed joint log-likelihood every n sweeps (0 = never).
  std::size_t loglik_interval = 1;
  // Full recount after every sweep; throws InternalError on mismatch.
  bool debug_checks = false;

  void validate() const {
    if (num_topics < 1) throw ArgumentError("train config: num_topics must be >= 1");
    if (!(alpha_init > 0.0) || !std::isfinite(alpha_init)) throw ArgumentError("train config: alpha_init must be > 0");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ArgumentError("train config: beta must be > 0");
    if (burn_in >= total_iterations) throw ArgumentError("train config: burn_in must be < total_iterations");
    if (workers < 1) throw ArgumentError("train config: workers must be >= 1");
  }

  std::vector<double> initial_alpha() const {
    const double a = alpha_init_is_sum ? alpha_init / static_cast<double>(num_topics) : alpha_init;
    return std::vector<double>(num_topics, a);
  }
};

class GibbsState {
public:
  GibbsState(std::vector<EncodedDoc> docs, std::size_t num_topics, std::size_t vocab_size)
      : docs_(std::move(docs)), K_(num_topics), V_(vocab_size) {
    if (K_ < 1) throw ArgumentError("gibbs state: need at least one topic");
    if (docs_.empty()) throw ArgumentError("gibbs state: empty corpus");
    for (const auto &doc : docs_) {
      for (auto w : doc) {
        if (w >= V_) throw ArgumentError("gibbs state: word id out of vocabulary range");
      }
    }
    z_.resize(docs_.size());
    doc_topic_.assign(docs_.size() * K_, 0);
    topic_word_.assign(V_ * K_, 0);
    topic_total_.assign(K_, 0);
  }

  std::size_t num_topics() const { return K_; }
  std::size_t vocab_size() const { return V_; }
  std::size_t num_docs() const { return docs_.size(); }
  std::size_t doc_length(std::size_t d) const { return docs_[d].size(); }
  std::size_t num_tokens() const {
    std::size_t n = 0;
    for (const auto &d : docs_) n += d.size();
    return n;
  }
  const std::vector<EncodedDoc> &docs() const { return docs_; }
  const std::vector<TopicId> &assignments(std::size_t d) const { return z_[d]; }

  std::uint32_t doc_topic(std::size_t d, std::size_t k) const { return doc_topic_[d * K_ + k]; }
  std::uint32_t topic_word(std::size_t k, std::size_t w) const { return topic_word_[w * K_ + k]; }
  std::uint64_t topic_total(std::size_t k) const { return topic_total_[k]; }
  std::span<const std::uint32_t> doc_topic_row(std::size_t d) const { return {doc_topic_.data() + d * K_, K_}; }
  const std::vector<std::uint32_t> &topic_word_table() const { return topic_word_; }
  const std::vector<std::uint64_t> &topic_totals() const { return topic_total_; }

  std::size_t sweeps_done() const { return sweeps_; }

  // Overwrites all assignments and rebuilds the count tables from them.
  void set_assignments(std::vector<std::vector<TopicId>> z) {
    if (z.size() != docs_.size()) throw ArgumentError("set_assignments: document count mismatch");
    for (std::size_t d = 0; d < z.size(); ++d) {
      if (z[d].size() != docs_[d].size()) throw ArgumentError("set_assignments: token count mismatch");
      for (auto k : z[d]) {
        if (k >= K_) throw ArgumentError("set_assignments: topic out of range");
      }
    }
    z_ = std::move(z);
    recount();
  }

  // Normalized P(z_i = k | rest) for token i of document d, taken from the
  // maintained count tables with token i's own contribution removed.
  std::vector<double> conditional(std::size_t d, std::size_t i, std::span<const double> alpha, double beta) const {
    const auto w = docs_.at(d).at(i);
    const auto own = z_[d][i];
    const double vbeta = static_cast<double>(V_) * beta;
    std::vector<double> p(K_);
    double total = 0.0;
    for (std::size_t k = 0; k < K_; ++k) {
      const double self = k == own ? 1.0 : 0.0;
      const double ndk = doc_topic_[d * K_ + k] - self;
      const double nkw = topic_word_[w * K_ + k] - self;
      const double nk = static_cast<double>(topic_total_[k]) - self;
      p[k] = (ndk + alpha[k]) * (nkw + beta) / (nk + vbeta);
      total += p[k];
    }
    for (auto &x : p) x /= total;
    return p;
  }

  // Throws InternalError unless every table equals a fresh tally of z.
  void check_consistency() const {
    std::vector<std::uint32_t> dt(docs_.size() * K_, 0), tw(V_ * K_, 0);
    std::vector<std::uint64_t> tt(K_, 0);
    for (std::size_t d = 0; d < docs_.size(); ++d) {
      if (z_[d].size() != docs_[d].size()) throw InternalError("gibbs state: z length != document length");
      for (std::size_t i = 0; i < docs_[d].size(); ++i) {
        const auto k = z_[d][i];
        if (k >= K_) throw InternalError("gibbs state: topic id out of range");
        ++dt[d * K_ + k];
        ++tw[docs_[d][i] * K_ + k];
        ++tt[k];
      }
    }
    if (dt != doc_topic_) throw InternalError("gibbs state: document-topic counts inconsistent with z");
    if (tw != topic_word_) throw InternalError("gibbs state: topic-word counts inconsistent with z");
    if (tt != topic_total_) throw InternalError("gibbs state: topic totals inconsistent with z");
  }

private:
  friend GibbsState init_assignments(std::vector<EncodedDoc> docs, const TrainConfig &config, std::size_t vocab_size);
  friend void gibbs_sweep(GibbsState &state, std::span<const double> alpha, double beta, std::size_t workers);

  void recount() {
    std::fill(doc_topic_.begin(), doc_topic_.end(), 0);
    std::fill(topic_word_.begin(), topic_word_.end(), 0);
    std::fill(topic_total_.begin(), topic_total_.end(), 0);
    for (std::size_t d = 0; d < docs_.size(); ++d) {
      for (std::size_t i = 0; i < docs_[d].size(); ++i) {
        const auto k = z_[d][i];
        ++doc_topic_[d * K_ + k];
        ++topic_word_[docs_[d][i] * K_ + k];
        ++topic_total_[k];
      }
    }
  }

  std::vector<EncodedDoc> docs_;
  std::size_t K_;
  std::size_t V_;
  std::vector<std::vector<TopicId>> z_;
  std::vector<std::uint32_t> doc_topic_;
  std::vector<std::uint32_t> topic_word_;
  std::vector<std::uint64_t> topic_total_;
  std::size_t sweeps_ = 0;
  std::uint64_t seed_ = 0;
};

inline std::size_t infer_vocab_size(std::span<const EncodedDoc> docs) {
  std::size_t v = 0;
  for (const auto &d : docs) {
    for (auto w : d) v = std::max<std::size_t>(v, w + 1);
  }
  return v;
}

// Uniform random initial topics from the seeded generator.
inline GibbsState init_assignments(std::vector<EncodedDoc> docs, const TrainConfig &config,
                                   std::size_t vocab_size = 0) {
  if (docs.empty()) throw ArgumentError("init_assignments: empty corpus");
  if (config.num_topics < 1) throw ArgumentError("init_assignments: num_topics must be >= 1");
  if (vocab_size == 0) vocab_size = infer_vocab_size(docs);
  GibbsState state(std::move(docs), config.num_topics, vocab_size);
  state.seed_ = config.seed;
  const auto K = state.K_;
  for (std::size_t d = 0; d < state.docs_.size(); ++d) {
    CounterRng rng(stream_key(config.seed, 0x696E6974ULL, d));
    auto &zd = state.z_[d];
    zd.resize(state.docs_[d].size());
    for (auto &k : zd) k = static_cast<TopicId>(K == 1 ? 0 : rng.below(K));
  }
  state.recount();
  return state;
}

namespace lda_detail {

// Samples documents [first, last) against the given topic-word tables. Each
// document draws from its own counter-based stream keyed by (sweep, doc), so
// the random numbers a document sees do not depend on the partitioning.
inline void sample_range(const std::vector<EncodedDoc> &docs, std::vector<std::vector<TopicId>> &z,
                         std::vector<std::uint32_t> &doc_topic, std::vector<std::uint32_t> &topic_word,
                         std::vector<std::uint64_t> &topic_total, std::size_t K, std::size_t V,
                         std::span<const double> alpha, double beta, std::uint64_t sweep_key, std::size_t first,
                         std::size_t last) {
  const double vbeta = static_cast<double>(V) * beta;
  std::vector<double> inv_den(K), cdf(K);
  for (std::size_t k = 0; k < K; ++k) inv_den[k] = 1.0 / (static_cast<double>(topic_total[k]) + vbeta);
  for (std::size_t d = first; d < last; ++d) {
    CounterRng rng(stream_key(sweep_key, d));
    std::uint32_t *ndk = doc_topic.data() + d * K;
    const auto &doc = docs[d];
    auto &zd = z[d];
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const auto w = doc[i];
      std::uint32_t *nkw = topic_word.data() + static_cast<std::size_t>(w) * K;
      const auto old = zd[i];
      --ndk[old];
      --nkw[old];
      --topic_total[old];
      inv_den[old] = 1.0 / (static_cast<double>(topic_total[old]) + vbeta);

      double cum = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        cum += (ndk[k] + alpha[k]) * (nkw[k] + beta) * inv_den[k];
        cdf[k] = cum;
      }
      const double u = rng.uniform() * cum;
      std::size_t k = 0;
      while (k + 1 < K && cdf[k] <= u) ++k;

      zd[i] = static_cast<TopicId>(k);
      ++ndk[k];
      ++nkw[k];
      ++topic_total[k];
      inv_den[k] = 1.0 / (static_cast<double>(topic_total[k]) + vbeta);
    }
  }
}

} // namespace lda_detail

// One pass over every token in document order. With workers > 1 the corpus is
// split into contiguous document blocks sampled in parallel against private
// topic-word copies that are merged after the sweep.
inline void gibbs_sweep(GibbsState &state, std::span<const double> alpha, double beta, std::size_t workers = 1) {
  const auto K = state.K_;
  const auto V = state.V_;
  if (alpha.size() != K) throw ArgumentError("gibbs_sweep: alpha size != num_topics");
  const std::uint64_t sweep_key = stream_key(state.seed_, 0x7377656570ULL, state.sweeps_ + 1);
  const std::size_t D = state.docs_.size();
  workers = std::clamp<std::size_t>(workers, 1, D);

  if (workers == 1) {
    lda_detail::sample_range(state.docs_, state.z_, state.doc_topic_, state.topic_word_, state.topic_total_, K, V,
                             alpha, beta, sweep_key, 0, D);
  } else {
    std::vector<std::vector<std::uint32_t>> local_tw(workers, state.topic_word_);
    std::vector<std::vector<std::uint64_t>> local_tt(workers, state.topic_total_);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
      const std::size_t first = D * t / workers;
      const std::size_t last = D * (t + 1) / workers;
      pool.emplace_back([&, t, first, last] {
        lda_detail::sample_range(state.docs_, state.z_, state.doc_topic_, local_tw[t], local_tt[t], K, V, alpha,
                                 beta, sweep_key, first, last);
      });
    }
    for (auto &th : pool) th.join();
    // global += Σ_t (local_t - global); unsigned wraparound cancels exactly.
    for (std::size_t j = 0; j < state.topic_word_.size(); ++j) {
      std::uint32_t base = state.topic_word_[j];
      std::uint32_t acc = base;
      for (std::size_t t = 0; t < workers; ++t) acc += local_tw[t][j] - base;
      state.topic_word_[j] = acc;
    }
    for (std::size_t k = 0; k < K; ++k) {
      std::uint64_t base = state.topic_total_[k];
      std::uint64_t acc = base;
      for (std::size_t t = 0; t < workers; ++t) acc += local_tt[t][k] - base;
      state.topic_total_[k] = acc;
    }
  }
  ++state.sweeps_;
}

// Σ_d log [ Γ(Σa) / Γ(n_d + Σa) · Π_k Γ(N_dk + a_k) / Γ(a_k) ]
inline double dirichlet_multinomial_log_evidence(const GibbsState &state, std::span<const double> alpha) {
  const double alpha_sum = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  const double lg_sum = std::lgamma(alpha_sum);
  double ll = 0.0;
  for (std::size_t d = 0; d < state.num_docs(); ++d) {
    ll += lg_sum - std::lgamma(static_cast<double>(state.doc_length(d)) + alpha_sum);
    const auto row = state.doc_topic_row(d);
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k] > 0) ll += std::lgamma(row[k] + alpha[k]) - std::lgamma(alpha[k]);
    }
  }
  return ll;
}

// Collapsed joint log P(w, z | a, b).
inline double corpus_log_likelihood(const GibbsState &state, std::span<const double> alpha, double beta) {
  const std::size_t K = state.num_topics();
  const double vbeta = static_cast<double>(state.vocab_size()) * beta;
  double ll = dirichlet_multinomial_log_evidence(state, alpha);
  const double lg_beta = std::lgamma(beta);
  const auto &tw = state.topic_word_table();
  for (std::size_t k = 0; k < K; ++k) {
    ll += std::lgamma(vbeta) - std::lgamma(static_cast<double>(state.topic_total(k)) + vbeta);
  }
  for (std::size_t j = 0; j < tw.size(); ++j) {
    if (tw[j] > 0) ll += std::lgamma(tw[j] + beta) - lg_beta;
  }
  return ll;
}

struct AlphaUpdate {
  std::vector<double> alpha;
  std::optional<std::string> warning;
};

inline constexpr double kAlphaFloor = 1e-8;

// One fixed-point step
//   a_k <- a_k · Σ_d [Ψ(N_dk + a_k) − Ψ(a_k)] / Σ_d [Ψ(n_d + Σa) − Ψ(Σa)]
// evaluated through count histograms.
inline AlphaUpdate optimize_alpha(const GibbsState &state, std::span<const double> alpha) {
  const std::size_t K = state.num_topics();
  if (alpha.size() != K) throw ArgumentError("optimize_alpha: alpha size != num_topics");
  for (double a : alpha) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ArgumentError("optimize_alpha: alpha must be positive and finite");
  }
  const std::size_t D = state.num_docs();
  std::size_t max_len = 0;
  for (std::size_t d = 0; d < D; ++d) max_len = std::max(max_len, state.doc_length(d));

  std::vector<std::uint64_t> length_hist(max_len + 1, 0);
  for (std::size_t d = 0; d < D; ++d) ++length_hist[state.doc_length(d)];
  // count_hist[k * (max_len + 1) + n] = #docs with N_dk == n
  std::vector<std::uint64_t> count_hist(K * (max_len + 1), 0);
  for (std::size_t d = 0; d < D; ++d) {
    const auto row = state.doc_topic_row(d);
    for (std::size_t k = 0; k < K; ++k) ++count_hist[k * (max_len + 1) + row[k]];
  }

  // Σ_n hist[n] · (Ψ(a + n) − Ψ(a))
  auto digamma_diff_sum = [&](const std::uint64_t *hist, double a) {
    double total = 0.0, running = 0.0;
    for (std::size_t n = 1; n <= max_len; ++n) {
      running += 1.0 / (a + static_cast<double>(n - 1));
      if (hist[n] != 0) total += static_cast<double>(hist[n]) * running;
    }
    return total;
  };

  const double alpha_sum = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  const double denom = digamma_diff_sum(length_hist.data(), alpha_sum);

  AlphaUpdate out;
  out.alpha.resize(K);
  bool finite = std::isfinite(denom) && denom > 0.0;
  for (std::size_t k = 0; k < K && finite; ++k) {
    const double numer = digamma_diff_sum(count_hist.data() + k * (max_len + 1), alpha[k]);
    const double next = alpha[k] * numer / denom;
    if (!std::isfinite(next)) finite = false;
    out.alpha[k] = std::max(next, kAlphaFloor);
  }
  if (!finite) {
    out.alpha.assign(alpha.begin(), alpha.end());
    out.warning = "optimize_alpha: non-finite update, keeping previous alpha";
  }
  return out;
}

class LdaModel {
public:
  static constexpr char kMagic[5] = "STLM";
  static constexpr std::uint8_t kFormatVersion = 1;

  LdaModel() = default;

  LdaModel(std::size_t K, std::size_t V, std::vector<double> alpha, double beta,
           std::vector<std::uint32_t> topic_word_word_major, std::uint64_t seed, std::uint64_t vocab_fingerprint)
      : K_(K), V_(V), alpha_(std::move(alpha)), beta_(beta), topic_word_(std::move(topic_word_word_major)),
        seed_(seed), vocab_fingerprint_(vocab_fingerprint) {
    if (alpha_.size() != K_) throw ArgumentError("lda model: alpha size != K");
    if (topic_word_.size() != K_ * V_) throw ArgumentError("lda model: topic-word table size != K*V");
    for (double a : alpha_) {
      if (!(a > 0.0)) throw ArgumentError("lda model: alpha must be strictly positive");
    }
    if (!(beta_ > 0.0)) throw ArgumentError("lda model: beta must be > 0");
    topic_total_.assign(K_, 0);
    for (std::size_t w = 0; w < V_; ++w) {
      for (std::size_t k = 0; k < K_; ++k) topic_total_[k] += topic_word_[w * K_ + k];
    }
    phi_.resize(K_ * V_);
    const double vbeta = static_cast<double>(V_) * beta_;
    for (std::size_t w = 0; w < V_; ++w) {
      for (std::size_t k = 0; k < K_; ++k) {
        phi_[w * K_ + k] = (topic_word_[w * K_ + k] + beta_) / (static_cast<double>(topic_total_[k]) + vbeta);
      }
    }
  }

  std::size_t num_topics() const { return K_; }
  std::size_t vocab_size() const { return V_; }
  const std::vector<double> &alpha() const { return alpha_; }
  double alpha_sum() const { return std::accumulate(alpha_.begin(), alpha_.end(), 0.0); }
  double beta() const { return beta_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t vocab_fingerprint() const { return vocab_fingerprint_; }

  std::uint32_t topic_word(std::size_t k, std::size_t w) const { return topic_word_[w * K_ + k]; }
  std::uint64_t topic_total(std::size_t k) const { return topic_total_[k]; }
  // φ̂_kw = (N_kw + b) / (N_k + V b)
  double phi(std::size_t k, std::size_t w) const { return phi_[w * K_ + k]; }
  // The K values φ̂_{·,w}, contiguous.
  std::span<const double> phi_column(std::size_t w) const { return {phi_.data() + w * K_, K_}; }

  void check_vocabulary(const Vocabulary &vocab) const {
    if (vocab.size() != V_ || vocab.fingerprint() != vocab_fingerprint_) {
      throw ArgumentError("lda model: vocabulary does not match the one the model was trained with");
    }
  }

  // magic "STLM", version, K, V, beta, alpha[K], seed, vocab fingerprint,
  // nnz, then (topic u32, word u32, count u64) triples in (topic, word) order.
  void save(std::ostream &out) const {
    binio::put_magic(out, kMagic, kFormatVersion);
    binio::put<std::uint64_t>(out, K_);
    binio::put<std::uint64_t>(out, V_);
    binio::put<double>(out, beta_);
    for (double a : alpha_) binio::put<double>(out, a);
    binio::put<std::uint64_t>(out, seed_);
    binio::put<std::uint64_t>(out, vocab_fingerprint_);
    std::uint64_t nnz = std::count_if(topic_word_.begin(), topic_word_.end(), [](auto c) { return c != 0; });
    binio::put<std::uint64_t>(out, nnz);
    for (std::size_t k = 0; k < K_; ++k) {
      for (std::size_t w = 0; w < V_; ++w) {
        const auto c = topic_word_[w * K_ + k];
        if (c == 0) continue;
        binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(k));
        binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(w));
        binio::put<std::uint64_t>(out, c);
      }
    }
  }

  void save(const std::string &path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write model: " + path);
    save(out);
    if (!out) throw InputError("write failed: " + path);
  }

  static LdaModel load(std::istream &in, const std::string &source) {
    if (binio::expect_magic(in, kMagic, source) != kFormatVersion) {
      throw InputError(source + ": unsupported model format version");
    }
    const auto K = binio::get<std::uint64_t>(in, "K");
    const auto V = binio::get<std::uint64_t>(in, "V");
    if (K == 0 || K > (1u << 20) || V > (1u << 28)) throw InputError(source + ": implausible model dimensions");
    const auto beta = binio::get<double>(in, "beta");
    std::vector<double> alpha(K);
    for (auto &a : alpha) a = binio::get<double>(in, "alpha");
    const auto seed = binio::get<std::uint64_t>(in, "seed");
    const auto fp = binio::get<std::uint64_t>(in, "vocabulary fingerprint");
    const auto nnz = binio::get<std::uint64_t>(in, "nnz");
    std::vector<std::uint32_t> tw(K * V, 0);
    for (std::uint64_t j = 0; j < nnz; ++j) {
      const auto k = binio::get<std::uint32_t>(in, "topic");
      const auto w = binio::get<std::uint32_t>(in, "word");
      const auto c = binio::get<std::uint64_t>(in, "count");
      if (k >= K || w >= V) throw InputError(source + ": count triple out of range");
      tw[static_cast<std::size_t>(w) * K + k] = static_cast<std::uint32_t>(c);
    }
    return LdaModel(K, V, std::move(alpha), beta, std::move(tw), seed, fp);
  }

  static LdaModel load(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open model: " + path + " (run train first)");
    return load(in, path);
  }

private:
  std::size_t K_ = 0;
  std::size_t V_ = 0;
  std::vector<double> alpha_;
  double beta_ = 0.01;
  std::vector<std::uint32_t> topic_word_;
  std::vector<std::uint64_t> topic_total_;
  std::vector<double> phi_;
  std::uint64_t seed_ = 0;
  std::uint64_t vocab_fingerprint_ = 0;
};

// θ_dk = (N_dk + a_k) / (n_d + Σa) from the current state.
inline std::vector<TopicDistribution> state_thetas(const GibbsState &state, std::span<const double> alpha) {
  const double alpha_sum = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  std::vector<TopicDistribution> out(state.num_docs());
  for (std::size_t d = 0; d < state.num_docs(); ++d) {
    const auto row = state.doc_topic_row(d);
    const double denom = static_cast<double>(state.doc_length(d)) + alpha_sum;
    out[d].resize(row.size());
    for (std::size_t k = 0; k < row.size(); ++k) out[d][k] = (row[k] + alpha[k]) / denom;
  }
  return out;
}

struct SweepStat {
  std::size_t iteration = 0;
  double log_likelihood = 0.0;
  double alpha_sum = 0.0;
};

struct TrainResult {
  LdaModel model;
  std::vector<TopicDistribution> thetas;
  std::vector<SweepStat> log;
  std::vector<std::string> warnings;
};

// total_iterations sweeps; after burn_in, the prior is re-estimated every
// hyperopt_interval sweeps.
inline TrainResult train(std::vector<EncodedDoc> docs, const TrainConfig &config, std::size_t vocab_size = 0,
                         std::uint64_t vocab_fingerprint = 0,
                         const std::function<void(const SweepStat &)> &on_sweep = {}) {
  config.validate();
  GibbsState state = init_assignments(std::move(docs), config, vocab_size);
  std::vector<double> alpha = config.initial_alpha();
  TrainResult result;
  for (std::size_t it = 1; it <= config.total_iterations; ++it) {
    gibbs_sweep(state, alpha, config.beta, config.workers);
    if (config.debug_checks) state.check_consistency();
    if (it > config.burn_in && config.hyperopt_interval > 0 && (it - config.burn_in) % config.hyperopt_interval == 0) {
      auto upd = optimize_alpha(state, alpha);
      if (upd.warning) result.warnings.push_back("sweep " + std::to_string(it) + ": " + *upd.warning);
      alpha = std::move(upd.alpha);
    }
    if (config.loglik_interval > 0 && (it % config.loglik_interval == 0 || it == config.total_iterations)) {
      SweepStat stat{it, corpus_log_likelihood(state, alpha, config.beta),
                     std::accumulate(alpha.begin(), alpha.end(), 0.0)};
      if (on_sweep) on_sweep(stat);
      result.log.push_back(stat);
    }
  }
  result.thetas = state_thetas(state, alpha);
  result.model = LdaModel(state.num_topics(), state.vocab_size(), alpha, config.beta, state.topic_word_table(),
                          config.seed, vocab_fingerprint);
  return result;
}

// Samples document-local topics against fixed φ̂ and averages the smoothed
// θ over the second half of the sweeps.
inline TopicDistribution infer(const LdaModel &model, std::span<const WordId> doc, std::size_t iterations = 200,
                               std::optional<std::uint64_t> seed = std::nullopt) {
  const std::size_t K = model.num_topics();
  const auto &alpha = model.alpha();
  const double alpha_sum = model.alpha_sum();
  TopicDistribution theta(K, 0.0);
  if (doc.empty() || K == 1) {
    for (std::size_t k = 0; k < K; ++k) theta[k] = alpha[k] / alpha_sum;
    if (K == 1) theta[0] = 1.0;
    return theta;
  }
  for (auto w : doc) {
    if (w >= model.vocab_size()) throw ArgumentError("infer: word id outside model vocabulary");
  }
  iterations = std::max<std::size_t>(iterations, 1);
  CounterRng rng(stream_key(seed.value_or(model.seed()), 0x696E666572ULL));
  std::vector<TopicId> z(doc.size());
  std::vector<std::uint32_t> ndk(K, 0);
  for (auto &k : z) {
    k = static_cast<TopicId>(rng.below(K));
    ++ndk[k];
  }
  std::vector<double> cdf(K);
  const std::size_t keep_from = iterations / 2;
  std::size_t kept = 0;
  const double denom = static_cast<double>(doc.size()) + alpha_sum;
  for (std::size_t it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      --ndk[z[i]];
      const auto phi = model.phi_column(doc[i]);
      double cum = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        cum += (ndk[k] + alpha[k]) * phi[k];
        cdf[k] = cum;
      }
      const double u = rng.uniform() * cum;
      std::size_t k = 0;
      while (k + 1 < K && cdf[k] <= u) ++k;
      z[i] = static_cast<TopicId>(k);
      ++ndk[k];
    }
    if (it >= keep_from) {
      for (std::size_t k = 0; k < K; ++k) theta[k] += (ndk[k] + alpha[k]) / denom;
      ++kept;
    }
  }
  for (auto &t : theta) t /= static_cast<double>(kept);
  return theta;
}

// Per-document inference with per-document seeds; parallel over documents.
inline std::vector<TopicDistribution> infer_corpus(const LdaModel &model, std::span<const EncodedDoc> docs,
                                                   std::size_t iterations = 200, std::uint64_t seed = 0,
                                                   std::size_t workers = 1) {
  std::vector<TopicDistribution> out(docs.size());
  auto run = [&](std::size_t first, std::size_t last) {
    for (std::size_t d = first; d < last; ++d) out[d] = infer(model, docs[d], iterations, stream_key(seed, d));
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(docs.size(), 1));
  if (workers == 1) {
    run(0, docs.size());
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back(run, docs.size() * t / workers, docs.size() * (t + 1) / workers);
    }
    for (auto &th : pool) th.join();
  }
  return out;
}

struct HeldOutScore {
  double total = 0.0;
  double per_token = 0.0;
  std::size_t tokens = 0;
};

// Σ_d Σ_i log Σ_k θ_dk φ̂_{k,w_i} with θ_d from infer().
inline HeldOutScore held_out_log_likelihood(const LdaModel &model, std::span<const EncodedDoc> docs,
                                            std::size_t iterations = 200, std::uint64_t seed = 0,
                                            std::size_t workers = 1) {
  const auto thetas = infer_corpus(model, docs, iterations, seed, workers);
  HeldOutScore score;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (auto w : docs[d]) {
      const auto phi = model.phi_column(w);
      double p = 0.0;
      for (std::size_t k = 0; k < phi.size(); ++k) p += thetas[d][k] * phi[k];
      score.total += std::log(p);
      ++score.tokens;
    }
  }
  score.per_token = score.tokens == 0 ? 0.0 : score.total / static_cast<double>(score.tokens);
  return score;
}

struct GridPoint {
  std::size_t num_topics;
  double alpha_init;
};

struct SweepRow {
  GridPoint point;
  HeldOutScore score;
};

struct SweepResult {
  TrainConfig best;
  std::vector<SweepRow> table;
};

// Trains one model per grid point and keeps the best per-token held-out
// log-likelihood; ties go to smaller K, then smaller alpha_init.
inline SweepResult sweep_hyperparameters(const std::vector<EncodedDoc> &docs, const std::vector<EncodedDoc> &held_out,
                                         std::span<const GridPoint> grid, const TrainConfig &base,
                                         std::size_t vocab_size = 0, std::size_t infer_iterations = 200) {
  if (grid.empty()) throw ArgumentError("sweep_hyperparameters: empty grid");
  if (vocab_size == 0) vocab_size = std::max(infer_vocab_size(docs), infer_vocab_size(held_out));
  SweepResult result;
  std::optional<std::size_t> best;
  for (const auto &p : grid) {
    TrainConfig cfg = base;
    cfg.num_topics = p.num_topics;
    cfg.alpha_init = p.alpha_init;
    cfg.loglik_interval = 0;
    auto trained = train(docs, cfg, vocab_size);
    auto score = held_out_log_likelihood(trained.model, held_out, infer_iterations, cfg.seed, cfg.workers);
    result.table.push_back({p, score});
    const auto idx = result.table.size() - 1;
    if (!best) {
      best = idx;
      continue;
    }
    const auto &cur = result.table[*best];
    const bool better =
        score.per_token > cur.score.per_token ||
        (score.per_token == cur.score.per_token &&
         (p.num_topics < cur.point.num_topics ||
          (p.num_topics == cur.point.num_topics && p.alpha_init < cur.point.alpha_init)));
    if (better) best = idx;
  }
  result.best = base;
  result.best.num_topics = result.table[*best].point.num_topics;
  result.best.alpha_init = result.table[*best].point.alpha_init;
  return result;
}

struct RankedTerm {
  std::string term;
  double prob;
};

// n terms by descending φ̂_kw, ties lexicographic.
inline std::vector<RankedTerm> top_words(const LdaModel &model, const Vocabulary &vocab, std::size_t topic,
                                         std::size_t n) {
  if (topic >= model.num_topics()) throw ArgumentError("top_words: topic out of range");
  model.check_vocabulary(vocab);
  std::vector<RankedTerm> all;
  all.reserve(model.vocab_size());
  for (std::size_t w = 0; w < model.vocab_size(); ++w) {
    all.push_back({vocab.term(static_cast<WordId>(w)), model.phi(topic, w)});
  }
  auto cmp = [](const RankedTerm &a, const RankedTerm &b) { return a.prob != b.prob ? a.prob > b.prob : a.term < b.term; };
  n = std::min(n, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(), cmp);
  all.resize(n);
  return all;
}

} // namespace stancetopic
