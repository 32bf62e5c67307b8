#pragma once

// Tokenization, stopword filtering, frequency-capped vocabulary and integer
// encoding of documents.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "stancetopic/error.hpp"
#include "stancetopic/rng.hpp"
#include "stancetopic/unicode.hpp"

namespace stancetopic {

using TokenSequence = std::vector<std::string>;
using WordId = std::uint32_t;
using EncodedDoc = std::vector<WordId>;

inline constexpr std::size_t kDefaultMaxTypes = 40000;

class StopwordList {
public:
  StopwordList() = default;
  StopwordList(std::initializer_list<std::string_view> terms) {
    for (auto t : terms) add(t);
  }

  // Standard English function words plus platform noise ("rt", "via", URL
  // fragments, HTML entity residue, the anonymized "user" handle).
  static StopwordList english_social() {
    return StopwordList{
        "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any", "are", "as", "at",
        "be", "because", "been", "before", "being", "below", "between", "both", "but", "by", "can", "could",
        "did", "do", "does", "doing", "down", "during", "each", "few", "for", "from", "further", "had", "has",
        "have", "having", "he", "her", "here", "hers", "herself", "him", "himself", "his", "how", "i", "if", "in",
        "into", "is", "it", "its", "itself", "just", "me", "more", "most", "my", "myself", "no", "nor", "not",
        "now", "of", "off", "on", "once", "only", "or", "other", "our", "ours", "ourselves", "out", "over", "own",
        "s", "same", "she", "should", "so", "some", "such", "than", "that", "the", "their", "theirs", "them",
        "themselves", "then", "there", "these", "they", "this", "those", "through", "to", "too", "under", "until",
        "up", "very", "was", "we", "were", "what", "when", "where", "which", "while", "who", "whom", "why", "will",
        "with", "would", "you", "your", "yours", "yourself", "yourselves", "ll", "re", "ve", "d", "m",
        // platform-specific
        "rt", "via", "amp", "http", "https", "co", "t", "www", "com", "user", "mt", "cc", "lt"};
  }

  // One term per line; '#'-prefixed lines and blank lines are ignored.
  static StopwordList load(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open stoplist: " + path);
    StopwordList list;
    std::string line;
    while (std::getline(in, line)) {
      auto t = trim(line);
      if (t.empty() || t.front() == '#') continue;
      list.add(t);
    }
    return list;
  }

  void add(std::string_view term) { terms_.insert(unicode::lowercase(term)); }
  bool contains(std::string_view token) const { return terms_.contains(std::string(token)); }
  std::size_t size() const { return terms_.size(); }

  std::vector<std::string> sorted() const {
    std::vector<std::string> out(terms_.begin(), terms_.end());
    std::sort(out.begin(), out.end());
    return out;
  }

private:
  static std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
  }

  std::unordered_set<std::string> terms_;
};

// Lowercased maximal alphanumeric runs, no stopword filtering.
inline TokenSequence split_tokens(std::string_view text) {
  TokenSequence out;
  std::string current;
  for (std::size_t pos = 0; pos < text.size();) {
    const char32_t cp = unicode::next_code_point(text, pos);
    if (unicode::is_alnum(cp)) {
      unicode::append_utf8(current, unicode::to_lower(cp));
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

inline TokenSequence tokenize(std::string_view text, const StopwordList &stopwords) {
  TokenSequence tokens = split_tokens(text);
  std::erase_if(tokens, [&](const std::string &t) { return stopwords.contains(t); });
  return tokens;
}

class Vocabulary {
public:
  Vocabulary() = default;

  // Terms must already be in id order; throws on duplicates.
  Vocabulary(std::vector<std::string> terms, std::vector<std::uint64_t> frequencies)
      : terms_(std::move(terms)), frequencies_(std::move(frequencies)) {
    if (terms_.size() != frequencies_.size()) throw ArgumentError("vocabulary: terms/frequencies size mismatch");
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (!ids_.emplace(terms_[i], static_cast<WordId>(i)).second) {
        throw ArgumentError("vocabulary: duplicate term '" + terms_[i] + "'");
      }
    }
  }

  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  std::optional<WordId> id(std::string_view term) const {
    auto it = ids_.find(std::string(term));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }
  const std::string &term(WordId id) const { return terms_.at(id); }
  std::uint64_t frequency(WordId id) const { return frequencies_.at(id); }
  const std::vector<std::string> &terms() const { return terms_; }

  // Stable fingerprint over the id->term mapping; stored in model files.
  std::uint64_t fingerprint() const {
    std::uint64_t h = fnv1a("vocab", 5);
    for (const auto &t : terms_) {
      h = fnv1a(t.data(), t.size(), h);
      h = fnv1a("\n", 1, h);
    }
    return h;
  }

  // TSV: id<TAB>term<TAB>frequency
  void save_tsv(const std::string &path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write vocabulary: " + path);
    save_tsv(out);
  }
  void save_tsv(std::ostream &out) const {
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      out << i << '\t' << terms_[i] << '\t' << frequencies_[i] << '\n';
    }
  }

  static Vocabulary load_tsv(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open vocabulary: " + path);
    std::vector<std::string> terms;
    std::vector<std::uint64_t> freqs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line.front() == '#') continue;
      const auto t1 = line.find('\t');
      const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
      if (t2 == std::string::npos) throw ParseError(path, lineno, "expected id<TAB>term<TAB>frequency");
      try {
        const auto id = std::stoull(line.substr(0, t1));
        if (id != terms.size()) throw ParseError(path, lineno, "ids must be dense and ascending");
        terms.push_back(line.substr(t1 + 1, t2 - t1 - 1));
        freqs.push_back(std::stoull(line.substr(t2 + 1)));
      } catch (const std::logic_error &) {
        throw ParseError(path, lineno, "bad integer field");
      }
    }
    return Vocabulary(std::move(terms), std::move(freqs));
  }

private:
  std::vector<std::string> terms_;
  std::vector<std::uint64_t> frequencies_;
  std::unordered_map<std::string, WordId> ids_;
};

// Keeps the `max_types` most frequent types; ids in descending frequency,
// ties broken lexicographically. Stopwords (if given) are never admitted.
inline Vocabulary build_vocabulary(std::span<const TokenSequence> docs, std::size_t max_types = kDefaultMaxTypes,
                                   const StopwordList *stopwords = nullptr) {
  if (max_types < 1) throw ArgumentError("build_vocabulary: max_types must be >= 1");
  if (docs.empty()) throw ArgumentError("build_vocabulary: no documents");
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto &doc : docs) {
    for (const auto &tok : doc) {
      if (stopwords && stopwords->contains(tok)) continue;
      ++counts[tok];
    }
  }
  std::vector<std::pair<std::string, std::uint64_t>> ranked(counts.begin(), counts.end());
  auto by_rank = [](const auto &a, const auto &b) { return a.second != b.second ? a.second > b.second : a.first < b.first; };
  if (ranked.size() > max_types) {
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(max_types), ranked.end(), by_rank);
    ranked.resize(max_types);
  } else {
    std::sort(ranked.begin(), ranked.end(), by_rank);
  }
  std::vector<std::string> terms;
  std::vector<std::uint64_t> freqs;
  terms.reserve(ranked.size());
  freqs.reserve(ranked.size());
  for (auto &[t, c] : ranked) {
    terms.push_back(std::move(t));
    freqs.push_back(c);
  }
  return Vocabulary(std::move(terms), std::move(freqs));
}

inline EncodedDoc encode(std::span<const std::string> doc, const Vocabulary &vocab) {
  EncodedDoc ids;
  ids.reserve(doc.size());
  for (const auto &tok : doc) {
    if (auto id = vocab.id(tok)) ids.push_back(*id);
  }
  return ids;
}

inline TokenSequence decode(std::span<const WordId> ids, const Vocabulary &vocab) {
  TokenSequence out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(vocab.term(id));
  return out;
}

} // namespace stancetopic
