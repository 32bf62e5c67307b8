#pragma once

// Hashtag-majority stance coding.

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

#include "stancetopic/corpus.hpp"
#include "stancetopic/error.hpp"
#include "stancetopic/unicode.hpp"

namespace stancetopic {

enum class Stance : std::uint8_t { Unlabeled = 0, Control = 1, Rights = 2 };

inline std::string_view to_string(Stance s) {
  switch (s) {
  case Stance::Control: return "Control";
  case Stance::Rights: return "Rights";
  case Stance::Unlabeled: return "Unlabeled";
  }
  return "Unlabeled";
}

inline std::optional<Stance> parse_stance(std::string_view s) {
  if (s == "Control") return Stance::Control;
  if (s == "Rights") return Stance::Rights;
  if (s == "Unlabeled") return Stance::Unlabeled;
  return std::nullopt;
}

class HashtagLexicon {
public:
  HashtagLexicon(std::initializer_list<std::string_view> control, std::initializer_list<std::string_view> rights)
      : HashtagLexicon(std::vector<std::string>(control.begin(), control.end()),
                       std::vector<std::string>(rights.begin(), rights.end())) {}

  HashtagLexicon(const std::vector<std::string> &control, const std::vector<std::string> &rights) {
    for (const auto &t : control) control_.insert(normalize(t));
    for (const auto &t : rights) {
      auto tag = normalize(t);
      if (control_.contains(tag)) throw ArgumentError("lexicon: tag '" + tag + "' listed under both stances");
      rights_.insert(std::move(tag));
    }
  }

  // The 11 + 11 stance hashtags used to code the 2013 gun debate.
  static HashtagLexicon gun_debate() {
    return HashtagLexicon({"gunsense", "gunsensepatriot", "votegunsense", "guncontrolnow", "momsdemandaction",
                           "momsdemand", "demandaplan", "nowaynra", "gunskillpeople", "gunviolence", "endgunviolence"},
                          {"gunrights", "protect2a", "molonlabe", "molonlab", "noguncontrol", "progun",
                           "nogunregistry", "votegunrights", "firearmrights", "gungrab", "gunfriendly"});
  }

  // Sections "[control]" and "[rights]", one tag per line, '#' prefix optional
  // on tags. Lines starting with "//" or ";" are comments.
  static HashtagLexicon load(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open lexicon: " + path);
    std::vector<std::string> control, rights;
    std::vector<std::string> *section = nullptr;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto t = trim(line);
      if (t.empty() || t.starts_with("//") || t.front() == ';') continue;
      if (t == "[control]") {
        section = &control;
      } else if (t == "[rights]") {
        section = &rights;
      } else if (t.front() == '[') {
        throw ParseError(path, lineno, "unknown section " + std::string(t));
      } else if (!section) {
        throw ParseError(path, lineno, "tag outside of [control]/[rights] section");
      } else {
        section->emplace_back(t);
      }
    }
    try {
      return HashtagLexicon(control, rights);
    } catch (const ArgumentError &e) {
      throw ParseError(path, lineno, e.what());
    }
  }

  void save(const std::string &path) const {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write lexicon: " + path);
    out << "[control]\n";
    for (const auto &t : sorted(control_)) out << '#' << t << '\n';
    out << "\n[rights]\n";
    for (const auto &t : sorted(rights_)) out << '#' << t << '\n';
  }

  bool is_control(std::string_view tag) const { return control_.contains(std::string(tag)); }
  bool is_rights(std::string_view tag) const { return rights_.contains(std::string(tag)); }
  const std::unordered_set<std::string> &control_tags() const { return control_; }
  const std::unordered_set<std::string> &rights_tags() const { return rights_; }

private:
  static std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
  }
  static std::string normalize(std::string_view tag) {
    tag = trim(tag);
    if (!tag.empty() && tag.front() == '#') tag.remove_prefix(1);
    if (tag.empty()) throw ArgumentError("lexicon: empty tag");
    return unicode::lowercase(tag);
  }
  static std::vector<std::string> sorted(const std::unordered_set<std::string> &s) {
    std::vector<std::string> v(s.begin(), s.end());
    std::sort(v.begin(), v.end());
    return v;
  }

  std::unordered_set<std::string> control_;
  std::unordered_set<std::string> rights_;
};

// Strict majority of stance hashtags, counted with multiplicity; ties and
// untagged tweets stay Unlabeled.
inline Stance label(std::span<const std::string> hashtags, const HashtagLexicon &lexicon) {
  long control = 0, rights = 0;
  for (const auto &tag : hashtags) {
    if (lexicon.is_control(tag)) ++control;
    else if (lexicon.is_rights(tag)) ++rights;
  }
  if (control > rights) return Stance::Control;
  if (rights > control) return Stance::Rights;
  return Stance::Unlabeled;
}

inline Stance label(const Tweet &tweet, const HashtagLexicon &lexicon) { return label(tweet.hashtags, lexicon); }

struct StanceSummary {
  std::size_t control = 0;
  std::size_t rights = 0;
  std::size_t unlabeled = 0;

  std::size_t total() const { return control + rights + unlabeled; }
  double labeled_fraction() const {
    return total() == 0 ? 0.0 : static_cast<double>(control + rights) / static_cast<double>(total());
  }
};

struct CorpusLabels {
  // Parallel to store order.
  std::vector<Stance> labels;
  std::unordered_map<TweetId, Stance> by_id;
  StanceSummary summary;
};

inline CorpusLabels label_corpus(const CorpusStore &store, const HashtagLexicon &lexicon) {
  CorpusLabels out;
  out.labels.reserve(store.size());
  for (const auto &t : store) {
    const Stance s = label(t, lexicon);
    out.labels.push_back(s);
    out.by_id[t.id] = s;
    switch (s) {
    case Stance::Control: ++out.summary.control; break;
    case Stance::Rights: ++out.summary.rights; break;
    case Stance::Unlabeled: ++out.summary.unlabeled; break;
    }
  }
  return out;
}

} // namespace stancetopic
