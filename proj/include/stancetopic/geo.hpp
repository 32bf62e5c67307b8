#pragma once

// Precision-first resolution of free-text profile locations to US states.
//
// A location string is split on commas and whitespace and scanned left to
// right for the longest gazetteer alias at each position. The result is a
// state only when every non-ambiguous match agrees on it.

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "stancetopic/corpus.hpp"
#include "stancetopic/error.hpp"
#include "stancetopic/geo_data.hpp"
#include "stancetopic/unicode.hpp"

namespace stancetopic {

using StateCode = std::string;

enum class AliasKind : std::uint8_t { State, Abbrev, City };

inline std::string_view to_string(AliasKind k) {
  switch (k) {
  case AliasKind::State: return "state";
  case AliasKind::Abbrev: return "abbrev";
  case AliasKind::City: return "city";
  }
  return "city";
}

namespace geo_detail {

struct LocationToken {
  std::string norm;    // lowercase, '.' removed, edge punctuation stripped
  bool upper = false;  // raw token had letters and all of them uppercase
  bool after_comma = false;
};

inline bool is_edge_punct(char32_t cp) { return cp != U'-' && cp != U'\'' && !unicode::is_alnum(cp); }

inline std::vector<LocationToken> split_location(std::string_view s) {
  std::vector<LocationToken> out;
  bool comma_pending = false;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const char c = s[pos];
    if (c == ',') {
      comma_pending = true;
      ++pos;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++pos;
      continue;
    }
    std::size_t end = pos;
    while (end < s.size() && s[end] != ',' && s[end] != ' ' && s[end] != '\t' && s[end] != '\n' && s[end] != '\r') {
      ++end;
    }
    std::u32string cps;
    for (std::size_t p = pos; p < end;) {
      const char32_t cp = unicode::next_code_point(s.substr(0, end), p);
      if (cp != U'.') cps.push_back(cp);
    }
    std::size_t b = 0, e = cps.size();
    while (b < e && is_edge_punct(cps[b])) ++b;
    while (e > b && is_edge_punct(cps[e - 1])) --e;
    LocationToken tok;
    bool any_letter = false, all_upper = true;
    for (std::size_t i = b; i < e; ++i) {
      const char32_t cp = cps[i];
      if (unicode::to_lower(cp) != cp) any_letter = true;
      else if (u_isalpha(static_cast<UChar32>(cp))) {
        any_letter = true;
        all_upper = false;
      }
      unicode::append_utf8(tok.norm, unicode::to_lower(cp));
    }
    tok.upper = any_letter && all_upper;
    tok.after_comma = comma_pending;
    comma_pending = false;
    if (!tok.norm.empty()) out.push_back(std::move(tok));
    pos = end;
  }
  return out;
}

inline std::string normalize_alias(std::string_view alias) {
  std::string out;
  for (const auto &t : split_location(alias)) {
    if (!out.empty()) out.push_back(' ');
    out += t.norm;
  }
  return out;
}

} // namespace geo_detail

class Gazetteer {
public:
  struct Entry {
    StateCode state;
    AliasKind kind;
  };

  // Bare two-letter codes that collide with common words; these match only
  // right after a comma.
  static constexpr std::string_view kCommaOnlyAbbrevs[] = {"in", "me", "or", "hi"};

  Gazetteer() = default;

  // State names + USPS codes + the built-in city list.
  static Gazetteer us_default() {
    Gazetteer g;
    for (const auto &s : geo_data::kStates) {
      g.add(s.name, StateCode(s.state), AliasKind::State);
      g.add(unicode::lowercase(s.state), StateCode(s.state), AliasKind::Abbrev);
    }
    g.add("dc", "DC", AliasKind::Abbrev);
    g.add("washington dc", "DC", AliasKind::City);
    for (const auto &c : geo_data::kCities) g.add(c.name, StateCode(c.state), AliasKind::City);
    for (auto a : geo_data::kExtraAmbiguous) g.mark_ambiguous(a);
    return g;
  }

  // Adds an alias. An alias seen with two different states becomes ambiguous.
  void add(std::string_view alias, const StateCode &state, AliasKind kind) {
    const auto key = geo_detail::normalize_alias(alias);
    if (key.empty()) throw ArgumentError("gazetteer: empty alias");
    max_words_ = std::max(max_words_, static_cast<std::size_t>(std::count(key.begin(), key.end(), ' ') + 1));
    if (ambiguous_.contains(key)) return;
    auto [it, inserted] = aliases_.emplace(key, Entry{state, kind});
    if (inserted) return;
    if (it->second.state != state) {
      aliases_.erase(it);
      ambiguous_.insert(key);
    } else if (kind == AliasKind::State || (kind == AliasKind::City && it->second.kind == AliasKind::Abbrev)) {
      // Prefer the kind with the weakest matching restrictions.
      it->second.kind = kind;
    }
  }

  void mark_ambiguous(std::string_view alias) {
    const auto key = geo_detail::normalize_alias(alias);
    if (key.empty()) return;
    max_words_ = std::max(max_words_, static_cast<std::size_t>(std::count(key.begin(), key.end(), ' ') + 1));
    aliases_.erase(key);
    ambiguous_.insert(key);
  }

  const Entry *find(const std::string &alias) const {
    auto it = aliases_.find(alias);
    return it == aliases_.end() ? nullptr : &it->second;
  }
  bool is_ambiguous(const std::string &alias) const { return ambiguous_.contains(alias); }
  std::size_t size() const { return aliases_.size(); }
  std::size_t max_alias_words() const { return max_words_; }
  const std::unordered_set<std::string> &ambiguous() const { return ambiguous_; }

  // Sorted rows for serialization.
  std::vector<std::pair<std::string, Entry>> entries() const {
    std::vector<std::pair<std::string, Entry>> out(aliases_.begin(), aliases_.end());
    std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
    return out;
  }

  // TSV alias<TAB>state_code<TAB>kind, plus an optional ambiguity list (one
  // alias per line, '#' comments).
  static Gazetteer load(const std::string &tsv_path, const std::string &ambiguity_path = {}) {
    std::ifstream in(tsv_path);
    if (!in) throw InputError("cannot open gazetteer: " + tsv_path);
    Gazetteer g;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      const auto t1 = line.find('\t');
      const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
      if (t2 == std::string::npos) throw ParseError(tsv_path, lineno, "expected alias<TAB>state<TAB>kind");
      const auto kind_s = line.substr(t2 + 1);
      AliasKind kind;
      if (kind_s == "state") kind = AliasKind::State;
      else if (kind_s == "abbrev") kind = AliasKind::Abbrev;
      else if (kind_s == "city") kind = AliasKind::City;
      else throw ParseError(tsv_path, lineno, "unknown kind '" + kind_s + "'");
      const auto state = line.substr(t1 + 1, t2 - t1 - 1);
      if (state.size() != 2) throw ParseError(tsv_path, lineno, "state code must have two letters");
      g.add(line.substr(0, t1), state, kind);
    }
    if (!ambiguity_path.empty()) g.load_ambiguity(ambiguity_path);
    return g;
  }

  void load_ambiguity(const std::string &path) {
    std::ifstream amb(path);
    if (!amb) throw InputError("cannot open ambiguity list: " + path);
    std::string line;
    while (std::getline(amb, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      mark_ambiguous(line);
    }
  }

  void save(const std::string &tsv_path, const std::string &ambiguity_path) const {
    std::ofstream out(tsv_path);
    if (!out) throw InputError("cannot write gazetteer: " + tsv_path);
    for (const auto &[alias, e] : entries()) out << alias << '\t' << e.state << '\t' << to_string(e.kind) << '\n';
    std::ofstream amb(ambiguity_path);
    if (!amb) throw InputError("cannot write ambiguity list: " + ambiguity_path);
    std::vector<std::string> sorted(ambiguous_.begin(), ambiguous_.end());
    std::sort(sorted.begin(), sorted.end());
    for (const auto &a : sorted) amb << a << '\n';
  }

private:
  std::unordered_map<std::string, Entry> aliases_;
  std::unordered_set<std::string> ambiguous_;
  std::size_t max_words_ = 1;
};

inline std::optional<StateCode> resolve_state(std::optional<std::string_view> profile_location, const Gazetteer &gaz) {
  if (!profile_location || profile_location->empty()) return std::nullopt;
  const auto tokens = geo_detail::split_location(*profile_location);
  std::set<StateCode> states;
  std::size_t i = 0;
  while (i < tokens.size()) {
    bool matched = false;
    const std::size_t longest = std::min(gaz.max_alias_words(), tokens.size() - i);
    for (std::size_t len = longest; len >= 1; --len) {
      std::string key = tokens[i].norm;
      for (std::size_t j = 1; j < len; ++j) key += ' ' + tokens[i + j].norm;
      if (gaz.is_ambiguous(key)) {
        matched = true;
      } else if (const auto *e = gaz.find(key)) {
        if (e->kind == AliasKind::Abbrev) {
          const auto &tok = tokens[i];
          const bool comma_only = std::find(std::begin(Gazetteer::kCommaOnlyAbbrevs),
                                            std::end(Gazetteer::kCommaOnlyAbbrevs),
                                            tok.norm) != std::end(Gazetteer::kCommaOnlyAbbrevs);
          const bool allowed = comma_only ? tok.after_comma : (tok.upper || tok.after_comma);
          if (!allowed) continue;
        }
        states.insert(e->state);
        matched = true;
      }
      if (matched) {
        i += len;
        break;
      }
    }
    if (!matched) ++i;
  }
  if (states.size() != 1) return std::nullopt;
  return *states.begin();
}

inline std::optional<StateCode> resolve_state(const std::optional<std::string> &profile_location,
                                              const Gazetteer &gaz) {
  if (!profile_location) return std::nullopt;
  return resolve_state(std::optional<std::string_view>(*profile_location), gaz);
}

struct GeocodeResult {
  // Parallel to store order.
  std::vector<std::optional<StateCode>> states;
  std::unordered_map<TweetId, std::optional<StateCode>> by_id;
  std::size_t resolved = 0;

  double coverage() const {
    return states.empty() ? 0.0 : static_cast<double>(resolved) / static_cast<double>(states.size());
  }
};

inline GeocodeResult geocode_corpus(const CorpusStore &store, const Gazetteer &gaz) {
  GeocodeResult out;
  out.states.reserve(store.size());
  for (const auto &t : store) {
    auto s = resolve_state(t.profile_location, gaz);
    if (s) ++out.resolved;
    out.by_id[t.id] = s;
    out.states.push_back(std::move(s));
  }
  return out;
}

} // namespace stancetopic
