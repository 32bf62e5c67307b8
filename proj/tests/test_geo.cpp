#include <optional>
#include <string>
#include <vector>

#include "catch_amalgamated.hpp"
#include "stancetopic/geo.hpp"
#include "stancetopic/rng.hpp"
#include "support.hpp"

using namespace stancetopic;

namespace {

const Gazetteer &gaz() {
  static const Gazetteer g = Gazetteer::us_default();
  return g;
}

std::optional<StateCode> resolve(const char *s) { return resolve_state(std::optional<std::string_view>(s), gaz()); }

} // namespace

TEST_CASE("resolve_state examples", "[geo]") {
  CHECK(resolve("Baltimore, MD") == "MD");
  CHECK(resolve("") == std::nullopt);
  CHECK(resolve_state(std::optional<std::string_view>{}, gaz()) == std::nullopt);
  CHECK(resolve("Springfield") == std::nullopt);
  CHECK(resolve("worldwide") == std::nullopt);
  CHECK(resolve("Austin, TX") == "TX");
  CHECK(resolve("somewhere in Texas") == "TX");
}

TEST_CASE("shipped gazetteer treats multi-state cities as ambiguous", "[geo]") {
  CHECK(gaz().is_ambiguous("springfield"));
  CHECK(gaz().is_ambiguous("portland"));
  CHECK(gaz().is_ambiguous("washington"));
  for (const auto &[alias, e] : gaz().entries()) {
    CHECK_FALSE(gaz().is_ambiguous(alias));
    CHECK(e.state.size() == 2);
  }
}

TEST_CASE("longest alias wins", "[geo]") {
  CHECK(resolve("New York") == "NY");
  CHECK(resolve("new york city") == "NY");
  CHECK(resolve("Kansas City, Missouri") == "MO");
  CHECK(resolve("Washington DC") == "DC");
  CHECK(resolve("West Virginia") == "WV");
}

TEST_CASE("conflicting signals resolve to none", "[geo]") {
  CHECK(resolve("Portland, ME ... Oregon") == std::nullopt);
  CHECK(resolve("Portland, ME") == "ME");
  CHECK(resolve("Austin, TX / Chicago") == std::nullopt);
}

TEST_CASE("two-letter codes need uppercase or a preceding comma", "[geo]") {
  CHECK(resolve("Dallas TX") == "TX");
  CHECK(resolve("born in tx") == std::nullopt);
  CHECK(resolve("somewhere, tx") == "TX");
  CHECK(resolve("living in ME") == std::nullopt);
  CHECK(resolve("OR ME HI IN") == std::nullopt);
  CHECK(resolve("Bangor, me") == "ME");
  CHECK(resolve("Honolulu, HI") == "HI");
  CHECK(resolve("city, OR") == "OR");
  CHECK(resolve("D.C.") == "DC");
}

TEST_CASE("geocode_corpus reports coverage", "[geo]") {
  CorpusStore store;
  for (std::uint64_t i = 0; i < 10; ++i) {
    std::optional<std::string> loc;
    if (i < 4) loc = "Austin, TX";
    else if (i < 7) loc = "worldwide";
    store.append(Tweet(i, Seconds{}, "gun", loc));
  }
  const auto res = geocode_corpus(store, gaz());
  CHECK(res.coverage() == Catch::Approx(0.4));
  CHECK(res.resolved == 4);
  for (std::uint64_t i = 0; i < 4; ++i) CHECK(res.by_id.at(i) == "TX");
  for (std::uint64_t i = 4; i < 10; ++i) CHECK_FALSE(res.by_id.at(i));
  CHECK(geocode_corpus(CorpusStore{}, gaz()).coverage() == 0.0);
}

TEST_CASE("no state without a gazetteer alias", "[geo][property]") {
  // Random strings over words and punctuation; any result must be backed by
  // an alias occurring in the input.
  const std::vector<std::string> words{"the", "best", "place", "earth", "home", "xyz", "moon", "q", "zz", "Ö",
                                       ",", " ", "  ", ".", "-", "'", "worldwide", "everywhere", "123"};
  CounterRng rng(stream_key(77, 3));
  for (int trial = 0; trial < 3000; ++trial) {
    std::string s;
    const auto n = rng.below(10);
    for (std::size_t i = 0; i < n; ++i) {
      s += words[rng.below(words.size())];
      if (rng.bernoulli(0.5)) s += ' ';
    }
    bool has_alias = false;
    for (const auto &t : geo_detail::split_location(s)) has_alias |= gaz().find(t.norm) != nullptr;
    if (!has_alias) REQUIRE_FALSE(resolve_state(std::optional<std::string_view>(s), gaz()));
  }
}

TEST_CASE("gazetteer files round-trip", "[geo]") {
  test_support::TempDir dir;
  gaz().save(dir.file("g.tsv"), dir.file("amb.txt"));
  const auto back = Gazetteer::load(dir.file("g.tsv"), dir.file("amb.txt"));
  CHECK(back.size() == gaz().size());
  CHECK(back.ambiguous() == gaz().ambiguous());
  CHECK(resolve_state(std::optional<std::string_view>("Baltimore, MD"), back) == "MD");

  test_support::write_text(dir.file("bad.tsv"), "# header\nboston\tMA\tcity\nfoo\tMA\n");
  try {
    Gazetteer::load(dir.file("bad.tsv"));
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(e.line() == 3);
  }
  test_support::write_text(dir.file("kind.tsv"), "boston\tMA\ttown\n");
  CHECK_THROWS_AS(Gazetteer::load(dir.file("kind.tsv")), ParseError);
}
