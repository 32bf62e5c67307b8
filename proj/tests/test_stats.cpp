#include <cmath>
#include <map>
#include <vector>

#include "catch_amalgamated.hpp"
#include "stancetopic/rng.hpp"
#include "stancetopic/stats.hpp"
#include "stancetopic/synth.hpp"
#include "support.hpp"

using namespace stancetopic;

namespace {

// r straight from the definition: cov / (sd_x sd_y), with n-1 normalization
// in every term so it cancels.
double pearson_oracle(const std::vector<double> &x, const std::vector<double> &y) {
  const std::size_t n = x.size();
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  long double cov = 0, vx = 0, vy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cov += (x[i] - mx) * (y[i] - my) / (n - 1);
    vx += (x[i] - mx) * (x[i] - mx) / (n - 1);
    vy += (y[i] - my) * (y[i] - my) / (n - 1);
  }
  return static_cast<double>(cov / std::sqrt(vx * vy));
}

// Solves the 2x2 normal equations [n Σx; Σx Σx²][b a]ᵀ = [Σy Σxy]ᵀ.
std::pair<double, double> normal_equations(const std::vector<double> &x, const std::vector<double> &y) {
  long double n = x.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const long double det = n * sxx - sx * sx;
  const long double slope = (n * sxy - sx * sy) / det;
  const long double intercept = (sy * sxx - sx * sxy) / det;
  return {static_cast<double>(slope), static_cast<double>(intercept)};
}

} // namespace

TEST_CASE("pearson examples", "[stats]") {
  const std::vector<double> x{1, 2, 3, 4};
  std::vector<double> lin, neg;
  for (double v : x) {
    lin.push_back(2 * v + 1);
    neg.push_back(-v);
  }
  CHECK(pearson(x, lin) == Catch::Approx(1.0).margin(1e-15));
  CHECK(pearson(x, neg) == Catch::Approx(-1.0).margin(1e-15));
  const std::vector<double> y{1, 3, 2, 5};
  CHECK(std::abs(pearson(x, y) - pearson_oracle(x, y)) <= 1e-12);
  CHECK(pearson(x, y) == Catch::Approx(0.8315218406));

  const std::vector<double> flat{2, 2, 2, 2};
  CHECK_THROWS_AS(pearson(flat, y), ArgumentError);
  CHECK_THROWS_AS(pearson(x, std::vector<double>{1, 2}), ArgumentError);
  CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{1}), ArgumentError);
}

TEST_CASE("least_squares examples", "[stats]") {
  const std::vector<double> x{0, 1, 5, 9};
  std::vector<double> y;
  for (double v : x) y.push_back(2 * v + 1);
  const auto fit = least_squares(x, y);
  CHECK(fit.slope == Catch::Approx(2.0));
  CHECK(fit.intercept == Catch::Approx(1.0));
  CHECK(fit.r_squared == Catch::Approx(1.0));
  CHECK_THROWS_AS(least_squares(std::vector<double>{3, 3, 3}, std::vector<double>{1, 2, 3}), ArgumentError);
}

TEST_CASE("pearson and least_squares match oracles on random data", "[stats][property]") {
  CounterRng rng(stream_key(31, 1));
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(20), y(20);
    const double slope = rng.normal() * 3;
    for (std::size_t i = 0; i < 20; ++i) {
      x[i] = rng.uniform() * 10 - 5;
      y[i] = slope * x[i] + rng.normal();
    }
    const double r = pearson(x, y);
    REQUIRE(std::abs(r - pearson_oracle(x, y)) <= 1e-12);
    const auto fit = least_squares(x, y);
    const auto [b, a] = normal_equations(x, y);
    REQUIRE(std::abs(fit.slope - b) <= 1e-12 * std::max(1.0, std::abs(b)));
    REQUIRE(std::abs(fit.intercept - a) <= 1e-12 * std::max(1.0, std::abs(a)));
    REQUIRE(std::abs(fit.r_squared - r * r) <= 1e-15);

    // Symmetry and affine invariance.
    REQUIRE(std::abs(pearson(y, x) - r) <= 1e-12);
    std::vector<double> xa(20), ya(20);
    for (std::size_t i = 0; i < 20; ++i) {
      xa[i] = 3.5 * x[i] - 7;
      ya[i] = -0.25 * y[i] + 100;
    }
    REQUIRE(std::abs(pearson(xa, y) - r) <= 1e-12);
    REQUIRE(std::abs(pearson(x, ya) + r) <= 1e-12);
  }
}

TEST_CASE("poll files: bundled poll table, placeholders and errors", "[stats]") {
  const auto polls = load_polls(STANCETOPIC_DATA_DIR "/polls_table.csv");
  REQUIRE(polls.size() == 20);
  const auto fixture = synth::poll_table_fixture();
  std::map<StateCode, int> per_state;
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(polls[i].state == fixture[i].state);
    CHECK(polls[i].end_date == fixture[i].end_date);
    CHECK_FALSE(polls[i].support_fraction);
    ++per_state[polls[i].state];
  }
  CHECK(per_state.size() == 16);
  CHECK(polls[3].state == "GA");
  CHECK(polls[3].end_date == *dates::parse_date("2013-05-23"));
  CHECK(polls[4].end_date == *dates::parse_date("2013-08-05"));

  test_support::TempDir dir;
  test_support::write_text(dir.file("empty.csv"), "");
  CHECK(load_polls(dir.file("empty.csv")).empty());
  test_support::write_text(dir.file("ok.csv"), "state,end_date,support_fraction\nTX, 2013-07-01 ,0.45\nOH,2013-04-26,?\n");
  const auto ok = load_polls(dir.file("ok.csv"));
  REQUIRE(ok.size() == 2);
  CHECK(ok[0].support_fraction == 0.45);
  CHECK_FALSE(ok[1].support_fraction);

  for (const char *bad : {"TX,2013-07-01,1.7\n", "TX,2013-07-01,abc\n", "TX,2013-13-01,0.5\n", "Texas,2013-07-01,0.5\n",
                          "TX,2013-07-01\n", "TX,2013-07-01,0.5,1\n", "TX,2013-07-01,-0.1\n"}) {
    INFO(bad);
    test_support::write_text(dir.file("bad.csv"), std::string("state,end_date,support_fraction\n") + bad);
    try {
      load_polls(dir.file("bad.csv"));
      FAIL("expected a parse error");
    } catch (const ParseError &e) {
      CHECK(e.line() == 2);
    }
  }
  CHECK_THROWS_AS(load_polls(dir.file("missing.csv")), InputError);
}

TEST_CASE("correlate_polls pairs each poll with its state share", "[stats]") {
  const std::vector<PollRecord> polls{{"AK", *dates::parse_date("2013-04-26"), 0.4},
                                      {"GA", *dates::parse_date("2013-05-23"), 0.6},
                                      {"GA", *dates::parse_date("2013-08-05"), 0.5},
                                      {"ZZ", *dates::parse_date("2013-08-05"), 0.5}};
  const std::map<StateCode, StateShare> shares{{"AK", {0.4, 40, 60}}, {"GA", {0.55, 55, 45}}};
  const auto c = correlate_polls(polls, shares);
  CHECK(c.pairs.size() == 3);
  CHECK(c.unmatched.size() == 1);
  CHECK(c.pairs[1].control_share == 0.55);
  CHECK(c.pairs[2].poll.end_date == *dates::parse_date("2013-08-05"));

  const std::vector<PollRecord> two{{"AK", {}, 0.4}, {"GA", {}, 0.6}};
  const std::map<StateCode, StateShare> exact{{"AK", {0.4, 4, 6}}, {"GA", {0.6, 6, 4}}};
  CHECK(correlate_polls(two, exact).r == Catch::Approx(1.0));

  const std::vector<PollRecord> placeholder{{"AK", {}, std::nullopt}, {"GA", {}, 0.6}};
  CHECK_THROWS_AS(correlate_polls(placeholder, exact), ArgumentError);
  const std::vector<PollRecord> lonely{{"AK", {}, 0.4}};
  CHECK_THROWS_AS(correlate_polls(lonely, exact), ArgumentError);
}

TEST_CASE("windowed correlation counts only the days before each poll", "[stats]") {
  const Day end = *dates::parse_date("2013-05-10");
  std::vector<Stance> labels;
  std::vector<std::optional<StateCode>> states;
  std::vector<Day> days;
  auto add = [&](const char *s, Stance st, Day d, int n) {
    for (int i = 0; i < n; ++i) {
      labels.push_back(st);
      states.emplace_back(s);
      days.push_back(d);
    }
  };
  // Inside the 7-day window: AK 1/4 Control, GA 3/4 Control.
  add("AK", Stance::Control, end, 1);
  add("AK", Stance::Rights, end - std::chrono::days{6}, 3);
  add("GA", Stance::Control, end, 3);
  add("GA", Stance::Rights, end, 1);
  // Outside it (day 7 before, and after the poll) the shares flip.
  add("AK", Stance::Control, end - std::chrono::days{7}, 50);
  add("GA", Stance::Rights, end + std::chrono::days{1}, 50);

  const std::vector<PollRecord> polls{{"AK", end, 0.3}, {"GA", end, 0.7}};
  const auto c = correlate_polls_windowed(polls, labels, states, days, 7, 1);
  REQUIRE(c.pairs.size() == 2);
  CHECK(c.pairs[0].control_share == 0.25);
  CHECK(c.pairs[1].control_share == 0.75);
  CHECK(c.r == Catch::Approx(1.0));
  CHECK_THROWS_AS(correlate_polls_windowed(polls, labels, states, days, 0, 1), ArgumentError);
}
