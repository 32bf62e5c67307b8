#pragma once

// Poll fixtures and the correlation / least-squares fit between poll support
// and per-state Control share.

#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stancetopic/analytics.hpp"
#include "stancetopic/dates.hpp"
#include "stancetopic/error.hpp"
#include "stancetopic/geo.hpp"

namespace stancetopic {

struct PollRecord {
  StateCode state;
  Day end_date;
  // Fraction answering "yes"; nullopt for a placeholder row awaiting data.
  std::optional<double> support_fraction;
};

// CSV state,end_date,support_fraction with an optional header row. An empty
// or "?" support field marks a placeholder; anything else must be in [0, 1].
inline std::vector<PollRecord> load_polls(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open poll file: " + path);
  std::vector<PollRecord> out;
  std::string line;
  std::size_t lineno = 0;
  bool first_row = true;
  auto trim = [](std::string s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return std::string{};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const bool header = first_row && line.starts_with("state,");
    first_row = false;
    if (header) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
      throw ParseError(path, lineno, "expected state,end_date,support_fraction");
    }
    PollRecord rec;
    rec.state = trim(line.substr(0, c1));
    if (rec.state.size() != 2) throw ParseError(path, lineno, "state must be a two-letter code");
    const auto date_s = trim(line.substr(c1 + 1, c2 - c1 - 1));
    auto d = dates::parse_date(date_s);
    if (!d) throw ParseError(path, lineno, "bad end_date '" + date_s + "'");
    rec.end_date = *d;
    const auto frac_s = trim(line.substr(c2 + 1));
    if (!frac_s.empty() && frac_s != "?") {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(frac_s, &used);
      } catch (const std::logic_error &) {
        throw ParseError(path, lineno, "bad support_fraction '" + frac_s + "'");
      }
      if (used != frac_s.size()) throw ParseError(path, lineno, "bad support_fraction '" + frac_s + "'");
      if (!(v >= 0.0 && v <= 1.0)) throw ParseError(path, lineno, "support_fraction must be in [0, 1]");
      rec.support_fraction = v;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

// Sample Pearson correlation, two-pass.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ArgumentError("pearson: length mismatch");
  if (x.size() < 2) throw ArgumentError("pearson: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw ArgumentError("pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Ordinary least squares y ≈ slope·x + intercept.
inline LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  const double r = pearson(x, y);
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = r * r;
  return fit;
}

struct PollPair {
  PollRecord poll;
  double control_share = 0.0;
  std::uint64_t n_control = 0;
  std::uint64_t n_rights = 0;
};

struct PollCorrelation {
  double r = 0.0;
  LinearFit fit;
  std::vector<PollPair> pairs;
  // Polls skipped because their state had no reported share.
  std::vector<PollRecord> unmatched;
};

namespace stats_detail {

template <class Lookup>
PollCorrelation correlate_with(std::span<const PollRecord> polls, Lookup &&share_for) {
  PollCorrelation out;
  for (const auto &p : polls) {
    if (!p.support_fraction) {
      throw ArgumentError("correlate_polls: poll " + p.state + " " + dates::format_date(p.end_date) +
                          " has a placeholder support fraction; fill it in before correlating");
    }
    const std::optional<StateShare> share = share_for(p);
    if (!share) {
      out.unmatched.push_back(p);
      continue;
    }
    out.pairs.push_back({p, share->control_share, share->n_control, share->n_rights});
  }
  if (out.pairs.size() < 2) throw ArgumentError("correlate_polls: fewer than two polls matched a state share");
  std::vector<double> xs, ys;
  for (const auto &pp : out.pairs) {
    xs.push_back(*pp.poll.support_fraction);
    ys.push_back(pp.control_share);
  }
  out.r = pearson(xs, ys);
  out.fit = least_squares(xs, ys);
  return out;
}

} // namespace stats_detail

// One data point per poll (a state polled twice contributes two rows).
// x = poll support, y = the state's Control share over the whole collection.
inline PollCorrelation correlate_polls(std::span<const PollRecord> polls,
                                       const std::map<StateCode, StateShare> &state_shares) {
  return stats_detail::correlate_with(polls, [&](const PollRecord &p) -> std::optional<StateShare> {
    auto it = state_shares.find(p.state);
    if (it == state_shares.end()) return std::nullopt;
    return it->second;
  });
}

// As above, but each poll's share only counts records from the `window_days`
// days ending on its end date.
inline PollCorrelation correlate_polls_windowed(std::span<const PollRecord> polls, std::span<const Stance> labels,
                                                std::span<const std::optional<StateCode>> states,
                                                std::span<const Day> days, std::size_t window_days,
                                                std::uint64_t min_support = 25) {
  if (window_days == 0) throw ArgumentError("correlate_polls_windowed: window_days must be >= 1");
  if (days.size() != labels.size()) throw ArgumentError("correlate_polls_windowed: inputs not parallel");
  std::unique_ptr<bool[]> mask(new bool[labels.size()]);
  return stats_detail::correlate_with(polls, [&](const PollRecord &p) -> std::optional<StateShare> {
    const Day first = p.end_date - std::chrono::days{static_cast<int>(window_days) - 1};
    for (std::size_t i = 0; i < days.size(); ++i) mask[i] = days[i] >= first && days[i] <= p.end_date;
    const auto props =
        state_stance_proportion(labels, states, min_support, std::span<const bool>(mask.get(), labels.size()));
    auto it = props.shares.find(p.state);
    if (it == props.shares.end()) return std::nullopt;
    return it->second;
  });
}

} // namespace stancetopic
