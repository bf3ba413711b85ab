#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "citestack/error.hpp"
#include "citestack/journals.hpp"
#include "citestack/stats.hpp"
#include "citestack/tensor.hpp"

namespace citestack {

inline constexpr std::size_t kDefaultMinHistory = 3;
inline constexpr double kDefaultBandSigmas = 3.0;

// Upper side of the empirical-rule band of a history: mean + k * sigma
// (population sigma).
struct EmpiricalBand {
  double mean = 0.0;
  double std = 0.0;
  double upper = 0.0;
};

/// Band over `history` (the years strictly before the tested one). Returns
/// nullopt when the history is shorter than `min_history`.
inline std::optional<EmpiricalBand> empirical_band(std::span<const double> history,
                                                   std::size_t min_history = kDefaultMinHistory,
                                                   double sigmas = kDefaultBandSigmas) {
  if (history.size() < std::max<std::size_t>(min_history, 1)) return std::nullopt;
  EmpiricalBand b;
  b.mean = stats::mean(history);
  b.std = stats::population_stddev(history, b.mean);
  b.upper = b.mean + sigmas * b.std;
  return b;
}

// Exceedance in sigma units. A degenerate band (sigma == 0) uses
// max(1, upper) as the unit so a jump over a flat history stays finite.
inline double z_excess(double value, const EmpiricalBand& band) {
  if (band.std > 0.0) return (value - band.upper) / band.std;
  return (value - band.upper) / std::max(1.0, band.upper);
}

enum class Behaviour {
  one_sided_synchronous,
  one_sided_dianchronous,
  double_sided_synchronous,
  double_sided_dianchronous,
};

inline std::string_view to_string(Behaviour b) {
  switch (b) {
    case Behaviour::one_sided_synchronous: return "one_sided_synchronous";
    case Behaviour::one_sided_dianchronous: return "one_sided_dianchronous";
    case Behaviour::double_sided_synchronous: return "double_sided_synchronous";
    case Behaviour::double_sided_dianchronous: return "double_sided_dianchronous";
  }
  return "?";
}

inline Behaviour parse_behaviour(std::string_view s) {
  for (auto b : {Behaviour::one_sided_synchronous, Behaviour::one_sided_dianchronous,
                 Behaviour::double_sided_synchronous, Behaviour::double_sided_dianchronous}) {
    if (to_string(b) == s) return b;
  }
  throw DataError("unknown behaviour '" + std::string(s) + "'");
}

inline bool is_double_sided(Behaviour b) {
  return b == Behaviour::double_sided_synchronous || b == Behaviour::double_sided_dianchronous;
}

struct TemporalFinding {
  OrderedPair pair;  // one-sided: the exceeding direction; double-sided: tested orientation
  int year = 0;
  Behaviour behaviour = Behaviour::one_sided_synchronous;
  std::vector<double> z_excess;  // one value, or {pair, pair.reversed()} for double-sided
};

struct TemporalOptions {
  std::size_t min_history = kDefaultMinHistory;
  double band_sigmas = kDefaultBandSigmas;
};

/// Outcome of testing one direction in one year.
struct DirectionTest {
  bool exceeds = false;         // raw count above its band: the firing condition
  bool sender_view = false;     // share of the sender's outgoing citations above its band
  bool receiver_view = false;   // share of the receiver's incoming citations above its band
  double z = 0.0;               // raw-count exceedance, valid when `exceeds`
};

enum class View { synchronous, dianchronous };

// Which view a firing direction is attributed to. Synchronous when the
// count is abnormal for the citing journal's outgoing profile, dianchronous
// when it is abnormal only for the cited journal's incoming profile. When
// neither normalised view moves (e.g. the pair is the sender's only outlet)
// the raw outgoing count is the evidence, so synchronous.
inline View classify_view(const DirectionTest& d) {
  if (d.sender_view) return View::synchronous;
  if (d.receiver_view) return View::dianchronous;
  return View::synchronous;
}

namespace detail {

struct DirectionSeries {
  std::vector<double> raw;
  std::vector<double> sender_share;
  std::vector<double> receiver_share;
};

inline DirectionSeries direction_series(const CitationTensor& t, OrderedPair p) {
  DirectionSeries d;
  const auto s = t.series(p);
  const std::size_t n = s.size();
  d.raw.resize(n);
  d.sender_share.resize(n);
  d.receiver_share.resize(n);
  for (std::size_t y = 0; y < n; ++y) {
    const int year = t.year_min() + static_cast<int>(y);
    const auto c = static_cast<double>(s[y]);
    const auto out = static_cast<double>(t.out_total(p.sender, year));
    const auto in = static_cast<double>(t.in_total(p.receiver, year));
    d.raw[y] = c;
    d.sender_share[y] = out > 0.0 ? c / out : 0.0;
    d.receiver_share[y] = in > 0.0 ? c / in : 0.0;
  }
  return d;
}

inline bool above_band(const std::vector<double>& xs, std::size_t y, const TemporalOptions& o,
                       double* z = nullptr) {
  auto band = empirical_band(std::span(xs).first(y), o.min_history, o.band_sigmas);
  if (!band || !(xs[y] > band->upper)) return false;
  if (z) *z = z_excess(xs[y], *band);
  return true;
}

inline DirectionTest test_direction(const DirectionSeries& d, std::size_t y, const TemporalOptions& o) {
  DirectionTest r;
  r.exceeds = above_band(d.raw, y, o, &r.z);
  if (r.exceeds) {
    r.sender_view = above_band(d.sender_share, y, o);
    r.receiver_view = above_band(d.receiver_share, y, o);
  }
  return r;
}

}  // namespace detail

/// Tests one journal pair in both directions for every year with at least
/// `min_history` prior years. Each year yields at most one finding: a
/// double-sided one when both directions exceed their bands, otherwise a
/// one-sided one for the direction that does. Only years <= Y feed the
/// decision for year Y.
inline std::vector<TemporalFinding> test_pair(const CitationTensor& t, OrderedPair pair,
                                              const TemporalOptions& o = {}) {
  std::vector<TemporalFinding> out;
  if (pair.sender == pair.receiver) return out;
  const auto fwd = detail::direction_series(t, pair);
  const auto rev = detail::direction_series(t, pair.reversed());
  for (std::size_t y = o.min_history; y < t.year_count(); ++y) {
    const auto a = detail::test_direction(fwd, y, o);
    const auto b = detail::test_direction(rev, y, o);
    const int year = t.year_min() + static_cast<int>(y);
    if (a.exceeds && b.exceeds) {
      const bool dian = classify_view(a) == View::dianchronous && classify_view(b) == View::dianchronous;
      out.push_back({pair, year, dian ? Behaviour::double_sided_dianchronous : Behaviour::double_sided_synchronous,
                     {a.z, b.z}});
    } else if (a.exceeds || b.exceeds) {
      const auto& d = a.exceeds ? a : b;
      const bool dian = classify_view(d) == View::dianchronous;
      out.push_back({a.exceeds ? pair : pair.reversed(), year,
                     dian ? Behaviour::one_sided_dianchronous : Behaviour::one_sided_synchronous, {d.z}});
    }
  }
  return out;
}

/// Runs test_pair over `pairs`. A pair and its reverse are the same test, so
/// each unordered pair is tested once, in the orientation first listed.
inline std::vector<TemporalFinding> detect_temporal(const CitationTensor& t, const std::vector<OrderedPair>& pairs,
                                                    const TemporalOptions& o = {}) {
  std::vector<TemporalFinding> out;
  std::unordered_set<OrderedPair, OrderedPairHash> seen;
  for (const auto& p : pairs) {
    if (p.sender == p.receiver) continue;
    const OrderedPair key{std::min(p.sender, p.receiver), std::max(p.sender, p.receiver)};
    if (!seen.insert(key).second) continue;
    auto f = test_pair(t, p, o);
    out.insert(out.end(), std::make_move_iterator(f.begin()), std::make_move_iterator(f.end()));
  }
  return out;
}

// Every unordered off-diagonal pair with citations in either direction, as
// (lower index, higher index). Pairs with no citations cannot fire.
inline std::vector<OrderedPair> all_tested_pairs(const CitationTensor& t) {
  std::unordered_set<OrderedPair, OrderedPairHash> keys;
  for (const auto& p : t.stored_pairs()) {
    if (p.sender == p.receiver) continue;
    keys.insert({std::min(p.sender, p.receiver), std::max(p.sender, p.receiver)});
  }
  std::vector<OrderedPair> out(keys.begin(), keys.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace citestack
