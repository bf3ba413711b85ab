#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "citestack/journals.hpp"
#include "citestack/random.hpp"
#include "citestack/scoring.hpp"
#include "citestack/synthgen.hpp"
#include "citestack/tensor.hpp"

namespace citestack {

/// Precision, recall and F1 in percent. Undefined ratios are nullopt
/// (precision with no predictions, recall with no labels).
struct EvalMetrics {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

inline std::optional<double> f1_score(std::optional<double> precision, std::optional<double> recall) {
  if (!precision || !recall) return std::nullopt;
  if (*precision + *recall == 0.0) return 0.0;
  return 2.0 * *precision * *recall / (*precision + *recall);
}

struct EvalOptions {
  // Pair-level by default: a label counts as found if any finding names its
  // ordered pair. Year-strict also requires the finding's year to be one of
  // the label's years (year-less findings match on the pair alone).
  bool year_strict = false;
};

inline EvalMetrics evaluate(const std::vector<AnomalyFinding>& findings,
                            const std::vector<synth::GroundTruthLabel>& labels, const EvalOptions& o = {}) {
  using Pair = std::pair<JournalId, JournalId>;
  using Prediction = std::tuple<JournalId, JournalId, std::optional<int>>;

  std::set<Prediction> predicted;
  for (const auto& f : findings) predicted.insert({f.sender, f.receiver, o.year_strict ? f.year : std::nullopt});

  auto matches = [&](const Prediction& p, const synth::GroundTruthLabel& l) {
    if (std::get<0>(p) != l.sender || std::get<1>(p) != l.receiver) return false;
    const auto& y = std::get<2>(p);
    return !y || std::find(l.years.begin(), l.years.end(), *y) != l.years.end();
  };

  // Index labels by pair so matching stays linear-ish.
  std::set<Pair> label_pairs;
  for (const auto& l : labels) label_pairs.insert({l.sender, l.receiver});

  EvalMetrics m;
  std::size_t matched_predictions = 0;
  for (const auto& p : predicted) {
    bool hit = false;
    if (label_pairs.count({std::get<0>(p), std::get<1>(p)})) {
      for (const auto& l : labels) {
        if (matches(p, l)) {
          hit = true;
          break;
        }
      }
    }
    if (hit) {
      ++matched_predictions;
    } else {
      ++m.fp;
    }
  }
  for (const auto& l : labels) {
    bool found = false;
    for (auto it = predicted.lower_bound({l.sender, l.receiver, std::nullopt});
         it != predicted.end() && std::get<0>(*it) == l.sender && std::get<1>(*it) == l.receiver; ++it) {
      if (matches(*it, l)) {
        found = true;
        break;
      }
    }
    if (found) {
      ++m.tp;
    } else {
      ++m.fn;
    }
  }
  if (!predicted.empty()) {
    m.precision = 100.0 * static_cast<double>(matched_predictions) / static_cast<double>(predicted.size());
  }
  if (!labels.empty()) m.recall = 100.0 * static_cast<double>(m.tp) / static_cast<double>(labels.size());
  m.f1 = f1_score(m.precision, m.recall);
  return m;
}

inline nlohmann::ordered_json to_json(const EvalMetrics& m) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr); };
  nlohmann::ordered_json j;
  j["precision"] = opt(m.precision);
  j["recall"] = opt(m.recall);
  j["f1"] = opt(m.f1);
  j["tp"] = m.tp;
  j["fp"] = m.fp;
  j["fn"] = m.fn;
  return j;
}

inline EvalMetrics metrics_from_json(const nlohmann::json& j) {
  auto opt = [&](const char* k) -> std::optional<double> {
    if (!j.contains(k) || j[k].is_null()) return std::nullopt;
    return j[k].get<double>();
  };
  EvalMetrics m;
  m.precision = opt("precision");
  m.recall = opt("recall");
  m.f1 = opt("f1");
  m.tp = j.at("tp").get<std::size_t>();
  m.fp = j.at("fp").get<std::size_t>();
  m.fn = j.at("fn").get<std::size_t>();
  return m;
}

// ---------------------------------------------------------------------------
// K-means baseline

struct KMeansOptions {
  std::uint64_t seed = 42;
  std::size_t restarts = 10;  // best (lowest inertia) of this many k-means++ runs
  std::size_t max_iterations = 300;
};

namespace detail {

using Point2 = std::array<double, 2>;

inline double sq_dist(const Point2& a, const Point2& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

struct Clustering {
  std::vector<std::size_t> assignment;
  std::array<Point2, 2> centers{};
  double inertia = std::numeric_limits<double>::infinity();
};

// One Lloyd run with k = 2 from a k-means++ seed.
inline Clustering lloyd2(const std::vector<Point2>& xs, Rng& rng, std::size_t max_iterations) {
  Clustering c;
  c.centers[0] = xs[rng.index(xs.size())];
  std::vector<double> d2(xs.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) sum += d2[i] = sq_dist(xs[i], c.centers[0]);
  double pick = rng.uniform01() * sum;
  std::size_t chosen = xs.size() - 1;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (d2[i] > 0.0 && pick < d2[i]) {
      chosen = i;
      break;
    }
    pick -= d2[i];
  }
  c.centers[1] = xs[chosen];

  c.assignment.assign(xs.size(), 0);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    bool changed = it == 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const std::size_t a = sq_dist(xs[i], c.centers[1]) < sq_dist(xs[i], c.centers[0]) ? 1 : 0;
      if (a != c.assignment[i]) {
        c.assignment[i] = a;
        changed = true;
      }
    }
    if (!changed) break;
    std::array<Point2, 2> acc{};
    std::array<std::size_t, 2> n{};
    for (std::size_t i = 0; i < xs.size(); ++i) {
      acc[c.assignment[i]][0] += xs[i][0];
      acc[c.assignment[i]][1] += xs[i][1];
      ++n[c.assignment[i]];
    }
    for (std::size_t k = 0; k < 2; ++k) {
      if (n[k] == 0) continue;  // keep the previous center
      c.centers[k] = {acc[k][0] / static_cast<double>(n[k]), acc[k][1] / static_cast<double>(n[k])};
    }
  }
  c.inertia = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) c.inertia += sq_dist(xs[i], c.centers[c.assignment[i]]);
  return c;
}

}  // namespace detail

/// Graph-anomaly baseline: k = 2 clustering of every ordered off-diagonal pair
/// by (total A->B, total B->A); the cluster whose members have the larger
/// mean feature norm is reported as anomalous. Empty when the features are
/// all identical or there are fewer than two pairs.
inline std::vector<OrderedPair> kmeans_baseline(const CitationTensor& t, const KMeansOptions& o = {}) {
  std::vector<OrderedPair> pairs;
  std::vector<detail::Point2> xs;
  const auto n = static_cast<JournalIndex>(t.journal_count());
  for (JournalIndex a = 0; a < n; ++a) {
    for (JournalIndex b = 0; b < n; ++b) {
      if (a == b) continue;
      pairs.push_back({a, b});
      xs.push_back({static_cast<double>(t.total({a, b})), static_cast<double>(t.total({b, a}))});
    }
  }
  if (xs.size() < 2) return {};
  if (std::all_of(xs.begin(), xs.end(), [&](const auto& x) { return x == xs.front(); })) return {};

  Rng rng(o.seed);
  detail::Clustering best;
  for (std::size_t r = 0; r < std::max<std::size_t>(o.restarts, 1); ++r) {
    auto c = detail::lloyd2(xs, rng, o.max_iterations);
    if (c.inertia < best.inertia) best = std::move(c);
  }

  std::array<double, 2> norm_sum{};
  std::array<std::size_t, 2> size{};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    norm_sum[best.assignment[i]] += std::hypot(xs[i][0], xs[i][1]);
    ++size[best.assignment[i]];
  }
  if (size[0] == 0 || size[1] == 0) return {};
  const double m0 = norm_sum[0] / static_cast<double>(size[0]);
  const double m1 = norm_sum[1] / static_cast<double>(size[1]);
  if (m0 == m1) return {};
  const std::size_t anomalous = m1 > m0 ? 1 : 0;

  std::vector<OrderedPair> out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (best.assignment[i] == anomalous) out.push_back(pairs[i]);
  }
  return out;
}

// Year-less findings for a list of predicted pairs, so baselines can be
// scored with evaluate().
inline std::vector<AnomalyFinding> pair_findings(const CitationTensor& t, const std::vector<OrderedPair>& pairs) {
  std::vector<AnomalyFinding> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    AnomalyFinding f;
    f.sender = t.journals().id(p.sender);
    f.receiver = t.journals().id(p.receiver);
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace citestack
