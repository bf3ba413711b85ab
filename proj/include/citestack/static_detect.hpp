#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "citestack/journals.hpp"
#include "citestack/stats.hpp"
#include "citestack/tensor.hpp"

namespace citestack {

/// Journals grouped by publication volume.
struct BucketIndex {
  std::vector<std::size_t> bucket_of;     // indexed by JournalIndex
  std::vector<std::int64_t> boundaries;   // strictly increasing paper-count cutoffs

  std::size_t bucket_count() const noexcept { return boundaries.size() + 1; }

  std::vector<JournalIndex> members(std::size_t bucket) const {
    std::vector<JournalIndex> out;
    for (JournalIndex j = 0; j < bucket_of.size(); ++j) {
      if (bucket_of[j] == bucket) out.push_back(j);
    }
    return out;
  }
};

/// Quantile buckets over paper counts (deciles by default). A journal with
/// count c lands in bucket #{boundaries <= c}. Cutoffs are the counts at
/// ranks floor(k * n / max_buckets); repeated cutoffs and cutoffs equal to the
/// minimum are dropped, so few distinct sizes collapse to fewer buckets and
/// equal-sized journals always share a bucket.
inline BucketIndex bucket_journals(const std::vector<std::int64_t>& paper_counts, std::size_t max_buckets = 10) {
  if (paper_counts.empty()) throw std::invalid_argument("bucket_journals: no journals");
  if (max_buckets == 0) throw std::invalid_argument("bucket_journals: bucket count must be positive");
  std::vector<std::int64_t> sorted = paper_counts;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  BucketIndex idx;
  for (std::size_t k = 1; k < max_buckets; ++k) {
    const std::int64_t cut = sorted[k * n / max_buckets];
    if (cut <= sorted.front()) continue;
    if (!idx.boundaries.empty() && cut <= idx.boundaries.back()) continue;
    idx.boundaries.push_back(cut);
  }
  idx.bucket_of.reserve(n);
  for (auto c : paper_counts) {
    idx.bucket_of.push_back(static_cast<std::size_t>(
        std::upper_bound(idx.boundaries.begin(), idx.boundaries.end(), c) - idx.boundaries.begin()));
  }
  return idx;
}

inline BucketIndex bucket_journals(const JournalTable& journals, std::size_t max_buckets = 10) {
  return bucket_journals(journals.paper_counts(), max_buckets);
}

struct GridStats {
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  double lower_fence = 0.0;
  double upper_fence = 0.0;
  std::size_t n_points = 0;
  bool reliable = false;  // false when fewer than kMinGridPoints data points
};

inline constexpr std::size_t kMinGridPoints = 4;
inline constexpr double kDefaultFenceMultiplier = 1.5;

// Box-plot fences of a sample: [q1 - k*iqr, q3 + k*iqr], quartiles by linear
// interpolation between closest ranks.
inline GridStats fence_stats(std::vector<double> values, double k = kDefaultFenceMultiplier) {
  GridStats g;
  g.n_points = values.size();
  g.reliable = values.size() >= kMinGridPoints;
  if (values.empty()) return g;
  std::sort(values.begin(), values.end());
  g.q1 = stats::quantile_sorted(values, 0.25);
  g.q3 = stats::quantile_sorted(values, 0.75);
  g.iqr = g.q3 - g.q1;
  g.lower_fence = g.q1 - k * g.iqr;
  g.upper_fence = g.q3 + k * g.iqr;
  return g;
}

struct GridPoint {
  OrderedPair pair;
  std::int64_t total = 0;
};

// Every ordered off-diagonal pair (A in bucket_a, B in bucket_b) with its
// all-years total. Zero-total pairs are included.
inline std::vector<GridPoint> grid_points(const CitationTensor& t, const BucketIndex& buckets, std::size_t bucket_a,
                                          std::size_t bucket_b) {
  std::vector<GridPoint> pts;
  const auto as = buckets.members(bucket_a);
  const auto bs = buckets.members(bucket_b);
  pts.reserve(as.size() * bs.size());
  for (auto a : as) {
    for (auto b : bs) {
      if (a == b) continue;
      pts.push_back({{a, b}, t.total({a, b})});
    }
  }
  return pts;
}

inline GridStats grid_stats(const CitationTensor& t, const BucketIndex& buckets, std::size_t bucket_a,
                            std::size_t bucket_b, double k = kDefaultFenceMultiplier) {
  std::vector<double> values;
  for (const auto& p : grid_points(t, buckets, bucket_a, bucket_b)) values.push_back(static_cast<double>(p.total));
  return fence_stats(std::move(values), k);
}

enum class FenceSide { above, below };

struct StaticCandidate {
  OrderedPair pair;
  std::int64_t total_citations = 0;
  double deviation = 0.0;  // > 0, distance outside the fence in IQR units
  FenceSide side = FenceSide::above;
};

// Distance of `value` beyond the violated fence. Degenerate grids (iqr == 0)
// normalise by max(1, fence) so the result stays finite.
inline double fence_deviation(const GridStats& g, double value, FenceSide side) {
  const double fence = side == FenceSide::above ? g.upper_fence : g.lower_fence;
  const double gap = side == FenceSide::above ? value - fence : fence - value;
  if (g.iqr > 0.0) return gap / g.iqr;
  return gap / std::max(1.0, fence);
}

struct SkippedGrid {
  std::size_t bucket_a = 0;
  std::size_t bucket_b = 0;
  std::size_t n_points = 0;
};

struct StaticResult {
  std::vector<StaticCandidate> above;  // feed the anomaly pipeline
  std::vector<StaticCandidate> below;  // reported separately
  std::vector<SkippedGrid> skipped;    // grids with too few points
};

/// Box-plot bucket analysis over every ordered bucket pair. Each ordered
/// journal pair belongs to exactly one grid, so candidates are unique by pair.
inline StaticResult detect_static(const CitationTensor& t, const BucketIndex& buckets,
                                  double k = kDefaultFenceMultiplier) {
  StaticResult out;
  for (std::size_t a = 0; a < buckets.bucket_count(); ++a) {
    for (std::size_t b = 0; b < buckets.bucket_count(); ++b) {
      const auto pts = grid_points(t, buckets, a, b);
      std::vector<double> values;
      values.reserve(pts.size());
      for (const auto& p : pts) values.push_back(static_cast<double>(p.total));
      const auto g = fence_stats(values, k);
      if (!g.reliable) {
        out.skipped.push_back({a, b, pts.size()});
        continue;
      }
      for (const auto& p : pts) {
        const auto v = static_cast<double>(p.total);
        if (v > g.upper_fence) {
          out.above.push_back({p.pair, p.total, fence_deviation(g, v, FenceSide::above), FenceSide::above});
        } else if (v < g.lower_fence) {
          out.below.push_back({p.pair, p.total, fence_deviation(g, v, FenceSide::below), FenceSide::below});
        }
      }
    }
  }
  auto by_pair = [](const StaticCandidate& x, const StaticCandidate& y) { return x.pair < y.pair; };
  std::sort(out.above.begin(), out.above.end(), by_pair);
  std::sort(out.below.begin(), out.below.end(), by_pair);
  return out;
}

}  // namespace citestack
