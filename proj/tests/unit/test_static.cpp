#include <gtest/gtest.h>

#include <numeric>
#include <set>

#include "citestack/static_detect.hpp"
#include "citestack/synthgen.hpp"

using namespace citestack;

namespace {

JournalTable table(const std::vector<std::int64_t>& paper_counts) {
  JournalTable t;
  for (std::size_t i = 0; i < paper_counts.size(); ++i) {
    const auto j = t.add("J" + std::to_string(i));
    t.set_paper_count(j, paper_counts[i]);
  }
  return t;
}

// One-year tensor where every off-diagonal pair holds `base`, with overrides.
CitationTensor flat(std::size_t n, std::int64_t base, const std::vector<std::pair<OrderedPair, std::int64_t>>& over = {}) {
  TensorBuilder b(table(std::vector<std::int64_t>(n, 10)), 2000, 2000);
  for (JournalIndex s = 0; s < n; ++s) {
    for (JournalIndex r = 0; r < n; ++r) {
      if (s == r) continue;
      std::int64_t v = base;
      for (const auto& [p, c] : over) {
        if (p == OrderedPair{s, r}) v = c;
      }
      if (v) b.add({s, r}, 2000, v);
    }
  }
  return std::move(b).build();
}

}  // namespace

TEST(Buckets, AllSameSize) {
  const auto b = bucket_journals(std::vector<std::int64_t>(25, 7));
  EXPECT_EQ(b.bucket_count(), 1u);
  EXPECT_EQ(b.members(0).size(), 25u);
}

TEST(Buckets, OneToHundredGivesDeciles) {
  std::vector<std::int64_t> sizes(100);
  std::iota(sizes.begin(), sizes.end(), 1);
  const auto b = bucket_journals(sizes);
  ASSERT_EQ(b.bucket_count(), 10u);
  for (std::size_t k = 0; k < 10; ++k) {
    const auto m = b.members(k);
    ASSERT_EQ(m.size(), 10u);
    EXPECT_EQ(sizes[m.front()], static_cast<std::int64_t>(10 * k + 1));
    EXPECT_EQ(sizes[m.back()], static_cast<std::int64_t>(10 * k + 10));
  }
}

TEST(Buckets, SingleJournal) {
  const auto b = bucket_journals(std::vector<std::int64_t>{42});
  EXPECT_EQ(b.bucket_count(), 1u);
  EXPECT_EQ(b.bucket_of[0], 0u);
}

TEST(Buckets, PartitionAndStrictBoundaries) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::int64_t> sizes(rng.index(60) + 1);
    for (auto& s : sizes) s = rng.uniform_int(1, 8);
    const auto b = bucket_journals(sizes);
    EXPECT_LE(b.bucket_count(), 10u);
    for (std::size_t i = 1; i < b.boundaries.size(); ++i) EXPECT_LT(b.boundaries[i - 1], b.boundaries[i]);
    std::size_t total = 0;
    for (std::size_t k = 0; k < b.bucket_count(); ++k) total += b.members(k).size();
    EXPECT_EQ(total, sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      for (std::size_t j = 0; j < sizes.size(); ++j) {
        if (sizes[i] == sizes[j]) { EXPECT_EQ(b.bucket_of[i], b.bucket_of[j]); }
        if (sizes[i] < sizes[j]) { EXPECT_LE(b.bucket_of[i], b.bucket_of[j]); }
      }
    }
  }
}

TEST(Fences, OneToHundred) {
  std::vector<double> xs(100);
  std::iota(xs.begin(), xs.end(), 1.0);
  const auto g = fence_stats(xs);
  EXPECT_DOUBLE_EQ(g.q1, 25.75);
  EXPECT_DOUBLE_EQ(g.q3, 75.25);
  EXPECT_DOUBLE_EQ(g.iqr, 49.5);
  EXPECT_DOUBLE_EQ(g.upper_fence, 149.5);
  EXPECT_DOUBLE_EQ(g.lower_fence, 25.75 - 74.25);
  EXPECT_NEAR(fence_deviation(g, 1000, FenceSide::above), 17.181818181818183, 1e-12);
}

TEST(Fences, WithOutlierInGrid) {
  // numpy: percentile([1..100, 1000], [25, 75]) = [26, 76]
  std::vector<double> xs(100);
  std::iota(xs.begin(), xs.end(), 1.0);
  xs.push_back(1000);
  const auto g = fence_stats(xs);
  EXPECT_DOUBLE_EQ(g.q1, 26.0);
  EXPECT_DOUBLE_EQ(g.q3, 76.0);
  EXPECT_NEAR(fence_deviation(g, 1000, FenceSide::above), 16.98, 1e-12);
}

TEST(Fences, ConstantData) {
  const auto g = fence_stats(std::vector<double>(9, 4.0));
  EXPECT_EQ(g.iqr, 0.0);
  EXPECT_EQ(g.lower_fence, 4.0);
  EXPECT_EQ(g.upper_fence, 4.0);
}

TEST(Fences, FewPointsUnreliable) {
  EXPECT_FALSE(fence_stats({1, 2, 3}).reliable);
  EXPECT_TRUE(fence_stats({1, 2, 3, 4}).reliable);
  EXPECT_FALSE(fence_stats({}).reliable);
}

TEST(Detect, ConstantGridSingleOutlier) {
  const auto t = flat(6, 5, {{{2, 4}, 50}});
  const auto r = detect_static(t, bucket_journals(t.journals()));
  ASSERT_EQ(r.above.size(), 1u);
  EXPECT_EQ(r.above[0].pair, (OrderedPair{2, 4}));
  EXPECT_EQ(r.above[0].total_citations, 50);
  EXPECT_DOUBLE_EQ(r.above[0].deviation, (50.0 - 5.0) / 5.0);  // iqr == 0: unit max(1, fence)
  EXPECT_TRUE(r.below.empty());
}

TEST(Detect, ZeroIqrFlagsBelowSeparately) {
  const auto t = flat(5, 5, {{{1, 0}, 2}});
  const auto r = detect_static(t, bucket_journals(t.journals()));
  EXPECT_TRUE(r.above.empty());
  ASSERT_EQ(r.below.size(), 1u);
  EXPECT_EQ(r.below[0].side, FenceSide::below);
  EXPECT_DOUBLE_EQ(r.below[0].deviation, 3.0 / 5.0);
}

TEST(Detect, ZeroFenceUsesUnitOne) {
  const auto t = flat(5, 0, {{{1, 3}, 7}});
  const auto r = detect_static(t, bucket_journals(t.journals()));
  ASSERT_EQ(r.above.size(), 1u);
  EXPECT_DOUBLE_EQ(r.above[0].deviation, 7.0);
}

TEST(Detect, SmallGridsSkipped) {
  // Two journals of different size: each grid holds at most 1 point.
  JournalTable j = table({1, 2});
  TensorBuilder b(j, 2000, 2000);
  b.add({0, 1}, 2000, 100);
  const auto t = std::move(b).build();
  const auto r = detect_static(t, bucket_journals(t.journals()));
  EXPECT_TRUE(r.above.empty());
  EXPECT_EQ(r.skipped.size(), 4u);
}

TEST(Detect, FenceFormulaExactAndCandidatesOutside) {
  const auto ds = synth::generate({});
  const auto buckets = bucket_journals(ds.tensor.journals());
  const auto r = detect_static(ds.tensor, buckets);
  for (std::size_t a = 0; a < buckets.bucket_count(); ++a) {
    for (std::size_t b = 0; b < buckets.bucket_count(); ++b) {
      const auto g = grid_stats(ds.tensor, buckets, a, b);
      EXPECT_DOUBLE_EQ(g.upper_fence - g.q3, 1.5 * (g.q3 - g.q1));
      EXPECT_DOUBLE_EQ(g.q1 - g.lower_fence, 1.5 * (g.q3 - g.q1));
    }
  }
  for (const auto& c : r.above) EXPECT_GT(c.deviation, 0.0);
  std::set<OrderedPair> seen;
  for (const auto& c : r.above) EXPECT_TRUE(seen.insert(c.pair).second);
}

TEST(Detect, GoldenT2PairsAreCandidates) {
  const auto ds = synth::generate({});
  const auto r = detect_static(ds.tensor, bucket_journals(ds.tensor.journals()));
  std::set<OrderedPair> cands;
  for (const auto& c : r.above) cands.insert(c.pair);
  for (const auto& l : ds.labels) {
    if (l.type != synth::InjectionType::T2) continue;
    EXPECT_TRUE(cands.count({ds.tensor.journals().at(l.sender), ds.tensor.journals().at(l.receiver)}))
        << l.sender << "->" << l.receiver;
  }
}

TEST(Detect, YearPermutationInvariant) {
  synth::SynthConfig cfg;
  cfg.n_journals = 30;
  cfg.n_anomalies = 30;
  const auto ds = synth::generate(cfg);
  const auto& t = ds.tensor;
  TensorBuilder b(t.journals(), t.year_min(), t.year_max());
  for (const auto& p : t.stored_pairs()) {
    const auto s = t.series(p);
    for (std::size_t y = 0; y < s.size(); ++y) {
      if (s[y]) b.add(p, t.year_max() - static_cast<int>(y), s[y]);
    }
  }
  const auto u = std::move(b).build();
  const auto buckets = bucket_journals(t.journals());
  const auto r1 = detect_static(t, buckets);
  const auto r2 = detect_static(u, buckets);
  ASSERT_EQ(r1.above.size(), r2.above.size());
  for (std::size_t i = 0; i < r1.above.size(); ++i) {
    EXPECT_EQ(r1.above[i].pair, r2.above[i].pair);
    EXPECT_EQ(r1.above[i].deviation, r2.above[i].deviation);
  }
}

TEST(Detect, RaisingACandidateKeepsItAboveFixedFences) {
  std::vector<double> xs{1, 2, 3, 4, 5, 6, 7, 8, 40};
  const auto g = fence_stats(xs);
  ASSERT_GT(40.0, g.upper_fence);
  for (double v = 40; v < 1000; v *= 1.7) {
    EXPECT_GT(v, g.upper_fence);
    EXPECT_GT(fence_deviation(g, v, FenceSide::above), fence_deviation(g, 40, FenceSide::above) - 1e-12);
  }
}
