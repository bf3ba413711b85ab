#include <gtest/gtest.h>

#include <functional>

#include "citestack/evaluation.hpp"

using namespace citestack;
using synth::GroundTruthLabel;
using synth::InjectionType;

namespace {

std::vector<GroundTruthLabel> labels(std::size_t n) {
  std::vector<GroundTruthLabel> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({std::to_string(i), std::to_string(i + 1000), {2005, 2006}, InjectionType::T1});
  }
  return out;
}

AnomalyFinding finding(const GroundTruthLabel& l, std::optional<int> year = std::nullopt) {
  AnomalyFinding f;
  f.sender = l.sender;
  f.receiver = l.receiver;
  f.year = year;
  return f;
}

}  // namespace

TEST(Evaluate, PerfectMatch) {
  const auto ls = labels(20);
  std::vector<AnomalyFinding> fs;
  for (const auto& l : ls) fs.push_back(finding(l, 2005));
  const auto m = evaluate(fs, ls);
  EXPECT_EQ(*m.precision, 100.0);
  EXPECT_EQ(*m.recall, 100.0);
  EXPECT_EQ(*m.f1, 100.0);
  EXPECT_EQ(m.tp, 20u);
  EXPECT_EQ(m.fp, 0u);
  EXPECT_EQ(m.fn, 0u);
}

TEST(Evaluate, Table3Row) {
  const auto ls = labels(110);
  std::vector<AnomalyFinding> fs;
  for (std::size_t i = 0; i < 83; ++i) fs.push_back(finding(ls[i], 2005));
  const auto m = evaluate(fs, ls);
  EXPECT_DOUBLE_EQ(*m.precision, 100.0);
  EXPECT_NEAR(*m.recall, 75.45454545454545, 1e-12);
  EXPECT_NEAR(*m.f1, 86.01036269430053, 1e-12);
  EXPECT_EQ(m.tp + m.fn, 110u);
}

TEST(Evaluate, NoFindings) {
  const auto m = evaluate({}, labels(5));
  EXPECT_FALSE(m.precision);
  EXPECT_EQ(*m.recall, 0.0);
  EXPECT_FALSE(m.f1);
  const auto j = to_json(m);
  EXPECT_TRUE(j["precision"].is_null());
  EXPECT_TRUE(j["f1"].is_null());
}

TEST(Evaluate, NoLabels) {
  const auto ls = labels(1);
  const auto m = evaluate({finding(ls[0])}, {});
  EXPECT_EQ(*m.precision, 0.0);
  EXPECT_FALSE(m.recall);
  EXPECT_EQ(m.fp, 1u);
}

TEST(Evaluate, PairLevelIgnoresYearAndDirection) {
  const auto ls = labels(2);
  AnomalyFinding rev;
  rev.sender = ls[0].receiver;
  rev.receiver = ls[0].sender;
  const auto m = evaluate({finding(ls[0], 1990), finding(ls[0], 2005), rev}, ls);
  EXPECT_EQ(m.tp, 1u);
  EXPECT_EQ(m.fp, 1u);  // the reversed pair carries no label
  EXPECT_DOUBLE_EQ(*m.precision, 50.0);
  EXPECT_DOUBLE_EQ(*m.recall, 50.0);
}

TEST(Evaluate, YearStrict) {
  const auto ls = labels(2);
  const std::vector<AnomalyFinding> fs{finding(ls[0], 1990), finding(ls[0], 2006), finding(ls[1], 2004)};
  const auto m = evaluate(fs, ls, {true});
  EXPECT_EQ(m.tp, 1u);
  EXPECT_EQ(m.fp, 2u);
  EXPECT_EQ(m.fn, 1u);
  // year-less findings match on the pair alone
  EXPECT_EQ(evaluate({finding(ls[1])}, ls, {true}).tp, 1u);
}

TEST(Evaluate, F1SelfConsistent) {
  Rng rng(8);
  const auto ls = labels(50);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<AnomalyFinding> fs;
    for (const auto& l : ls) {
      if (rng.uniform01() < 0.5) fs.push_back(finding(l, 2005));
    }
    for (int k = static_cast<int>(rng.uniform_int(0, 30)); k > 0; --k) {
      fs.push_back(finding({std::to_string(rng.index(5000)), "x", {2005}, InjectionType::T1}));
    }
    const auto m = evaluate(fs, ls);
    if (!m.precision || !m.recall) continue;
    if (*m.precision + *m.recall == 0.0) {
      EXPECT_EQ(*m.f1, 0.0);
    } else {
      EXPECT_NEAR(*m.f1, 2 * *m.precision * *m.recall / (*m.precision + *m.recall), 1e-9);
    }
    EXPECT_EQ(m.tp + m.fn, ls.size());
  }
}

TEST(Evaluate, MetricsJsonRoundTrip) {
  const auto ls = labels(10);
  const auto m = evaluate({finding(ls[0]), finding(ls[1])}, ls);
  const auto back = metrics_from_json(nlohmann::json::parse(to_json(m).dump()));
  EXPECT_EQ(back.precision, m.precision);
  EXPECT_EQ(back.recall, m.recall);
  EXPECT_EQ(back.f1, m.f1);
  EXPECT_EQ(back.tp, m.tp);
}

namespace {

CitationTensor tensor_from_totals(std::size_t n, const std::function<std::int64_t(JournalIndex, JournalIndex)>& f) {
  JournalTable t;
  for (std::size_t i = 0; i < n; ++i) t.add(std::to_string(i));
  TensorBuilder b(t, 2000, 2000);
  for (JournalIndex s = 0; s < n; ++s) {
    for (JournalIndex r = 0; r < n; ++r) {
      if (s != r && f(s, r)) b.add({s, r}, 2000, f(s, r));
    }
  }
  return std::move(b).build();
}

}  // namespace

TEST(KMeans, SeparatedBlobs) {
  // Pairs among journals 0..2 have huge totals both ways.
  const auto t = tensor_from_totals(10, [](JournalIndex s, JournalIndex r) -> std::int64_t {
    return s < 3 && r < 3 ? 500 + s + r : 5 + (s * 7 + r) % 3;
  });
  auto got = kmeans_baseline(t);
  std::sort(got.begin(), got.end());
  std::vector<OrderedPair> want;
  for (JournalIndex s = 0; s < 3; ++s) {
    for (JournalIndex r = 0; r < 3; ++r) {
      if (s != r) want.push_back({s, r});
    }
  }
  EXPECT_EQ(got, want);
}

TEST(KMeans, DegenerateInputs) {
  EXPECT_TRUE(kmeans_baseline(tensor_from_totals(5, [](auto, auto) { return 7; })).empty());
  EXPECT_TRUE(kmeans_baseline(tensor_from_totals(1, [](auto, auto) { return 7; })).empty());
  // Two journals: two points, one per cluster.
  const auto t = tensor_from_totals(2, [](JournalIndex s, JournalIndex) { return s == 0 ? 10 : 0; });
  const auto p = kmeans_baseline(t);
  EXPECT_LE(p.size(), 1u);
}

TEST(KMeans, Seeded) {
  const auto ds = synth::generate({});
  KMeansOptions o;
  EXPECT_EQ(kmeans_baseline(ds.tensor, o), kmeans_baseline(ds.tensor, o));
}
