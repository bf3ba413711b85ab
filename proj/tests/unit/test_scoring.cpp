#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "citestack/scoring.hpp"

using namespace citestack;

TEST(Score, StaticTanh) {
  EXPECT_NEAR(static_confidence(1.0), 0.8807970779778824, 1e-15);
  EXPECT_GE(static_confidence(1e-300), 0.5);
  EXPECT_LT(static_confidence(1e-9), 0.5 + 1e-9);
  EXPECT_LT(static_confidence(1e6), 1.0);
  EXPECT_EQ(static_confidence(1e6), kScoreCeiling);
  EXPECT_THROW(static_confidence(0.0), std::domain_error);
  EXPECT_THROW(static_confidence(-1.0), std::domain_error);
  EXPECT_THROW(static_confidence(std::nan("")), std::domain_error);
}

TEST(Score, StaticStrictlyIncreasingBeforeSaturation) {
  double prev = 0.5;
  for (double d = 0.01; d < 15; d += 0.01) {
    const double s = static_confidence(d);
    EXPECT_GT(s, prev);
    prev = s;
  }
}

TEST(Score, TemporalOneAndDoubleSided) {
  TemporalFinding one{{0, 1}, 2005, Behaviour::one_sided_synchronous, {1.0}};
  EXPECT_NEAR(temporal_confidence(one), 0.8807970779778824, 1e-15);
  TemporalFinding two{{0, 1}, 2005, Behaviour::double_sided_synchronous, {2.0, 5.0}};
  EXPECT_NEAR(temporal_confidence(two), 0.9910068950189542, 1e-15);
  two.z_excess = {5.0, 2.0};
  EXPECT_NEAR(temporal_confidence(two), 0.9910068950189542, 1e-15);
  two.z_excess = {1e-12, 40.0};
  EXPECT_GE(temporal_confidence(two), 0.75);
  two.z_excess = {100.0, 400.0};
  EXPECT_LT(temporal_confidence(two), 1.0);
  one.z_excess = {0.0};
  EXPECT_THROW(temporal_confidence(one), std::domain_error);
  one.z_excess = {};
  EXPECT_THROW(temporal_confidence(one), std::domain_error);
}

TEST(Score, Combine) {
  EXPECT_EQ(combine(0.5, 0.5), 0.5);
  EXPECT_NEAR(combine(kScoreCeiling, 0.75), 0.875, 1e-15);
  EXPECT_NEAR(combine(0.88, 0.98), 0.93, 1e-15);
}

TEST(Findings, JsonFieldOrderAndNulls) {
  AnomalyFinding f;
  f.sender = "3";
  f.receiver = "7";
  f.confidence = 0.75;
  f.static_score = 0.75;
  EXPECT_EQ(to_json(f).dump(),
            R"({"sender":"3","receiver":"7","year":null,"behaviour":null,"confidence":0.75,)"
            R"("static_score":0.75,"temporal_score":null,"reason":null})");
}

TEST(Findings, JsonlRoundTrip) {
  AnomalyFinding a;
  a.sender = "J1";
  a.receiver = "J2";
  a.year = 2005;
  a.behaviour = Behaviour::double_sided_dianchronous;
  a.static_score = 0.9;
  a.temporal_score = 0.8;
  a.confidence = combine(0.9, 0.8);
  a.reason = AnomalyReason{ReasonCategory::one_many, {12.5, 80.0}, 4};
  AnomalyFinding b;
  b.sender = "J2";
  b.receiver = "J1";
  b.confidence = 0.6;
  b.static_score = 0.6;
  std::ostringstream out;
  write_findings_jsonl(out, {a, b});
  std::istringstream in(out.str());
  const auto back = read_findings_jsonl(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].year, 2005);
  EXPECT_EQ(back[0].behaviour, Behaviour::double_sided_dianchronous);
  EXPECT_EQ(back[0].confidence, a.confidence);
  ASSERT_TRUE(back[0].reason);
  EXPECT_EQ(back[0].reason->category, ReasonCategory::one_many);
  EXPECT_EQ(back[0].reason->prev_collaborations, 4);
  EXPECT_EQ(back[0].reason->crowding.receiver_pct, 80.0);
  EXPECT_FALSE(back[1].year);
  EXPECT_FALSE(back[1].temporal_score);
  std::ostringstream again;
  write_findings_jsonl(again, back);
  EXPECT_EQ(out.str(), again.str());
}

TEST(Findings, MalformedLineReportsLine) {
  std::istringstream in("{\"sender\":\"a\",\"receiver\":\"b\",\"confidence\":0.6}\n{\"sender\":\"a\"}\n");
  try {
    read_findings_jsonl(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}
