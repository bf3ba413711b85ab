#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "citestack/explain.hpp"
#include "citestack/random.hpp"

using namespace citestack;

namespace {

Corpus parse(const std::string& s) {
  std::istringstream in(s);
  return ingest(in);
}

std::string paper(const std::string& id, const std::string& j, int y, const std::string& authors,
                  const std::vector<std::string>& refs) {
  std::string r;
  for (const auto& x : refs) r += (r.empty() ? "" : ",") + x;
  return id + "\t" + j + "\t" + std::to_string(y) + "\t" + authors + "\t" + r + "\n";
}

// Random toy corpus: <= 50 papers over 3 journals and 6 authors.
Corpus toy(Rng& rng) {
  const std::size_t n = 10 + rng.index(41);
  std::vector<PaperRecord> recs(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = recs[i];
    r.paper_id = "p" + std::to_string(i);
    r.journal_id = "J" + std::to_string(i % 3);
    r.year = static_cast<int>(rng.uniform_int(2000, 2006));
    for (int a = 0, k = static_cast<int>(rng.uniform_int(1, 3)); a < k; ++a) {
      r.authors.push_back("a" + std::to_string(rng.index(6)));
    }
    for (int k = static_cast<int>(rng.uniform_int(0, 8)); k > 0; --k) {
      const auto q = rng.index(n);
      if (q != i) r.references.push_back("p" + std::to_string(q));
    }
  }
  return Corpus::from_records(recs);
}

bool cites(const PaperRecord& p, const PaperRecord& q) {
  return std::find(p.references.begin(), p.references.end(), q.paper_id) != p.references.end();
}

// Exhaustive over all paper pairs; crowded iff count > mean + sigma.
CrowdingStats brute_crowding(const Corpus& c, const std::string& s, const std::string& r) {
  std::vector<double> given, received;
  for (const auto& p : c.papers()) {
    if (p.journal_id == s) {
      double k = 0;
      for (const auto& q : c.papers()) k += q.journal_id == r && cites(p, q);
      given.push_back(k);
    }
    if (p.journal_id == r) {
      double k = 0;
      for (const auto& q : c.papers()) k += q.journal_id == s && cites(q, p);
      received.push_back(k);
    }
  }
  auto pct = [](const std::vector<double>& xs) {
    double m = 0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double v = 0;
    for (double x : xs) v += (x - m) * (x - m);
    const double band = m + std::sqrt(v / static_cast<double>(xs.size()));
    double n = 0;
    for (double x : xs) n += x > band;
    return 100.0 * n / static_cast<double>(xs.size());
  };
  return {pct(given), pct(received)};
}

std::int64_t brute_prev_collabs(const Corpus& c, const std::string& s, const std::string& r) {
  std::int64_t n = 0;
  for (const auto& p : c.papers()) {
    if (p.journal_id != s) continue;
    for (const auto& q : c.papers()) {
      if (q.journal_id != r || !cites(p, q)) continue;
      bool hit = false;
      for (const auto& a : p.authors) {
        for (const auto& b : q.authors) {
          if (a == b) continue;
          for (const auto& w : c.papers()) {
            const bool both = std::count(w.authors.begin(), w.authors.end(), a) &&
                              std::count(w.authors.begin(), w.authors.end(), b);
            hit = hit || (both && w.year < p.year);
          }
        }
      }
      n += hit;
    }
  }
  return n;
}

}  // namespace

TEST(Crowding, EqualCitersNoneCrowded) {
  std::string s;
  for (int i = 0; i < 3; ++i) s += paper("r" + std::to_string(i), "R", 2000, "", {});
  for (int i = 0; i < 4; ++i) s += paper("s" + std::to_string(i), "S", 2001, "", {"r0", "r1"});
  const auto c = parse(s);
  const auto st = crowding_stats(c, c.journals().at("S"), c.journals().at("R"));
  EXPECT_EQ(st.sender_pct, 0.0);
}

TEST(Crowding, OneOfTenCitesHundredTimes) {
  std::string s;
  std::vector<std::string> all;
  for (int i = 0; i < 100; ++i) {
    s += paper("r" + std::to_string(i), "R", 2000, "", {});
    all.push_back("r" + std::to_string(i));
  }
  s += paper("s0", "S", 2001, "", all);
  for (int i = 1; i < 10; ++i) s += paper("s" + std::to_string(i), "S", 2001, "", {});
  const auto c = parse(s);
  const auto st = crowding_stats(c, c.journals().at("S"), c.journals().at("R"));
  EXPECT_DOUBLE_EQ(st.sender_pct, 10.0);    // mu = 10, sigma = 30, band 40
  EXPECT_DOUBLE_EQ(st.receiver_pct, 0.0);  // every receiver paper got exactly 1
}

TEST(Crowding, OneReceiverPaperAbsorbsAll) {
  std::string s;
  for (int i = 0; i < 5; ++i) s += paper("r" + std::to_string(i), "R", 2000, "", {});
  for (int i = 0; i < 6; ++i) s += paper("s" + std::to_string(i), "S", 2001, "", {"r0"});
  const auto c = parse(s);
  const auto st = crowding_stats(c, c.journals().at("S"), c.journals().at("R"));
  EXPECT_DOUBLE_EQ(st.receiver_pct, 100.0 / 5.0);
}

TEST(Crowding, MatchesBruteForce) {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = toy(rng);
    for (JournalIndex s = 0; s < c.journals().size(); ++s) {
      for (JournalIndex r = 0; r < c.journals().size(); ++r) {
        if (s == r) continue;
        const auto got = crowding_stats(c, s, r);
        const auto want = brute_crowding(c, c.journals().id(s), c.journals().id(r));
        ASSERT_EQ(got.sender_pct, want.sender_pct);
        ASSERT_EQ(got.receiver_pct, want.receiver_pct);
      }
    }
  }
}

TEST(Categorize, PaperExamples) {
  EXPECT_EQ(categorize({80, 80}), ReasonCategory::many_many);
  EXPECT_EQ(categorize({80, 10}), ReasonCategory::many_one);
  EXPECT_EQ(categorize({10, 80}), ReasonCategory::one_many);
  EXPECT_EQ(categorize({10, 10}), ReasonCategory::one_one);
  EXPECT_EQ(categorize({50, 50}), ReasonCategory::uncategorized);
  EXPECT_EQ(categorize({75, 80}), ReasonCategory::uncategorized);
  EXPECT_EQ(categorize({25, 10}), ReasonCategory::uncategorized);
}

TEST(Categorize, GridSweep) {
  auto band = [](int v) { return v > 75 ? 'M' : v < 25 ? 'O' : '-'; };
  for (int s = 0; s <= 100; ++s) {
    for (int r = 0; r <= 100; ++r) {
      ReasonCategory want = ReasonCategory::uncategorized;
      const char a = band(s), b = band(r);
      if (a == 'M' && b == 'M') want = ReasonCategory::many_many;
      if (a == 'M' && b == 'O') want = ReasonCategory::many_one;
      if (a == 'O' && b == 'M') want = ReasonCategory::one_many;
      if (a == 'O' && b == 'O') want = ReasonCategory::one_one;
      ASSERT_EQ(categorize({static_cast<double>(s), static_cast<double>(r)}), want) << s << "," << r;
    }
  }
}

TEST(PrevCollabs, NoHistory) {
  const auto c = parse(paper("q", "R", 2000, "b", {}) + paper("p", "S", 2005, "a", {"q"}));
  EXPECT_EQ(count_prev_collabs(c, build_collab_index(c), c.journals().at("S"), c.journals().at("R")), 0);
}

TEST(PrevCollabs, SingleEarlierCollaboration) {
  const auto c = parse(paper("w", "X", 2001, "a,b", {}) + paper("q", "R", 2000, "b", {}) +
                       paper("p", "S", 2005, "a", {"q"}));
  EXPECT_EQ(count_prev_collabs(c, build_collab_index(c), c.journals().at("S"), c.journals().at("R")), 1);
}

TEST(PrevCollabs, SameYearDoesNotCount) {
  const auto c = parse(paper("w", "X", 2005, "a,b", {}) + paper("q", "R", 2000, "b", {}) +
                       paper("p", "S", 2005, "a", {"q"}));
  EXPECT_EQ(count_prev_collabs(c, build_collab_index(c), c.journals().at("S"), c.journals().at("R")), 0);
}

TEST(PrevCollabs, ThreeQualifyingPairs) {
  std::string s = paper("w", "X", 2001, "a,b", {});
  s += paper("q1", "R", 2000, "b", {}) + paper("q2", "R", 2000, "b,c", {}) + paper("q3", "R", 2000, "d", {});
  s += paper("p1", "S", 2004, "a", {"q1", "q2", "q3"});  // q1, q2 qualify
  s += paper("p2", "S", 2002, "a,e", {"q1"});             // qualifies
  s += paper("p3", "S", 2001, "a", {"q2"});               // same year as w: no
  const auto c = parse(s);
  const auto idx = build_collab_index(c);
  EXPECT_EQ(count_prev_collabs(c, idx, c.journals().at("S"), c.journals().at("R")), 3);
  EXPECT_EQ(brute_prev_collabs(c, "S", "R"), 3);
}

TEST(PrevCollabs, MatchesBruteForce) {
  Rng rng(123);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = toy(rng);
    const auto idx = build_collab_index(c);
    const auto t_edges = [&](JournalIndex s, JournalIndex r) {
      std::int64_t n = 0;
      for (auto p : c.papers_of(s)) {
        for (auto q : c.resolved_references(p)) n += c.journal_of(q) == r;
      }
      return n;
    };
    for (JournalIndex s = 0; s < c.journals().size(); ++s) {
      for (JournalIndex r = 0; r < c.journals().size(); ++r) {
        if (s == r) continue;
        const auto got = count_prev_collabs(c, idx, s, r);
        ASSERT_EQ(got, brute_prev_collabs(c, c.journals().id(s), c.journals().id(r)));
        ASSERT_LE(got, t_edges(s, r));
      }
    }
  }
}

TEST(Explain, CombinesPieces) {
  const auto c = parse(paper("w", "X", 2001, "a,b", {}) + paper("q", "R", 2000, "b", {}) +
                       paper("p", "S", 2005, "a", {"q"}));
  const auto r = explain_pair(c, build_collab_index(c), c.journals().at("S"), c.journals().at("R"));
  EXPECT_EQ(r.category, ReasonCategory::one_one);
  EXPECT_EQ(r.prev_collaborations, 1);
  EXPECT_EQ(parse_reason_category("many_one"), ReasonCategory::many_one);
  EXPECT_THROW(parse_reason_category("lots"), DataError);
}

// Cantelli: at most 1/(1+k^2) of a sample lies above mean + k*sigma, so at
// k = 1 no side can exceed 50% and the "many" categories need k < 1.
TEST(Crowding, CantelliBoundAtOneSigma) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = toy(rng);
    for (JournalIndex s = 0; s < c.journals().size(); ++s) {
      for (JournalIndex r = 0; r < c.journals().size(); ++r) {
        if (s == r) continue;
        const auto st = crowding_stats(c, s, r);
        ASSERT_LE(st.sender_pct, 50.0);
        ASSERT_LE(st.receiver_pct, 50.0);
      }
    }
  }
}
