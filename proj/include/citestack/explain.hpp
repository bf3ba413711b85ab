#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "citestack/collab.hpp"
#include "citestack/corpus.hpp"
#include "citestack/error.hpp"
#include "citestack/journals.hpp"
#include "citestack/stats.hpp"

namespace citestack {

// Share of each side's papers that are "crowded": their citation count into
// (or received from) the other journal is above mean + sigma of that side's
// per-paper distribution. Percentages in [0, 100].
struct CrowdingStats {
  double sender_pct = 0.0;
  double receiver_pct = 0.0;
};

enum class ReasonCategory { many_many, many_one, one_many, one_one, uncategorized };

inline std::string_view to_string(ReasonCategory c) {
  switch (c) {
    case ReasonCategory::many_many: return "many_many";
    case ReasonCategory::many_one: return "many_one";
    case ReasonCategory::one_many: return "one_many";
    case ReasonCategory::one_one: return "one_one";
    case ReasonCategory::uncategorized: return "uncategorized";
  }
  return "?";
}

inline ReasonCategory parse_reason_category(std::string_view s) {
  for (auto c : {ReasonCategory::many_many, ReasonCategory::many_one, ReasonCategory::one_many,
                 ReasonCategory::one_one, ReasonCategory::uncategorized}) {
    if (to_string(c) == s) return c;
  }
  throw DataError("unknown reason category '" + std::string(s) + "'");
}

struct AnomalyReason {
  ReasonCategory category = ReasonCategory::uncategorized;
  CrowdingStats crowding;
  std::int64_t prev_collaborations = 0;
};

struct ExplainOptions {
  double crowding_sigmas = 1.0;  // a paper is crowded above mean + k * sigma
  double many_threshold = 75.0;  // strictly above: "many"
  double one_threshold = 25.0;   // strictly below: "one"
};

namespace detail {

inline double crowded_percentage(const std::vector<double>& counts, double sigmas) {
  if (counts.empty()) return 0.0;
  const double mu = stats::mean(counts);
  const double band = mu + sigmas * stats::population_stddev(counts, mu);
  std::size_t crowded = 0;
  for (double c : counts) crowded += c > band ? 1 : 0;
  return 100.0 * static_cast<double>(crowded) / static_cast<double>(counts.size());
}

}  // namespace detail

/// Needs a paper-level corpus. Throws DataError if either journal has no papers.
inline CrowdingStats crowding_stats(const Corpus& corpus, JournalIndex sender, JournalIndex receiver,
                                    const ExplainOptions& o = {}) {
  const auto& sent = corpus.papers_of(sender);
  const auto& recv = corpus.papers_of(receiver);
  if (sent.empty() || recv.empty()) throw DataError("crowding_stats: journal without papers");

  std::unordered_map<std::size_t, std::size_t> slot;  // receiver paper -> position in `received`
  for (std::size_t i = 0; i < recv.size(); ++i) slot.emplace(recv[i], i);

  std::vector<double> given(sent.size(), 0.0);
  std::vector<double> received(recv.size(), 0.0);
  for (std::size_t i = 0; i < sent.size(); ++i) {
    for (auto q : corpus.resolved_references(sent[i])) {
      if (corpus.journal_of(q) != receiver) continue;
      given[i] += 1.0;
      received[slot.at(q)] += 1.0;
    }
  }
  return {detail::crowded_percentage(given, o.crowding_sigmas),
          detail::crowded_percentage(received, o.crowding_sigmas)};
}

// (>75, >75) many_many, (>75, <25) many_one, (<25, >75) one_many,
// (<25, <25) one_one; anything touching [25, 75] is uncategorized.
inline ReasonCategory categorize(const CrowdingStats& c, const ExplainOptions& o = {}) {
  const bool s_many = c.sender_pct > o.many_threshold;
  const bool s_one = c.sender_pct < o.one_threshold;
  const bool r_many = c.receiver_pct > o.many_threshold;
  const bool r_one = c.receiver_pct < o.one_threshold;
  if (s_many && r_many) return ReasonCategory::many_many;
  if (s_many && r_one) return ReasonCategory::many_one;
  if (s_one && r_many) return ReasonCategory::one_many;
  if (s_one && r_one) return ReasonCategory::one_one;
  return ReasonCategory::uncategorized;
}

/// Citation edges sender -> receiver where some author of the citing paper
/// co-wrote a paper with some author of the cited paper strictly before the
/// citing paper's year. One count per (citing, cited) paper pair.
inline std::int64_t count_prev_collabs(const Corpus& corpus, const CollaborationIndex& collabs, JournalIndex sender,
                                       JournalIndex receiver) {
  std::int64_t count = 0;
  for (auto p : corpus.papers_of(sender)) {
    const auto& citing = corpus.papers()[p];
    for (auto q : corpus.resolved_references(p)) {
      if (corpus.journal_of(q) != receiver) continue;
      const auto& cited = corpus.papers()[q];
      bool hit = false;
      for (const auto& a : citing.authors) {
        for (const auto& b : cited.authors) {
          if (collabs.collaborated_before(a, b, citing.year)) {
            hit = true;
            break;
          }
        }
        if (hit) break;
      }
      count += hit ? 1 : 0;
    }
  }
  return count;
}

inline AnomalyReason explain_pair(const Corpus& corpus, const CollaborationIndex& collabs, JournalIndex sender,
                                  JournalIndex receiver, const ExplainOptions& o = {}) {
  AnomalyReason r;
  r.crowding = crowding_stats(corpus, sender, receiver, o);
  r.category = categorize(r.crowding, o);
  r.prev_collaborations = count_prev_collabs(corpus, collabs, sender, receiver);
  return r;
}

}  // namespace citestack
