#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "citestack/collab.hpp"
#include "citestack/corpus.hpp"
#include "citestack/error.hpp"
#include "citestack/explain.hpp"
#include "citestack/journals.hpp"
#include "citestack/scoring.hpp"
#include "citestack/static_detect.hpp"
#include "citestack/temporal_detect.hpp"
#include "citestack/tensor.hpp"

namespace citestack {

enum class Method { combined, static_only, temporal_only };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::combined: return "combined";
    case Method::static_only: return "static";
    case Method::temporal_only: return "temporal";
  }
  return "?";
}

inline Method parse_method(std::string_view s) {
  for (auto m : {Method::combined, Method::static_only, Method::temporal_only}) {
    if (to_string(m) == s) return m;
  }
  throw DataError("unknown method '" + std::string(s) + "'");
}

struct PipelineOptions {
  Method method = Method::combined;
  std::size_t bucket_count = 10;
  double fence_k = kDefaultFenceMultiplier;
  bool include_below_fence = false;
  TemporalOptions temporal;
  // Combined method only: test every pair, not just box-plot candidates.
  // Findings without static evidence are then reported with a temporal
  // score alone.
  bool temporal_all_pairs = false;
  ExplainOptions explain;
};

struct PipelineDiagnostics {
  std::size_t buckets = 0;
  std::size_t candidates_above = 0;
  std::size_t candidates_below = 0;
  std::size_t skipped_grids = 0;
  std::size_t tested_pairs = 0;
  std::size_t temporal_findings = 0;
};

struct PipelineResult {
  std::vector<AnomalyFinding> findings;
  std::vector<StaticCandidate> below_fence;  // reported separately unless included
  PipelineDiagnostics diagnostics;
};

namespace detail {

class ReasonCache {
 public:
  ReasonCache(const Corpus* corpus, const ExplainOptions& o) : corpus_(corpus), options_(o) {
    if (corpus_) collabs_ = build_collab_index(*corpus_);
  }

  std::optional<AnomalyReason> get(OrderedPair p) {
    if (!corpus_) return std::nullopt;
    auto it = cache_.find(p);
    if (it != cache_.end()) return it->second;
    std::optional<AnomalyReason> r;
    if (!corpus_->papers_of(p.sender).empty() && !corpus_->papers_of(p.receiver).empty()) {
      r = explain_pair(*corpus_, collabs_, p.sender, p.receiver, options_);
    }
    cache_.emplace(p, r);
    return r;
  }

 private:
  const Corpus* corpus_;
  ExplainOptions options_;
  CollaborationIndex collabs_;
  std::unordered_map<OrderedPair, std::optional<AnomalyReason>, OrderedPairHash> cache_;
};

inline double mean_of_present(const AnomalyFinding& f) {
  if (f.static_score && f.temporal_score) return combine(*f.static_score, *f.temporal_score);
  if (f.static_score) return *f.static_score;
  return f.temporal_score.value_or(0.5);
}

}  // namespace detail

/// bucket -> box plot -> time series -> explain (when `corpus` is given) ->
/// score. Findings are unique by (sender, receiver, year) and ordered by
/// journal index then year, so output is deterministic.
inline PipelineResult run_pipeline(const CitationTensor& t, const Corpus* corpus = nullptr,
                                   const PipelineOptions& o = {}) {
  if (t.journal_count() == 0) throw DataError("no journals");
  PipelineResult res;

  const auto buckets = bucket_journals(t.journals(), o.bucket_count);
  auto st = detect_static(t, buckets, o.fence_k);
  res.diagnostics.buckets = buckets.bucket_count();
  res.diagnostics.candidates_above = st.above.size();
  res.diagnostics.candidates_below = st.below.size();
  res.diagnostics.skipped_grids = st.skipped.size();

  std::vector<StaticCandidate> candidates = st.above;
  if (o.include_below_fence) {
    candidates.insert(candidates.end(), st.below.begin(), st.below.end());
    std::sort(candidates.begin(), candidates.end(),
              [](const StaticCandidate& a, const StaticCandidate& b) { return a.pair < b.pair; });
  } else {
    res.below_fence = st.below;
  }

  std::unordered_map<OrderedPair, double, OrderedPairHash> static_score;
  for (const auto& c : candidates) {
    auto& s = static_score[c.pair];
    s = std::max(s, static_confidence(c));
  }
  auto static_for = [&](OrderedPair p) -> std::optional<double> {
    std::optional<double> best;
    for (auto q : {p, p.reversed()}) {
      auto it = static_score.find(q);
      if (it != static_score.end()) best = std::max(best.value_or(0.0), it->second);
    }
    return best;
  };

  detail::ReasonCache reasons(corpus, o.explain);
  // keyed by (sender, receiver, year); year -1 marks a year-less finding
  std::map<std::tuple<JournalIndex, JournalIndex, int>, AnomalyFinding> out;
  auto emit = [&](OrderedPair p, std::optional<int> year, AnomalyFinding f) {
    f.sender = t.journals().id(p.sender);
    f.receiver = t.journals().id(p.receiver);
    f.year = year;
    f.confidence = detail::mean_of_present(f);
    f.reason = reasons.get(p);
    auto key = std::make_tuple(p.sender, p.receiver, year.value_or(-1));
    auto it = out.find(key);
    if (it == out.end() || it->second.confidence < f.confidence) out[key] = std::move(f);
  };

  if (o.method == Method::static_only) {
    for (const auto& c : candidates) {
      AnomalyFinding f;
      f.static_score = static_score.at(c.pair);
      emit(c.pair, std::nullopt, std::move(f));
    }
  } else {
    std::vector<OrderedPair> pairs;
    if (o.method == Method::temporal_only || o.temporal_all_pairs) {
      pairs = all_tested_pairs(t);
    } else {
      for (const auto& c : candidates) pairs.push_back(c.pair);
    }
    const auto tf = detect_temporal(t, pairs, o.temporal);
    std::unordered_set<OrderedPair, OrderedPairHash> tested;
    for (const auto& p : pairs) tested.insert({std::min(p.sender, p.receiver), std::max(p.sender, p.receiver)});
    res.diagnostics.tested_pairs = tested.size();
    res.diagnostics.temporal_findings = tf.size();

    for (const auto& f : tf) {
      AnomalyFinding a;
      a.behaviour = f.behaviour;
      a.temporal_score = temporal_confidence(f);
      if (o.method == Method::combined) {
        a.static_score = static_for(f.pair);
        if (!a.static_score && !o.temporal_all_pairs) continue;
      }
      emit(f.pair, f.year, std::move(a));
    }
  }

  res.findings.reserve(out.size());
  for (auto& [key, f] : out) res.findings.push_back(std::move(f));
  return res;
}

inline PipelineResult run_pipeline(const Corpus& corpus, const PipelineOptions& o = {}) {
  return run_pipeline(build_tensor(corpus), &corpus, o);
}

}  // namespace citestack
