#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "citestack/error.hpp"
#include "citestack/journals.hpp"
#include "citestack/scoring.hpp"
#include "citestack/static_detect.hpp"

namespace citestack {

// Every number here is recomputed from the findings and the journal table;
// nothing comes from the detection run itself.

inline nlohmann::ordered_json summary_json(const std::vector<AnomalyFinding>& findings, const JournalTable& journals) {
  std::set<std::pair<JournalId, JournalId>> pairs;
  std::set<JournalId> involved;
  std::map<std::string, std::size_t> by_behaviour;
  std::map<std::string, std::size_t> by_category;
  std::size_t single = 0;
  std::size_t dbl = 0;
  std::size_t yearless = 0;
  for (const auto& f : findings) {
    pairs.insert({f.sender, f.receiver});
    involved.insert(f.sender);
    involved.insert(f.receiver);
    if (!f.year) ++yearless;
    if (f.behaviour) {
      ++by_behaviour[std::string(to_string(*f.behaviour))];
      (is_double_sided(*f.behaviour) ? dbl : single) += 1;
    }
    if (f.reason) ++by_category[std::string(to_string(f.reason->category))];
  }
  const auto n = static_cast<double>(journals.size());
  auto pct = [](double num, double den) { return den > 0 ? nlohmann::ordered_json(100.0 * num / den) : nullptr; };

  nlohmann::ordered_json j;
  j["journals"] = journals.size();
  j["findings"] = findings.size();
  j["yearless_findings"] = yearless;
  j["anomalous_pairs"] = pairs.size();
  j["anomalous_journals"] = involved.size();
  j["pair_rate_pct"] = pct(static_cast<double>(pairs.size()), n * (n - 1));
  j["pair_rate_with_self_pct"] = pct(static_cast<double>(pairs.size()), n * n);
  j["journal_rate_pct"] = pct(static_cast<double>(involved.size()), n);
  j["one_sided"] = single;
  j["double_sided"] = dbl;
  j["one_sided_pct"] = pct(static_cast<double>(single), static_cast<double>(single + dbl));
  j["double_sided_pct"] = pct(static_cast<double>(dbl), static_cast<double>(single + dbl));
  j["by_behaviour"] = by_behaviour;
  j["by_reason"] = by_category;
  return j;
}

inline constexpr double kHistogramBinWidth = 0.05;

// bin_lo,bin_hi,count over [0.5, 1) in steps of 0.05.
inline void write_confidence_histogram(std::ostream& out, const std::vector<AnomalyFinding>& findings) {
  constexpr int bins = 10;
  std::vector<std::size_t> counts(bins, 0);
  for (const auto& f : findings) {
    int b = static_cast<int>((f.confidence - 0.5) / kHistogramBinWidth);
    counts[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))] += 1;
  }
  out << "bin_lo,bin_hi,count\n";
  char buf[64];
  for (int b = 0; b < bins; ++b) {
    std::snprintf(buf, sizeof buf, "%.2f,%.2f,", 0.5 + b * kHistogramBinWidth, 0.5 + (b + 1) * kHistogramBinWidth);
    out << buf << counts[static_cast<std::size_t>(b)] << '\n';
  }
}

// year,findings,anomalous_journals,journal_ratio. Year-less findings are skipped.
inline void write_yearly(std::ostream& out, const std::vector<AnomalyFinding>& findings, const JournalTable& journals) {
  std::map<int, std::pair<std::size_t, std::set<JournalId>>> per_year;
  for (const auto& f : findings) {
    if (!f.year) continue;
    auto& [count, js] = per_year[*f.year];
    ++count;
    js.insert(f.sender);
    js.insert(f.receiver);
  }
  out << "year,findings,anomalous_journals,journal_ratio\n";
  for (const auto& [year, v] : per_year) {
    const double ratio = journals.empty() ? 0.0 : static_cast<double>(v.second.size()) / static_cast<double>(journals.size());
    out << year << ',' << v.first << ',' << v.second.size() << ',' << ratio << '\n';
  }
}

// bucket,min_papers,max_papers,journals,anomalous_journals,fraction over
// paper-count deciles.
inline void write_size_trend(std::ostream& out, const std::vector<AnomalyFinding>& findings,
                             const JournalTable& journals, std::size_t bucket_count = 10) {
  out << "bucket,min_papers,max_papers,journals,anomalous_journals,fraction\n";
  if (journals.empty()) return;
  std::set<JournalId> involved;
  for (const auto& f : findings) {
    involved.insert(f.sender);
    involved.insert(f.receiver);
  }
  const auto buckets = bucket_journals(journals, bucket_count);
  for (std::size_t b = 0; b < buckets.bucket_count(); ++b) {
    const auto members = buckets.members(b);
    if (members.empty()) continue;
    std::int64_t lo = journals.paper_count(members.front());
    std::int64_t hi = lo;
    std::size_t anomalous = 0;
    for (auto j : members) {
      lo = std::min(lo, journals.paper_count(j));
      hi = std::max(hi, journals.paper_count(j));
      anomalous += involved.count(journals.id(j));
    }
    out << b << ',' << lo << ',' << hi << ',' << members.size() << ',' << anomalous << ','
        << static_cast<double>(anomalous) / static_cast<double>(members.size()) << '\n';
  }
}

/// summary.json, confidence_histogram.csv, yearly.csv, size_trend.csv.
inline void write_report(const std::filesystem::path& dir, const std::vector<AnomalyFinding>& findings,
                         const JournalTable& journals) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw DataError("cannot write '" + (dir / name).string() + "'");
    return out;
  };
  {
    auto out = open("summary.json");
    out << summary_json(findings, journals).dump(2) << '\n';
  }
  {
    auto out = open("confidence_histogram.csv");
    write_confidence_histogram(out, findings);
  }
  {
    auto out = open("yearly.csv");
    write_yearly(out, findings, journals);
  }
  {
    auto out = open("size_trend.csv");
    write_size_trend(out, findings, journals);
  }
}

}  // namespace citestack
