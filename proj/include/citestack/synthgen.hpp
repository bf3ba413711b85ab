#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "citestack/error.hpp"
#include "citestack/journals.hpp"
#include "citestack/random.hpp"
#include "citestack/tensor.hpp"
#include "citestack/text.hpp"

namespace citestack::synth {

enum class InjectionType { T1 = 1, T2, T3, T4, T5 };

inline std::string to_string(InjectionType t) { return "T" + std::to_string(static_cast<int>(t)); }

inline InjectionType parse_injection_type(std::string_view s) {
  s = text::trim(s);
  if (s.size() == 2 && s[0] == 'T' && s[1] >= '1' && s[1] <= '5') return static_cast<InjectionType>(s[1] - '0');
  throw DataError("unknown injection type '" + std::string(s) + "'");
}

struct SynthConfig {
  std::size_t n_journals = 100;
  int year_min = 2000;
  int year_max = 2020;
  std::int64_t papers_min = 50;
  std::int64_t papers_max = 500;
  std::int64_t base_min = 0;  // normal per-pair, per-year citation count range
  std::int64_t base_max = 20;
  std::int64_t spike_multiplier = 5;
  std::size_t n_anomalies = 110;
  // Injected cells sit after at least this many years of normal behaviour.
  int warmup_years = 3;
  int run_min = 3;  // length range of a T2 gradual-increase run
  int run_max = 5;
  std::uint64_t seed = 42;

  std::int64_t spike_level() const { return std::max(spike_multiplier * base_max, base_max + 1); }
  int year_count() const { return year_max - year_min + 1; }

  void validate() const {
    if (n_journals == 0) throw GenerationError("n_journals must be at least 1");
    if (year_max < year_min) throw GenerationError("year range is empty");
    if (papers_min > papers_max || papers_min < 0) throw GenerationError("papers_per_journal range is invalid");
    if (base_min > base_max || base_min < 0) throw GenerationError("base_citations range is invalid");
    if (spike_multiplier < 1) throw GenerationError("spike_multiplier must be >= 1");
    if (warmup_years < 0) throw GenerationError("warmup_years must be >= 0");
    if (run_min < 3 || run_max < run_min) throw GenerationError("T2 run length range must satisfy 3 <= min <= max");
    const std::size_t ordered = n_journals * (n_journals - 1);
    if (n_anomalies > ordered) {
      throw GenerationError("n_anomalies (" + std::to_string(n_anomalies) + ") exceeds the " +
                            std::to_string(ordered) + " ordered off-diagonal pairs; increase n_journals");
    }
  }
};

struct GroundTruthLabel {
  JournalId sender;
  JournalId receiver;
  std::vector<int> years;  // ascending
  InjectionType type = InjectionType::T1;

  friend bool operator==(const GroundTruthLabel&, const GroundTruthLabel&) = default;
};

/// Dense working tensor used during generation.
class DenseCube {
 public:
  DenseCube(std::size_t n_journals, int year_min, int year_max)
      : n_(n_journals), year_min_(year_min), n_years_(static_cast<std::size_t>(year_max - year_min + 1)),
        cells_(n_ * n_ * n_years_, 0) {}

  std::int64_t& at(OrderedPair p, int year) { return cells_[offset(p, year)]; }
  std::int64_t at(OrderedPair p, int year) const { return cells_[offset(p, year)]; }

  std::size_t journal_count() const noexcept { return n_; }
  int year_min() const noexcept { return year_min_; }
  int year_max() const noexcept { return year_min_ + static_cast<int>(n_years_) - 1; }
  bool contains_year(int y) const noexcept { return y >= year_min_ && y <= year_max(); }

 private:
  std::size_t offset(OrderedPair p, int year) const {
    if (p.sender >= n_ || p.receiver >= n_ || !contains_year(year)) throw std::out_of_range("DenseCube index");
    return (static_cast<std::size_t>(p.sender) * n_ + p.receiver) * n_years_ + static_cast<std::size_t>(year - year_min_);
  }

  std::size_t n_;
  int year_min_;
  std::size_t n_years_;
  std::vector<std::int64_t> cells_;
};

struct SynthDataset {
  CitationTensor tensor;
  std::vector<GroundTruthLabel> labels;
  SynthConfig config;
};

inline JournalId synth_journal_id(JournalIndex i) { return std::to_string(i); }

namespace detail {

inline GroundTruthLabel make_label(OrderedPair p, std::vector<int> years, InjectionType t) {
  return {synth_journal_id(p.sender), synth_journal_id(p.receiver), std::move(years), t};
}

inline void require_year(const DenseCube& cube, int year, const char* what) {
  if (!cube.contains_year(year)) throw GenerationError(std::string(what) + ": year outside the configured range");
}

}  // namespace detail

// T1: a single-year spike to spike_multiplier * base_max.
inline GroundTruthLabel inject_type1(DenseCube& cube, OrderedPair p, int year, const SynthConfig& cfg) {
  detail::require_year(cube, year, "T1");
  cube.at(p, year) = cfg.spike_level();
  return detail::make_label(p, {year}, InjectionType::T1);
}

// T2: a run of `length` years, each exceeding the previous year by more than
// the widest year-over-year swing normal data can show (base_max - base_min).
inline GroundTruthLabel inject_type2(DenseCube& cube, OrderedPair p, int start, int length, Rng& rng,
                                     const SynthConfig& cfg) {
  if (length < 3) throw GenerationError("T2 needs a run of at least 3 years");
  detail::require_year(cube, start, "T2");
  detail::require_year(cube, start + length - 1, "T2");
  const std::int64_t width = cfg.base_max - cfg.base_min;
  const std::int64_t step = rng.uniform_int(width + 1, 2 * width + 1);
  std::int64_t value = cube.contains_year(start - 1) ? cube.at(p, start - 1) : cfg.base_min;
  std::vector<int> years;
  for (int y = start; y < start + length; ++y) {
    value += step;
    cube.at(p, y) = std::max(value, cfg.base_max + 1);
    years.push_back(y);
  }
  return detail::make_label(p, std::move(years), InjectionType::T2);
}

// T3: reciprocal spikes, i->j in `year` and j->i in `year + 1`. Two labels.
inline std::array<GroundTruthLabel, 2> inject_type3(DenseCube& cube, OrderedPair p, int year,
                                                    const SynthConfig& cfg) {
  detail::require_year(cube, year, "T3");
  detail::require_year(cube, year + 1, "T3 (reciprocal year)");
  cube.at(p, year) = cfg.spike_level();
  cube.at(p.reversed(), year + 1) = cfg.spike_level();
  return {detail::make_label(p, {year}, InjectionType::T3),
          detail::make_label(p.reversed(), {year + 1}, InjectionType::T3)};
}

// T4: i->j in `year` at least doubles what i received from j the year before,
// floored at the spike level so the cell is anomalous rather than trivially
// double a small count.
inline GroundTruthLabel inject_type4(DenseCube& cube, OrderedPair p, int year, const SynthConfig& cfg) {
  detail::require_year(cube, year, "T4");
  detail::require_year(cube, year - 1, "T4 (previous year)");
  cube.at(p, year) = std::max(2 * cube.at(p.reversed(), year - 1), cfg.spike_level());
  return detail::make_label(p, {year}, InjectionType::T4);
}

// T5: i->j in `year - 1` is first lifted above base_max (up to half the spike
// level), then `year` is set to exactly double it. Both years are labelled.
inline GroundTruthLabel inject_type5(DenseCube& cube, OrderedPair p, int year, Rng& rng, const SynthConfig& cfg) {
  detail::require_year(cube, year, "T5");
  detail::require_year(cube, year - 1, "T5 (previous year)");
  const std::int64_t lo = cfg.base_max + 1;
  const std::int64_t hi = std::max(lo, cfg.spike_level() / 2);
  const std::int64_t lifted = rng.uniform_int(lo, hi);
  cube.at(p, year - 1) = lifted;
  cube.at(p, year) = 2 * lifted;
  return detail::make_label(p, {year - 1, year}, InjectionType::T5);
}

/// Round-robin injection schedule: quotas of n_anomalies / 5 per type
/// (remainder to the lower types), T3 rounded down to an even number because
/// each T3 injection yields two labels.
inline std::vector<InjectionType> injection_schedule(std::size_t n_anomalies) {
  std::array<std::size_t, 5> quota{};
  for (std::size_t t = 0; t < 5; ++t) quota[t] = n_anomalies / 5 + (t < n_anomalies % 5 ? 1 : 0);
  if (quota[2] % 2 == 1) {
    --quota[2];
    ++quota[0];
  }
  std::vector<InjectionType> order;
  bool progressed = true;
  while (progressed) {
    progressed = false;
    for (std::size_t t = 0; t < 5; ++t) {
      const std::size_t weight = t == 2 ? 2 : 1;
      if (quota[t] >= weight) {
        order.push_back(static_cast<InjectionType>(t + 1));
        quota[t] -= weight;
        progressed = true;
      }
    }
  }
  return order;
}

/// Generates a journal-level benchmark with labelled injected anomalies.
///
/// Draw order (fixed, so output is reproducible): paper counts per journal;
/// base cells for every off-diagonal (sender, receiver, year); then one
/// injection per schedule entry, each taking a uniformly drawn unused
/// unordered journal pair, a random orientation and a uniformly drawn legal
/// year. Unordered pairs are never reused, so labels never collide and no
/// injection disturbs the reciprocal cells another one reads. Diagonal cells
/// stay 0.
inline SynthDataset generate(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const std::size_t n = cfg.n_journals;

  JournalTable journals;
  for (JournalIndex j = 0; j < n; ++j) {
    const auto idx = journals.add(synth_journal_id(j));
    journals.set_name(idx, "Synthetic Journal " + std::to_string(j));
    journals.set_paper_count(idx, rng.uniform_int(cfg.papers_min, cfg.papers_max));
  }

  DenseCube cube(n, cfg.year_min, cfg.year_max);
  for (JournalIndex s = 0; s < n; ++s) {
    for (JournalIndex r = 0; r < n; ++r) {
      if (s == r) continue;
      for (int y = cfg.year_min; y <= cfg.year_max; ++y) cube.at({s, r}, y) = rng.uniform_int(cfg.base_min, cfg.base_max);
    }
  }

  const auto schedule = injection_schedule(cfg.n_anomalies);
  const std::size_t unordered = n * (n - 1) / 2;
  if (schedule.size() > unordered) {
    throw GenerationError("cannot place " + std::to_string(cfg.n_anomalies) + " anomalies on " +
                          std::to_string(unordered) + " journal pairs without collisions; increase n_journals");
  }

  // Legal year windows per type, [first, last] of the year that is drawn.
  const int w = cfg.warmup_years;
  auto window = [&](InjectionType t) -> std::pair<int, int> {
    switch (t) {
      case InjectionType::T1: return {cfg.year_min + w, cfg.year_max};
      case InjectionType::T2: return {cfg.year_min + std::max(w, 1), cfg.year_max - cfg.run_min + 1};
      case InjectionType::T3: return {cfg.year_min + w, cfg.year_max - 1};
      case InjectionType::T4: return {cfg.year_min + std::max(w, 1), cfg.year_max};
      case InjectionType::T5: return {cfg.year_min + w + 1, cfg.year_max};
    }
    return {0, -1};
  };
  for (auto t : schedule) {
    auto [lo, hi] = window(t);
    if (lo > hi) {
      throw GenerationError("year range too short to place a " + to_string(t) + " anomaly after " +
                            std::to_string(w) + " warmup years");
    }
  }

  std::vector<OrderedPair> free_pairs;
  free_pairs.reserve(unordered);
  for (JournalIndex a = 0; a < n; ++a) {
    for (JournalIndex b = a + 1; b < n; ++b) free_pairs.push_back({a, b});
  }

  std::vector<GroundTruthLabel> labels;
  labels.reserve(cfg.n_anomalies);
  for (auto t : schedule) {
    const std::size_t k = rng.index(free_pairs.size());
    OrderedPair pair = free_pairs[k];
    free_pairs[k] = free_pairs.back();
    free_pairs.pop_back();
    if (rng.uniform_int(0, 1) == 1) pair = pair.reversed();

    auto [lo, hi] = window(t);
    switch (t) {
      case InjectionType::T1:
        labels.push_back(inject_type1(cube, pair, static_cast<int>(rng.uniform_int(lo, hi)), cfg));
        break;
      case InjectionType::T2: {
        const int max_len = std::min(cfg.run_max, cfg.year_max - lo + 1);
        const int length = static_cast<int>(rng.uniform_int(cfg.run_min, max_len));
        const int start = static_cast<int>(rng.uniform_int(lo, cfg.year_max - length + 1));
        labels.push_back(inject_type2(cube, pair, start, length, rng, cfg));
        break;
      }
      case InjectionType::T3: {
        auto both = inject_type3(cube, pair, static_cast<int>(rng.uniform_int(lo, hi)), cfg);
        labels.push_back(std::move(both[0]));
        labels.push_back(std::move(both[1]));
        break;
      }
      case InjectionType::T4:
        labels.push_back(inject_type4(cube, pair, static_cast<int>(rng.uniform_int(lo, hi)), cfg));
        break;
      case InjectionType::T5:
        labels.push_back(inject_type5(cube, pair, static_cast<int>(rng.uniform_int(lo, hi)), rng, cfg));
        break;
    }
  }

  TensorBuilder builder(std::move(journals), cfg.year_min, cfg.year_max);
  for (JournalIndex s = 0; s < n; ++s) {
    for (JournalIndex r = 0; r < n; ++r) {
      for (int y = cfg.year_min; y <= cfg.year_max; ++y) {
        if (auto c = cube.at({s, r}, y); c != 0) builder.add({s, r}, y, c);
      }
    }
  }
  return {std::move(builder).build(), std::move(labels), cfg};
}

// Labels CSV, version 1:
//   # citestack labels v1
//   sender_id,receiver_id,years,type      (years joined by ';')
inline void write_labels_csv(std::ostream& out, const std::vector<GroundTruthLabel>& labels) {
  out << "# citestack labels v1\n";
  out << "sender_id,receiver_id,years,type\n";
  for (const auto& l : labels) {
    out << l.sender << ',' << l.receiver << ',';
    for (std::size_t i = 0; i < l.years.size(); ++i) out << (i ? ";" : "") << l.years[i];
    out << ',' << to_string(l.type) << '\n';
  }
}

inline std::vector<GroundTruthLabel> read_labels_csv(std::istream& in) {
  std::vector<GroundTruthLabel> labels;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    text::strip_cr(line);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen && line.rfind("sender_id", 0) == 0) {
      header_seen = true;
      continue;
    }
    const auto f = text::split(line, ',');
    if (f.size() != 4) throw ParseError(lineno, "label row needs 4 comma-separated fields");
    GroundTruthLabel l;
    l.sender = std::string(text::trim(f[0]));
    l.receiver = std::string(text::trim(f[1]));
    if (l.sender.empty() || l.receiver.empty()) throw ParseError(lineno, "empty journal id");
    if (!text::trim(f[2]).empty()) {
      for (auto part : text::split(f[2], ';')) {
        auto y = text::parse_int(part);
        if (!y) throw ParseError(lineno, "non-integer year in label");
        l.years.push_back(static_cast<int>(*y));
      }
    }
    std::sort(l.years.begin(), l.years.end());
    try {
      l.type = parse_injection_type(f[3]);
    } catch (const DataError& e) {
      throw ParseError(lineno, e.what());
    }
    labels.push_back(std::move(l));
  }
  return labels;
}

inline std::vector<GroundTruthLabel> read_labels_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open labels '" + path + "'");
  return read_labels_csv(in);
}

// Writes tensor.csv, labels.csv and journals.tsv into `dir`.
inline void write_dataset(const std::filesystem::path& dir, const SynthDataset& ds) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw DataError("cannot write '" + (dir / name).string() + "'");
    return out;
  };
  {
    auto out = open("tensor.csv");
    write_tensor_csv(out, ds.tensor);
  }
  {
    auto out = open("labels.csv");
    write_labels_csv(out, ds.labels);
  }
  {
    auto out = open("journals.tsv");
    write_journal_table(out, ds.tensor.journals());
  }
}

}  // namespace citestack::synth
