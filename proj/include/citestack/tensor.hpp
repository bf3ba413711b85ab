#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "citestack/corpus.hpp"
#include "citestack/error.hpp"
#include "citestack/journals.hpp"
#include "citestack/text.hpp"

namespace citestack {

class TensorBuilder;

/// Journal-level citation counts c[sender][receiver][year].
///
/// The year of an edge is the publication year of the citing paper. Storage
/// is pair-major: one dense yearly series per pair with any non-zero count.
/// Absent keys read as 0. Diagonal (self-citation) series are stored like any
/// other; detectors skip them. Immutable after TensorBuilder::build().
class CitationTensor {
 public:
  using Series = std::vector<std::int64_t>;

  const JournalTable& journals() const noexcept { return journals_; }
  std::size_t journal_count() const noexcept { return journals_.size(); }

  int year_min() const noexcept { return year_min_; }
  int year_max() const noexcept { return year_min_ + static_cast<int>(n_years_) - 1; }
  std::size_t year_count() const noexcept { return n_years_; }
  bool contains_year(int year) const noexcept { return year >= year_min_ && year <= year_max(); }

  std::int64_t count(OrderedPair p, int year) const {
    if (!contains_year(year)) return 0;
    auto s = series(p);
    return s[static_cast<std::size_t>(year - year_min_)];
  }

  // Chronological counts for the pair, year_min() first; all zeros if absent.
  std::span<const std::int64_t> series(OrderedPair p) const {
    auto it = series_.find(p);
    if (it == series_.end()) return zeros_;
    return it->second;
  }

  std::int64_t total(OrderedPair p) const {
    auto it = totals_.find(p);
    return it == totals_.end() ? 0 : it->second;
  }

  // Sum of all citations sent by `j` in `year` (all receivers, diagonal included).
  std::int64_t out_total(JournalIndex j, int year) const { return margin(out_, j, year); }
  // Sum of all citations received by `j` in `year`.
  std::int64_t in_total(JournalIndex j, int year) const { return margin(in_, j, year); }

  std::int64_t grand_total() const noexcept { return grand_total_; }

  std::int64_t off_diagonal_total() const noexcept {
    std::int64_t sum = grand_total_;
    for (JournalIndex j = 0; j < journals_.size(); ++j) sum -= total({j, j});
    return sum;
  }

  // Pairs with a stored series, ascending by (sender, receiver).
  const std::vector<OrderedPair>& stored_pairs() const noexcept { return pairs_; }

 private:
  friend class TensorBuilder;

  std::int64_t margin(const std::vector<std::int64_t>& m, JournalIndex j, int year) const {
    if (j >= journals_.size() || !contains_year(year)) return 0;
    return m[static_cast<std::size_t>(j) * n_years_ + static_cast<std::size_t>(year - year_min_)];
  }

  JournalTable journals_;
  int year_min_ = 0;
  std::size_t n_years_ = 0;
  std::unordered_map<OrderedPair, Series, OrderedPairHash> series_;
  std::unordered_map<OrderedPair, std::int64_t, OrderedPairHash> totals_;
  std::vector<OrderedPair> pairs_;
  std::vector<std::int64_t> out_;
  std::vector<std::int64_t> in_;
  Series zeros_;
  std::int64_t grand_total_ = 0;
};

class TensorBuilder {
 public:
  TensorBuilder(JournalTable journals, int year_min, int year_max) : journals_(std::move(journals)) {
    if (year_max < year_min) throw DataError("tensor year range is empty");
    year_min_ = year_min;
    n_years_ = static_cast<std::size_t>(year_max - year_min + 1);
  }

  JournalTable& journals() noexcept { return journals_; }

  void add(OrderedPair p, int year, std::int64_t count = 1) {
    if (count < 0) throw DataError("citation counts must be non-negative");
    if (p.sender >= journals_.size() || p.receiver >= journals_.size()) {
      throw DataError("journal index out of range");
    }
    if (year < year_min_ || year >= year_min_ + static_cast<int>(n_years_)) {
      throw DataError("year " + std::to_string(year) + " outside tensor range");
    }
    if (count == 0) return;
    auto& s = series_[p];
    if (s.empty()) s.assign(n_years_, 0);
    s[static_cast<std::size_t>(year - year_min_)] += count;
  }

  CitationTensor build() && {
    CitationTensor t;
    t.year_min_ = year_min_;
    t.n_years_ = n_years_;
    t.zeros_.assign(n_years_, 0);
    const std::size_t n = journals_.size();
    t.out_.assign(n * n_years_, 0);
    t.in_.assign(n * n_years_, 0);
    for (auto& [pair, s] : series_) {
      std::int64_t sum = 0;
      for (std::size_t y = 0; y < n_years_; ++y) {
        sum += s[y];
        t.out_[pair.sender * n_years_ + y] += s[y];
        t.in_[pair.receiver * n_years_ + y] += s[y];
      }
      t.totals_.emplace(pair, sum);
      t.grand_total_ += sum;
      t.pairs_.push_back(pair);
    }
    std::sort(t.pairs_.begin(), t.pairs_.end());
    t.series_ = std::move(series_);
    t.journals_ = std::move(journals_);
    return t;
  }

 private:
  JournalTable journals_;
  int year_min_ = 0;
  std::size_t n_years_ = 0;
  std::unordered_map<OrderedPair, CitationTensor::Series, OrderedPairHash> series_;
};

/// Aggregates resolvable reference edges into journal-level counts. The edge
/// year is the citing paper's year; dangling references contribute nothing.
inline CitationTensor build_tensor(const Corpus& corpus) {
  const int lo = corpus.empty() ? 0 : corpus.year_min();
  const int hi = corpus.empty() ? 0 : corpus.year_max();
  TensorBuilder b(corpus.journals(), lo, hi);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto sender = corpus.journal_of(i);
    const int year = corpus.papers()[i].year;
    for (auto cited : corpus.resolved_references(i)) {
      b.add({sender, corpus.journal_of(cited)}, year);
    }
  }
  return std::move(b).build();
}

// Tensor CSV, version 1:
//   # citestack tensor v1 years=<min>-<max>
//   sender_id,receiver_id,year,count
//   <rows with count > 0, ordered by sender index, receiver index, year>
inline void write_tensor_csv(std::ostream& out, const CitationTensor& t) {
  out << "# citestack tensor v1 years=" << t.year_min() << '-' << t.year_max() << '\n';
  out << "sender_id,receiver_id,year,count\n";
  const auto& js = t.journals();
  for (const auto& p : t.stored_pairs()) {
    auto s = t.series(p);
    for (std::size_t y = 0; y < s.size(); ++y) {
      if (s[y] == 0) continue;
      out << js.id(p.sender) << ',' << js.id(p.receiver) << ',' << (t.year_min() + static_cast<int>(y)) << ','
          << s[y] << '\n';
    }
  }
}

namespace detail {

inline std::optional<std::pair<int, int>> parse_years_directive(std::string_view line) {
  const auto pos = line.find("years=");
  if (pos == std::string_view::npos) return std::nullopt;
  auto spec = line.substr(pos + 6);
  spec = spec.substr(0, spec.find_first_of(" \t"));
  const auto dash = spec.find('-', 1);
  if (dash == std::string_view::npos) return std::nullopt;
  auto lo = text::parse_int(spec.substr(0, dash));
  auto hi = text::parse_int(spec.substr(dash + 1));
  if (!lo || !hi) return std::nullopt;
  return std::pair{static_cast<int>(*lo), static_cast<int>(*hi)};
}

}  // namespace detail

/// Reads a tensor CSV. `journals` seeds the journal table (e.g. from a name
/// table carrying paper counts); ids first seen in the CSV are appended.
/// Without a `years=` directive the span is the observed min..max year.
inline CitationTensor read_tensor_csv(std::istream& in, JournalTable journals = {}) {
  struct Row {
    OrderedPair pair;
    int year;
    std::int64_t count;
  };
  std::vector<Row> rows;
  std::optional<std::pair<int, int>> declared;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    text::strip_cr(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (auto yr = detail::parse_years_directive(line)) declared = yr;
      continue;
    }
    if (!header_seen && line.rfind("sender_id", 0) == 0) {
      header_seen = true;
      continue;
    }
    const auto f = text::split(line, ',');
    if (f.size() != 4) throw ParseError(lineno, "tensor row needs 4 comma-separated fields");
    const auto year = text::parse_int(f[2]);
    const auto count = text::parse_int(f[3]);
    if (!year) throw ParseError(lineno, "non-integer year");
    if (!count || *count < 0) throw ParseError(lineno, "count must be a non-negative integer");
    const auto s = journals.add(std::string(text::trim(f[0])));
    const auto r = journals.add(std::string(text::trim(f[1])));
    rows.push_back({{s, r}, static_cast<int>(*year), *count});
  }
  int lo = 0;
  int hi = 0;
  if (declared) {
    std::tie(lo, hi) = *declared;
  } else if (!rows.empty()) {
    lo = hi = rows.front().year;
    for (const auto& r : rows) {
      lo = std::min(lo, r.year);
      hi = std::max(hi, r.year);
    }
  }
  TensorBuilder b(std::move(journals), lo, hi);
  for (const auto& r : rows) b.add(r.pair, r.year, r.count);
  return std::move(b).build();
}

inline CitationTensor read_tensor_csv_file(const std::string& path, JournalTable journals = {}) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open tensor '" + path + "'");
  return read_tensor_csv(in, std::move(journals));
}

}  // namespace citestack
