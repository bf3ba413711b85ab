#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "citestack/error.hpp"
#include "citestack/journals.hpp"
#include "citestack/text.hpp"

namespace citestack {

using PaperId = std::string;
using AuthorId = std::string;

struct PaperRecord {
  PaperId paper_id;
  JournalId journal_id;
  int year = 0;
  std::vector<AuthorId> authors;    // sorted, unique
  std::vector<PaperId> references;  // sorted, unique

  friend bool operator==(const PaperRecord&, const PaperRecord&) = default;
};

struct IngestOptions {
  // Declared corpus span. Unset bounds are taken from the data.
  std::optional<int> year_min;
  std::optional<int> year_max;
};

/// Validated paper-level corpus. Immutable once built.
class Corpus {
 public:
  Corpus() = default;

  // Validates and indexes `records`. Throws IngestError on duplicate ids,
  // self-references, or years outside the declared span.
  static Corpus from_records(std::vector<PaperRecord> records, const IngestOptions& options = {}) {
    Corpus c;
    c.papers_ = std::move(records);
    c.by_id_.reserve(c.papers_.size());
    for (std::size_t i = 0; i < c.papers_.size(); ++i) {
      auto& p = c.papers_[i];
      normalize(p.authors);
      normalize(p.references);
      if (p.paper_id.empty()) throw IngestError("empty paper_id");
      if (p.journal_id.empty()) throw IngestError("paper '" + p.paper_id + "' has an empty journal_id");
      if (!c.by_id_.emplace(p.paper_id, i).second) {
        throw IngestError("duplicate paper_id '" + p.paper_id + "'");
      }
      if (std::binary_search(p.references.begin(), p.references.end(), p.paper_id)) {
        throw IngestError("paper '" + p.paper_id + "' references itself");
      }
    }

    if (!c.papers_.empty()) {
      auto [lo, hi] = std::minmax_element(c.papers_.begin(), c.papers_.end(),
                                          [](const auto& a, const auto& b) { return a.year < b.year; });
      c.year_min_ = lo->year;
      c.year_max_ = hi->year;
    }
    if (options.year_min) c.year_min_ = *options.year_min;
    if (options.year_max) c.year_max_ = *options.year_max;
    if (c.year_min_ > c.year_max_) throw IngestError("declared year range is empty");
    for (const auto& p : c.papers_) {
      if (p.year < c.year_min_ || p.year > c.year_max_) {
        throw IngestError("paper '" + p.paper_id + "' year " + std::to_string(p.year) +
                          " outside declared range [" + std::to_string(c.year_min_) + ", " +
                          std::to_string(c.year_max_) + "]");
      }
    }

    c.journal_of_.reserve(c.papers_.size());
    for (const auto& p : c.papers_) {
      const auto j = c.journals_.add(p.journal_id);
      c.journal_of_.push_back(j);
      if (c.papers_of_.size() <= j) c.papers_of_.resize(j + 1);
      c.papers_of_[j].push_back(c.journal_of_.size() - 1);
    }
    for (JournalIndex j = 0; j < c.journals_.size(); ++j) {
      c.journals_.set_paper_count(j, static_cast<std::int64_t>(c.papers_of_[j].size()));
    }

    c.resolved_refs_.resize(c.papers_.size());
    for (std::size_t i = 0; i < c.papers_.size(); ++i) {
      for (const auto& ref : c.papers_[i].references) {
        if (auto it = c.by_id_.find(ref); it != c.by_id_.end()) {
          c.resolved_refs_[i].push_back(it->second);
        } else {
          ++c.dangling_;
        }
      }
    }
    return c;
  }

  const std::vector<PaperRecord>& papers() const noexcept { return papers_; }
  std::size_t size() const noexcept { return papers_.size(); }
  bool empty() const noexcept { return papers_.empty(); }

  const JournalTable& journals() const noexcept { return journals_; }
  JournalTable& journals() noexcept { return journals_; }  // for attaching display names

  int year_min() const noexcept { return year_min_; }
  int year_max() const noexcept { return year_max_; }

  std::optional<std::size_t> find(const PaperId& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
  }

  JournalIndex journal_of(std::size_t paper) const { return journal_of_.at(paper); }

  const std::vector<std::size_t>& papers_of(JournalIndex j) const {
    static const std::vector<std::size_t> none;
    return j < papers_of_.size() ? papers_of_[j] : none;
  }

  // Indices of cited papers present in the corpus.
  const std::vector<std::size_t>& resolved_references(std::size_t paper) const {
    return resolved_refs_.at(paper);
  }

  // References whose target paper_id is absent from the corpus. They are kept
  // on the records but never become citation edges.
  std::size_t dangling_references() const noexcept { return dangling_; }

  std::size_t resolved_reference_count() const noexcept {
    std::size_t n = 0;
    for (const auto& r : resolved_refs_) n += r.size();
    return n;
  }

 private:
  static void normalize(std::vector<std::string>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }

  std::vector<PaperRecord> papers_;
  std::unordered_map<PaperId, std::size_t> by_id_;
  JournalTable journals_;
  std::vector<JournalIndex> journal_of_;
  std::vector<std::vector<std::size_t>> papers_of_;
  std::vector<std::vector<std::size_t>> resolved_refs_;
  std::size_t dangling_ = 0;
  int year_min_ = 0;
  int year_max_ = 0;
};

namespace detail {

inline std::vector<std::string> split_list(std::string_view field) {
  std::vector<std::string> out;
  if (text::trim(field).empty()) return out;
  for (auto part : text::split(field, ',')) {
    part = text::trim(part);
    if (!part.empty()) out.emplace_back(part);
  }
  return out;
}

inline PaperRecord parse_tsv_record(std::string_view line, std::size_t lineno) {
  const auto fields = text::split(line, '\t');
  if (fields.size() != 5) {
    throw ParseError(lineno, "expected 5 tab-separated fields (paper_id, journal_id, year, authors, references), got " +
                                 std::to_string(fields.size()));
  }
  PaperRecord r;
  r.paper_id = std::string(text::trim(fields[0]));
  r.journal_id = std::string(text::trim(fields[1]));
  if (r.paper_id.empty()) throw ParseError(lineno, "missing paper_id");
  if (r.journal_id.empty()) throw ParseError(lineno, "missing journal_id");
  const auto year = text::parse_int(fields[2]);
  if (!year) throw ParseError(lineno, "missing or non-integer year");
  r.year = static_cast<int>(*year);
  r.authors = split_list(fields[3]);
  r.references = split_list(fields[4]);
  return r;
}

inline std::string json_id(const nlohmann::json& v, const char* key, std::size_t lineno) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  throw ParseError(lineno, std::string("'") + key + "' must be a string or integer");
}

inline PaperRecord parse_json_record(std::string_view line, std::size_t lineno) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(lineno, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(lineno, "JSON record must be an object");
  PaperRecord r;
  for (const char* key : {"paper_id", "journal_id", "year"}) {
    if (!j.contains(key) || j[key].is_null()) throw ParseError(lineno, std::string("missing '") + key + "'");
  }
  r.paper_id = json_id(j["paper_id"], "paper_id", lineno);
  r.journal_id = json_id(j["journal_id"], "journal_id", lineno);
  if (!j["year"].is_number_integer()) throw ParseError(lineno, "'year' must be an integer");
  r.year = j["year"].get<int>();
  for (const char* key : {"authors", "references"}) {
    if (!j.contains(key) || j[key].is_null()) continue;
    if (!j[key].is_array()) throw ParseError(lineno, std::string("'") + key + "' must be an array");
    auto& dst = std::string_view(key) == "authors" ? r.authors : r.references;
    for (const auto& v : j[key]) dst.push_back(json_id(v, key, lineno));
  }
  return r;
}

}  // namespace detail

/// Parses a corpus stream. Each non-blank, non-comment line is either a TSV
/// record `paper_id<TAB>journal_id<TAB>year<TAB>authors<TAB>references`
/// (comma-separated lists, possibly empty) or a JSON object with the same
/// keys; the two may be mixed.
inline Corpus ingest(std::istream& in, const IngestOptions& options = {}) {
  std::vector<PaperRecord> records;
  std::unordered_map<PaperId, std::size_t> first_line;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    text::strip_cr(line);
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto rec = body.front() == '{' ? detail::parse_json_record(body, lineno)
                                   : detail::parse_tsv_record(line, lineno);
    if (auto [it, fresh] = first_line.emplace(rec.paper_id, lineno); !fresh) {
      throw IngestError("duplicate paper_id '" + rec.paper_id + "' at line " + std::to_string(lineno) +
                        " (first seen at line " + std::to_string(it->second) + ")");
    }
    records.push_back(std::move(rec));
  }
  return Corpus::from_records(std::move(records), options);
}

inline Corpus ingest_file(const std::string& path, const IngestOptions& options = {}) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus '" + path + "'");
  return ingest(in, options);
}

// Writes the TSV form. ingest(write_corpus(c)) reproduces c.
inline void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& p : corpus.papers()) {
    out << p.paper_id << '\t' << p.journal_id << '\t' << p.year << '\t' << text::join(p.authors, ',') << '\t'
        << text::join(p.references, ',') << '\n';
  }
}

}  // namespace citestack
