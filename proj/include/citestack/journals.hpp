#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "citestack/error.hpp"
#include "citestack/text.hpp"

namespace citestack {

using JournalId = std::string;
using JournalIndex = std::uint32_t;

// Directed journal pair, by dense index into a JournalTable.
struct OrderedPair {
  JournalIndex sender = 0;
  JournalIndex receiver = 0;

  OrderedPair reversed() const { return {receiver, sender}; }
  friend auto operator<=>(const OrderedPair&, const OrderedPair&) = default;
};

struct OrderedPairHash {
  std::size_t operator()(const OrderedPair& p) const noexcept {
    return std::hash<std::uint64_t>{}((std::uint64_t{p.sender} << 32) | p.receiver);
  }
};

/// Maps opaque journal ids to dense indices and carries per-journal metadata
/// (display name, paper count). Insertion order defines the index order.
class JournalTable {
 public:
  JournalIndex add(const JournalId& id) {
    if (auto it = index_.find(id); it != index_.end()) return it->second;
    const auto idx = static_cast<JournalIndex>(ids_.size());
    ids_.push_back(id);
    names_.emplace_back();
    paper_counts_.push_back(0);
    index_.emplace(id, idx);
    return idx;
  }

  std::optional<JournalIndex> find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  JournalIndex at(std::string_view id) const {
    if (auto idx = find(id)) return *idx;
    throw DataError("unknown journal id '" + std::string(id) + "'");
  }

  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }

  const JournalId& id(JournalIndex i) const { return ids_.at(i); }
  const std::vector<JournalId>& ids() const noexcept { return ids_; }

  // Falls back to the id when no display name was registered.
  const std::string& name(JournalIndex i) const {
    return names_.at(i).empty() ? ids_.at(i) : names_.at(i);
  }
  void set_name(JournalIndex i, std::string name) { names_.at(i) = std::move(name); }

  std::int64_t paper_count(JournalIndex i) const { return paper_counts_.at(i); }
  void set_paper_count(JournalIndex i, std::int64_t n) { paper_counts_.at(i) = n; }
  const std::vector<std::int64_t>& paper_counts() const noexcept { return paper_counts_; }

 private:
  std::vector<JournalId> ids_;
  std::vector<std::string> names_;
  std::vector<std::int64_t> paper_counts_;
  std::unordered_map<JournalId, JournalIndex> index_;
};

// Journal name table: `journal_id<TAB>display_name[<TAB>paper_count]`.
// Blank lines and lines starting with '#' are ignored. Rows are merged into
// `table` (new ids are appended).
inline void read_journal_table(std::istream& in, JournalTable& table) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    text::strip_cr(line);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = text::split(line, '\t');
    if (fields.size() != 2 && fields.size() != 3) {
      throw ParseError(lineno, "journal table row needs 2 or 3 tab-separated fields");
    }
    if (fields[0].empty()) throw ParseError(lineno, "empty journal_id");
    const auto idx = table.add(std::string(fields[0]));
    table.set_name(idx, std::string(fields[1]));
    if (fields.size() == 3) {
      const auto count = text::parse_int(fields[2]);
      if (!count || *count < 0) throw ParseError(lineno, "paper_count must be a non-negative integer");
      table.set_paper_count(idx, *count);
    }
  }
}

inline JournalTable read_journal_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open journal table '" + path + "'");
  JournalTable table;
  read_journal_table(in, table);
  return table;
}

inline void write_journal_table(std::ostream& out, const JournalTable& table) {
  out << "# citestack journals v1: journal_id<TAB>display_name<TAB>paper_count\n";
  for (JournalIndex i = 0; i < table.size(); ++i) {
    out << table.id(i) << '\t' << table.name(i) << '\t' << table.paper_count(i) << '\n';
  }
}

}  // namespace citestack
