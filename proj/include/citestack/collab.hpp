#pragma once

#include <algorithm>
#include <optional>
#include <unordered_map>

#include "citestack/corpus.hpp"

namespace citestack {

/// author -> coauthor -> earliest year of a joint paper. Symmetric.
class CollaborationIndex {
 public:
  using Partners = std::unordered_map<AuthorId, int>;

  void record(const AuthorId& a, const AuthorId& b, int year) {
    if (a == b) return;
    touch(a, b, year);
    touch(b, a, year);
  }

  std::optional<int> earliest(const AuthorId& a, const AuthorId& b) const {
    auto it = index_.find(a);
    if (it == index_.end()) return std::nullopt;
    auto jt = it->second.find(b);
    if (jt == it->second.end()) return std::nullopt;
    return jt->second;
  }

  // True when a and b share a paper published strictly before `year`.
  bool collaborated_before(const AuthorId& a, const AuthorId& b, int year) const {
    auto y = earliest(a, b);
    return y && *y < year;
  }

  const Partners& partners(const AuthorId& a) const {
    static const Partners none;
    auto it = index_.find(a);
    return it == index_.end() ? none : it->second;
  }

  const std::unordered_map<AuthorId, Partners>& entries() const noexcept { return index_; }
  bool empty() const noexcept { return index_.empty(); }

 private:
  void touch(const AuthorId& a, const AuthorId& b, int year) {
    auto [it, fresh] = index_[a].emplace(b, year);
    if (!fresh) it->second = std::min(it->second, year);
  }

  std::unordered_map<AuthorId, Partners> index_;
};

inline CollaborationIndex build_collab_index(const Corpus& corpus) {
  CollaborationIndex idx;
  for (const auto& p : corpus.papers()) {
    for (std::size_t i = 0; i < p.authors.size(); ++i) {
      for (std::size_t j = i + 1; j < p.authors.size(); ++j) idx.record(p.authors[i], p.authors[j], p.year);
    }
  }
  return idx;
}

}  // namespace citestack
