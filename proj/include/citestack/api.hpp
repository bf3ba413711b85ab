#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "citestack/error.hpp"
#include "citestack/journals.hpp"
#include "citestack/scoring.hpp"
#include "citestack/tensor.hpp"
#include "citestack/text.hpp"

namespace citestack::api {

/// Read-only view over a detection run: journals.tsv, tensor.csv and
/// findings.jsonl from one directory.
class FindingsStore {
 public:
  FindingsStore(CitationTensor tensor, std::vector<AnomalyFinding> findings)
      : tensor_(std::move(tensor)), findings_(std::move(findings)) {
    by_journal_.resize(tensor_.journal_count());
    for (std::size_t i = 0; i < findings_.size(); ++i) {
      const auto& f = findings_[i];
      const auto s = tensor_.journals().find(f.sender);
      const auto r = tensor_.journals().find(f.receiver);
      if (!s || !r) throw DataError("finding references unknown journal '" + (s ? f.receiver : f.sender) + "'");
      by_journal_[*s].push_back(i);
      if (*r != *s) by_journal_[*r].push_back(i);
    }
  }

  static FindingsStore load(const std::filesystem::path& dir) {
    auto journals = read_journal_table_file((dir / "journals.tsv").string());
    auto tensor = read_tensor_csv_file((dir / "tensor.csv").string(), std::move(journals));
    auto findings = read_findings_jsonl_file((dir / "findings.jsonl").string());
    return FindingsStore(std::move(tensor), std::move(findings));
  }

  const CitationTensor& tensor() const noexcept { return tensor_; }
  const JournalTable& journals() const noexcept { return tensor_.journals(); }
  const std::vector<AnomalyFinding>& findings() const noexcept { return findings_; }
  const std::vector<std::size_t>& findings_of(JournalIndex j) const { return by_journal_.at(j); }

 private:
  CitationTensor tensor_;
  std::vector<AnomalyFinding> findings_;
  std::vector<std::vector<std::size_t>> by_journal_;
};

struct Response {
  int status = 200;
  std::string body;
};

using Params = std::multimap<std::string, std::string>;

inline constexpr std::size_t kDefaultPageSize = 20;
inline constexpr std::size_t kMaxPageSize = 500;

namespace detail {

inline Response json_response(int status, const nlohmann::ordered_json& j) { return {status, j.dump()}; }

inline Response error(int status, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = message;
  return json_response(status, j);
}

inline std::optional<std::string> param(const Params& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) return std::nullopt;
  return it->second;
}

// nullopt: absent. Throws std::invalid_argument on a malformed value.
inline std::optional<std::int64_t> int_param(const Params& p, const std::string& key) {
  auto v = param(p, key);
  if (!v) return std::nullopt;
  auto n = text::parse_int(*v);
  if (!n) throw std::invalid_argument("'" + key + "' must be an integer");
  return n;
}

inline nlohmann::ordered_json journal_json(const JournalTable& t, JournalIndex j) {
  nlohmann::ordered_json o;
  o["journal_id"] = t.id(j);
  o["name"] = t.name(j);
  o["paper_count"] = t.paper_count(j);
  return o;
}

}  // namespace detail

/// GET /v1/journals?q=&page=&page_size=
inline Response list_journals(const FindingsStore& store, const Params& params) {
  const auto q = text::lower(detail::param(params, "q").value_or(""));
  const auto page = detail::int_param(params, "page").value_or(1);
  const auto page_size = detail::int_param(params, "page_size").value_or(static_cast<std::int64_t>(kDefaultPageSize));
  if (page < 1) return detail::error(400, "'page' must be >= 1");
  if (page_size < 1 || page_size > static_cast<std::int64_t>(kMaxPageSize)) {
    return detail::error(400, "'page_size' must be in [1, " + std::to_string(kMaxPageSize) + "]");
  }
  const auto& t = store.journals();
  std::vector<JournalIndex> hits;
  for (JournalIndex j = 0; j < t.size(); ++j) {
    if (q.empty() || text::lower(t.name(j)).find(q) != std::string::npos ||
        text::lower(t.id(j)).find(q) != std::string::npos) {
      hits.push_back(j);
    }
  }
  nlohmann::ordered_json out;
  out["total"] = hits.size();
  out["page"] = page;
  out["page_size"] = page_size;
  out["journals"] = nlohmann::ordered_json::array();
  const auto begin = static_cast<std::size_t>((page - 1) * page_size);
  for (std::size_t i = begin; i < hits.size() && i < begin + static_cast<std::size_t>(page_size); ++i) {
    out["journals"].push_back(detail::journal_json(t, hits[i]));
  }
  return detail::json_response(200, out);
}

/// GET /v1/journals/{id}/anomalies?year=
inline Response journal_anomalies(const FindingsStore& store, std::string_view id, const Params& params) {
  const auto j = store.journals().find(id);
  if (!j) return detail::error(404, "unknown journal '" + std::string(id) + "'");
  const auto year = detail::int_param(params, "year");
  std::vector<const AnomalyFinding*> hits;
  for (auto i : store.findings_of(*j)) {
    const auto& f = store.findings()[i];
    if (year && (!f.year || *f.year != *year)) continue;
    hits.push_back(&f);
  }
  std::stable_sort(hits.begin(), hits.end(),
                   [](const AnomalyFinding* a, const AnomalyFinding* b) { return a->confidence > b->confidence; });
  nlohmann::ordered_json out;
  out["journal_id"] = std::string(id);
  out["year"] = year ? nlohmann::ordered_json(*year) : nlohmann::ordered_json(nullptr);
  out["anomalies"] = nlohmann::ordered_json::array();
  for (const auto* f : hits) out["anomalies"].push_back(to_json(*f));
  return detail::json_response(200, out);
}

/// GET /v1/journals/{id}/graph?year=  (year required)
/// Depth-1 neighbourhood: the journal plus the counterparts of its findings
/// in that year. Anomalous edges follow the findings (double-sided findings
/// give both directions); the reverse of an anomalous edge is included
/// unflagged when it carries citations that year.
inline Response journal_graph(const FindingsStore& store, std::string_view id, const Params& params) {
  const auto j = store.journals().find(id);
  if (!j) return detail::error(404, "unknown journal '" + std::string(id) + "'");
  const auto year = detail::int_param(params, "year");
  if (!year) return detail::error(400, "'year' is required");

  const auto& t = store.tensor();
  const auto& js = store.journals();
  std::set<JournalIndex> nodes{*j};
  std::map<OrderedPair, std::optional<double>> edges;  // confidence when anomalous
  auto flag = [&](OrderedPair p, double confidence) {
    auto& e = edges[p];
    e = std::max(e.value_or(0.0), confidence);
  };
  for (auto i : store.findings_of(*j)) {
    const auto& f = store.findings()[i];
    if (!f.year || *f.year != *year) continue;
    const OrderedPair p{js.at(f.sender), js.at(f.receiver)};
    nodes.insert(p.sender);
    nodes.insert(p.receiver);
    flag(p, f.confidence);
    if (f.behaviour && is_double_sided(*f.behaviour)) flag(p.reversed(), f.confidence);
  }
  std::vector<OrderedPair> anomalous;
  for (const auto& [p, c] : edges) anomalous.push_back(p);
  for (const auto& p : anomalous) {
    const auto r = p.reversed();
    if (!edges.count(r) && t.contains_year(static_cast<int>(*year)) && t.count(r, static_cast<int>(*year)) > 0) {
      edges.emplace(r, std::nullopt);
    }
  }

  nlohmann::ordered_json out;
  out["journal_id"] = std::string(id);
  out["year"] = *year;
  out["nodes"] = nlohmann::ordered_json::array();
  out["edges"] = nlohmann::ordered_json::array();
  auto node = [&](JournalIndex n) {
    nlohmann::ordered_json o;
    o["id"] = js.id(n);
    o["name"] = js.name(n);
    o["paper_count"] = js.paper_count(n);
    out["nodes"].push_back(std::move(o));
  };
  node(*j);
  for (auto n : nodes) {
    if (n != *j) node(n);
  }
  for (const auto& [p, c] : edges) {
    nlohmann::ordered_json e;
    e["from"] = js.id(p.sender);
    e["to"] = js.id(p.receiver);
    e["citations"] = t.contains_year(static_cast<int>(*year)) ? t.count(p, static_cast<int>(*year)) : 0;
    e["anomalous"] = c.has_value();
    e["confidence"] = c ? nlohmann::ordered_json(*c) : nlohmann::ordered_json(nullptr);
    out["edges"].push_back(std::move(e));
  }
  return detail::json_response(200, out);
}

/// Routes a GET under /v1/. Pure: same store and request, same response.
inline Response handle(const FindingsStore& store, std::string_view path, const Params& params) {
  try {
    if (path == "/v1/journals" || path == "/v1/journals/") return list_journals(store, params);
    constexpr std::string_view prefix = "/v1/journals/";
    if (path.substr(0, prefix.size()) == prefix) {
      auto rest = path.substr(prefix.size());
      const auto slash = rest.find('/');
      if (slash != std::string_view::npos && slash > 0) {
        const auto id = rest.substr(0, slash);
        const auto what = rest.substr(slash + 1);
        if (what == "anomalies") return journal_anomalies(store, id, params);
        if (what == "graph") return journal_graph(store, id, params);
      }
    }
    return detail::error(404, "no route for '" + std::string(path) + "'");
  } catch (const std::invalid_argument& e) {
    return detail::error(400, e.what());
  }
}

}  // namespace citestack::api
