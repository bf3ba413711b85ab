#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "citestack/error.hpp"
#include "citestack/explain.hpp"
#include "citestack/journals.hpp"
#include "citestack/static_detect.hpp"
#include "citestack/temporal_detect.hpp"
#include "citestack/text.hpp"

namespace citestack {

// Scores live in [floor, 1). tanh saturates to exactly 1.0 in double
// precision for inputs above ~19, so results are capped one ulp below 1.
inline const double kScoreCeiling = std::nextafter(1.0, 0.0);

inline double scaled_tanh(double x, double floor) {
  return std::min(floor + (1.0 - floor) * std::tanh(x), kScoreCeiling);
}

/// 0.5 + 0.5 * tanh(deviation), for a box-plot candidate.
inline double static_confidence(double deviation) {
  if (!(deviation > 0.0)) throw std::domain_error("static_confidence: deviation must be positive");
  return scaled_tanh(deviation, 0.5);
}

inline double static_confidence(const StaticCandidate& c) { return static_confidence(c.deviation); }

/// One-sided: 0.5 + 0.5 * tanh(z). Double-sided: 0.75 + 0.25 * tanh(min z),
/// so the weaker side bounds the score.
inline double temporal_confidence(const TemporalFinding& f) {
  if (f.z_excess.empty()) throw std::domain_error("temporal_confidence: finding without z_excess");
  const double z = *std::min_element(f.z_excess.begin(), f.z_excess.end());
  if (!(z > 0.0)) throw std::domain_error("temporal_confidence: z_excess must be positive");
  return is_double_sided(f.behaviour) ? scaled_tanh(z, 0.75) : scaled_tanh(z, 0.5);
}

inline double combine(double static_score, double temporal_score) { return (static_score + temporal_score) / 2.0; }

/// One reported anomaly. Which scores are present depends on the detector
/// that produced it: combined findings carry both, box-plot-only findings
/// have no year/behaviour/temporal_score, time-series-only findings have no
/// static_score. `confidence` is the mean of the scores present.
struct AnomalyFinding {
  JournalId sender;
  JournalId receiver;
  std::optional<int> year;
  std::optional<Behaviour> behaviour;
  double confidence = 0.5;
  std::optional<double> static_score;
  std::optional<double> temporal_score;
  std::optional<AnomalyReason> reason;
};

inline nlohmann::ordered_json to_json(const AnomalyFinding& f) {
  nlohmann::ordered_json j;
  j["sender"] = f.sender;
  j["receiver"] = f.receiver;
  j["year"] = f.year ? nlohmann::ordered_json(*f.year) : nlohmann::ordered_json(nullptr);
  j["behaviour"] = f.behaviour ? nlohmann::ordered_json(std::string(to_string(*f.behaviour)))
                               : nlohmann::ordered_json(nullptr);
  j["confidence"] = f.confidence;
  j["static_score"] = f.static_score ? nlohmann::ordered_json(*f.static_score) : nlohmann::ordered_json(nullptr);
  j["temporal_score"] = f.temporal_score ? nlohmann::ordered_json(*f.temporal_score) : nlohmann::ordered_json(nullptr);
  if (f.reason) {
    nlohmann::ordered_json r;
    r["category"] = std::string(to_string(f.reason->category));
    r["sender_pct"] = f.reason->crowding.sender_pct;
    r["receiver_pct"] = f.reason->crowding.receiver_pct;
    r["prev_collabs"] = f.reason->prev_collaborations;
    j["reason"] = std::move(r);
  } else {
    j["reason"] = nullptr;
  }
  return j;
}

namespace detail {

inline std::optional<double> opt_double(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_number()) throw DataError(std::string("'") + key + "' must be a number");
  return j[key].get<double>();
}

}  // namespace detail

inline AnomalyFinding finding_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("finding must be a JSON object");
  for (const char* key : {"sender", "receiver", "confidence"}) {
    if (!j.contains(key) || j[key].is_null()) throw DataError(std::string("finding missing '") + key + "'");
  }
  AnomalyFinding f;
  auto id = [](const nlohmann::json& v) {
    return v.is_string() ? v.get<std::string>() : std::to_string(v.get<std::int64_t>());
  };
  f.sender = id(j["sender"]);
  f.receiver = id(j["receiver"]);
  if (j.contains("year") && !j["year"].is_null()) f.year = j["year"].get<int>();
  if (j.contains("behaviour") && !j["behaviour"].is_null()) f.behaviour = parse_behaviour(j["behaviour"].get<std::string>());
  f.confidence = j["confidence"].get<double>();
  f.static_score = detail::opt_double(j, "static_score");
  f.temporal_score = detail::opt_double(j, "temporal_score");
  if (j.contains("reason") && !j["reason"].is_null()) {
    const auto& r = j["reason"];
    AnomalyReason reason;
    reason.category = parse_reason_category(r.at("category").get<std::string>());
    reason.crowding.sender_pct = r.at("sender_pct").get<double>();
    reason.crowding.receiver_pct = r.at("receiver_pct").get<double>();
    reason.prev_collaborations = r.at("prev_collabs").get<std::int64_t>();
    f.reason = reason;
  }
  return f;
}

inline void write_findings_jsonl(std::ostream& out, const std::vector<AnomalyFinding>& findings) {
  for (const auto& f : findings) out << to_json(f).dump() << '\n';
}

inline std::vector<AnomalyFinding> read_findings_jsonl(std::istream& in) {
  std::vector<AnomalyFinding> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    text::strip_cr(line);
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(finding_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(lineno, e.what());
    } catch (const DataError& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return out;
}

inline std::vector<AnomalyFinding> read_findings_jsonl_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open findings '" + path + "'");
  return read_findings_jsonl(in);
}

}  // namespace citestack
