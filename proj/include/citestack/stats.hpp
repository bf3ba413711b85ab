#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace citestack::stats {

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of empty sample");
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

// Population standard deviation (divides by n). Two-pass for stability.
inline double population_stddev(std::span<const double> xs, double mu) {
  if (xs.empty()) throw std::invalid_argument("stddev of empty sample");
  double ss = 0.0;
  for (double x : xs) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

inline double population_stddev(std::span<const double> xs) {
  return population_stddev(xs, mean(xs));
}

// Quantile of an ascending-sorted sample by linear interpolation between
// closest ranks: position h = (n - 1) * p, value = x[floor h] + frac(h) *
// (x[floor h + 1] - x[floor h]). Same as R type 7 / numpy "linear".
inline double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("quantile probability outside [0, 1]");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::vector<double> xs, double p) {
  std::sort(xs.begin(), xs.end());
  return quantile_sorted(xs, p);
}

}  // namespace citestack::stats
