#include "cycleflow/stats.hpp"

#include <algorithm>
#include <cmath>

#include "cycleflow/error.hpp"

namespace cycleflow {
namespace {

void require_data(std::span<const double> data) {
  if (data.empty()) throw Error(ErrorCode::EmptyInput, "no data");
}

}  // namespace

double quantile_sorted(std::span<const double> sorted, double p) {
  require_data(sorted);
  p = std::clamp(p, 0.0, 1.0);
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double quantile(std::span<const double> data, double p) {
  require_data(data);
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  return quantile_sorted(sorted, p);
}

double mean(std::span<const double> data) {
  require_data(data);
  // Two-pass correction keeps the result accurate for large offsets.
  double sum = 0.0;
  for (const double x : data) sum += x;
  const double m = sum / static_cast<double>(data.size());
  double corr = 0.0;
  for (const double x : data) corr += x - m;
  return m + corr / static_cast<double>(data.size());
}

double sample_std(std::span<const double> data) {
  require_data(data);
  if (data.size() == 1) return 0.0;
  const double m = mean(data);
  double ss = 0.0;
  for (const double x : data) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(data.size() - 1));
}

double median(std::span<const double> data) { return quantile(data, 0.5); }

}  // namespace cycleflow
