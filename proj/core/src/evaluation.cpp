#include "cycleflow/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "cycleflow/error.hpp"
#include "cycleflow/stats.hpp"
#include "text_util.hpp"

namespace cycleflow {
namespace {

void require(std::span<const double> xs, const char* what) {
  if (xs.empty()) throw Error(ErrorCode::EmptyInput, std::string(what) + " is empty");
}

double resampled_mean(std::span<const double> xs, Rng& rng) {
  double sum = 0.0;
  const auto n = xs.size();
  for (std::size_t i = 0; i < n; ++i) {
    auto k = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
    sum += xs[std::min(k, n - 1)];
  }
  return sum / static_cast<double>(n);
}

}  // namespace

Ecdf::Ecdf(std::vector<double> xs) : xs_(std::move(xs)) {
  if (xs_.empty()) throw Error(ErrorCode::EmptyInput, "ecdf of an empty sample");
  std::sort(xs_.begin(), xs_.end());
}

double Ecdf::operator()(double x) const {
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  return static_cast<double>(it - xs_.begin()) / static_cast<double>(xs_.size());
}

Ecdf ecdf(std::span<const double> xs) { return Ecdf(std::vector<double>(xs.begin(), xs.end())); }

double ks_two_sample(std::span<const double> xs, std::span<const double> ys) {
  require(xs, "first sample");
  require(ys, "second sample");
  std::vector<double> a(xs.begin(), xs.end()), b(ys.begin(), ys.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() || j < b.size()) {
    double x;
    if (j == b.size() || (i < a.size() && a[i] <= b[j])) {
      x = a[i];
    } else {
      x = b[j];
    }
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

SummaryStats summary_stats(std::span<const double> xs) {
  require(xs, "sample");
  return {mean(xs), sample_std(xs), median(xs), xs.size()};
}

double fraction_exceeding(std::span<const double> xs, double threshold) {
  require(xs, "sample");
  const auto k = std::count_if(xs.begin(), xs.end(), [&](double x) { return x >= threshold; });
  return static_cast<double>(k) / static_cast<double>(xs.size());
}

CrossingRegion left_turn_region(const Network& network) {
  CrossingRegion region;
  for (const auto& c : network.connections) {
    switch (c.via) {
      case ConnectionVia::LeftDirect:
        region.edges.insert(c.path.begin(), c.path.end());
        break;
      case ConnectionVia::LeftIndirectLeg1:
      case ConnectionVia::LeftIndirectLeg2:
        region.edges.insert(c.path.begin(), c.path.end());
        region.indirect_edges.insert(c.path.begin(), c.path.end());
        break;
      default:
        break;
    }
  }
  return region;
}

CrossingResult measure_crossing_durations(std::span<const TrajectoryRecord> records, const CrossingRegion& region) {
  // Group by vehicle in first-appearance order, keeping time order inside.
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<const TrajectoryRecord*>> by_vehicle;
  for (const auto& r : records) {
    auto [it, fresh] = index.emplace(r.vehicle_id, by_vehicle.size());
    if (fresh) by_vehicle.emplace_back();
    by_vehicle[it->second].push_back(&r);
  }

  CrossingResult out;
  for (auto& recs : by_vehicle) {
    std::stable_sort(recs.begin(), recs.end(),
                     [](const TrajectoryRecord* a, const TrajectoryRecord* b) { return a->t < b->t; });
    bool inside = false;
    CrossingMeasurement m;
    for (const auto* r : recs) {
      const bool in_region = region.edges.count(r->edge) != 0;
      if (in_region && !inside) {
        inside = true;
        m = {r->vehicle_id, TurnKind::Direct, r->t, 0.0, 0.0};
      }
      if (in_region && region.indirect_edges.count(r->edge)) m.kind = TurnKind::Indirect;
      if (!in_region && inside) {
        inside = false;
        m.exit_t = r->t;
        m.duration = m.exit_t - m.enter_t;
        out.measurements.push_back(m);
      }
    }
    if (inside) ++out.still_inside;
  }
  return out;
}

BootstrapResult bootstrap_mean_difference(std::span<const double> xs, std::span<const double> ys,
                                          double confidence, std::size_t resamples, Rng& rng) {
  require(xs, "first sample");
  require(ys, "second sample");
  if (!(confidence > 0.0 && confidence < 1.0) || resamples == 0)
    throw Error(ErrorCode::ConfigError, "bootstrap needs 0 < confidence < 1 and at least one resample");
  std::vector<double> diffs(resamples);
  for (auto& d : diffs) {
    const double mx = resampled_mean(xs, rng);
    d = mx - resampled_mean(ys, rng);
  }
  std::sort(diffs.begin(), diffs.end());
  return {mean(xs) - mean(ys), quantile_sorted(diffs, 1.0 - confidence), resamples};
}

std::vector<VehicleMaxima> maxima_from_trajectories(std::span<const TrajectoryRecord> records) {
  std::map<std::string, std::size_t> index;
  std::vector<VehicleMaxima> out;
  for (const auto& r : records) {
    auto [it, fresh] = index.emplace(r.vehicle_id, out.size());
    if (fresh) out.push_back({r.vehicle_id, 0.0, 0.0, 0.0});
    auto& m = out[it->second];
    m.max_v = std::max(m.max_v, r.v);
    m.max_a = std::max(m.max_a, r.a);
    m.max_d = std::max(m.max_d, -r.a);
  }
  return out;
}

std::string stats_csv(const std::vector<StatsRow>& rows) {
  std::string out = "source,mean,std,median,n\n";
  for (const auto& r : rows)
    out += r.source + "," + detail::fixed(r.stats.mean, 4) + "," + detail::fixed(r.stats.std, 4) + "," +
           detail::fixed(r.stats.median, 4) + "," + std::to_string(r.stats.n) + "\n";
  return out;
}

std::string ecdf_csv(const Ecdf& f) {
  std::string out = "x,F\n";
  const auto& xs = f.xs();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i + 1 < xs.size() && xs[i + 1] == xs[i]) continue;
    out += detail::format_double(xs[i]) + "," + detail::format_double(static_cast<double>(i + 1) /
                                                                       static_cast<double>(xs.size())) + "\n";
  }
  return out;
}

std::string stats_table(const std::string& title, const std::vector<StatsRow>& rows) {
  std::size_t width = 6;
  for (const auto& r : rows) width = std::max(width, r.source.size());
  std::string out = title + "\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s %10s %10s %10s %8s\n", static_cast<int>(width), "source", "mean", "std",
                "median", "n");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-*s %10.4f %10.4f %10.4f %8zu\n", static_cast<int>(width), r.source.c_str(),
                  r.stats.mean, r.stats.std, r.stats.median, r.stats.n);
    out += buf;
  }
  return out;
}

}  // namespace cycleflow
