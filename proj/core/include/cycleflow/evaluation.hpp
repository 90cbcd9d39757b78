#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cycleflow/rng.hpp"
#include "cycleflow/simulation.hpp"

namespace cycleflow {

/// Right-continuous step function F(x) = #{x_i <= x} / n.
class Ecdf {
 public:
  /// Throws Error{EmptyInput}.
  explicit Ecdf(std::vector<double> xs);

  double operator()(double x) const;
  const std::vector<double>& xs() const { return xs_; }
  std::size_t size() const { return xs_.size(); }

 private:
  std::vector<double> xs_;
};

Ecdf ecdf(std::span<const double> xs);

/// sup |F_x - F_y| over the pooled sample points. Throws Error{EmptyInput}.
double ks_two_sample(std::span<const double> xs, std::span<const double> ys);

struct SummaryStats {
  double mean = 0.0;
  double std = 0.0;  // sample estimator, n - 1 denominator
  double median = 0.0;
  std::size_t n = 0;
};

/// Throws Error{EmptyInput}.
SummaryStats summary_stats(std::span<const double> xs);

/// #{x >= threshold} / n. Throws Error{EmptyInput}.
double fraction_exceeding(std::span<const double> xs, double threshold);

struct CrossingMeasurement {
  std::string vehicle_id;
  TurnKind kind = TurnKind::Direct;
  double enter_t = 0.0;
  double exit_t = 0.0;
  double duration = 0.0;
};

struct CrossingRegion {
  std::set<std::string> edges;
  /// Region edges that mark a pass as indirect.
  std::set<std::string> indirect_edges;
};

/// Left-turn internal edges of a network: {X_left, X_leg1, X_leg2} style
/// paths of the LeftDirect and LeftIndirect connections.
CrossingRegion left_turn_region(const Network& network);

struct CrossingResult {
  std::vector<CrossingMeasurement> measurements;
  std::size_t still_inside = 0;  // vehicles never seen leaving
};

/// enter_t is the first record on a region edge, exit_t the first record
/// after leaving it. Records may be in any order.
CrossingResult measure_crossing_durations(std::span<const TrajectoryRecord> records, const CrossingRegion& region);

struct BootstrapResult {
  double observed = 0.0;     // mean(xs) - mean(ys)
  double lower_bound = 0.0;  // one-sided percentile bound
  std::size_t resamples = 0;
};

/// One-sided percentile bootstrap of mean(xs) - mean(ys), resampling both
/// groups independently. Throws Error{EmptyInput}.
BootstrapResult bootstrap_mean_difference(std::span<const double> xs, std::span<const double> ys,
                                          double confidence, std::size_t resamples, Rng& rng);

struct VehicleMaxima {
  std::string vehicle_id;
  double max_v = 0.0;
  double max_a = 0.0;
  double max_d = 0.0;
};

/// Per-vehicle maxima recovered from trajectory records, ordered by first
/// appearance.
std::vector<VehicleMaxima> maxima_from_trajectories(std::span<const TrajectoryRecord> records);

struct StatsRow {
  std::string source;
  SummaryStats stats;
};

/// `source,mean,std,median,n`.
std::string stats_csv(const std::vector<StatsRow>& rows);
/// `x,F` at every distinct sample value.
std::string ecdf_csv(const Ecdf& f);
/// Aligned text table of the same rows.
std::string stats_table(const std::string& title, const std::vector<StatsRow>& rows);

}  // namespace cycleflow
