#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cycleflow {

struct GeoSample {
  std::int64_t timestamp_ms = 0;
  double lat = 0.0;
  double lon = 0.0;
  double accuracy_m = 0.0;  // horizontal accuracy estimate
};

enum class BikeType { Conventional, EBike, Unknown };

struct Ride {
  std::string id;
  std::string region;
  std::vector<GeoSample> samples;
  std::optional<BikeType> bike_type;
};

/// Describes the text layout of a ride file. The default matches the public
/// SimRa dataset: an incident section, a line of '=' characters, then a
/// versioned CSV section whose header names at least lat, lon, timeStamp, acc.
struct FormatProfile {
  char delimiter_char = '=';
  std::size_t min_delimiter_length = 3;
  char separator = ',';
  std::string lat_column = "lat";
  std::string lon_column = "lon";
  std::string timestamp_column = "timeStamp";
  std::string accuracy_column = "acc";
  /// Column of the first section carrying the bike code, if any.
  std::string bike_column = "bike";
  std::vector<std::string> ebike_codes = {"3"};
  std::vector<std::string> unknown_bike_codes = {"0", ""};
  /// A timestamp may step backwards by at most this much before the file is
  /// rejected; smaller inversions are sorted out.
  std::int64_t time_tolerance_ms = 1000;
};

struct ParseReport {
  std::size_t gps_rows = 0;
  std::size_t motion_rows_skipped = 0;
  std::size_t duplicate_timestamps = 0;
};

struct ParsedRide {
  Ride ride;
  ParseReport report;
};

/// Throws Error{MalformedFile | EmptyRide | NonMonotonicTime}.
ParsedRide parse_ride_file(std::string_view content, const FormatProfile& profile = {},
                           std::string id = {}, std::string region = {});

struct IngestStats {
  std::size_t files_total = 0;
  std::size_t files_used = 0;
  std::map<std::string, std::size_t> rejection_reasons;

  void reject(const std::string& reason, std::size_t count = 1) {
    rejection_reasons[reason] += count;
  }
  std::size_t rejected() const;
};

struct RideFilter {
  double accuracy_threshold_m = 20.0;
  std::size_t min_samples = 20;
  bool exclude_ebikes = true;
};

double mean_accuracy(const Ride& ride);

struct FilterResult {
  std::vector<Ride> kept;
  IngestStats stats;
};

/// Each rejected ride is counted under exactly one reason ("ebike",
/// "accuracy", "too_few_samples", checked in that order).
FilterResult filter_rides(std::vector<Ride> rides, const RideFilter& filter = {});

/// Constant-acceleration piece of a synthetic velocity plan.
struct PlanSegment {
  double duration_s = 0.0;
  double accel_ms2 = 0.0;
};

struct SynthSpec {
  std::string id = "synthetic";
  std::string region = "synthetic";
  double start_lat = 52.5125;
  double start_lon = 13.3269;
  double heading_deg = 0.0;
  std::int64_t start_time_ms = 1'600'000'000'000;
  double initial_speed = 0.0;
  std::vector<PlanSegment> plan;
  double sample_interval_s = 3.0;
  double noise_sigma_m = 0.0;
  double accuracy_m = 5.0;
};

/// Distance travelled after `t` seconds of the plan (closed-form kinematics).
double plan_distance(const SynthSpec& spec, double t);
double plan_speed(const SynthSpec& spec, double t);
double plan_duration(const SynthSpec& spec);

/// Throws Error{InvalidSpec} for negative durations or a plan whose speed
/// would go negative.
Ride synthesize_ride(const SynthSpec& spec, std::uint64_t seed);

/// Writes a ride in the default SimRa-style layout, so that
/// parse_ride_file(write_ride_file(r)) reproduces r. Motion-only rows are
/// interleaved when `motion_rows_per_gps` > 0.
std::string write_ride_file(const Ride& ride, std::size_t motion_rows_per_gps = 0);

std::string to_json(const IngestStats& stats);

}  // namespace cycleflow
