#include "cycleflow/ride.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <cmath>
#include <nlohmann/json.hpp>

#include "cycleflow/error.hpp"
#include "cycleflow/geo.hpp"
#include "cycleflow/rng.hpp"
#include "text_util.hpp"

namespace cycleflow {
namespace {

bool is_delimiter_line(std::string_view line, const FormatProfile& profile) {
  line = detail::trim(line);
  if (line.size() < profile.min_delimiter_length) return false;
  return std::all_of(line.begin(), line.end(), [&](char c) { return c == profile.delimiter_char; });
}

std::optional<std::size_t> column_index(const std::vector<std::string_view>& header,
                                        std::string_view name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (detail::trim(header[i]) == name) return i;
  return std::nullopt;
}

std::string_view field(const std::vector<std::string_view>& row, std::size_t idx) {
  return idx < row.size() ? detail::trim(row[idx]) : std::string_view{};
}

std::optional<BikeType> parse_bike_section(const std::vector<std::string_view>& lines,
                                           const FormatProfile& profile) {
  if (profile.bike_column.empty()) return std::nullopt;
  for (std::size_t i = 0; i + 1 < lines.size(); ++i) {
    const auto header = detail::split(lines[i], profile.separator);
    const auto idx = column_index(header, profile.bike_column);
    if (!idx) continue;
    const auto row = detail::split(lines[i + 1], profile.separator);
    const std::string code(field(row, *idx));
    auto contains = [&](const std::vector<std::string>& codes) {
      return std::find(codes.begin(), codes.end(), code) != codes.end();
    };
    if (contains(profile.ebike_codes)) return BikeType::EBike;
    if (contains(profile.unknown_bike_codes)) return BikeType::Unknown;
    return BikeType::Conventional;
  }
  return std::nullopt;
}

}  // namespace

ParsedRide parse_ride_file(std::string_view content, const FormatProfile& profile, std::string id,
                           std::string region) {
  const auto lines = detail::split_lines(content);
  std::size_t delim = lines.size();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (is_delimiter_line(lines[i], profile)) {
      delim = i;
      break;
    }
  }
  if (delim == lines.size()) throw Error(ErrorCode::MalformedFile, "missing section delimiter");

  ParsedRide out;
  out.ride.id = std::move(id);
  out.ride.region = std::move(region);
  out.ride.bike_type =
      parse_bike_section({lines.begin(), lines.begin() + static_cast<std::ptrdiff_t>(delim)}, profile);

  // The GPS section may start with a version line before its header.
  std::size_t header_line = lines.size();
  std::size_t lat_idx = 0, lon_idx = 0, ts_idx = 0;
  std::optional<std::size_t> acc_idx;
  for (std::size_t i = delim + 1; i < lines.size(); ++i) {
    const auto header = detail::split(lines[i], profile.separator);
    const auto la = column_index(header, profile.lat_column);
    const auto lo = column_index(header, profile.lon_column);
    const auto ts = column_index(header, profile.timestamp_column);
    if (la && lo && ts) {
      header_line = i;
      lat_idx = *la;
      lon_idx = *lo;
      ts_idx = *ts;
      acc_idx = column_index(header, profile.accuracy_column);
      break;
    }
  }
  if (header_line == lines.size()) throw Error(ErrorCode::MalformedFile, "missing GPS header");

  std::vector<GeoSample> samples;
  std::int64_t latest = std::numeric_limits<std::int64_t>::min();
  for (std::size_t i = header_line + 1; i < lines.size(); ++i) {
    if (detail::trim(lines[i]).empty()) continue;
    const auto row = detail::split(lines[i], profile.separator);
    const auto lat_s = field(row, lat_idx);
    const auto lon_s = field(row, lon_idx);
    if (lat_s.empty() || lon_s.empty()) {
      ++out.report.motion_rows_skipped;
      continue;
    }
    GeoSample s;
    const auto lat = detail::parse_double(lat_s);
    const auto lon = detail::parse_double(lon_s);
    const auto ts = detail::parse_int(field(row, ts_idx));
    if (!lat || !lon || !ts)
      throw Error(ErrorCode::MalformedFile, "unparsable GPS row at line " + std::to_string(i + 1));
    s.lat = *lat;
    s.lon = *lon;
    s.timestamp_ms = *ts;
    if (acc_idx) {
      const auto acc_s = field(row, *acc_idx);
      if (!acc_s.empty()) {
        const auto acc = detail::parse_double(acc_s);
        if (!acc || *acc < 0.0)
          throw Error(ErrorCode::MalformedFile, "bad accuracy at line " + std::to_string(i + 1));
        s.accuracy_m = *acc;
      }
    }
    if (!(s.lat >= -90.0 && s.lat <= 90.0 && s.lon >= -180.0 && s.lon <= 180.0))
      throw Error(ErrorCode::MalformedFile, "coordinate out of range at line " + std::to_string(i + 1));
    if (s.timestamp_ms + profile.time_tolerance_ms < latest)
      throw Error(ErrorCode::NonMonotonicTime,
                  "timestamp steps back " + std::to_string(latest - s.timestamp_ms) + " ms");
    latest = std::max(latest, s.timestamp_ms);
    samples.push_back(s);
  }
  out.report.gps_rows = samples.size();
  if (samples.empty()) throw Error(ErrorCode::EmptyRide, "no GPS rows");

  std::stable_sort(samples.begin(), samples.end(),
                   [](const GeoSample& a, const GeoSample& b) { return a.timestamp_ms < b.timestamp_ms; });
  const auto before = samples.size();
  samples.erase(std::unique(samples.begin(), samples.end(),
                            [](const GeoSample& a, const GeoSample& b) {
                              return a.timestamp_ms == b.timestamp_ms;
                            }),
                samples.end());
  out.report.duplicate_timestamps = before - samples.size();
  out.ride.samples = std::move(samples);
  return out;
}

std::size_t IngestStats::rejected() const {
  std::size_t total = 0;
  for (const auto& [reason, count] : rejection_reasons) total += count;
  return total;
}

double mean_accuracy(const Ride& ride) {
  if (ride.samples.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : ride.samples) sum += s.accuracy_m;
  return sum / static_cast<double>(ride.samples.size());
}

FilterResult filter_rides(std::vector<Ride> rides, const RideFilter& filter) {
  if (!(filter.accuracy_threshold_m > 0.0))
    throw Error(ErrorCode::InvalidConfig, "accuracy threshold must be positive");
  FilterResult out;
  out.stats.files_total = rides.size();
  for (auto& ride : rides) {
    if (filter.exclude_ebikes && ride.bike_type == BikeType::EBike) {
      out.stats.reject("ebike");
    } else if (mean_accuracy(ride) > filter.accuracy_threshold_m) {
      out.stats.reject("accuracy");
    } else if (ride.samples.size() < filter.min_samples) {
      out.stats.reject("too_few_samples");
    } else {
      out.kept.push_back(std::move(ride));
    }
  }
  out.stats.files_used = out.kept.size();
  return out;
}

double plan_duration(const SynthSpec& spec) {
  double total = 0.0;
  for (const auto& seg : spec.plan) total += seg.duration_s;
  return total;
}

double plan_speed(const SynthSpec& spec, double t) {
  double v = spec.initial_speed;
  for (const auto& seg : spec.plan) {
    if (t <= seg.duration_s) return v + seg.accel_ms2 * t;
    v += seg.accel_ms2 * seg.duration_s;
    t -= seg.duration_s;
  }
  return v;
}

double plan_distance(const SynthSpec& spec, double t) {
  double v = spec.initial_speed;
  double s = 0.0;
  for (const auto& seg : spec.plan) {
    const double span = std::min(t, seg.duration_s);
    s += v * span + 0.5 * seg.accel_ms2 * span * span;
    if (t <= seg.duration_s) return s;
    v += seg.accel_ms2 * seg.duration_s;
    t -= seg.duration_s;
  }
  return s + v * t;
}

Ride synthesize_ride(const SynthSpec& spec, std::uint64_t seed) {
  if (spec.initial_speed < 0.0) throw Error(ErrorCode::InvalidSpec, "negative initial speed");
  if (!(spec.sample_interval_s > 0.0)) throw Error(ErrorCode::InvalidSpec, "sample interval must be positive");
  if (spec.noise_sigma_m < 0.0 || spec.accuracy_m < 0.0)
    throw Error(ErrorCode::InvalidSpec, "negative noise or accuracy");
  double v = spec.initial_speed;
  for (const auto& seg : spec.plan) {
    if (seg.duration_s < 0.0) throw Error(ErrorCode::InvalidSpec, "negative segment duration");
    v += seg.accel_ms2 * seg.duration_s;
    if (v < -1e-12) throw Error(ErrorCode::InvalidSpec, "plan drives speed negative");
  }

  Rng rng(seed);
  Ride ride;
  ride.id = spec.id;
  ride.region = spec.region;
  ride.bike_type = BikeType::Conventional;
  const geo::LatLon origin{spec.start_lat, spec.start_lon};
  const double total = plan_duration(spec);
  const auto steps = static_cast<std::size_t>(std::floor(total / spec.sample_interval_s + 1e-9));
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * spec.sample_interval_s;
    auto p = geo::destination(origin, spec.heading_deg, plan_distance(spec, t));
    if (spec.noise_sigma_m > 0.0) {
      const double east = rng.normal() * spec.noise_sigma_m;
      const double north = rng.normal() * spec.noise_sigma_m;
      p = geo::offset_m(p, east, north);
    }
    GeoSample s;
    s.timestamp_ms = spec.start_time_ms + static_cast<std::int64_t>(std::llround(t * 1000.0));
    s.lat = p.lat;
    s.lon = p.lon;
    s.accuracy_m = spec.accuracy_m;
    ride.samples.push_back(s);
  }
  return ride;
}

std::string write_ride_file(const Ride& ride, std::size_t motion_rows_per_gps) {
  std::string out;
  out += "1#2\n";
  out += "key,lat,lon,ts,bike,childCheckBox,trailerCheckBox,pLoc,incident,scary,desc\n";
  std::string bike = "0";
  if (ride.bike_type == BikeType::Conventional) bike = "1";
  if (ride.bike_type == BikeType::EBike) bike = "3";
  out += "0,,,," + bike + ",0,0,0,0,0,\n";
  out += "\n=========================\n";
  out += "1#2\n";
  out += "lat,lon,X,Y,Z,timeStamp,acc,a,b,c\n";
  for (std::size_t i = 0; i < ride.samples.size(); ++i) {
    const auto& s = ride.samples[i];
    out += detail::format_double(s.lat) + "," + detail::format_double(s.lon) +
           ",0.01,0.02,9.81," + std::to_string(s.timestamp_ms) + "," +
           detail::format_double(s.accuracy_m) + ",,,\n";
    if (i + 1 == ride.samples.size()) break;
    const auto next = ride.samples[i + 1].timestamp_ms;
    for (std::size_t k = 0; k < motion_rows_per_gps; ++k) {
      const auto ts = s.timestamp_ms + (next - s.timestamp_ms) * static_cast<std::int64_t>(k + 1) /
                                           static_cast<std::int64_t>(motion_rows_per_gps + 1);
      out += ",,0.01,0.02,9.81," + std::to_string(ts) + ",,,,\n";
    }
  }
  return out;
}

std::string to_json(const IngestStats& stats) {
  nlohmann::json j;
  j["files_total"] = stats.files_total;
  j["files_used"] = stats.files_used;
  j["rejection_reasons"] = stats.rejection_reasons;
  return j.dump(2);
}

}  // namespace cycleflow
