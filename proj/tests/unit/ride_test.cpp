#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include <cycleflow/error.hpp>
#include <cycleflow/geo.hpp>
#include <cycleflow/preprocess.hpp>
#include <cycleflow/ride.hpp>
#include <cycleflow/rng.hpp>

#include "oracles.hpp"

using namespace cycleflow;

namespace {

const char* kHeader =
    "66#2\n"
    "key,lat,lon,ts,bike,childCheckBox\n"
    "0,,,,1,0\n"
    "\n"
    "=========================\n"
    "66#2\n"
    "lat,lon,X,Y,Z,timeStamp,acc,a,b,c\n";

std::string gps_row(double lat, double lon, long long ts, double acc) {
  return std::to_string(lat) + "," + std::to_string(lon) + ",0.1,0.2,9.8," + std::to_string(ts) + "," +
         std::to_string(acc) + ",,,\n";
}

std::string motion_row(long long ts) { return ",,0.1,0.2,9.8," + std::to_string(ts) + ",,,,\n"; }

ErrorCode code_of(const std::string& content) {
  try {
    parse_ride_file(content);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::IoError;
}

Ride ride_with(std::size_t n, double accuracy, std::optional<BikeType> bike = BikeType::Conventional) {
  Ride r;
  r.bike_type = bike;
  for (std::size_t i = 0; i < n; ++i)
    r.samples.push_back({static_cast<std::int64_t>(i) * 3000, 52.5, 13.4 + 1e-4 * static_cast<double>(i), accuracy});
  return r;
}

}  // namespace

TEST(ParseRideFile, ThreeGpsRows) {
  std::string content = kHeader;
  for (int i = 0; i < 3; ++i) content += gps_row(52.5 + 1e-4 * i, 13.4, 1000 + 3000 * i, 4.0);
  const auto parsed = parse_ride_file(content, {}, "r1", "Berlin");
  ASSERT_EQ(parsed.ride.samples.size(), 3u);
  EXPECT_EQ(parsed.ride.id, "r1");
  EXPECT_EQ(parsed.ride.region, "Berlin");
  EXPECT_EQ(parsed.ride.samples[2].timestamp_ms, 7000);
  EXPECT_DOUBLE_EQ(parsed.ride.samples[1].accuracy_m, 4.0);
  EXPECT_EQ(parsed.ride.bike_type, BikeType::Conventional);
}

TEST(ParseRideFile, MotionRowsCountedNotStored) {
  std::string content = kHeader;
  content += gps_row(52.5, 13.4, 0, 5);
  for (int i = 0; i < 4; ++i) content += motion_row(500 * (i + 1));
  content += gps_row(52.5001, 13.4, 3000, 5);
  for (int i = 0; i < 4; ++i) content += motion_row(3000 + 500 * (i + 1));
  const auto parsed = parse_ride_file(content);
  EXPECT_EQ(parsed.ride.samples.size(), 2u);
  EXPECT_EQ(parsed.report.motion_rows_skipped, 8u);
  EXPECT_EQ(parsed.report.gps_rows, 2u);
}

TEST(ParseRideFile, MissingSectionsAreMalformed) {
  EXPECT_EQ(code_of("lat,lon,timeStamp,acc\n52.5,13.4,0,5\n"), ErrorCode::MalformedFile);
  EXPECT_EQ(code_of("key,bike\n0,1\n=====\nfoo,bar\n1,2\n"), ErrorCode::MalformedFile);
  EXPECT_EQ(code_of(""), ErrorCode::MalformedFile);
}

TEST(ParseRideFile, NoGpsRowsIsEmptyRide) {
  std::string content = kHeader;
  content += motion_row(0) + motion_row(500);
  EXPECT_EQ(code_of(content), ErrorCode::EmptyRide);
  EXPECT_EQ(code_of(kHeader), ErrorCode::EmptyRide);
}

TEST(ParseRideFile, TimeReversalBeyondToleranceFails) {
  std::string content = kHeader;
  content += gps_row(52.5, 13.4, 10'000, 5) + gps_row(52.5, 13.4, 7'000, 5);
  EXPECT_EQ(code_of(content), ErrorCode::NonMonotonicTime);
}

TEST(ParseRideFile, SmallJitterIsSortedAndDuplicatesDropped) {
  std::string content = kHeader;
  content += gps_row(52.5, 13.4, 3000, 1) + gps_row(52.6, 13.4, 2800, 2) + gps_row(52.7, 13.4, 3000, 3) +
             gps_row(52.8, 13.4, 6000, 4);
  const auto parsed = parse_ride_file(content);
  ASSERT_EQ(parsed.ride.samples.size(), 3u);
  EXPECT_EQ(parsed.report.duplicate_timestamps, 1u);
  EXPECT_EQ(parsed.ride.samples[0].timestamp_ms, 2800);
  EXPECT_EQ(parsed.ride.samples[1].timestamp_ms, 3000);
  // The first of the two equal timestamps survives.
  EXPECT_NEAR(parsed.ride.samples[1].lat, 52.5, 1e-9);
  for (std::size_t i = 1; i < parsed.ride.samples.size(); ++i)
    EXPECT_LT(parsed.ride.samples[i - 1].timestamp_ms, parsed.ride.samples[i].timestamp_ms);
}

TEST(ParseRideFile, OutOfRangeCoordinatesAreMalformed) {
  std::string content = kHeader;
  content += gps_row(95.0, 13.4, 0, 5);
  EXPECT_EQ(code_of(content), ErrorCode::MalformedFile);
}

TEST(ParseRideFile, EbikeCodeAndCustomProfile) {
  std::string content = "key,bike\n0,3\n=====\nlat,lon,timeStamp\n52.5,13.4,0\n";
  EXPECT_EQ(parse_ride_file(content).ride.bike_type, BikeType::EBike);

  FormatProfile profile;
  profile.separator = ';';
  profile.delimiter_char = '#';
  profile.lat_column = "latitude";
  const auto parsed = parse_ride_file("bike\n1\n####\nlatitude;lon;timeStamp;extra\n52.5;13.4;0;x\n", profile);
  EXPECT_EQ(parsed.ride.samples.size(), 1u);
  EXPECT_EQ(parsed.ride.bike_type, BikeType::Conventional);
}

TEST(ParseRideFile, TotalOverRandomGarbage) {
  Rng rng(3);
  const std::string alphabet = "0123456789.,-=\nlatontimeStampacc ";
  for (int i = 0; i < 500; ++i) {
    std::string content = i % 2 ? kHeader : "";
    const auto len = static_cast<std::size_t>(rng.uniform(0, 300));
    for (std::size_t k = 0; k < len; ++k)
      content += alphabet[static_cast<std::size_t>(rng.uniform() * static_cast<double>(alphabet.size()))];
    try {
      const auto parsed = parse_ride_file(content);
      EXPECT_FALSE(parsed.ride.samples.empty());
    } catch (const Error&) {
    }
  }
}

TEST(FilterRides, AccuracyGate) {
  std::vector<Ride> rides = {ride_with(30, 5.0), ride_with(30, 50.0)};
  const auto out = filter_rides(rides, {20.0, 20, true});
  EXPECT_EQ(out.kept.size(), 1u);
  EXPECT_EQ(out.stats.rejection_reasons.at("accuracy"), 1u);
}

TEST(FilterRides, CountsAddUp) {
  std::vector<Ride> rides;
  for (int i = 0; i < 6; ++i) rides.push_back(ride_with(25, 3.0));
  rides.push_back(ride_with(25, 40.0));
  rides.push_back(ride_with(5, 3.0));
  rides.push_back(ride_with(25, 3.0, BikeType::EBike));
  rides.push_back(ride_with(25, 30.0));
  const auto out = filter_rides(rides);
  EXPECT_EQ(out.stats.files_total, 10u);
  EXPECT_EQ(out.stats.files_used, 6u);
  EXPECT_EQ(out.stats.files_used + out.stats.rejected(), out.stats.files_total);
  EXPECT_EQ(out.stats.rejection_reasons.at("ebike"), 1u);
  EXPECT_EQ(out.stats.rejection_reasons.at("too_few_samples"), 1u);
  EXPECT_EQ(out.stats.rejection_reasons.at("accuracy"), 2u);
}

TEST(FilterRides, EbikesKeptOnRequestAndThresholdValidated) {
  const auto out = filter_rides({ride_with(25, 3.0, BikeType::EBike)}, {20.0, 20, false});
  EXPECT_EQ(out.kept.size(), 1u);
  EXPECT_THROW(filter_rides({}, {0.0, 20, true}), Error);
  EXPECT_TRUE(filter_rides({}).kept.empty());
}

TEST(SynthesizeRide, ConstantSpeedSpacing) {
  SynthSpec spec;
  spec.plan = {{30.0, 0.0}};
  spec.initial_speed = 5.0;
  const auto ride = synthesize_ride(spec, 1);
  ASSERT_EQ(ride.samples.size(), 11u);
  for (std::size_t i = 1; i < ride.samples.size(); ++i) {
    const auto& a = ride.samples[i - 1];
    const auto& b = ride.samples[i];
    EXPECT_NEAR(oracle::chord_distance_m(a.lat, a.lon, b.lat, b.lon), 15.0, 1e-6);
    EXPECT_EQ(b.timestamp_ms - a.timestamp_ms, 3000);
  }
}

TEST(SynthesizeRide, DeterministicUnderSeed) {
  SynthSpec spec;
  spec.plan = {{20.0, 0.3}, {30.0, -0.1}};
  spec.noise_sigma_m = 3.0;
  const auto a = synthesize_ride(spec, 42);
  const auto b = synthesize_ride(spec, 42);
  const auto c = synthesize_ride(spec, 43);
  EXPECT_EQ(write_ride_file(a), write_ride_file(b));
  EXPECT_NE(write_ride_file(a), write_ride_file(c));
}

TEST(SynthesizeRide, RampMatchesClosedForm) {
  SynthSpec spec;
  spec.plan = {{25.0, 0.2}, {30.0, 0.0}};
  EXPECT_NEAR(plan_distance(spec, 25.0), 5.0 * 5.0 / (2 * 0.2), 1e-12);
  EXPECT_NEAR(plan_speed(spec, 25.0), 5.0, 1e-12);
  const auto ride = synthesize_ride(spec, 1);
  const auto& first = ride.samples.front();
  // Samples at 24 s and 27 s bracket the end of the ramp.
  const auto& s24 = ride.samples[8];
  EXPECT_NEAR(oracle::chord_distance_m(first.lat, first.lon, s24.lat, s24.lon), 0.1 * 24 * 24, 1e-6);
  const auto& s27 = ride.samples[9];
  EXPECT_NEAR(oracle::chord_distance_m(first.lat, first.lon, s27.lat, s27.lon), 62.5 + 5.0 * 2, 1e-6);
}

TEST(SynthesizeRide, NoiselessReconstructionRecoversSpeeds) {
  SynthSpec spec;
  spec.initial_speed = 3.0;
  spec.plan = {{30.0, 0.0}, {30.0, 0.0}};
  spec.heading_deg = 37.0;
  const auto profile = compute_velocity_profile(synthesize_ride(spec, 9));
  for (const auto& s : profile.samples) EXPECT_NEAR(s.v, 3.0, 1e-9);
}

TEST(SynthesizeRide, InvalidPlans) {
  SynthSpec spec;
  spec.plan = {{-1.0, 0.0}};
  EXPECT_THROW(synthesize_ride(spec, 1), Error);
  spec.plan = {{10.0, -1.0}};
  spec.initial_speed = 2.0;
  EXPECT_THROW(synthesize_ride(spec, 1), Error);
  spec.plan = {};
  spec.initial_speed = -1.0;
  EXPECT_THROW(synthesize_ride(spec, 1), Error);
}

TEST(WriteRideFile, RoundTripsThroughParser) {
  SynthSpec spec;
  spec.initial_speed = 4.0;
  spec.plan = {{60.0, 0.0}};
  spec.accuracy_m = 7.5;
  const auto ride = synthesize_ride(spec, 5);
  const auto parsed = parse_ride_file(write_ride_file(ride, 3));
  ASSERT_EQ(parsed.ride.samples.size(), ride.samples.size());
  EXPECT_EQ(parsed.report.motion_rows_skipped, 3 * (ride.samples.size() - 1));
  for (std::size_t i = 0; i < ride.samples.size(); ++i) {
    EXPECT_EQ(parsed.ride.samples[i].timestamp_ms, ride.samples[i].timestamp_ms);
    EXPECT_NEAR(parsed.ride.samples[i].lat, ride.samples[i].lat, 1e-9);
    EXPECT_NEAR(parsed.ride.samples[i].accuracy_m, 7.5, 1e-12);
  }
}

TEST(Geo, HaversineAgainstChordOracle) {
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    const geo::LatLon a{rng.uniform(-60, 60), rng.uniform(-170, 170)};
    const geo::LatLon b{a.lat + rng.uniform(-0.05, 0.05), a.lon + rng.uniform(-0.05, 0.05)};
    EXPECT_NEAR(geo::haversine_m(a, b), oracle::chord_distance_m(a.lat, a.lon, b.lat, b.lon), 1e-6);
  }
}

TEST(Geo, DestinationTravelsRequestedDistance) {
  const geo::LatLon o{52.5, 13.4};
  for (double bearing : {0.0, 45.0, 90.0, 200.0}) {
    const auto d = geo::destination(o, bearing, 250.0);
    EXPECT_NEAR(geo::haversine_m(o, d), 250.0, 1e-6);
  }
}
