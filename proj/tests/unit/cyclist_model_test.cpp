#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include <cycleflow/cyclist_model.hpp>
#include <cycleflow/error.hpp>

#include "fixtures.hpp"

using namespace cycleflow;

namespace {

ErrorCode error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::IoError;
}

Maneuver maneuver(ManeuverKind kind, double peak) {
  Maneuver m;
  m.kind = kind;
  m.peak_rate = peak;
  m.end_idx = 1;
  return m;
}

// Slow rides draw accelerations from a known Burr XII law; all other
// quantities come from fixed generators.
std::vector<RideKinematics> synthetic_rides(std::size_t n, Rng& rng, const DistParams& slow_accel) {
  std::vector<RideKinematics> rides;
  for (std::size_t i = 0; i < n; ++i) {
    RideKinematics k;
    k.ride_id = "r" + std::to_string(i);
    k.avg_moving_velocity = rng.uniform(2.0, 7.0);
    k.v_max = k.avg_moving_velocity * rng.uniform(1.2, 1.6);
    const bool slow = k.avg_moving_velocity <= 3.25;
    for (int j = 0; j < 6; ++j) {
      const double a = slow ? sample(DistFamily::BurrXII, slow_accel, rng) : rng.uniform(0.3, 2.0);
      k.maneuvers.push_back(maneuver(ManeuverKind::Acceleration, a));
      k.maneuvers.push_back(maneuver(ManeuverKind::Deceleration, rng.uniform(0.2, 3.0)));
    }
    rides.push_back(k);
  }
  return rides;
}

ModelConfig small_config() {
  ModelConfig c;
  c.accel_families = {DistFamily::BurrXII};
  c.decel_families = {DistFamily::JohnsonSU};
  c.vmax_families = {DistFamily::SymGenNormal};
  return c;
}

}  // namespace

TEST(Thresholds, UniformGrid) {
  const std::vector<double> grid = {0, 1, 2, 3, 4, 5, 6, 7, 8};
  const auto t = derive_thresholds(grid);
  EXPECT_DOUBLE_EQ(t.slow_max, 2.0);
  EXPECT_DOUBLE_EQ(t.fast_min, 6.0);
}

TEST(Thresholds, DegenerateInputs) {
  EXPECT_EQ(error_of([] { derive_thresholds(std::vector<double>(10, 4.0)); }), ErrorCode::DegenerateSplit);
  EXPECT_EQ(error_of([] { derive_thresholds(std::vector<double>{1, 2, 3}); }), ErrorCode::TooFewRides);
}

TEST(Thresholds, PublishedValues) {
  const auto t = ClassThresholds::published();
  EXPECT_NEAR(t.slow_max, 3.75, 1e-12);
  EXPECT_NEAR(t.fast_min, 4.9722, 1e-4);
  EXPECT_EQ(classify_ride(3.0, t), CyclistClass::Slow);
  EXPECT_EQ(classify_ride(3.75, t), CyclistClass::Slow);
  EXPECT_EQ(classify_ride(4.0, t), CyclistClass::Medium);
  EXPECT_EQ(classify_ride(t.fast_min, t), CyclistClass::Medium);
  EXPECT_EQ(classify_ride(6.0, t), CyclistClass::Fast);
}

TEST(Thresholds, QuartileSplitWithinOneRide) {
  Rng rng(71);
  for (std::size_t n = 4; n < 120; ++n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(1.0, 8.0);
    const auto t = derive_thresholds(v);
    EXPECT_GT(t.slow_max, 0.0);
    EXPECT_LT(t.slow_max, t.fast_min);
    std::map<CyclistClass, double> counts;
    for (double x : v) counts[classify_ride(x, t)] += 1;
    const double N = static_cast<double>(n);
    EXPECT_NEAR(counts[CyclistClass::Slow], 0.25 * N, 1.0) << n;
    EXPECT_NEAR(counts[CyclistClass::Medium], 0.5 * N, 1.0) << n;
    EXPECT_NEAR(counts[CyclistClass::Fast], 0.25 * N, 1.0) << n;
    EXPECT_EQ(counts[CyclistClass::All], 0.0);
    EXPECT_DOUBLE_EQ(counts[CyclistClass::Slow] + counts[CyclistClass::Medium] + counts[CyclistClass::Fast], N);
  }
}

TEST(CyclistClass, StringRoundTrip) {
  for (auto c : kAllClasses) EXPECT_EQ(cyclist_class_from_string(to_string(c)), c);
  EXPECT_THROW(cyclist_class_from_string("ebike"), Error);
}

TEST(PoolByClass, SplitsManeuversAndRides) {
  Rng rng(72);
  const auto rides = synthetic_rides(100, rng, {{4, 2}, 0, 0.9});
  const auto pools = pool_by_class(rides, {3.25, 5.75});
  std::size_t parts = 0;
  for (auto c : {CyclistClass::Slow, CyclistClass::Medium, CyclistClass::Fast}) parts += pools.at(c).rides;
  EXPECT_EQ(parts, 100u);
  EXPECT_EQ(pools.at(CyclistClass::All).rides, 100u);
  EXPECT_EQ(pools.at(CyclistClass::All).accel.size(), 600u);
  EXPECT_EQ(pools.at(CyclistClass::All).decel.size(), 600u);
  EXPECT_EQ(pools.at(CyclistClass::All).vmax.size(), 100u);
}

TEST(BuildClassModels, RecoversSlowGeneratorAndPooledFit) {
  Rng rng(73);
  const DistParams slow_accel{{4, 2}, 0, 0.9};
  const auto rides = synthetic_rides(1600, rng, slow_accel);
  const ClassThresholds t{3.25, 5.75};
  const auto config = small_config();
  const auto models = build_class_models(rides, t, config);

  const auto pools = pool_by_class(rides, t);
  const auto& slow = pools.at(CyclistClass::Slow).accel;
  ASSERT_GT(slow.size(), 1000u);
  const auto& fit = models.fits.at(CyclistClass::Slow).accel.front();
  EXPECT_EQ(fit.family, DistFamily::BurrXII);
  EXPECT_GE(fit.loglik, log_likelihood(DistFamily::BurrXII, slow_accel, slow) - 1e-3 * static_cast<double>(slow.size()));
  EXPECT_LT(ks_statistic(slow, fit.family, fit.params), ks_critical_1pct(slow.size()));

  // The All view is just a fit over the pooled data.
  const auto& all = pools.at(CyclistClass::All).vmax;
  const auto direct = fit_mle(DistFamily::SymGenNormal, all, config.fit);
  EXPECT_NEAR(models.fits.at(CyclistClass::All).vmax.front().loglik, direct.loglik, 1e-9 * std::abs(direct.loglik));

  for (auto c : kAllClasses) EXPECT_EQ(models.specs.at(c).cyclist_class, c);
  EXPECT_DOUBLE_EQ(models.specs.at(CyclistClass::Medium).p_indirect, 0.87);
  EXPECT_DOUBLE_EQ(models.specs.at(CyclistClass::Fast).p_indirect, 0.50);
  EXPECT_DOUBLE_EQ(models.specs.at(CyclistClass::All).p_indirect, 0.61);
}

TEST(BuildClassModels, JobsDoNotChangeResults) {
  Rng rng(74);
  const auto rides = synthetic_rides(200, rng, {{4, 2}, 0, 0.9});
  auto config = small_config();
  const auto a = build_class_models(rides, {3.25, 5.75}, config);
  config.jobs = 4;
  const auto b = build_class_models(rides, {3.25, 5.75}, config);
  for (auto c : kAllClasses) {
    EXPECT_EQ(a.fits.at(c).accel.front().params.shape, b.fits.at(c).accel.front().params.shape);
    EXPECT_EQ(a.fits.at(c).vmax.front().loglik, b.fits.at(c).vmax.front().loglik);
  }
}

TEST(BuildClassModels, EmptyClassRejected) {
  Rng rng(75);
  auto rides = synthetic_rides(100, rng, {{4, 2}, 0, 0.9});
  EXPECT_EQ(error_of([&] { build_class_models(rides, {0.5, 1.0}, small_config()); }), ErrorCode::EmptyClass);
}

TEST(SampleVtype, ScalarDefaults) {
  const auto spec = sumo_default_spec();
  Rng rng(76);
  for (int i = 0; i < 20; ++i) {
    const auto p = sample_vtype(spec, rng);
    EXPECT_DOUBLE_EQ(p.a_max, 1.2);
    EXPECT_DOUBLE_EQ(p.d_max, 3.0);
    EXPECT_DOUBLE_EQ(p.v_max, 5.56);
  }
}

TEST(SampleVtype, DistributionOutputsRespectBounds) {
  auto spec = fixtures::reference_spec();
  spec.accel_bounds = {0.2, 1.0};
  Rng rng(77);
  for (int i = 0; i < 5000; ++i) {
    const auto p = sample_vtype(spec, rng);
    EXPECT_TRUE(spec.accel_bounds.contains(p.a_max));
    EXPECT_TRUE(spec.decel_bounds.contains(p.d_max));
    EXPECT_TRUE(spec.vmax_bounds.contains(p.v_max));
    EXPECT_GT(p.a_max, 0.0);
    EXPECT_GT(p.d_max, 0.0);
    EXPECT_GT(p.v_max, 0.0);
    EXPECT_GE(p.p_indirect, 0.0);
    EXPECT_LE(p.p_indirect, 1.0);
    EXPECT_GE(p.min_gap, 0.0);
    EXPECT_GT(p.length, 0.0);
  }
}

TEST(SampleVtype, VmaxFollowsItsDistribution) {
  // Bounds wide enough that truncation leaves the law untouched.
  auto spec = fixtures::reference_spec();
  const auto& vmax = std::get<FittedDist>(spec.vmax);
  Rng rng(78);
  std::vector<double> xs;
  for (int i = 0; i < 10'000; ++i) xs.push_back(sample_vtype(spec, rng).v_max);
  EXPECT_LT(ks_statistic(xs, vmax.family, vmax.params), ks_critical_1pct(xs.size()));
}

TEST(SampleVtype, TruncationExhausted) {
  auto spec = fixtures::reference_spec();
  spec.vmax_bounds = {14.0, 15.0};  // far in the tail of the vmax law
  Rng rng(79);
  EXPECT_EQ(error_of([&] { sample_vtype(spec, rng); }), ErrorCode::TruncationExhausted);
}

TEST(SpecValidation, RejectsBadBoundsAndScalars) {
  auto spec = sumo_default_spec();
  EXPECT_NO_THROW(spec.validate());
  spec.accel_bounds = {2.0, 1.0};
  EXPECT_THROW(spec.validate(), Error);
  spec = sumo_default_spec();
  spec.p_indirect = 1.5;
  EXPECT_THROW(spec.validate(), Error);
  spec = sumo_default_spec();
  spec.vmax = -1.0;
  EXPECT_THROW(spec.validate(), Error);
}

TEST(ExportSumo, ScalarSpecGivesIdenticalEntries) {
  const auto xml = export_sumo_vtypes(sumo_default_spec(), 3, 1);
  const auto parsed = parse_sumo_vtypes(xml);
  ASSERT_EQ(parsed.size(), 3u);
  std::set<std::string> ids;
  for (const auto& v : parsed) {
    ids.insert(v.id);
    EXPECT_EQ(v.vclass, "bicycle");
    EXPECT_DOUBLE_EQ(v.params.a_max, 1.2);
    EXPECT_DOUBLE_EQ(v.params.d_max, 3.0);
    EXPECT_DOUBLE_EQ(v.params.v_max, 5.56);
  }
  EXPECT_EQ(ids.size(), 3u);
  EXPECT_NE(xml.find("accel=\"1.2000\""), std::string::npos);
  EXPECT_NE(xml.find("<vTypeDistribution"), std::string::npos);
}

TEST(ExportSumo, ByteStableUnderSeed) {
  const auto spec = fixtures::reference_spec();
  EXPECT_EQ(export_sumo_vtypes(spec, 50, 9), export_sumo_vtypes(spec, 50, 9));
  EXPECT_NE(export_sumo_vtypes(spec, 50, 9), export_sumo_vtypes(spec, 50, 10));
  EXPECT_THROW(export_sumo_vtypes(spec, 0, 9), Error);
}

TEST(ExportSumo, ParsedValuesFollowSpec) {
  const auto spec = fixtures::reference_spec();
  const auto parsed = parse_sumo_vtypes(export_sumo_vtypes(spec, 500, 3));
  ASSERT_EQ(parsed.size(), 500u);
  std::vector<double> vmax;
  for (const auto& v : parsed) vmax.push_back(v.params.v_max);
  const auto& law = std::get<FittedDist>(spec.vmax);
  EXPECT_LT(ks_statistic(vmax, law.family, law.params), ks_critical_1pct(vmax.size()));
}

TEST(ExportSumo, MalformedXmlRejected) {
  EXPECT_THROW(parse_sumo_vtypes("<additional><vType id=\"a\"/>"), Error);
  EXPECT_THROW(parse_sumo_vtypes("<additional><vTypeDistribution id=\"d\"><vType id=\"a\"/></vTypeDistribution></additional>"),
               Error);
}
