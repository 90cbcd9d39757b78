// Acceptance checks. One line per criterion: "criterion N: PASS|FAIL|SKIP ...".
// Exits nonzero if any criterion fails.
//
// Criterion 11 needs the public SimRa rides; point CYCLEFLOW_SIMRA_DIR at the
// unpacked dataset to run it.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <cycleflow/cyclist_model.hpp>
#include <cycleflow/distributions.hpp>
#include <cycleflow/error.hpp>
#include <cycleflow/evaluation.hpp>
#include <cycleflow/fitting.hpp>
#include <cycleflow/maneuver.hpp>
#include <cycleflow/preprocess.hpp>
#include <cycleflow/ride.hpp>
#include <cycleflow/scenario.hpp>
#include <cycleflow/serialization.hpp>
#include <cycleflow/simulation.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cycleflow;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
  Verdict verdict = Verdict::Fail;
  std::string detail;
};

Outcome pass_if(bool ok, std::string detail) { return {ok ? Verdict::Pass : Verdict::Fail, std::move(detail)}; }

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. MLE round trip on 5e4 own samples, all families, under two minutes.
Outcome distribution_round_trip() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = 50'000;
  bool ok = true;
  std::ostringstream d;
  for (const auto& c : fixtures::reference_families()) {
    Rng rng(Rng::substream(11, static_cast<std::uint64_t>(c.family)).next_u64());
    const auto data = sample_n(c.family, c.params, n, rng);
    const double truth = log_likelihood(c.family, c.params, data);
    FittedDist fit;
    try {
      fit = fit_mle(c.family, data);
    } catch (const Error& e) {
      d << " " << to_string(c.family) << ":" << e.what();
      ok = false;
      continue;
    }
    const bool good = fit.loglik >= truth - 1e-3 * static_cast<double>(n) && fit.ks_stat < 0.02;
    ok = ok && good;
    d << " " << to_string(c.family) << "(dLL=" << fmt("%.2f", fit.loglik - truth) << ",KS=" << fmt("%.4f", fit.ks_stat)
      << ")";
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 120.0;
  return pass_if(ok, "runtime " + fmt("%.1f", secs) + " s;" + d.str());
}

// 2. Quadrature of each pdf over its truncated support.
Outcome pdf_normalization() {
  bool ok = true;
  std::ostringstream d;
  for (const auto& c : fixtures::reference_families()) {
    const double mass = oracle::integrate_pdf(c.family, c.params);
    ok = ok && mass >= 0.9999 && mass <= 1.0001;
    d << " " << to_string(c.family) << "=" << fmt("%.7f", mass);
  }
  return pass_if(ok, d.str());
}

// 3. One-sample KS of 1e5 draws against the family's cdf.
Outcome sampler_correctness() {
  const std::size_t n = 100'000;
  const double crit = ks_critical_1pct(n);
  bool ok = true;
  std::ostringstream d;
  d << " critical " << fmt("%.5f", crit) << ";";
  for (const auto& c : fixtures::reference_families()) {
    Rng rng(Rng::substream(23, static_cast<std::uint64_t>(c.family)).next_u64());
    const auto xs = sample_n(c.family, c.params, n, rng);
    const double ks = ks_statistic(xs, c.family, c.params);
    ok = ok && ks < crit;
    d << " " << to_string(c.family) << "=" << fmt("%.5f", ks);
  }
  return pass_if(ok, d.str());
}

// 4. Closed-form pdf anchors.
Outcome pdf_anchors() {
  const double burr = pdf(DistFamily::BurrXII, {{1.0, 1.0}, 0.0, 1.0}, 1.0);
  const double sgn = pdf(DistFamily::SymGenNormal, {{2.0}, 0.0, 1.0}, 0.0);
  const double jsu = pdf(DistFamily::JohnsonSU, {{0.0, 1.0}, 0.0, 1.0}, 0.0);
  const bool ok = std::abs(burr - 0.25) < 1e-12 && std::abs(sgn - 1.0 / std::sqrt(M_PI)) < 1e-9 &&
                  std::abs(jsu - 0.398942) < 1e-6;
  return pass_if(ok, "BurrXII(1,1)@1=" + fmt("%.12f", burr) + " SymGenNormal(2)@0=" + fmt("%.12f", sgn) +
                         " JohnsonSU(0,1)@0=" + fmt("%.9f", jsu));
}

bool same_maneuvers(const std::vector<Maneuver>& a, const std::vector<Maneuver>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].start_idx != b[i].start_idx || a[i].end_idx != b[i].end_idx || a[i].kind != b[i].kind) return false;
    if (a[i].distance != b[i].distance || a[i].duration != b[i].duration || a[i].peak_rate != b[i].peak_rate)
      return false;
  }
  return true;
}

// 5. Pipeline vs brute-force oracle, plus one fixture per rule boundary.
Outcome maneuver_oracle() {
  const ManeuverRules rules;
  Rng rng(5);
  std::size_t mismatches = 0, kept = 0, profiles_with_maneuvers = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = fixtures::random_profile(rng, 50);
    std::vector<Maneuver> got;
    try {
      got = extract_kinematics(p, 0.5, rules).maneuvers;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoMovement) throw;
    }
    const auto want = oracle::brute_force_maneuvers(p, rules);
    if (!same_maneuvers(got, want)) ++mismatches;
    kept += want.size();
    profiles_with_maneuvers += !want.empty();
  }

  struct Boundary {
    const char* name;
    VelocityProfile profile;
    bool kept;
  };
  using fixtures::profile;
  using fixtures::profile_at;
  const std::vector<double> t5 = {0, 1, 2, 3, 4, 5};
  const std::vector<Boundary> boundaries = {
      {"distance 20 m kept", profile_at(t5, {1, 2, 3, 5, 6, 7}), true},
      {"distance 19.75 m dropped", profile_at(t5, {1, 2, 3, 4.75, 6, 7}), false},
      {"distance 350 m kept", profile_at({0, 10, 20, 30, 40}, {1, 8, 9.5, 11, 12}), true},
      {"distance 352.5 m dropped", profile_at({0, 10, 20, 30, 40}, {1, 8, 9.75, 11, 12}), false},
      {"duration 5 s kept", profile_at(t5, {2, 4, 6, 8, 10, 12}), true},
      {"duration 4.75 s dropped", profile_at({0, 1, 2, 3, 4, 4.75}, {2, 4, 6, 8, 10, 12}), false},
      {"duration 40 s kept", profile_at({0, 10, 20, 30, 40}, {1, 2, 3, 4, 5}), true},
      {"duration 40.5 s dropped", profile_at({0, 10, 20, 30, 40.5}, {1, 2, 3, 4, 5}), false},
      {"ratio 0.5 dropped", profile_at(t5, {4, 5, 6, 7, 7.5, 8}), false},
      {"ratio 0.516 kept", profile_at(t5, {3.875, 5, 6, 7, 7.5, 8}), true},
      {"decel peak 7 kept", profile_at(t5, {14, 7, 6, 5, 4, 3}), true},
      {"decel peak 7.5 dropped", profile_at(t5, {14.5, 7, 6, 5, 4, 3}), false},
      {"accel peak 7.5 kept", profile_at(t5, {3, 4, 5, 6, 7, 14.5}), true},
  };
  std::size_t boundary_failures = 0;
  std::string failed;
  for (const auto& b : boundaries) {
    const auto got = extract_kinematics(b.profile, 0.5, rules).maneuvers;
    const auto want = oracle::brute_force_maneuvers(b.profile, rules);
    const bool ok = (got.size() == 1) == b.kept && same_maneuvers(got, want);
    if (!ok) {
      ++boundary_failures;
      failed += std::string(" [") + b.name + "]";
    }
  }
  std::ostringstream d;
  d << "1000 profiles, " << mismatches << " mismatches, " << kept << " maneuvers in " << profiles_with_maneuvers
    << " profiles; " << boundaries.size() - boundary_failures << "/" << boundaries.size() << " boundary fixtures"
    << failed;
  return pass_if(mismatches == 0 && boundary_failures == 0, d.str());
}

// 6. Quartile thresholds give 25/50/25 within one ride; published boundaries.
Outcome classification() {
  Rng rng(6);
  std::size_t sets = 0, off = 0;
  for (std::size_t n : {4, 5, 6, 7, 8, 9, 10, 11, 13, 17, 25, 50, 99, 100, 101, 250, 1000, 2001}) {
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> v(n);
      for (auto& x : v) x = 2.0 + 5.0 * rng.uniform();
      const auto t = derive_thresholds(v);
      std::map<CyclistClass, double> counts;
      for (const double x : v) counts[classify_ride(x, t)] += 1.0;
      const double N = static_cast<double>(n);
      const bool ok = std::abs(counts[CyclistClass::Slow] - 0.25 * N) <= 1.0 &&
                      std::abs(counts[CyclistClass::Medium] - 0.5 * N) <= 1.0 &&
                      std::abs(counts[CyclistClass::Fast] - 0.25 * N) <= 1.0;
      off += !ok;
      ++sets;
    }
  }
  const auto pub = ClassThresholds::published();
  const bool boundaries = std::abs(pub.slow_max - 3.75) < 1e-12 && std::abs(pub.fast_min - 4.9722) < 1e-4 &&
                          classify_ride(3.0, pub) == CyclistClass::Slow &&
                          classify_ride(3.75, pub) == CyclistClass::Slow &&
                          classify_ride(std::nextafter(3.75, 10.0), pub) == CyclistClass::Medium &&
                          classify_ride(pub.fast_min, pub) == CyclistClass::Medium &&
                          classify_ride(std::nextafter(pub.fast_min, 10.0), pub) == CyclistClass::Fast &&
                          classify_ride(6.0, pub) == CyclistClass::Fast;
  std::ostringstream d;
  d << sets << " synthetic sets, " << off << " outside +-1 ride; published boundaries "
    << (boundaries ? "ok" : "wrong");
  return pass_if(off == 0 && boundaries, d.str());
}

// 7. Randomized battery with sigma = 0.
Outcome simulator_safety() {
  oracle::SafetyReport total;
  total.min_gap = 1e300;
  std::size_t scenarios = 0;
  for (std::uint64_t seed = 1; seed <= 24; ++seed) {
    const auto sc = fixtures::battery_scenario(seed, 0.0);
    const auto result = run_scenario(sc);
    const auto rep = oracle::check_safety(sc, result);
    total.gap_checks += rep.gap_checks;
    total.negative_gaps += rep.negative_gaps;
    total.min_gap = std::min(total.min_gap, rep.min_gap);
    total.line_crossings += rep.line_crossings;
    total.red_crossings += rep.red_crossings;
    total.unexplained_transitions += rep.unexplained_transitions;
    total.speed_violations += rep.speed_violations;
    total.records += rep.records;
    ++scenarios;
  }
  const auto sc = fixtures::battery_scenario(99, 0.0);
  const bool deterministic = trajectory_csv(run_scenario(sc).records) == trajectory_csv(run_scenario(sc).records);
  std::ostringstream d;
  d << scenarios << " scenarios, " << total.records << " records; negative gaps " << total.negative_gaps << "/"
    << total.gap_checks << " (min " << fmt("%.3f", total.min_gap) << " m); red crossings " << total.red_crossings
    << "/" << total.line_crossings << "; speed violations " << total.speed_violations << "; unexplained transitions "
    << total.unexplained_transitions << "; determinism " << (deterministic ? "ok" : "broken");
  return pass_if(total.negative_gaps == 0 && total.red_crossings == 0 && total.speed_violations == 0 &&
                     total.unexplained_transitions == 0 && total.line_crossings > 0 && deterministic,
                 d.str());
}

std::vector<double> observed_max_speeds(const ScenarioConfig& sc) {
  const auto result = run_scenario(sc);
  std::vector<double> out;
  for (const auto& m : maxima_from_trajectories(result.records)) out.push_back(m.max_v);
  return out;
}

// 8. Scalar vtypes cluster; distribution vtypes reproduce their vmax law.
Outcome clustered_vs_heterogeneous() {
  const auto t0 = std::chrono::steady_clock::now();
  SimulationConfig sim;
  sim.duration = 1e7;
  sim.seed = 8;
  CorridorOptions c;
  c.length = 1528.0;
  c.speed_limit = 20.0;
  c.bicycle_rate = 300.0;
  c.bicycle_count = 300;
  const auto scalar = observed_max_speeds(corridor_scenario(c, sim));
  const double scalar_std = summary_stats(scalar).std;

  ClassModels models;
  models.specs[CyclistClass::All] = fixtures::reference_spec();
  c.vtype = "all";
  c.bicycle_rate = 8.0;  // free flow: no bicycle catches up with a slower one
  c.bicycle_count = 1000;
  const auto observed = observed_max_speeds(corridor_scenario(c, sim, &models));

  Rng rng(88);
  std::vector<double> reference;
  for (int i = 0; i < 100'000; ++i) reference.push_back(sample_vtype(models.specs[CyclistClass::All], rng).v_max);
  const double ks = ks_two_sample(observed, reference);
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "scalar: n=" << scalar.size() << " std " << fmt("%.5f", scalar_std) << " m/s; distribution: n=" << observed.size()
    << " KS " << fmt("%.4f", ks) << "; runtime " << fmt("%.1f", secs) << " s";
  return pass_if(scalar.size() == 300 && scalar_std < 0.05 && observed.size() == 1000 && ks < 0.05 && secs < 60.0,
                 d.str());
}

struct TurnRun {
  std::size_t left_turners = 0;
  std::size_t indirect = 0;
  std::vector<double> direct_durations, indirect_durations;
};

TurnRun run_left_turners(double p, std::uint64_t seed) {
  FourWayOptions f;
  f.bicycle_turns = {{Movement::Left, 1.0}};
  f.bicycle_rate = 120.0;
  f.bicycle_count = 500;  // per approach, 2000 in total
  f.p_indirect = p;
  SimulationConfig sim;
  sim.duration = 1e6;
  sim.seed = seed;
  const auto sc = fourway_scenario(f, sim);
  const auto result = run_scenario(sc);
  const auto crossings = measure_crossing_durations(result.records, left_turn_region(sc.network));
  TurnRun r;
  for (const auto& m : crossings.measurements) {
    ++r.left_turners;
    if (m.kind == TurnKind::Indirect) {
      ++r.indirect;
      r.indirect_durations.push_back(m.duration);
    } else {
      r.direct_durations.push_back(m.duration);
    }
  }
  return r;
}

// 9 and 10 share the runs.
std::map<double, TurnRun>& turn_runs() {
  static std::map<double, TurnRun> runs = [] {
    std::map<double, TurnRun> m;
    std::uint64_t seed = 90;
    for (const double p : {0.50, 0.61, 0.87}) m[p] = run_left_turners(p, ++seed);
    return m;
  }();
  return runs;
}

Outcome turn_share() {
  bool ok = true;
  std::ostringstream d;
  for (const auto& [p, r] : turn_runs()) {
    const double share = static_cast<double>(r.indirect) / static_cast<double>(r.left_turners);
    const double hw = oracle::binomial_half_width(p, r.left_turners);
    const bool inside = r.left_turners == 2000 && std::abs(share - p) <= hw;
    ok = ok && inside;
    d << " p=" << fmt("%.2f", p) << ": " << r.indirect << "/" << r.left_turners << "=" << fmt("%.4f", share)
      << " (CI +-" << fmt("%.4f", hw) << ")";
  }
  return pass_if(ok, d.str());
}

Outcome crossing_ordering() {
  const auto& r = turn_runs().at(0.50);
  Rng rng(10);
  const auto b = bootstrap_mean_difference(r.indirect_durations, r.direct_durations, 0.95, 10'000, rng);
  std::ostringstream d;
  d << "indirect n=" << r.indirect_durations.size() << " mean " << fmt("%.2f", summary_stats(r.indirect_durations).mean)
    << " s, direct n=" << r.direct_durations.size() << " mean " << fmt("%.2f", summary_stats(r.direct_durations).mean)
    << " s; difference " << fmt("%.2f", b.observed) << " s, 95% lower bound " << fmt("%.2f", b.lower_bound) << " s";
  return pass_if(r.indirect_durations.size() >= 500 && r.direct_durations.size() >= 500 && b.lower_bound > 0.0,
                 d.str());
}

// 11. Real-data sanity, only with the downloaded dataset.
Outcome dataset_sanity() {
  const char* dir = std::getenv("CYCLEFLOW_SIMRA_DIR");
  if (!dir || !std::filesystem::is_directory(dir))
    return {Verdict::Skip, "set CYCLEFLOW_SIMRA_DIR to the unpacked SimRa rides to run"};
  std::vector<Ride> rides;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    try {
      const auto rel = std::filesystem::relative(e.path(), dir);
      rides.push_back(parse_ride_file(read_file(e.path()), {}, rel.generic_string(), rel.begin()->string()).ride);
    } catch (const Error&) {
    }
  }
  const auto filtered = filter_rides(std::move(rides));
  std::vector<double> avg, peaks;
  std::size_t fast_rides = 0;
  for (const auto& ride : filtered.kept) {
    try {
      const auto k = extract_kinematics(preprocess_ride(ride), 0.5);
      avg.push_back(k.avg_moving_velocity);
      fast_rides += k.v_max > 5.56;
      for (const auto& m : k.maneuvers)
        if (m.kind == ManeuverKind::Acceleration) peaks.push_back(m.peak_rate);
    } catch (const Error&) {
    }
  }
  if (avg.empty() || peaks.empty()) return {Verdict::Fail, "no usable rides"};
  const auto s = summary_stats(avg);
  const double frac_peak = fraction_exceeding(peaks, 1.2);
  const double frac_fast = static_cast<double>(fast_rides) / static_cast<double>(avg.size());
  const bool ok = std::abs(s.mean - 4.38) <= 0.438 && std::abs(s.median - 4.42) <= 0.442 && frac_peak >= 0.10 &&
                  frac_peak <= 0.25 && frac_fast >= 0.65 && frac_fast <= 0.85;
  std::ostringstream d;
  d << avg.size() << " rides: mean " << fmt("%.3f", s.mean) << " median " << fmt("%.3f", s.median)
    << " m/s; peaks >= 1.2: " << fmt("%.3f", frac_peak) << "; v_max > 5.56: " << fmt("%.3f", frac_fast);
  return pass_if(ok, d.str());
}

// 12. vTypeDistribution export round trip.
Outcome sumo_interop() {
  const auto spec = fixtures::reference_spec(CyclistClass::Medium);
  const std::size_t n = 200;
  const auto xml = export_sumo_vtypes(spec, n, 12);
  const bool stable = xml == export_sumo_vtypes(spec, n, 12);
  const auto parsed = parse_sumo_vtypes(xml);
  Rng rng(12);
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    const auto p = sample_vtype(spec, rng);
    auto same4 = [](double a, double b) { return std::abs(std::round(a * 1e4) - std::round(b * 1e4)) < 0.5; };
    const auto& q = parsed[i].params;
    const bool ok = same4(p.a_max, q.a_max) && same4(p.d_max, q.d_max) && same4(p.v_max, q.v_max) &&
                    same4(p.min_gap, q.min_gap) && same4(p.length, q.length) && parsed[i].vclass == "bicycle";
    mismatches += !ok;
  }
  std::ostringstream d;
  d << parsed.size() << " vType children (want " << n << "), " << mismatches << " values off at 4 decimals, "
    << (stable ? "byte-stable" : "unstable");
  return pass_if(parsed.size() == n && mismatches == 0 && stable, d.str());
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, distribution_round_trip}, {2, pdf_normalization}, {3, sampler_correctness}, {4, pdf_anchors},
      {5, maneuver_oracle},         {6, classification},    {7, simulator_safety},    {8, clustered_vs_heterogeneous},
      {9, turn_share},              {10, crossing_ordering}, {11, dataset_sanity},    {12, sumo_interop},
  };
  int failures = 0;
  for (const auto& [id, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {Verdict::Fail, std::string("threw: ") + e.what()};
    }
    const char* word = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Skip ? "SKIP" : "FAIL";
    std::printf("criterion %d: %s  %s\n", id, word, o.detail.c_str());
    std::fflush(stdout);
    failures += o.verdict == Verdict::Fail;
  }
  return failures == 0 ? 0 : 1;
}
