#include "fixtures.hpp"

#include <algorithm>

#include <cycleflow/scenario.hpp>

namespace fixtures {

const std::vector<FamilyCase>& reference_families() {
  static const std::vector<FamilyCase> cases = {
      {DistFamily::BurrXII, {{2.0, 3.0}, 0.0, 1.0}},
      {DistFamily::BurrIII, {{3.0, 2.0}, 0.0, 1.0}},
      {DistFamily::MielkeBetaKappa, {{2.0, 3.0}, 0.0, 1.0}},
      {DistFamily::JohnsonSU, {{-1.0, 1.5}, 1.0, 0.5}},
      {DistFamily::StudentT, {{5.0}, 0.5, 1.2}},
      {DistFamily::SymGenNormal, {{1.5}, 5.5, 1.0}},
      {DistFamily::ExpModGaussian, {{1.5}, 5.0, 0.8}},
      {DistFamily::NonCentralT, {{6.0, 1.0}, 4.0, 1.0}},
  };
  return cases;
}

FittedDist fitted(DistFamily family, DistParams params) {
  FittedDist f;
  f.family = family;
  f.params = std::move(params);
  f.n = 1;
  return f;
}

VTypeDistributionSpec reference_spec(CyclistClass cls) {
  VTypeDistributionSpec s;
  s.cyclist_class = cls;
  s.accel = fitted(DistFamily::BurrXII, {{4.0, 2.0}, 0.0, 0.9});
  s.decel = fitted(DistFamily::JohnsonSU, {{-1.5, 2.0}, 0.6, 0.5});
  s.vmax = fitted(DistFamily::SymGenNormal, {{1.5}, 5.5, 1.2});
  s.p_indirect = 0.61;
  return s;
}

VelocityProfile profile(const std::vector<double>& v, double dt) {
  VelocityProfile p;
  p.dt = dt;
  for (std::size_t i = 0; i < v.size(); ++i) p.samples.push_back({static_cast<double>(i) * dt, v[i]});
  return p;
}

VelocityProfile profile_at(const std::vector<double>& t, const std::vector<double>& v) {
  VelocityProfile p;
  p.dt = t.size() > 1 ? t[1] - t[0] : 3.0;
  for (std::size_t i = 0; i < v.size(); ++i) p.samples.push_back({t[i], v[i]});
  return p;
}

VelocityProfile random_profile(Rng& rng, std::size_t max_len) {
  const auto n = 2 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(max_len - 1));
  std::vector<double> v{8.0 * rng.uniform()};
  double dir = rng.bernoulli(0.5) ? 1.0 : -1.0;
  while (v.size() < std::min(n, max_len)) {
    const double u = rng.uniform();
    double next = v.back();
    if (u < 0.15) {
      // plateau: repeat exactly
    } else if (u < 0.18) {
      next = std::max(0.0, next - 3.0 * (7.0 + 3.0 * rng.uniform()));
    } else {
      if (rng.bernoulli(0.3)) dir = -dir;
      next = std::max(0.0, next + dir * 3.0 * 0.9 * rng.uniform());
    }
    v.push_back(next);
  }
  return profile(v, 3.0);
}

ScenarioConfig battery_scenario(std::uint64_t seed, double sigma) {
  Rng rng(seed);
  SimulationConfig sim;
  sim.duration = 600.0 + 600.0 * rng.uniform();
  sim.sigma = sigma;
  sim.seed = seed;
  ClassModels models;
  models.specs[CyclistClass::All] = reference_spec();
  const std::string vtype = rng.bernoulli(0.5) ? "all" : "sumo_default";
  if (rng.bernoulli(0.3)) {
    CorridorOptions c;
    c.length = 300.0 + 1500.0 * rng.uniform();
    c.vtype = vtype;
    c.bicycle_rate = 100.0 + 900.0 * rng.uniform();
    c.car_rate = rng.bernoulli(0.5) ? 200.0 * rng.uniform() : 0.0;
    return corridor_scenario(c, sim, &models);
  }
  FourWayOptions f;
  f.vtype = vtype;
  f.bicycle_rate = 100.0 + 600.0 * rng.uniform();
  f.car_rate = rng.bernoulli(0.7) ? 300.0 * rng.uniform() : 0.0;
  f.p_indirect = rng.uniform();
  f.bicycle_turns = {{Movement::Straight, rng.uniform()},
                     {Movement::Left, 0.2 + rng.uniform()},
                     {Movement::Right, rng.uniform()}};
  return fourway_scenario(f, sim, &models);
}

}  // namespace fixtures
