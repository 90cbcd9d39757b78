#pragma once

// Shared test inputs: reference parameter sets, profile builders and a
// randomized scenario battery.

#include <cstdint>
#include <vector>

#include <cycleflow/cyclist_model.hpp>
#include <cycleflow/distributions.hpp>
#include <cycleflow/preprocess.hpp>
#include <cycleflow/simulation.hpp>

namespace fixtures {

using namespace cycleflow;

struct FamilyCase {
  DistFamily family;
  DistParams params;
};

/// One parameter set per family, away from degenerate corners.
const std::vector<FamilyCase>& reference_families();

FittedDist fitted(DistFamily family, DistParams params);

/// Heterogeneous bicycle spec with known generating distributions.
VTypeDistributionSpec reference_spec(CyclistClass cls = CyclistClass::All);

/// Evenly spaced profile.
VelocityProfile profile(const std::vector<double>& v, double dt = 3.0);
/// Profile at explicit times.
VelocityProfile profile_at(const std::vector<double>& t, const std::vector<double>& v);

/// Random walk of 2..max_len speed samples with plateaus, reversals and the
/// occasional hard stop, spaced 3 s apart.
VelocityProfile random_profile(Rng& rng, std::size_t max_len = 50);

/// Corridor or four-way scenario with random demand, vtypes and turn mix.
ScenarioConfig battery_scenario(std::uint64_t seed, double sigma = 0.0);

}  // namespace fixtures
