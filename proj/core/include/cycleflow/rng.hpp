#pragma once

#include <cstdint>
#include <random>

namespace cycleflow {

/// Seeded generator with platform-independent variate algorithms.
///
/// std::mt19937_64 is fully specified by the standard, but the standard
/// distributions are not, so all variates are derived here from raw 64-bit
/// draws. Two Rng objects built from the same seed produce identical
/// streams on every conforming implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream derived from (seed, stream). Used to keep e.g.
  /// arrival times unaffected by the number of dawdling draws.
  static Rng substream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }
  double normal();
  double exponential();
  /// Gamma(shape, 1) by Marsaglia-Tsang.
  double gamma(double shape);
  double chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace cycleflow
