#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace cycleflow {

struct NelderMeadOptions {
  /// Stop when every vertex lies within this distance of the best vertex,
  /// measured per coordinate relative to (1 + |best|).
  double rel_diameter_tol = 1e-6;
  std::size_t max_evaluations = 5000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double fx = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Derivative-free minimization. Non-finite objective values are treated as
/// +inf, so infeasible regions simply repel the simplex.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> start, std::span<const double> steps,
                             const NelderMeadOptions& options = {});

}  // namespace cycleflow
