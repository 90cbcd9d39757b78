#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cycleflow/distributions.hpp"

namespace cycleflow {

struct FittedDist {
  DistFamily family = DistFamily::BurrXII;
  DistParams params;
  double loglik = 0.0;
  double ks_stat = 1.0;
  std::size_t n = 0;
  bool converged = true;
  std::string failure;  // set when the fit failed; ranks last
};

struct FitOptions {
  std::size_t min_samples = 30;
  /// Restarts from the best point found so far, each with a jittered
  /// initial simplex.
  std::size_t restarts = 3;
  double rel_tol = 1e-6;
  std::size_t max_evaluations = 5000;
  std::uint64_t jitter_seed = 0x5EED;
};

/// Sum of -log pdf; +inf if any point has zero density.
double neg_log_likelihood(DistFamily family, const DistParams& params, std::span<const double> data);

/// Maximum likelihood by Nelder-Mead over (shape, loc, scale).
/// Positive parameters are optimized on a log scale; for families with
/// support (loc, inf) the location is parameterized as min(data) - exp(u) so
/// every iterate keeps the data in the support.
/// Throws Error{DegenerateData | NoConvergence}.
FittedDist fit_mle(DistFamily family, std::span<const double> data, const FitOptions& options = {});

/// Fits every family; ranked by descending log-likelihood, failed fits last.
std::vector<FittedDist> select_best_fit(std::span<const double> data, std::span<const DistFamily> families,
                                        const FitOptions& options = {});

/// Two-sided one-sample Kolmogorov-Smirnov distance, evaluated exactly at
/// the sorted sample points.
double ks_statistic(std::span<const double> data, const std::function<double(double)>& model_cdf);
double ks_statistic(std::span<const double> data, DistFamily family, const DistParams& params);

/// Critical value of the one-sample statistic at the 1% level (asymptotic).
inline double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

}  // namespace cycleflow
