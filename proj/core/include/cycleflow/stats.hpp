#pragma once

#include <span>
#include <vector>

namespace cycleflow {

/// Quantile of ascending data by linear interpolation between order
/// statistics: h = p (n - 1), q = x[floor h] + frac(h) (x[floor h + 1] - x[floor h]).
double quantile_sorted(std::span<const double> sorted, double p);
/// Same definition on unsorted data. Throws Error{EmptyInput}.
double quantile(std::span<const double> data, double p);

double mean(std::span<const double> data);
/// Sample standard deviation (n - 1 denominator); 0 for a single value.
double sample_std(std::span<const double> data);
/// Midpoint of the two central values for even n.
double median(std::span<const double> data);

}  // namespace cycleflow
