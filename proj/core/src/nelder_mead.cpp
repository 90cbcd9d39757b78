#include "cycleflow/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cycleflow {
namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> start, std::span<const double> steps,
                             const NelderMeadOptions& options) {
  const std::size_t dim = start.size();
  NelderMeadResult result;
  auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    const double f = objective(x);
    return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> simplex(dim + 1, start);
  for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += steps[i];
  std::vector<double> values(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), trial(dim), trial2(dim);
  auto along = [&](double t, std::vector<double>& out) {
    const auto& worst = simplex[order[dim]];
    for (std::size_t j = 0; j < dim; ++j) out[j] = centroid[j] + t * (centroid[j] - worst[j]);
  };

  for (;;) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const auto& best = simplex[order[0]];

    double diameter = 0.0;
    for (std::size_t i = 1; i <= dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        diameter = std::max(diameter, std::abs(simplex[order[i]][j] - best[j]) / (1.0 + std::abs(best[j])));
    if (diameter < options.rel_diameter_tol && std::isfinite(values[order[0]])) {
      result.converged = true;
      break;
    }
    if (result.evaluations >= options.max_evaluations) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[order[i]][j] / static_cast<double>(dim);

    const double f_best = values[order[0]];
    const double f_second_worst = values[order[dim - 1]];
    const double f_worst = values[order[dim]];

    along(kReflect, trial);
    const double f_reflect = eval(trial);
    if (f_reflect < f_best) {
      along(kExpand, trial2);
      const double f_expand = eval(trial2);
      if (f_expand < f_reflect) {
        simplex[order[dim]] = trial2;
        values[order[dim]] = f_expand;
      } else {
        simplex[order[dim]] = trial;
        values[order[dim]] = f_reflect;
      }
      continue;
    }
    if (f_reflect < f_second_worst) {
      simplex[order[dim]] = trial;
      values[order[dim]] = f_reflect;
      continue;
    }
    const bool outside = f_reflect < f_worst;
    along(outside ? kContract : -kContract, trial2);
    const double f_contract = eval(trial2);
    if (f_contract < (outside ? f_reflect : f_worst)) {
      simplex[order[dim]] = trial2;
      values[order[dim]] = f_contract;
      continue;
    }
    const auto best_copy = simplex[order[0]];
    for (std::size_t i = 1; i <= dim; ++i) {
      auto& v = simplex[order[i]];
      for (std::size_t j = 0; j < dim; ++j) v[j] = best_copy[j] + kShrink * (v[j] - best_copy[j]);
      values[order[i]] = eval(v);
    }
  }

  const auto best_it = std::min_element(values.begin(), values.end());
  const auto best_idx = static_cast<std::size_t>(best_it - values.begin());
  result.x = simplex[best_idx];
  result.fx = *best_it;
  return result;
}

}  // namespace cycleflow
