#include "cycleflow/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cycleflow/error.hpp"
#include "cycleflow/nelder_mead.hpp"
#include "cycleflow/rng.hpp"
#include "cycleflow/stats.hpp"

namespace cycleflow {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Maps between model parameters and the unconstrained optimizer vector
/// [shape..., location, log scale].
class Parameterization {
 public:
  Parameterization(DistFamily family, double data_min)
      : family_(family), info_(family_info(family)), data_min_(data_min) {}

  std::size_t dimension() const { return info_.shape_names.size() + 2; }

  DistParams decode(std::span<const double> theta) const {
    DistParams p;
    const std::size_t ns = info_.shape_names.size();
    for (std::size_t i = 0; i < ns; ++i)
      p.shape.push_back(info_.shape_positive[i] ? std::exp(theta[i]) : theta[i]);
    p.loc = info_.positive_support ? data_min_ - std::exp(theta[ns]) : theta[ns];
    p.scale = std::exp(theta[ns + 1]);
    return p;
  }

  std::vector<double> encode(const DistParams& p) const {
    std::vector<double> theta;
    for (std::size_t i = 0; i < p.shape.size(); ++i)
      theta.push_back(info_.shape_positive[i] ? std::log(p.shape[i]) : p.shape[i]);
    theta.push_back(info_.positive_support ? std::log(data_min_ - p.loc) : p.loc);
    theta.push_back(std::log(p.scale));
    return theta;
  }

 private:
  DistFamily family_;
  const FamilyInfo& info_;
  double data_min_;
};

bool valid_shape(DistFamily family, const DistParams& p) {
  const auto& info = family_info(family);
  for (std::size_t i = 0; i < p.shape.size(); ++i) {
    if (!std::isfinite(p.shape[i])) return false;
    if (info.shape_positive[i] && !(p.shape[i] > 0.0)) return false;
  }
  return std::isfinite(p.loc) && p.scale > 0.0 && std::isfinite(p.scale);
}

}  // namespace

double neg_log_likelihood(DistFamily family, const DistParams& params, std::span<const double> data) {
  if (data.empty()) throw Error(ErrorCode::EmptyInput, "no data");
  const double ll = log_likelihood(family, params, data);
  return std::isfinite(ll) ? -ll : kInf;
}

FittedDist fit_mle(DistFamily family, std::span<const double> data, const FitOptions& options) {
  if (data.size() < std::max<std::size_t>(options.min_samples, 2))
    throw Error(ErrorCode::DegenerateData,
                "need at least " + std::to_string(options.min_samples) + " samples, got " +
                    std::to_string(data.size()));
  std::vector<double> sorted(data.begin(), data.end());
  if (!std::all_of(sorted.begin(), sorted.end(), [](double x) { return std::isfinite(x); }))
    throw Error(ErrorCode::DegenerateData, "non-finite sample");
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double range = sorted.back() - lo;
  if (!(range > 0.0)) throw Error(ErrorCode::DegenerateData, "all samples equal");

  const auto& info = family_info(family);
  const Parameterization param(family, lo);

  DistParams init;
  init.shape = info.default_shape;
  init.loc = info.positive_support ? lo - 0.05 * range : quantile_sorted(sorted, 0.5);
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  init.scale = iqr > 0.0 ? iqr / 1.35 : range / 4.0;

  auto objective = [&](std::span<const double> theta) {
    const auto p = param.decode(theta);
    if (!valid_shape(family, p)) return kInf;
    const double ll = log_likelihood(family, p, data);
    return std::isfinite(ll) ? -ll : kInf;
  };

  NelderMeadOptions nm;
  nm.rel_diameter_tol = options.rel_tol;
  nm.max_evaluations = options.max_evaluations;

  std::vector<double> best_theta = param.encode(init);
  const std::vector<double> base_steps(param.dimension(), 0.25);
  auto run = nelder_mead(objective, best_theta, base_steps, nm);
  bool converged = run.converged;
  double best_f = run.fx;
  best_theta = run.x;

  Rng jitter(options.jitter_seed ^ (static_cast<std::uint64_t>(family) << 32));
  for (std::size_t r = 0; r < options.restarts; ++r) {
    std::vector<double> start = best_theta;
    std::vector<double> steps(start.size());
    for (std::size_t j = 0; j < start.size(); ++j) {
      start[j] += 0.05 * jitter.normal();
      steps[j] = 0.1 * (jitter.uniform() < 0.5 ? -1.0 : 1.0);
    }
    auto again = nelder_mead(objective, start, steps, nm);
    converged = converged || again.converged;
    if (again.fx < best_f) {
      best_f = again.fx;
      best_theta = again.x;
    }
  }

  if (!std::isfinite(best_f) || !converged)
    throw Error(ErrorCode::NoConvergence, to_string(family) + " fit did not converge");

  FittedDist fit;
  fit.family = family;
  fit.params = param.decode(best_theta);
  fit.loglik = -best_f;
  fit.n = data.size();
  fit.ks_stat = ks_statistic(data, family, fit.params);
  return fit;
}

std::vector<FittedDist> select_best_fit(std::span<const double> data, std::span<const DistFamily> families,
                                        const FitOptions& options) {
  std::vector<FittedDist> fits;
  for (const auto family : families) {
    try {
      fits.push_back(fit_mle(family, data, options));
    } catch (const Error& e) {
      FittedDist failed;
      failed.family = family;
      failed.params.shape = family_info(family).default_shape;
      failed.loglik = -kInf;
      failed.n = data.size();
      failed.converged = false;
      failed.failure = e.what();
      fits.push_back(failed);
    }
  }
  std::stable_sort(fits.begin(), fits.end(), [](const FittedDist& a, const FittedDist& b) {
    if (a.converged != b.converged) return a.converged;
    return a.loglik > b.loglik;
  });
  return fits;
}

double ks_statistic(std::span<const double> data, const std::function<double(double)>& model_cdf) {
  if (data.empty()) throw Error(ErrorCode::EmptyInput, "no data");
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = model_cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return std::clamp(d, 0.0, 1.0);
}

double ks_statistic(std::span<const double> data, DistFamily family, const DistParams& params) {
  validate(family, params);
  return ks_statistic(data, [&](double x) { return cdf(family, params, x); });
}

}  // namespace cycleflow
