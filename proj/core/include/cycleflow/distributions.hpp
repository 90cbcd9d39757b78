#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cycleflow/rng.hpp"

namespace cycleflow {

/// The candidate families for kinematic parameters. All are used in
/// location-scale form: f(x) = g((x - loc) / scale) / scale.
enum class DistFamily {
  BurrXII,          // c, d
  BurrIII,          // c, d
  MielkeBetaKappa,  // k, s
  JohnsonSU,        // a, b
  StudentT,         // nu
  SymGenNormal,     // beta
  ExpModGaussian,   // K
  NonCentralT,      // nu, nc
};

inline constexpr std::array<DistFamily, 8> kAllFamilies = {
    DistFamily::BurrXII,      DistFamily::BurrIII,      DistFamily::MielkeBetaKappa,
    DistFamily::JohnsonSU,    DistFamily::StudentT,     DistFamily::SymGenNormal,
    DistFamily::ExpModGaussian, DistFamily::NonCentralT,
};

struct FamilyInfo {
  std::string_view name;  // scipy-style identifier used in files
  std::vector<std::string_view> shape_names;
  std::vector<bool> shape_positive;
  std::vector<double> default_shape;
  bool positive_support = false;  // standardized support is (0, inf)
};

const FamilyInfo& family_info(DistFamily family);
std::string to_string(DistFamily family);
/// Accepts the scipy-style name or the enum spelling; throws InvalidParams.
DistFamily family_from_string(std::string_view name);

struct DistParams {
  std::vector<double> shape;
  double loc = 0.0;
  double scale = 1.0;
};

/// Throws Error{InvalidParams}.
void validate(DistFamily family, const DistParams& params);

double log_pdf(DistFamily family, const DistParams& params, double x);
double pdf(DistFamily family, const DistParams& params, double x);
double cdf(DistFamily family, const DistParams& params, double x);
/// Closed form where available, bisection on the cdf otherwise.
double quantile(DistFamily family, const DistParams& params, double p);
/// Bisection on the cdf regardless of closed forms.
double quantile_by_bisection(DistFamily family, const DistParams& params, double p);
double sample(DistFamily family, const DistParams& params, Rng& rng);
std::vector<double> sample_n(DistFamily family, const DistParams& params, std::size_t n, Rng& rng);

/// Sum of log densities; -inf when any point has zero density. Parameters
/// are validated once for the whole batch.
double log_likelihood(DistFamily family, const DistParams& params, std::span<const double> data);

namespace detail {
/// log of the integral over (0, inf) of y^nu exp(-(y - mu)^2 / 2), the
/// non-central t kernel.
double nct_log_kernel_integral(double nu, double mu);
}  // namespace detail

}  // namespace cycleflow
