#include "cycleflow/distributions.hpp"

#include <algorithm>
#include <boost/math/distributions/non_central_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <variant>

#include "cycleflow/error.hpp"

namespace cycleflow {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

/// log(1 + exp(t)) without overflow.
double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double norm_quantile(double p) { return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p); }

/// log(erfc(w)), with an asymptotic expansion where erfc underflows.
double log_erfc(double w) {
  if (w < 25.0) return std::log(std::erfc(w));
  const double w2 = w * w;
  const double series = 1.0 - 1.0 / (2.0 * w2) + 3.0 / (4.0 * w2 * w2) - 15.0 / (8.0 * w2 * w2 * w2);
  return -w2 - std::log(w) - 0.5 * std::log(std::numbers::pi) + std::log(series);
}

double log_norm_cdf(double x) { return std::log(0.5) + log_erfc(-x / std::numbers::sqrt2); }

// Standardized kernels. Each provides log_pdf(z) and cdf(z); inverse-transform
// families also provide quantile(u).

struct BurrXII {
  double c, d, log_cd;
  BurrXII(double c_, double d_) : c(c_), d(d_), log_cd(std::log(c_) + std::log(d_)) {}
  double log_pdf(double z) const {
    if (z < 0.0) return kNegInf;
    if (z == 0.0) return c > 1.0 ? kNegInf : (c == 1.0 ? log_cd : kNegInf);
    const double lz = std::log(z);
    return log_cd + (c - 1.0) * lz - (d + 1.0) * softplus(c * lz);
  }
  double cdf(double z) const {
    if (z <= 0.0) return 0.0;
    return -std::expm1(-d * softplus(c * std::log(z)));
  }
  double quantile(double u) const { return std::pow(std::expm1(-std::log1p(-u) / d), 1.0 / c); }
};

struct BurrIII {
  double c, d, log_cd;
  BurrIII(double c_, double d_) : c(c_), d(d_), log_cd(std::log(c_) + std::log(d_)) {}
  double log_pdf(double z) const {
    if (z <= 0.0) return kNegInf;
    const double lz = std::log(z);
    return log_cd - (c + 1.0) * lz - (d + 1.0) * softplus(-c * lz);
  }
  double cdf(double z) const {
    if (z <= 0.0) return 0.0;
    return std::exp(-d * softplus(-c * std::log(z)));
  }
  double quantile(double u) const { return std::pow(std::expm1(-std::log(u) / d), -1.0 / c); }
};

struct Mielke {
  double k, s, log_k;
  Mielke(double k_, double s_) : k(k_), s(s_), log_k(std::log(k_)) {}
  double log_pdf(double z) const {
    if (z < 0.0) return kNegInf;
    if (z == 0.0) return k == 1.0 ? log_k : kNegInf;
    const double lz = std::log(z);
    return log_k + (k - 1.0) * lz - (1.0 + k / s) * softplus(s * lz);
  }
  double cdf(double z) const {
    if (z <= 0.0) return 0.0;
    const double lz = std::log(z);
    return std::exp(k * lz - (k / s) * softplus(s * lz));
  }
  double quantile(double u) const {
    const double w = std::pow(u, s / k);
    return std::pow(w / (1.0 - w), 1.0 / s);
  }
};

struct JohnsonSU {
  double a, b, log_b;
  JohnsonSU(double a_, double b_) : a(a_), b(b_), log_b(std::log(b_)) {}
  double log_pdf(double z) const {
    const double w = a + b * std::asinh(z);
    return log_b - std::log(std::hypot(z, 1.0)) - kLogSqrt2Pi - 0.5 * w * w;
  }
  double cdf(double z) const { return norm_cdf(a + b * std::asinh(z)); }
  double quantile(double u) const { return std::sinh((norm_quantile(u) - a) / b); }
};

struct StudentT {
  double nu, log_norm;
  explicit StudentT(double nu_)
      : nu(nu_),
        log_norm(std::lgamma(0.5 * (nu_ + 1.0)) - std::lgamma(0.5 * nu_) -
                 0.5 * std::log(std::numbers::pi * nu_)) {}
  double log_pdf(double z) const { return log_norm - 0.5 * (nu + 1.0) * std::log1p(z * z / nu); }
  double cdf(double z) const {
    if (std::isinf(z)) return z > 0.0 ? 1.0 : 0.0;
    const double z2 = z * z;
    double tail = 0.0;
    if (z2 < nu)
      tail = 0.5 * boost::math::ibetac(0.5, 0.5 * nu, z2 / (nu + z2));
    else
      tail = 0.5 * boost::math::ibeta(0.5 * nu, 0.5, nu / (nu + z2));
    return z < 0.0 ? tail : 1.0 - tail;
  }
};

struct SymGenNormal {
  double beta, log_norm;
  explicit SymGenNormal(double beta_)
      : beta(beta_), log_norm(std::log(beta_) - std::log(2.0) - std::lgamma(1.0 / beta_)) {}
  double log_pdf(double z) const { return log_norm - std::pow(std::abs(z), beta); }
  double cdf(double z) const {
    if (std::isinf(z)) return z > 0.0 ? 1.0 : 0.0;
    const double w = std::pow(std::abs(z), beta);
    if (z < 0.0) return 0.5 * boost::math::gamma_q(1.0 / beta, w);
    return 0.5 + 0.5 * boost::math::gamma_p(1.0 / beta, w);
  }
  double quantile(double u) const {
    if (u == 0.5) return 0.0;
    if (u < 0.5) return -std::pow(boost::math::gamma_q_inv(1.0 / beta, 2.0 * u), 1.0 / beta);
    return std::pow(boost::math::gamma_p_inv(1.0 / beta, 2.0 * u - 1.0), 1.0 / beta);
  }
};

struct ExpModGaussian {
  double K, inv_k, log_norm;
  explicit ExpModGaussian(double k_)
      : K(k_), inv_k(1.0 / k_), log_norm(-std::log(2.0 * k_) + 0.5 / (k_ * k_)) {}
  double log_pdf(double z) const {
    return log_norm - z * inv_k + log_erfc(-(z - inv_k) / std::numbers::sqrt2);
  }
  double cdf(double z) const {
    if (std::isinf(z)) return z > 0.0 ? 1.0 : 0.0;
    const double tail = std::exp(-z * inv_k + 0.5 * inv_k * inv_k + log_norm_cdf(z - inv_k));
    return std::clamp(norm_cdf(z) - tail, 0.0, 1.0);
  }
};

/// Non-central t density from its integral representation
///   f(z) = C exp(mu^2 / 2) (nu + z^2)^(-(nu+1)/2) I(nu, mu),  mu = nc z / sqrt(nu + z^2),
/// where I is the kernel integral. The argument of I always lies in
/// [-|nc|, |nc|], so batch evaluation interpolates log I on a Chebyshev grid.
struct NonCentralT {
  double nu, nc, log_c;
  std::vector<double> cheb;  // coefficients of log I over [-|nc|, |nc|]
  double half_width = 0.0;
  double constant_log_i = 0.0;
  bool tabulated = false;

  NonCentralT(double nu_, double nc_) : nu(nu_), nc(nc_) {
    log_c = 0.5 * nu * std::log(nu) - 0.5 * nc * nc - 0.5 * std::log(std::numbers::pi) -
            std::lgamma(0.5 * nu) - 0.5 * (nu - 1.0) * std::log(2.0);
    half_width = std::abs(nc);
  }

  void build_table() {
    tabulated = true;
    if (half_width < 1e-12) {
      constant_log_i = detail::nct_log_kernel_integral(nu, 0.0);
      return;
    }
    constexpr int kNodes = 48;
    std::vector<double> values(kNodes);
    for (int j = 0; j < kNodes; ++j) {
      const double x = std::cos(std::numbers::pi * (j + 0.5) / kNodes);
      values[static_cast<std::size_t>(j)] = detail::nct_log_kernel_integral(nu, half_width * x);
    }
    cheb.assign(kNodes, 0.0);
    for (int k = 0; k < kNodes; ++k) {
      double sum = 0.0;
      for (int j = 0; j < kNodes; ++j)
        sum += values[static_cast<std::size_t>(j)] * std::cos(std::numbers::pi * k * (j + 0.5) / kNodes);
      cheb[static_cast<std::size_t>(k)] = 2.0 * sum / kNodes;
    }
  }

  double log_i(double mu) const {
    if (!tabulated) return detail::nct_log_kernel_integral(nu, mu);
    if (half_width < 1e-12) return constant_log_i;
    // Clenshaw recurrence
    const double x = std::clamp(mu / half_width, -1.0, 1.0);
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = cheb.size() - 1; k >= 1; --k) {
      const double b0 = 2.0 * x * b1 - b2 + cheb[k];
      b2 = b1;
      b1 = b0;
    }
    return x * b1 - b2 + 0.5 * cheb[0];
  }

  double log_pdf(double z) const {
    const double q = nu + z * z;
    const double mu = nc * z / std::sqrt(q);
    return log_c + 0.5 * mu * mu - 0.5 * (nu + 1.0) * std::log(q) + log_i(mu);
  }
  double cdf(double z) const {
    if (std::isinf(z)) return z > 0.0 ? 1.0 : 0.0;
    return boost::math::cdf(boost::math::non_central_t(nu, nc), z);
  }
};

using Kernel = std::variant<BurrXII, BurrIII, Mielke, JohnsonSU, StudentT, SymGenNormal,
                            ExpModGaussian, NonCentralT>;

Kernel make_kernel(DistFamily family, const std::vector<double>& s) {
  switch (family) {
    case DistFamily::BurrXII: return BurrXII(s[0], s[1]);
    case DistFamily::BurrIII: return BurrIII(s[0], s[1]);
    case DistFamily::MielkeBetaKappa: return Mielke(s[0], s[1]);
    case DistFamily::JohnsonSU: return JohnsonSU(s[0], s[1]);
    case DistFamily::StudentT: return StudentT(s[0]);
    case DistFamily::SymGenNormal: return SymGenNormal(s[0]);
    case DistFamily::ExpModGaussian: return ExpModGaussian(s[0]);
    case DistFamily::NonCentralT: return NonCentralT(s[0], s[1]);
  }
  throw Error(ErrorCode::InvalidParams, "unknown family");
}

template <typename T>
concept HasQuantile = requires(const T& k, double u) { k.quantile(u); };

double standard_bisection(const Kernel& kernel, bool positive_support, double p) {
  auto F = [&](double z) { return std::visit([z](const auto& k) { return k.cdf(z); }, kernel); };
  double lo = positive_support ? 0.0 : -1.0;
  double hi = 1.0;
  while (F(hi) < p) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) return kInf;
  }
  if (!positive_support) {
    while (F(lo) > p) {
      hi = lo;
      lo *= 2.0;
      if (lo < -1e300) return kNegInf;
    }
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (F(mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

namespace detail {

double nct_log_kernel_integral(double nu, double mu) {
  const double peak = 0.5 * (mu + std::sqrt(mu * mu + 4.0 * nu));
  auto g = [&](double y) { return nu * std::log(y) - 0.5 * (y - mu) * (y - mu); };
  const double g_peak = g(peak);
  // The log integrand is concave with curvature below -1, so +-15 around the
  // peak captures everything above exp(-112).
  const double lo = std::max(0.0, peak - 15.0);
  const double hi = peak + 15.0;
  auto integrand = [&](double y) { return y <= 0.0 ? 0.0 : std::exp(g(y) - g_peak); };
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, lo, hi, 10, 1e-13);
  return g_peak + std::log(value);
}

}  // namespace detail

const FamilyInfo& family_info(DistFamily family) {
  static const std::array<FamilyInfo, 8> infos = {{
      {"burr12", {"c", "d"}, {true, true}, {2.0, 2.0}, true},
      {"burr3", {"c", "d"}, {true, true}, {2.0, 2.0}, true},
      {"mielke", {"k", "s"}, {true, true}, {2.0, 2.0}, true},
      {"johnsonsu", {"a", "b"}, {false, true}, {0.0, 1.0}, false},
      {"t", {"nu"}, {true}, {5.0}, false},
      {"gennorm", {"beta"}, {true}, {2.0}, false},
      {"exponnorm", {"K"}, {true}, {1.0}, false},
      {"nct", {"nu", "nc"}, {true, false}, {5.0, 0.0}, false},
  }};
  return infos[static_cast<std::size_t>(family)];
}

std::string to_string(DistFamily family) { return std::string(family_info(family).name); }

DistFamily family_from_string(std::string_view name) {
  static const std::array<std::string_view, 8> long_names = {
      "BurrXII", "BurrIII", "MielkeBetaKappa", "JohnsonSU",
      "StudentT", "SymGenNormal", "ExpModGaussian", "NonCentralT"};
  for (std::size_t i = 0; i < kAllFamilies.size(); ++i) {
    if (name == family_info(kAllFamilies[i]).name || name == long_names[i]) return kAllFamilies[i];
  }
  throw Error(ErrorCode::InvalidParams, "unknown distribution family '" + std::string(name) + "'");
}

void validate(DistFamily family, const DistParams& params) {
  const auto& info = family_info(family);
  if (params.shape.size() != info.shape_names.size())
    throw Error(ErrorCode::InvalidParams, to_string(family) + " expects " +
                                              std::to_string(info.shape_names.size()) + " shape parameters");
  for (std::size_t i = 0; i < params.shape.size(); ++i) {
    const double v = params.shape[i];
    if (!std::isfinite(v) || (info.shape_positive[i] && !(v > 0.0)))
      throw Error(ErrorCode::InvalidParams,
                  to_string(family) + " shape '" + std::string(info.shape_names[i]) + "' out of range");
  }
  if (!std::isfinite(params.loc)) throw Error(ErrorCode::InvalidParams, "loc must be finite");
  if (!(params.scale > 0.0) || !std::isfinite(params.scale))
    throw Error(ErrorCode::InvalidParams, "scale must be positive");
}

double log_pdf(DistFamily family, const DistParams& params, double x) {
  validate(family, params);
  const auto kernel = make_kernel(family, params.shape);
  const double z = (x - params.loc) / params.scale;
  const double lp = std::visit([z](const auto& k) { return k.log_pdf(z); }, kernel);
  return lp - std::log(params.scale);
}

double pdf(DistFamily family, const DistParams& params, double x) {
  return std::exp(log_pdf(family, params, x));
}

double cdf(DistFamily family, const DistParams& params, double x) {
  validate(family, params);
  const auto kernel = make_kernel(family, params.shape);
  const double z = (x - params.loc) / params.scale;
  if (std::isnan(z)) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(std::visit([z](const auto& k) { return k.cdf(z); }, kernel), 0.0, 1.0);
}

double quantile_by_bisection(DistFamily family, const DistParams& params, double p) {
  validate(family, params);
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidParams, "probability outside [0, 1]");
  const auto kernel = make_kernel(family, params.shape);
  const bool positive = family_info(family).positive_support;
  if (p == 0.0) return positive ? params.loc : kNegInf;
  if (p == 1.0) return kInf;
  return params.loc + params.scale * standard_bisection(kernel, positive, p);
}

double quantile(DistFamily family, const DistParams& params, double p) {
  validate(family, params);
  if (!(p > 0.0 && p < 1.0)) return quantile_by_bisection(family, params, p);
  const auto kernel = make_kernel(family, params.shape);
  return std::visit(
      [&](const auto& k) {
        if constexpr (HasQuantile<std::decay_t<decltype(k)>>)
          return params.loc + params.scale * k.quantile(p);
        else
          return quantile_by_bisection(family, params, p);
      },
      kernel);
}

double sample(DistFamily family, const DistParams& params, Rng& rng) {
  validate(family, params);
  const auto& s = params.shape;
  double z = 0.0;
  switch (family) {
    case DistFamily::BurrXII: z = BurrXII(s[0], s[1]).quantile(rng.uniform()); break;
    case DistFamily::BurrIII: z = BurrIII(s[0], s[1]).quantile(rng.uniform()); break;
    case DistFamily::MielkeBetaKappa: z = Mielke(s[0], s[1]).quantile(rng.uniform()); break;
    case DistFamily::JohnsonSU: z = std::sinh((rng.normal() - s[0]) / s[1]); break;
    case DistFamily::StudentT: z = rng.normal() / std::sqrt(rng.chi_square(s[0]) / s[0]); break;
    case DistFamily::SymGenNormal: {
      const double mag = std::pow(rng.gamma(1.0 / s[0]), 1.0 / s[0]);
      z = rng.uniform() < 0.5 ? -mag : mag;
      break;
    }
    case DistFamily::ExpModGaussian: z = rng.normal() + s[0] * rng.exponential(); break;
    case DistFamily::NonCentralT:
      z = (rng.normal() + s[1]) / std::sqrt(rng.chi_square(s[0]) / s[0]);
      break;
  }
  return params.loc + params.scale * z;
}

std::vector<double> sample_n(DistFamily family, const DistParams& params, std::size_t n, Rng& rng) {
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample(family, params, rng));
  return out;
}

double log_likelihood(DistFamily family, const DistParams& params, std::span<const double> data) {
  validate(family, params);
  auto kernel = make_kernel(family, params.shape);
  if (auto* nct = std::get_if<NonCentralT>(&kernel); nct && data.size() > 64) nct->build_table();
  const double inv_scale = 1.0 / params.scale;
  const double loc = params.loc;
  const double total = std::visit(
      [&](const auto& k) {
        double sum = 0.0;
        for (const double x : data) {
          const double lp = k.log_pdf((x - loc) * inv_scale);
          if (lp == kNegInf || std::isnan(lp)) return kNegInf;
          sum += lp;
        }
        return sum;
      },
      kernel);
  if (total == kNegInf) return kNegInf;
  return total - static_cast<double>(data.size()) * std::log(params.scale);
}

}  // namespace cycleflow
