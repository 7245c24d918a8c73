#include "comic/copula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "comic/error.hpp"
#include "comic/normal.hpp"

namespace comic {

namespace {

void check_open_unit(double u1, double u2) {
  if (!(u1 > 0.0 && u1 < 1.0 && u2 > 0.0 && u2 < 1.0)) {
    throw ContractError("copula density arguments must lie in (0,1)");
  }
}

void check_closed_unit(double u1, double u2) {
  if (!(u1 >= 0.0 && u1 <= 1.0 && u2 >= 0.0 && u2 <= 1.0)) {
    throw ContractError("copula CDF arguments must lie in [0,1]");
  }
}

void check_rho(double rho) {
  if (!(rho > -1.0 && rho < 1.0)) throw ContractError("Gaussian copula needs rho in (-1,1)");
}

void check_theta(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw ContractError("Clayton copula needs theta > 0");
}

double softplus(double a) { return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a)); }

/// log(u1^-theta + u2^-theta - 1) from log u1, log u2 without overflow.
double clayton_log_sum(double log_u1, double log_u2, double theta) {
  const double a = -theta * log_u1;
  const double b = -theta * log_u2;
  const double top = std::max(a, b);
  if (top < 30.0) return std::log1p(std::expm1(a) + std::expm1(b));
  return top + std::log(std::exp(a - top) + std::exp(b - top) - std::exp(-top));
}

double log_sum_exp(double a, double b) {
  const double top = std::max(a, b);
  if (top == -std::numeric_limits<double>::infinity()) return top;
  return top + std::log(std::exp(a - top) + std::exp(b - top));
}

/// Uniform draw strictly inside (0,1), independent of the standard library's
/// distribution implementations.
double open_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double clamp_open(double u) {
  return std::clamp(u, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

}  // namespace

void validate(const CopulaMixtureModel& model) {
  check_rho(model.rho);
  check_theta(model.theta);
  require(model.w >= 0.0 && model.w <= 1.0, "mixture weight must lie in [0,1]");
}

double gaussian_log_density_scores(double z1, double z2, double rho) {
  const double r2 = rho * rho;
  const double one_minus = 1.0 - r2;
  return -0.5 * std::log1p(-r2) - (r2 * (z1 * z1 + z2 * z2) - 2.0 * rho * z1 * z2) / (2.0 * one_minus);
}

double clayton_log_density_logs(double log_u1, double log_u2, double theta) {
  return std::log1p(theta) + (-1.0 - theta) * (log_u1 + log_u2) +
         (-1.0 / theta - 2.0) * clayton_log_sum(log_u1, log_u2, theta);
}

double gaussian_log_density(double u1, double u2, double rho) {
  check_open_unit(u1, u2);
  check_rho(rho);
  return gaussian_log_density_scores(normal_quantile(u1), normal_quantile(u2), rho);
}

double clayton_log_density(double u1, double u2, double theta) {
  check_open_unit(u1, u2);
  check_theta(theta);
  return clayton_log_density_logs(std::log(u1), std::log(u2), theta);
}

double sclayton_log_density(double u1, double u2, double theta) {
  check_open_unit(u1, u2);
  check_theta(theta);
  return clayton_log_density_logs(std::log1p(-u1), std::log1p(-u2), theta);
}

double gaussian_density(double u1, double u2, double rho) { return std::exp(gaussian_log_density(u1, u2, rho)); }
double clayton_density(double u1, double u2, double theta) { return std::exp(clayton_log_density(u1, u2, theta)); }
double sclayton_density(double u1, double u2, double theta) {
  return std::exp(sclayton_log_density(u1, u2, theta));
}

double tail_log_density(double u1, double u2, double theta, TailMode mode) {
  return mode == TailMode::Clayton ? clayton_log_density(u1, u2, theta) : sclayton_log_density(u1, u2, theta);
}

double gaussian_cdf(double u1, double u2, double rho) {
  check_closed_unit(u1, u2);
  check_rho(rho);
  if (u1 == 0.0 || u2 == 0.0) return 0.0;
  if (u1 == 1.0) return u2;
  if (u2 == 1.0) return u1;
  return std::clamp(bivariate_normal_cdf(normal_quantile(u1), normal_quantile(u2), rho), 0.0, std::min(u1, u2));
}

double clayton_cdf(double u1, double u2, double theta) {
  check_closed_unit(u1, u2);
  check_theta(theta);
  if (u1 == 0.0 || u2 == 0.0) return 0.0;
  return std::exp(-clayton_log_sum(std::log(u1), std::log(u2), theta) / theta);
}

double sclayton_cdf(double u1, double u2, double theta) {
  check_closed_unit(u1, u2);
  check_theta(theta);
  return std::max(0.0, u1 + u2 - 1.0 + clayton_cdf(1.0 - u1, 1.0 - u2, theta));
}

double mixture_log_density(double u1, double u2, const CopulaMixtureModel& model) {
  check_open_unit(u1, u2);
  validate(model);
  if (model.w == 1.0) return gaussian_log_density(u1, u2, model.rho);
  if (model.w == 0.0) return tail_log_density(u1, u2, model.theta, model.tail_mode);
  return log_sum_exp(std::log(model.w) + gaussian_log_density(u1, u2, model.rho),
                     std::log1p(-model.w) + tail_log_density(u1, u2, model.theta, model.tail_mode));
}

double mixture_density(double u1, double u2, const CopulaMixtureModel& model) {
  check_open_unit(u1, u2);
  validate(model);
  const double tail = model.tail_mode == TailMode::Clayton ? clayton_density(u1, u2, model.theta)
                                                           : sclayton_density(u1, u2, model.theta);
  if (model.w == 1.0) return gaussian_density(u1, u2, model.rho);
  if (model.w == 0.0) return tail;
  return model.w * gaussian_density(u1, u2, model.rho) + (1.0 - model.w) * tail;
}

double mixture_cdf(double u1, double u2, const CopulaMixtureModel& model) {
  validate(model);
  const double tail = model.tail_mode == TailMode::Clayton ? clayton_cdf(u1, u2, model.theta)
                                                           : sclayton_cdf(u1, u2, model.theta);
  return model.w * gaussian_cdf(u1, u2, model.rho) + (1.0 - model.w) * tail;
}

double joint_logpdf_superpixel(double hx, double hy, const EmpiricalCdf& cdf_x, const EmpiricalCdf& cdf_y,
                               const CopulaMixtureModel& model) {
  require(std::isfinite(hx) && std::isfinite(hy), "superpixel features must be finite");
  const double delta = pseudo_obs_clamp(cdf_x.size());
  const double u = std::clamp(cdf_x(hx), delta, 1.0 - delta);
  double v = cdf_y(hy);
  if (model.orientation == Orientation::Negated) v = 1.0 - v;
  v = std::clamp(v, delta, 1.0 - delta);
  return mixture_log_density(u, v, model);
}

std::vector<std::pair<double, double>> sample_mixture(const CopulaMixtureModel& model, std::size_t n,
                                                      std::uint64_t seed) {
  validate(model);
  std::mt19937_64 rng(seed);
  std::vector<std::pair<double, double>> out;
  out.reserve(n);
  const double s = std::sqrt(1.0 - model.rho * model.rho);
  const double theta = model.theta;
  for (std::size_t i = 0; i < n; ++i) {
    const double pick = open_uniform(rng);
    const double a = open_uniform(rng);
    const double b = open_uniform(rng);
    double u1, u2;
    if (pick < model.w) {
      const double z1 = normal_quantile(a);
      const double z2 = model.rho * z1 + s * normal_quantile(b);
      u1 = normal_cdf(z1);
      u2 = normal_cdf(z2);
    } else {
      // Conditional inversion: u2 = (u1^-theta (t^(-theta/(1+theta)) - 1) + 1)^(-1/theta).
      u1 = a;
      const double lift = std::log(std::expm1(-theta / (1.0 + theta) * std::log(b)));
      u2 = std::exp(-softplus(-theta * std::log(u1) + lift) / theta);
      if (model.tail_mode == TailMode::ClaytonSurvival) {
        u1 = 1.0 - u1;
        u2 = 1.0 - u2;
      }
    }
    out.emplace_back(clamp_open(u1), clamp_open(u2));
  }
  return out;
}

}  // namespace comic
