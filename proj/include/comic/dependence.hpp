#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace comic {

/// Empirical CDF F(h) = #{i : sample_i <= h} / N (inclusive step).
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> samples);

  double operator()(double h) const;
  std::vector<double> evaluate(std::span<const double> values) const;

  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& sorted_samples() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

EmpiricalCdf empirical_cdf(std::span<const double> samples);

enum class TailMode { Clayton, ClaytonSurvival };
enum class Orientation { Identity, Negated };

std::string_view to_string(TailMode mode);
std::string_view to_string(Orientation orientation);
TailMode parse_tail_mode(std::string_view s);
Orientation parse_orientation(std::string_view s);

struct TailDependence {
  double lower = 0.0;
  double upper = 0.0;
};

struct DependenceProfile {
  double tau = 0.0;
  double eta_lower = 0.0;
  double eta_upper = 0.0;

  Orientation orientation() const { return tau < 0.0 ? Orientation::Negated : Orientation::Identity; }
  TailMode tail_mode() const { return eta_lower > eta_upper ? TailMode::Clayton : TailMode::ClaytonSurvival; }
};

/// Kendall's tau-a: 2 * sum_{i<j} sign((x_i - x_j)(y_i - y_j)) / (N(N-1)).
/// O(N log N) merge-sort swap count; ties contribute zero.
double kendall_tau(std::span<const double> x, std::span<const double> y);

/// Integer numerator of kendall_tau: concordant minus discordant pairs.
long long kendall_score(std::span<const double> x, std::span<const double> y);

/// 1 - u elementwise when tau < 0, otherwise u unchanged.
std::vector<double> orient(std::span<const double> u, double tau);

/// Nonparametric tail coefficients of pseudo-observations with k = floor(sqrt(N)):
/// lower = #{u <= k/N and v <= k/N} / k, upper = #{u >= 1-k/N and v >= 1-k/N} / k,
/// both clipped to [0, 1].
TailDependence tail_dependence(std::span<const double> u, std::span<const double> v);

/// Full profile of one channel pair of raw features: tau on the raw values,
/// tail coefficients on self-ranked pseudo-observations after orientation.
DependenceProfile dependence_profile(std::span<const double> hx, std::span<const double> hy);

}  // namespace comic
