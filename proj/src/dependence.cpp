#include "comic/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "comic/error.hpp"

namespace comic {

namespace {

// Comparisons against the tail cut-offs k/N and 1 - k/N tolerate rounding in
// rank/N pseudo-observations so that exact ties are counted inclusively.
constexpr double kTailSlack = 1e-12;

long long tie_pairs(std::size_t run) { return static_cast<long long>(run) * static_cast<long long>(run - 1) / 2; }

template <typename Eq>
long long count_tied_pairs(const std::vector<std::size_t>& order, Eq eq) {
  long long ties = 0;
  std::size_t run = 1;
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (eq(order[i - 1], order[i])) {
      ++run;
    } else {
      ties += tie_pairs(run);
      run = 1;
    }
  }
  return ties + tie_pairs(run);
}

long long merge_count(std::vector<double>& v, std::vector<double>& buf, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  long long swaps = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<long long>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

void check_unit(std::span<const double> u, const char* what) {
  for (double x : u) {
    if (!(x >= 0.0 && x <= 1.0)) throw ContractError(std::string(what) + ": entry outside [0,1]");
  }
}

}  // namespace

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples)) {
  require(!sorted_.empty(), "empirical CDF needs at least one sample");
  for (double s : sorted_) require(std::isfinite(s), "empirical CDF sample is not finite");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double h) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), h);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

std::vector<double> EmpiricalCdf::evaluate(std::span<const double> values) const {
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), [this](double h) { return (*this)(h); });
  return out;
}

EmpiricalCdf empirical_cdf(std::span<const double> samples) {
  return EmpiricalCdf(std::vector<double>(samples.begin(), samples.end()));
}

std::string_view to_string(TailMode mode) { return mode == TailMode::Clayton ? "clayton" : "clayton_survival"; }

std::string_view to_string(Orientation orientation) {
  return orientation == Orientation::Identity ? "identity" : "negated";
}

TailMode parse_tail_mode(std::string_view s) {
  if (s == "clayton") return TailMode::Clayton;
  if (s == "clayton_survival") return TailMode::ClaytonSurvival;
  throw ContractError("unknown tail mode '" + std::string(s) + "'");
}

Orientation parse_orientation(std::string_view s) {
  if (s == "identity") return Orientation::Identity;
  if (s == "negated") return Orientation::Negated;
  throw ContractError("unknown orientation '" + std::string(s) + "'");
}

long long kendall_score(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "kendall_tau: length mismatch");
  require(x.size() >= 2, "kendall_tau: need at least two samples");
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) require(std::isfinite(x[i]) && std::isfinite(y[i]), "kendall_tau: non-finite sample");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });

  const long long all_pairs = tie_pairs(n);
  const long long x_ties = count_tied_pairs(order, [&](std::size_t a, std::size_t b) { return x[a] == x[b]; });
  const long long joint_ties =
      count_tied_pairs(order, [&](std::size_t a, std::size_t b) { return x[a] == x[b] && y[a] == y[b]; });

  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  std::vector<double> buf(n);
  const long long discordant = merge_count(ys, buf, 0, n);

  long long y_ties = 0;
  std::size_t run = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (ys[i] == ys[i - 1]) {
      ++run;
    } else {
      y_ties += tie_pairs(run);
      run = 1;
    }
  }
  y_ties += tie_pairs(run);

  return all_pairs - x_ties - y_ties + joint_ties - 2 * discordant;
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  const long long score = kendall_score(x, y);
  const double n = static_cast<double>(x.size());
  return 2.0 * static_cast<double>(score) / (n * (n - 1.0));
}

std::vector<double> orient(std::span<const double> u, double tau) {
  check_unit(u, "orient");
  std::vector<double> out(u.begin(), u.end());
  if (tau < 0.0) {
    for (double& v : out) v = 1.0 - v;
  }
  return out;
}

TailDependence tail_dependence(std::span<const double> u, std::span<const double> v) {
  require(u.size() == v.size(), "tail_dependence: length mismatch");
  require(u.size() >= 4, "tail_dependence: need at least four samples");
  check_unit(u, "tail_dependence");
  check_unit(v, "tail_dependence");
  const std::size_t n = u.size();
  const auto k = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  const double cut = static_cast<double>(k) / static_cast<double>(n);

  std::size_t lower = 0, upper = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (u[i] <= cut + kTailSlack && v[i] <= cut + kTailSlack) ++lower;
    if (u[i] >= 1.0 - cut - kTailSlack && v[i] >= 1.0 - cut - kTailSlack) ++upper;
  }
  const double kd = static_cast<double>(k);
  return {std::min(1.0, static_cast<double>(lower) / kd), std::min(1.0, static_cast<double>(upper) / kd)};
}

DependenceProfile dependence_profile(std::span<const double> hx, std::span<const double> hy) {
  DependenceProfile profile;
  profile.tau = kendall_tau(hx, hy);
  const auto u = empirical_cdf(hx).evaluate(hx);
  const auto v = orient(empirical_cdf(hy).evaluate(hy), profile.tau);
  const auto eta = tail_dependence(u, v);
  profile.eta_lower = eta.lower;
  profile.eta_upper = eta.upper;
  return profile;
}

}  // namespace comic
