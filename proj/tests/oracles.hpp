// Independent reference implementations used as test oracles.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

/// Concordant minus discordant pairs by direct enumeration.
inline long long kendall_score(const std::vector<double>& x, const std::vector<double>& y) {
  long long s = 0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double p = (x[i] - x[j]) * (y[i] - y[j]);
      s += p > 0 ? 1 : (p < 0 ? -1 : 0);
    }
  }
  return s;
}

inline double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  return 2.0 * static_cast<double>(kendall_score(x, y)) / (n * (n - 1.0));
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix (row-major).
/// Returns eigenvalues and the eigenvectors as columns of a row-major matrix.
inline std::pair<std::vector<double>, std::vector<double>> jacobi_eigen(std::vector<double> a, std::size_t n) {
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
    if (off < 1e-22) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<double> vals(n);
  for (std::size_t i = 0; i < n; ++i) vals[i] = a[i * n + i];
  return {vals, v};
}

/// Bivariate standard normal sample with correlation rho, via Box-Muller.
inline std::vector<std::pair<double, double>> gaussian_pairs(double rho, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::pair<double, double>> out(n);
  for (auto& p : out) {
    double a = unif(rng), b = unif(rng);
    if (a <= 0.0) a = 1e-300;
    const double r = std::sqrt(-2.0 * std::log(a));
    const double z1 = r * std::cos(2.0 * M_PI * b);
    const double z2 = r * std::sin(2.0 * M_PI * b);
    p = {z1, rho * z1 + std::sqrt(1.0 - rho * rho) * z2};
  }
  return out;
}

}  // namespace oracle
