#include "comic/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "comic/error.hpp"

namespace comic {

namespace {

constexpr int kBoxRadius = 2;
constexpr std::uint64_t kMaskStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kChangeStream = 0xbf58476d1ce4e5b9ULL;
constexpr std::uint64_t kNoiseStream = 0x94d049bb133111ebULL;

/// Uniform in (0, 1), identical on every platform.
double open_uniform(std::mt19937_64& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; }

/// Box-Muller; draws two uniforms per call.
double standard_normal(std::mt19937_64& rng) {
  const double a = open_uniform(rng);
  const double b = open_uniform(rng);
  return std::sqrt(-2.0 * std::log(a)) * std::cos(2.0 * std::numbers::pi * b);
}

std::vector<double> box_smooth(const std::vector<double>& z, std::size_t m, std::size_t n) {
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t i0 = i >= kBoxRadius ? i - kBoxRadius : 0;
    const std::size_t i1 = std::min(m - 1, i + kBoxRadius);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t j0 = j >= kBoxRadius ? j - kBoxRadius : 0;
      const std::size_t j1 = std::min(n - 1, j + kBoxRadius);
      double s = 0.0;
      for (std::size_t a = i0; a <= i1; ++a) {
        for (std::size_t b = j0; b <= j1; ++b) s += z[a * n + b];
      }
      const double count = static_cast<double>((i1 - i0 + 1) * (j1 - j0 + 1));
      out[i * n + j] = s / count;
    }
  }
  return out;
}

/// logistic(k t) rescaled so [0, 1] maps onto [0, 1].
double logistic_warp(double t, double k) {
  auto f = [k](double s) { return 1.0 / (1.0 + std::exp(-k * s)); };
  return (f(t) - f(0.0)) / (f(1.0) - f(0.0));
}

std::size_t draw_index(std::mt19937_64& rng, std::size_t range) {
  return std::min(range - 1, static_cast<std::size_t>(open_uniform(rng) * static_cast<double>(range)));
}

}  // namespace

std::string_view to_string(ChangeShape shape) { return shape == ChangeShape::Rectangle ? "rectangle" : "blobs"; }

ChangeShape parse_change_shape(std::string_view s) {
  if (s == "rectangle") return ChangeShape::Rectangle;
  if (s == "blobs") return ChangeShape::Blobs;
  throw ContractError("unknown change shape: " + std::string(s));
}

void SynthConfig::validate() const {
  require(m >= 1 && n >= 1, "synth: image must be non-empty");
  require(cx >= 1 && cy >= 1, "synth: channel counts must be >= 1");
  require(change_fraction >= 0.0 && change_fraction < 1.0, "synth: change_fraction must lie in [0, 1)");
  require(noise_sigma >= 0.0 && std::isfinite(noise_sigma), "synth: noise_sigma must be >= 0");
  comic::validate(model);
}

BinaryMap change_mask(const SynthConfig& cfg) {
  cfg.validate();
  BinaryMap gt(cfg.m, cfg.n);
  const auto area = static_cast<std::size_t>(std::floor(cfg.change_fraction * static_cast<double>(cfg.m * cfg.n)));
  if (area == 0) return gt;
  std::mt19937_64 rng(cfg.seed ^ kMaskStream);

  if (cfg.change_shape == ChangeShape::Rectangle) {
    const double aspect = static_cast<double>(cfg.m) / static_cast<double>(cfg.n);
    std::size_t h = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(area) * aspect)));
    h = std::clamp<std::size_t>(h, 1, cfg.m);
    std::size_t w = (area + h - 1) / h;
    if (w > cfg.n) {
      w = cfg.n;
      h = std::min(cfg.m, (area + w - 1) / w);
    }
    require(h <= cfg.m && w <= cfg.n, "synth: change region larger than image");
    const std::size_t top = draw_index(rng, cfg.m - h + 1);
    const std::size_t left = draw_index(rng, cfg.n - w + 1);
    for (std::size_t i = top; i < top + h; ++i) {
      for (std::size_t j = left; j < left + w; ++j) gt.values[i * cfg.n + j] = 1;
    }
    return gt;
  }

  // Blobs: discs of a common radius dropped until the target area is covered.
  const double radius = std::max(2.0, std::sqrt(static_cast<double>(area) / (4.0 * std::numbers::pi)));
  std::size_t covered = 0;
  for (std::size_t attempt = 0; covered < area && attempt < 1000; ++attempt) {
    const double ci = static_cast<double>(draw_index(rng, cfg.m));
    const double cj = static_cast<double>(draw_index(rng, cfg.n));
    for (std::size_t i = 0; i < cfg.m; ++i) {
      for (std::size_t j = 0; j < cfg.n; ++j) {
        const double di = static_cast<double>(i) - ci;
        const double dj = static_cast<double>(j) - cj;
        auto& g = gt.values[i * cfg.n + j];
        if (g == 0 && di * di + dj * dj <= radius * radius && covered < area) {
          g = 1;
          ++covered;
        }
      }
    }
  }
  return gt;
}

SynthPair generate_pair(const SynthConfig& cfg) {
  cfg.validate();
  const std::size_t pixels = cfg.m * cfg.n;
  BinaryMap gt = change_mask(cfg);

  const auto draws = sample_mixture(cfg.model, pixels, cfg.seed);
  std::vector<double> u(pixels), v(pixels);
  std::mt19937_64 change_rng(cfg.seed ^ kChangeStream);
  for (std::size_t p = 0; p < pixels; ++p) {
    u[p] = draws[p].first;
    v[p] = cfg.model.orientation == Orientation::Negated ? 1.0 - draws[p].second : draws[p].second;
    // Drawn for every pixel so the stream does not depend on the mask.
    const double independent = open_uniform(change_rng);
    if (gt.values[p]) v[p] = independent;
  }
  u = box_smooth(u, cfg.m, cfg.n);
  v = box_smooth(v, cfg.m, cfg.n);

  std::mt19937_64 noise_rng(cfg.seed ^ kNoiseStream);
  const double noise = 255.0 * cfg.noise_sigma;
  std::vector<float> xd(pixels * cfg.cx), yd(pixels * cfg.cy);
  for (std::size_t p = 0; p < pixels; ++p) {
    for (std::size_t c = 0; c < cfg.cx; ++c) {
      double value = 255.0 * std::pow(u[p], 1.0 + 0.5 * static_cast<double>(c));
      if (noise > 0.0) value += noise * standard_normal(noise_rng);
      xd[p * cfg.cx + c] = static_cast<float>(value);
    }
    for (std::size_t c = 0; c < cfg.cy; ++c) {
      double value = 255.0 * logistic_warp(v[p], 1.0 + 0.5 * static_cast<double>(c));
      if (noise > 0.0) value += noise * standard_normal(noise_rng);
      yd[p * cfg.cy + c] = static_cast<float>(value);
    }
  }
  return {Raster(cfg.m, cfg.n, cfg.cx, std::move(xd)), Raster(cfg.m, cfg.n, cfg.cy, std::move(yd)), std::move(gt)};
}

}  // namespace comic
