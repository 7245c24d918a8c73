#include "comic/translate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "comic/error.hpp"
#include "comic/parallel.hpp"

namespace comic {

namespace {

/// Linearly interpolated order statistic at fractional rank r of sorted data.
double at_rank(const std::vector<double>& sorted, double r) {
  const auto lo = static_cast<std::size_t>(std::floor(r));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = r - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double median(const std::vector<double>& sorted) { return at_rank(sorted, 0.5 * static_cast<double>(sorted.size() - 1)); }

std::vector<double> linear_regress(const std::vector<double>& source, const std::vector<double>& target) {
  std::vector<double> xs(source), ys(target);
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  std::vector<double> out(source.size());
  if (sxx == 0.0) {
    std::fill(out.begin(), out.end(), median(ys));
    return out;
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  for (std::size_t i = 0; i < source.size(); ++i) out[i] = slope * source[i] + intercept;
  return out;
}

}  // namespace

std::string_view to_string(TranslationMethod method) {
  return method == TranslationMethod::HistogramMatch ? "histogram_match" : "linear_regress";
}

TranslationMethod parse_translation_method(std::string_view s) {
  if (s == "histogram_match") return TranslationMethod::HistogramMatch;
  if (s == "linear_regress") return TranslationMethod::LinearRegress;
  throw ContractError("unknown translation method: " + std::string(s));
}

std::vector<double> histogram_match(const std::vector<double>& source, const std::vector<double>& target) {
  require(!source.empty() && source.size() == target.size(), "histogram_match: sizes differ or empty");
  std::vector<double> sorted_target(target);
  std::sort(sorted_target.begin(), sorted_target.end());
  std::vector<std::size_t> order(source.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return source[a] < source[b]; });

  std::vector<double> out(source.size());
  std::size_t a = 0;
  while (a < order.size()) {
    std::size_t b = a + 1;
    while (b < order.size() && source[order[b]] == source[order[a]]) ++b;
    const double value = at_rank(sorted_target, 0.5 * static_cast<double>(a + b - 1));
    for (std::size_t i = a; i < b; ++i) out[order[i]] = value;
    a = b;
  }
  return out;
}

Raster translate_baseline(const Raster& x, const Raster& y, const TranslationSpec& spec) {
  require(x.same_grid(y), "translate: rasters differ in size");
  const std::size_t cy = y.channels();
  std::vector<std::size_t> map = spec.channel_map;
  if (map.empty()) {
    map.resize(cy);
    for (std::size_t c = 0; c < cy; ++c) map[c] = c % x.channels();
  }
  require(map.size() == cy, "translate: channel map must have one entry per target channel");
  for (std::size_t s : map) require(s < x.channels(), "translate: channel map refers to a missing source channel");

  std::vector<std::vector<double>> out(cy);
  parallel_for(cy, [&](std::size_t c) {
    const auto src_f = x.channel(map[c]);
    const auto tgt_f = y.channel(c);
    const std::vector<double> src(src_f.begin(), src_f.end());
    const std::vector<double> tgt(tgt_f.begin(), tgt_f.end());
    out[c] = spec.method == TranslationMethod::HistogramMatch ? histogram_match(src, tgt) : linear_regress(src, tgt);
  });

  std::vector<float> data(x.pixels() * cy);
  for (std::size_t p = 0; p < x.pixels(); ++p) {
    for (std::size_t c = 0; c < cy; ++c) data[p * cy + c] = static_cast<float>(out[c][p]);
  }
  return Raster(x.height(), x.width(), cy, std::move(data));
}

}  // namespace comic
