#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "comic/error.hpp"
#include "comic/translate.hpp"

using namespace comic;

namespace {

Raster random_raster(std::size_t h, std::size_t w, std::size_t c, std::uint64_t seed, float scale = 255.0f) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, scale);
  std::vector<float> data(h * w * c);
  for (auto& v : data) v = u(rng);
  return Raster(h, w, c, std::move(data));
}

double kolmogorov(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<double> grid(a);
  grid.insert(grid.end(), b.begin(), b.end());
  double d = 0.0;
  for (double t : grid) {
    const double fa = static_cast<double>(std::upper_bound(a.begin(), a.end(), t) - a.begin()) / a.size();
    const double fb = static_cast<double>(std::upper_bound(b.begin(), b.end(), t) - b.begin()) / b.size();
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

}  // namespace

TEST(HistogramMatch, SelfMatchIsIdentity) {
  const Raster x = random_raster(12, 9, 2, 1);
  EXPECT_EQ(translate_baseline(x, x), x);
  std::vector<float> tied(108);
  for (std::size_t i = 0; i < tied.size(); ++i) tied[i] = static_cast<float>(i % 7);
  const Raster t(12, 9, 1, tied);
  EXPECT_EQ(translate_baseline(t, t), t);
}

TEST(HistogramMatch, ConstantSourceMapsToMedian) {
  const std::vector<double> src(5, 3.0), tgt{9, 1, 5, 7, 3};
  for (double v : histogram_match(src, tgt)) EXPECT_EQ(v, 5.0);
  const std::vector<double> src4(4, 3.0), tgt4{1, 2, 4, 8};
  for (double v : histogram_match(src4, tgt4)) EXPECT_EQ(v, 3.0);
}

TEST(HistogramMatch, RecoversMonotoneWarp) {
  const Raster x = random_raster(20, 20, 1, 2);
  std::vector<float> yd(x.pixels());
  for (std::size_t p = 0; p < yd.size(); ++p) yd[p] = std::round(255.0f * std::pow(x.data()[p] / 255.0f, 2.2f));
  const Raster y(20, 20, 1, yd);
  const Raster out = translate_baseline(x, y);
  for (std::size_t p = 0; p < yd.size(); ++p) EXPECT_LE(std::abs(out.data()[p] - yd[p]), 1.0f);
}

TEST(HistogramMatch, MarginalsMatchWithinKolmogorovBound) {
  std::vector<float> xd(30 * 30);
  for (std::size_t i = 0; i < xd.size(); ++i) xd[i] = static_cast<float>(i % 37);  // heavy ties
  const Raster x(30, 30, 1, xd);
  const Raster y = random_raster(30, 30, 3, 3);
  const Raster out = translate_baseline(x, y);
  ASSERT_EQ(out.channels(), 3u);
  const double bound = 2.0 / std::sqrt(900.0) + 1e-6;
  for (std::size_t c = 0; c < 3; ++c) {
    const auto o = out.channel(c), t = y.channel(c);
    EXPECT_LE(kolmogorov({o.begin(), o.end()}, {t.begin(), t.end()}), bound + 1.0 / 30.0);
  }
  const Raster x2 = random_raster(30, 30, 1, 4);
  const Raster out2 = translate_baseline(x2, y);
  for (std::size_t c = 0; c < 3; ++c) {
    const auto o = out2.channel(c), t = y.channel(c);
    EXPECT_LE(kolmogorov({o.begin(), o.end()}, {t.begin(), t.end()}), bound);
  }
}

TEST(HistogramMatch, InvariantToMonotoneSourceTransform) {
  const Raster x = random_raster(15, 15, 1, 5, 1.0f);
  const Raster y = random_raster(15, 15, 1, 6);
  std::vector<float> hx(x.pixels());
  for (std::size_t p = 0; p < hx.size(); ++p) hx[p] = std::exp(3.0f * x.data()[p]);
  EXPECT_EQ(translate_baseline(Raster(15, 15, 1, hx), y), translate_baseline(x, y));
}

TEST(Translate, ChannelMapAndErrors) {
  const Raster x = random_raster(5, 5, 2, 7);
  const Raster y = random_raster(5, 5, 3, 8);
  EXPECT_EQ(translate_baseline(x, y).channels(), 3u);
  EXPECT_NO_THROW(translate_baseline(x, y, {TranslationMethod::HistogramMatch, {1, 1, 0}}));
  EXPECT_THROW(translate_baseline(x, y, {TranslationMethod::HistogramMatch, {0, 2, 0}}), ContractError);
  EXPECT_THROW(translate_baseline(x, random_raster(5, 6, 1, 9)), ContractError);
  EXPECT_THROW(parse_translation_method("cyclegan"), ContractError);
}

TEST(LinearRegress, ExactOnAffineRankAlignedData) {
  const Raster x = random_raster(8, 8, 1, 10);
  std::vector<float> yd(x.pixels());
  for (std::size_t p = 0; p < yd.size(); ++p) yd[p] = 2.0f * x.data()[p] + 3.0f;
  const Raster out = translate_baseline(x, Raster(8, 8, 1, yd), {TranslationMethod::LinearRegress, {}});
  for (std::size_t p = 0; p < yd.size(); ++p) EXPECT_NEAR(out.data()[p], yd[p], 1e-3);

  const Raster flat(2, 2, 1, {4, 4, 4, 4});
  const Raster out2 = translate_baseline(flat, Raster(2, 2, 1, {1, 2, 4, 8}), {TranslationMethod::LinearRegress, {}});
  for (float v : out2.data()) EXPECT_EQ(v, 3.0f);
}
