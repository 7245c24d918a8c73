#include <gtest/gtest.h>

#include <cmath>

#include "comic/dependence.hpp"
#include "comic/error.hpp"
#include "comic/synth.hpp"

using namespace comic;

TEST(Synth, ZeroFractionHasNoChange) {
  SynthConfig cfg;
  cfg.m = 32;
  cfg.n = 40;
  cfg.change_fraction = 0.0;
  const auto pair = generate_pair(cfg);
  EXPECT_EQ(pair.gt.count_ones(), 0u);
  EXPECT_EQ(pair.x.height(), 32u);
  EXPECT_EQ(pair.y.width(), 40u);
}

TEST(Synth, RectangleAreaFollowsFraction) {
  SynthConfig cfg;
  cfg.m = 100;
  cfg.n = 80;
  cfg.change_fraction = 0.1;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    cfg.seed = seed;
    const auto gt = change_mask(cfg);
    EXPECT_GE(gt.count_ones(), 800u);
    EXPECT_LE(gt.count_ones(), 800u + 100u);
  }
  cfg.change_shape = ChangeShape::Blobs;
  EXPECT_EQ(change_mask(cfg).count_ones(), 800u);
}

TEST(Synth, DeterministicPerSeed) {
  SynthConfig cfg;
  cfg.m = cfg.n = 48;
  cfg.cx = 2;
  cfg.cy = 3;
  cfg.noise_sigma = 0.05;
  cfg.seed = 9;
  const auto a = generate_pair(cfg), b = generate_pair(cfg);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
  EXPECT_EQ(a.gt, b.gt);
  cfg.seed = 10;
  EXPECT_FALSE(generate_pair(cfg).x == a.x);
}

TEST(Synth, ChangedRegionIsIndependentUnchangedIsDependent) {
  SynthConfig cfg;
  cfg.m = cfg.n = 128;
  cfg.model = {0.8, 1.0, 1.0};
  cfg.change_fraction = 0.2;
  cfg.seed = 3;
  const auto pair = generate_pair(cfg);
  std::vector<double> xc, yc, xu, yu;
  for (std::size_t p = 0; p < pair.gt.values.size(); ++p) {
    auto& xs = pair.gt.values[p] ? xc : xu;
    auto& ys = pair.gt.values[p] ? yc : yu;
    xs.push_back(pair.x.data()[p]);
    ys.push_back(pair.y.data()[p]);
  }
  ASSERT_GE(xc.size(), 2000u);
  EXPECT_LT(std::abs(kendall_tau(xc, yc)), 0.1);
  EXPECT_GT(kendall_tau(xu, yu), 0.5);
}

TEST(Synth, NegatedOrientationGivesNegativeAssociation) {
  SynthConfig cfg;
  cfg.m = cfg.n = 40;
  cfg.model = {0.8, 1.0, 1.0, TailMode::Clayton, Orientation::Negated};
  cfg.change_fraction = 0.0;
  const auto pair = generate_pair(cfg);
  const auto x = pair.x.channel(0), y = pair.y.channel(0);
  EXPECT_LT(kendall_tau(std::vector<double>(x.begin(), x.end()), std::vector<double>(y.begin(), y.end())), -0.3);
}

TEST(Synth, Contracts) {
  SynthConfig cfg;
  cfg.change_fraction = 1.0;
  EXPECT_THROW(generate_pair(cfg), ContractError);
  cfg.change_fraction = 0.1;
  cfg.noise_sigma = -1.0;
  EXPECT_THROW(generate_pair(cfg), ContractError);
  EXPECT_THROW(parse_change_shape("star"), ContractError);
}
