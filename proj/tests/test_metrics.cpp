#include <gtest/gtest.h>

#include <random>

#include "comic/error.hpp"
#include "comic/metrics.hpp"

using namespace comic;

TEST(Metrics, HandTriple) {
  const auto r = report_from_counts(10, 80, 5, 5);
  EXPECT_DOUBLE_EQ(r.kc, 1550.0 / 2550.0);
  EXPECT_DOUBLE_EQ(r.fm, 20.0 / 30.0);
  EXPECT_DOUBLE_EQ(r.acc, 0.9);
  EXPECT_FALSE(r.degenerate);
}

TEST(Metrics, PerfectAndConstantPredictions) {
  BinaryMap gt(4, 5);
  for (std::size_t p = 0; p < 6; ++p) gt.values[p] = 1;
  const auto perfect = score(gt, gt);
  EXPECT_EQ(perfect.kc, 1.0);
  EXPECT_EQ(perfect.fm, 1.0);
  EXPECT_EQ(perfect.acc, 1.0);

  const auto zero = score(BinaryMap(4, 5), gt);
  EXPECT_EQ(zero.kc, 0.0);
  EXPECT_EQ(zero.fm, 0.0);
  EXPECT_DOUBLE_EQ(zero.acc, 14.0 / 20.0);
}

TEST(Metrics, DegenerateDenominators) {
  const auto r = score(BinaryMap(3, 3), BinaryMap(3, 3));
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.fm, 0.0);
  EXPECT_EQ(r.acc, 1.0);
}

TEST(Metrics, RandomCasesAgainstPixelLoop) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    BinaryMap b(13, 17), g(13, 17), bs(13, 17), gs(13, 17);
    std::size_t agree = 0;
    for (std::size_t p = 0; p < b.values.size(); ++p) {
      b.values[p] = rng() % 3 == 0;
      g.values[p] = rng() % 4 == 0;
      bs.values[p] = 1 - b.values[p];
      gs.values[p] = 1 - g.values[p];
      agree += b.values[p] == g.values[p];
    }
    const auto r = score(b, g);
    EXPECT_EQ(r.tp + r.tn + r.fp + r.fn, b.values.size());
    EXPECT_DOUBLE_EQ(r.acc, static_cast<double>(agree) / static_cast<double>(b.values.size()));
    const auto s = score(bs, gs);
    EXPECT_DOUBLE_EQ(s.acc, r.acc);
    EXPECT_NEAR(s.kc, r.kc, 1e-12);
  }
}

TEST(Metrics, Contracts) {
  EXPECT_THROW(score(BinaryMap(2, 2), BinaryMap(2, 3)), ContractError);
  BinaryMap g(1, 2);
  g.values[0] = 2;
  EXPECT_THROW(score(BinaryMap(1, 2), g), ContractError);
}

TEST(Metrics, Export) {
  const auto r = report_from_counts(1, 2, 3, 4);
  EXPECT_EQ(csv_header(), "tp,tn,fp,fn,kc,fm,acc");
  EXPECT_EQ(to_csv_row(r).rfind("1,2,3,4,", 0), 0u);
  const auto j = to_json(r);
  EXPECT_EQ(j["tp"], 1);
  EXPECT_EQ(j["fn"], 4);
  EXPECT_DOUBLE_EQ(j["acc"].get<double>(), 0.3);
}
