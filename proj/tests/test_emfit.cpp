#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "comic/emfit.hpp"
#include "comic/error.hpp"

using namespace comic;

TEST(EmConfig, Grids) {
  const EmConfig c;
  const auto r = c.rho_grid();
  ASSERT_EQ(r.size(), 99u);
  EXPECT_DOUBLE_EQ(r.front(), 0.01);
  EXPECT_DOUBLE_EQ(r.back(), 0.99);
  const auto t = c.theta_grid();
  ASSERT_EQ(t.size(), 200u);
  EXPECT_DOUBLE_EQ(t.front(), 0.1);
  EXPECT_DOUBLE_EQ(t.back(), 20.0);
  EmConfig bad;
  bad.eps = 0.0;
  EXPECT_THROW(bad.validate(), ContractError);
}

TEST(EStep, HandResponsibility) {
  const std::vector<PseudoObs> data{{0.5, 0.5}};
  const auto g = e_step(data, {0.8, 1.0, 0.3, TailMode::Clayton, Orientation::Identity});
  EXPECT_NEAR(g[0], 0.3 / 0.6 / (0.3 / 0.6 + 0.7 * 32.0 / 27.0), 1e-12);
  EXPECT_NEAR(g[0], 0.37605, 1e-5);
  EXPECT_NEAR(log_likelihood(data, {0.8, 1.0, 0.3}), 0.28490, 1e-5);
}

TEST(MStep, WeightIsMeanResponsibilityAndTiesPickSmaller) {
  const auto data = sample_mixture({0.6, 2.0, 0.5}, 400, 3);
  std::vector<double> gamma(data.size(), 0.25);
  const auto p = m_step(data, gamma, TailMode::Clayton, EmConfig{});
  EXPECT_DOUBLE_EQ(p.w, 0.25);

  // All-zero Gaussian responsibilities make every rho score 0: the smallest wins.
  std::vector<double> zero(data.size(), 0.0);
  EXPECT_DOUBLE_EQ(m_step(data, zero, TailMode::Clayton, EmConfig{}).rho, 0.01);
  std::vector<double> one(data.size(), 1.0);
  EXPECT_DOUBLE_EQ(m_step(data, one, TailMode::Clayton, EmConfig{}).theta, 0.1);
}

TEST(MStep, IncumbentKeptUnlessBeaten) {
  const auto data = sample_mixture({0.6, 2.0, 0.5}, 400, 4);
  std::vector<double> zero(data.size(), 0.0);
  const EmParams incumbent{0.005, 2.0, 0.5};
  // Flat rho objective: the off-grid incumbent ties and stays.
  EXPECT_DOUBLE_EQ(m_step(data, zero, TailMode::Clayton, EmConfig{}, &incumbent).rho, 0.005);
}

TEST(Fit, RecoversPureComponentsAndIsMonotone) {
  const auto g = sample_mixture({0.7, 1.0, 1.0}, 3000, 5);
  EmConfig tight;
  tight.eps = 1e-7;
  const auto fg = fit(g, TailMode::Clayton, tight);
  EXPECT_TRUE(fg.trace.monotone(1e-9));
  EXPECT_NEAR(fg.model.rho, 0.7, 0.06);
  EXPECT_GT(fg.model.w, 0.6);

  const auto c = sample_mixture({0.5, 3.0, 0.0}, 3000, 6);
  const auto fc = fit(c, TailMode::Clayton, tight);
  EXPECT_TRUE(fc.trace.monotone(1e-9));
  EXPECT_LT(fc.model.w, 0.4);
  EXPECT_NEAR(fc.model.theta, 3.0, 0.7);
}

TEST(Fit, TraceLayoutAndStopping) {
  const auto data = sample_mixture({0.5, 1.0, 0.5}, 500, 7);
  EmConfig cfg;
  const auto f = fit(data, TailMode::Clayton, cfg);
  ASSERT_GE(f.trace.iterations.size(), 2u);
  const auto& first = f.trace.iterations.front();
  EXPECT_EQ(first.iteration, 0u);
  EXPECT_EQ(first.rho, 0.5);
  EXPECT_EQ(first.theta, 0.5);
  EXPECT_EQ(first.w, 0.5);
  EXPECT_TRUE(f.trace.monotone(1e-9));
  if (f.trace.status == EmStatus::Converged) {
    const auto n = f.trace.iterations.size();
    EXPECT_LT(std::abs(f.trace.iterations[n - 1].log_likelihood - f.trace.iterations[n - 2].log_likelihood), cfg.eps);
  }
  cfg.max_iters = 1;
  cfg.eps = 1e-300;
  const auto capped = fit(data, TailMode::Clayton, cfg);
  EXPECT_EQ(capped.trace.status, EmStatus::MaxIters);
  EXPECT_EQ(capped.trace.iterations.size(), 2u);

  std::ostringstream out;
  write_trace_rows(out, capped.trace, "0,1,");
  const std::string rows = out.str();
  EXPECT_EQ(rows.rfind("0,1,0,", 0), 0u);
  EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 2);
}

TEST(Fit, RejectsTinyOrBoundaryData) {
  EXPECT_THROW(fit(std::vector<PseudoObs>(5, {0.5, 0.5}), TailMode::Clayton), ContractError);
  std::vector<PseudoObs> edge(20, {0.5, 0.5});
  edge[3] = {0.0, 0.5};
  EXPECT_THROW(fit(edge, TailMode::Clayton), ContractError);
}

TEST(Fit, SurvivalModeData) {
  const auto s = sample_mixture({0.5, 4.0, 0.0, TailMode::ClaytonSurvival, Orientation::Identity}, 2000, 8);
  const auto f = fit(s, TailMode::ClaytonSurvival);
  EXPECT_TRUE(f.trace.monotone(1e-9));
  EXPECT_EQ(f.model.tail_mode, TailMode::ClaytonSurvival);
  EXPECT_GT(f.model.theta, 2.5);
}

TEST(ChannelPairs, FitsEveryPairAndRoundTripsJson) {
  const auto s = sample_mixture({0.8, 1.0, 0.6}, 300, 9);
  FeatureMatrix fx{300, 2, {}}, fy{300, 1, {}};
  for (auto [u, v] : s) {
    fx.values.push_back(u);
    fx.values.push_back(1.0 - u * u);
    fy.values.push_back(10 * v);
  }
  const auto fitted = fit_channel_pairs(fx, fy, EmConfig{});
  ASSERT_EQ(fitted.models.pairs().size(), 2u);
  ASSERT_EQ(fitted.traces.size(), 2u);
  for (const auto& t : fitted.traces) EXPECT_TRUE(t.monotone(1e-9));
  EXPECT_EQ(fitted.models.at(0, 0).model.orientation, Orientation::Identity);
  EXPECT_EQ(fitted.models.at(1, 0).model.orientation, Orientation::Negated);
  EXPECT_EQ(fitted.models.n_train(), 300u);

  const auto j = to_json(fitted.models);
  const auto back = model_set_from_json(nlohmann::json::parse(j.dump()));
  for (std::size_t c1 = 0; c1 < 2; ++c1) {
    EXPECT_EQ(back.at(c1, 0).model.rho, fitted.models.at(c1, 0).model.rho);
    EXPECT_EQ(back.at(c1, 0).model.w, fitted.models.at(c1, 0).model.w);
    EXPECT_EQ(back.at(c1, 0).model.theta, fitted.models.at(c1, 0).model.theta);
    EXPECT_EQ(back.marginal_x(c1).sorted_samples(), fitted.models.marginal_x(c1).sorted_samples());
  }
  EXPECT_THROW(model_set_from_json(nlohmann::json::parse(R"({"cx":1})")), ContractError);
}
