#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "symevol/errors.hpp"
#include "symevol/integrators.hpp"
#include "symevol/model.hpp"

using namespace symevol;

namespace {

using V2 = std::array<double, 2>;

V2 oscillator(double, const V2& y) { return {y[1], -y[0]}; }

}  // namespace

TEST(Integrators, AdaptiveSolvesDecay) {
  IntegratorConfig cfg;
  cfg.t_end = 5.0;
  cfg.sample_dt = 0.25;
  cfg.rtol = 1e-12;
  cfg.atol = 1e-14;
  auto rhs = [](double, const std::array<double, 1>& y) { return std::array<double, 1>{-y[0]}; };
  const auto sol = integrate<1>(rhs, {1.0}, cfg);
  ASSERT_EQ(sol.t.size(), 21u);
  for (std::size_t k = 0; k < sol.t.size(); ++k) {
    EXPECT_EQ(sol.t[k], 0.25 * static_cast<double>(k));
    EXPECT_NEAR(sol.y[k][0], std::exp(-sol.t[k]), 1e-10);
  }
  EXPECT_GT(sol.stats.steps, 0u);
  EXPECT_GT(sol.stats.rhs_evals, sol.stats.steps);
}

TEST(Integrators, DenseOutputOnOscillator) {
  IntegratorConfig cfg;
  cfg.t_end = 50.0;
  cfg.sample_dt = 0.01;
  cfg.rtol = 1e-11;
  cfg.atol = 1e-13;
  const auto sol = integrate<2>(oscillator, {1.0, 0.0}, cfg);
  double worst = 0.0;
  for (std::size_t k = 0; k < sol.t.size(); ++k) {
    worst = std::max(worst, std::abs(sol.y[k][0] - std::cos(sol.t[k])));
    worst = std::max(worst, std::abs(sol.y[k][1] + std::sin(sol.t[k])));
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(Integrators, FixedStepRk4) {
  IntegratorConfig cfg;
  cfg.method = Method::rk4;
  cfg.step = 0.01;
  cfg.t_end = 10.0;
  cfg.sample_dt = 0.5;
  const auto sol = integrate<2>(oscillator, {1.0, 0.0}, cfg);
  EXPECT_EQ(sol.t.back(), 10.0);
  EXPECT_NEAR(sol.y.back()[0], std::cos(10.0), 1e-8);
  EXPECT_EQ(sol.stats.steps, 1000u);
}

TEST(Integrators, Rk4EndpointOrder) {
  const auto coarse = rk4_endpoint<2>(oscillator, {1.0, 0.0}, 0.0, 5.0, 50);
  const auto fine = rk4_endpoint<2>(oscillator, {1.0, 0.0}, 0.0, 5.0, 100);
  const double e1 = std::abs(coarse[0] - std::cos(5.0));
  const double e2 = std::abs(fine[0] - std::cos(5.0));
  EXPECT_NEAR(std::log2(e1 / e2), 4.0, 0.2);
}

TEST(Integrators, MeasuredOrderOfRk4OnModel) {
  const ModelParams p = figure_params();
  auto rhs = [&p](double t, const Phase4& x) { return to_array(full_rhs(make_state(t, x), p)); };
  const std::vector<double> steps{0.2, 0.1, 0.05, 0.025};
  const auto est = order_check<4>(rhs, to_array(figure_initial_state()), 10.0, steps);
  ASSERT_FALSE(est.saturated);
  EXPECT_GE(est.slope, 3.7);
  EXPECT_LE(est.slope, 4.3);
  EXPECT_EQ(est.errors.size(), 4u);
}

TEST(Integrators, OrderCheckReportsSaturation) {
  const std::vector<double> steps{1e-3, 5e-4, 2.5e-4};
  const std::array<double, 2> exact{std::cos(1.0), -std::sin(1.0)};
  const auto est = order_check<2>(oscillator, {1.0, 0.0}, 1.0, steps, exact);
  EXPECT_TRUE(est.saturated);
  EXPECT_TRUE(std::isnan(est.slope));
}

TEST(Integrators, OrderCheckArguments) {
  const std::vector<double> two{0.1, 0.05};
  const std::vector<double> uneven{0.1, 0.05, 0.02};
  EXPECT_THROW(order_check<2>(oscillator, {1.0, 0.0}, 1.0, two), std::invalid_argument);
  EXPECT_THROW(order_check<2>(oscillator, {1.0, 0.0}, 1.0, uneven), std::invalid_argument);
}

TEST(Integrators, FitOrder) {
  const std::vector<double> h{0.1, 0.05, 0.025};
  std::vector<double> e;
  for (double x : h) e.push_back(3.0 * std::pow(x, 3));
  const auto est = fit_order(h, e, 0.0);
  EXPECT_NEAR(est.slope, 3.0, 1e-12);
  EXPECT_FALSE(est.saturated);
}

TEST(Integrators, BlowUpRaisesWithLastGoodState) {
  IntegratorConfig cfg;
  cfg.t_end = 2.0;
  auto rhs = [](double, const std::array<double, 1>& y) { return std::array<double, 1>{y[0] * y[0]}; };
  try {
    integrate<1>(rhs, {1.0}, cfg);
    FAIL() << "expected IntegrationFailure";
  } catch (const IntegrationFailure& e) {
    EXPECT_LT(e.last_time(), 1.0);
    EXPECT_GT(e.last_time(), 0.9);
    ASSERT_EQ(e.last_state().size(), 1u);
    EXPECT_GT(e.last_state()[0], 10.0);
  }
}

TEST(Integrators, StepBudget) {
  IntegratorConfig cfg;
  cfg.t_end = 100.0;
  cfg.max_steps = 10;
  EXPECT_THROW(integrate<2>(oscillator, {1.0, 0.0}, cfg), IntegrationFailure);
}

TEST(Integrators, InvalidConfiguration) {
  IntegratorConfig cfg;
  cfg.t_end = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.sample_dt = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.rtol = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.method = Method::rk4;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  EXPECT_THROW(integrate<2>(oscillator, {NAN, 0.0}, cfg), std::invalid_argument);
}

TEST(Integrators, SampleGridKeepsEndpoint) {
  const auto g = sample_grid(0.0, 1.0, 0.1);
  ASSERT_EQ(g.size(), 11u);
  EXPECT_NEAR(g.back(), 1.0, 1e-15);
  const auto h = sample_grid(2.0, 3.05, 0.5);
  ASSERT_EQ(h.size(), 3u);
  EXPECT_EQ(h.back(), 3.0);
}

TEST(Integrators, MethodNames) {
  EXPECT_EQ(parse_method("rk4"), Method::rk4);
  EXPECT_EQ(parse_method("adaptive-RK45"), Method::rk45);
  EXPECT_EQ(to_string(Method::rk45), "rk45");
  EXPECT_THROW(parse_method("euler"), std::invalid_argument);
}

TEST(Integrators, NonZeroStartTime) {
  IntegratorConfig cfg;
  cfg.t_start = 3.0;
  cfg.t_end = 4.0;
  cfg.sample_dt = 0.5;
  auto rhs = [](double t, const std::array<double, 1>&) { return std::array<double, 1>{2.0 * t}; };
  const auto sol = integrate<1>(rhs, {9.0}, cfg);
  ASSERT_EQ(sol.t.size(), 3u);
  EXPECT_NEAR(sol.y.back()[0], 16.0, 1e-12);
}
