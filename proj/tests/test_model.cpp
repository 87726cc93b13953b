#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "symevol/errors.hpp"
#include "symevol/integrators.hpp"
#include "symevol/model.hpp"

using namespace symevol;

namespace {

CartesianState random_state(std::mt19937_64& rng, double t = 0.0) {
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  return {t, u(rng), u(rng), u(rng), u(rng)};
}

Solution<4> run(const ModelParams& p, const CartesianState& s0, double t_end, bool intermediate = false,
                double rtol = 1e-12) {
  IntegratorConfig cfg;
  cfg.rtol = rtol;
  cfg.atol = 1e-14;
  cfg.t_start = s0.t;
  cfg.t_end = t_end;
  cfg.sample_dt = 1.0;
  auto rhs = [&](double t, const Phase4& x) {
    const auto s = make_state(t, x);
    return to_array(intermediate ? intermediate_rhs(s, p) : full_rhs(s, p));
  };
  return integrate<4>(rhs, to_array(s0), cfg);
}

}  // namespace

TEST(Model, HamiltonianGradientMatchesEquationsOfMotion) {
  std::mt19937_64 rng(1);
  ModelParams p = figure_params();
  p.epsilon = 0.3;
  for (int k = 0; k < 200; ++k) {
    const auto s = random_state(rng, 50.0 * k);
    const auto g = oracle::hamiltonian_gradient(s, p);
    const auto r = full_rhs(s, p);
    EXPECT_NEAR(r.q1, g[1], 1e-8);
    EXPECT_NEAR(r.v1, -g[0], 1e-8);
    EXPECT_NEAR(r.q2, g[3], 1e-8);
    EXPECT_NEAR(r.v2, -g[2], 1e-8);
  }
}

TEST(Model, IntermediateSystemDropsSymmetricCouplings) {
  std::mt19937_64 rng(2);
  ModelParams p = figure_params();
  ModelParams asym = p;
  asym.a1 = asym.a2 = 0.0;
  for (int k = 0; k < 50; ++k) {
    const auto s = random_state(rng, 3.0 * k);
    const auto a = intermediate_rhs(s, p);
    const auto b = full_rhs(s, asym);
    EXPECT_DOUBLE_EQ(a.v1, b.v1);
    EXPECT_DOUBLE_EQ(a.v2, b.v2);
  }
}

TEST(Model, ZeroStateIsAnEquilibrium) {
  const ModelParams p = figure_params();
  const auto r = full_rhs({7.0, 0, 0, 0, 0}, p);
  EXPECT_EQ(r.q1, 0.0);
  EXPECT_EQ(r.v1, 0.0);
  EXPECT_EQ(r.q2, 0.0);
  EXPECT_EQ(r.v2, 0.0);
  EXPECT_EQ(eval_hamiltonian({7.0, 0, 0, 0, 0}, p).value, 0.0);
}

TEST(Model, FigureInitialStateHasEqualActions) {
  const auto s = figure_initial_state();
  const ModelParams p = figure_params();
  EXPECT_EQ(0.5 * (s.v1 * s.v1 + s.q1 * s.q1), 0.125);
  EXPECT_EQ(0.5 * (s.v2 * s.v2 + p.omega * p.omega * s.q2 * s.q2), 0.125);
  EXPECT_EQ(eval_hamiltonian(s, p).value, 0.25);
}

TEST(Model, DecayFunction) {
  EXPECT_EQ(alpha(0.0), 1.0);
  EXPECT_NEAR(alpha(2.0), std::exp(-2.0), 1e-16);
  EXPECT_NEAR(alpha(3.0, DecayLaw::polynomial, 2.0), 1.0 / 16.0, 1e-16);
  EXPECT_THROW(alpha(-1e-3), std::invalid_argument);
  EXPECT_EQ(alpha(std::numeric_limits<double>::infinity()), 0.0);
}

TEST(Model, SlowerDecayForLargerExponent) {
  const double a2 = alpha_at(1000.0, figure_params(2));
  const double a3 = alpha_at(1000.0, figure_params(3));
  EXPECT_NEAR(a2, std::exp(-10.0), 1e-15);
  EXPECT_NEAR(a3, std::exp(-1.0), 1e-15);
}

TEST(Model, DeltaOverride) {
  ModelParams p = figure_params();
  EXPECT_NEAR(p.delta(), 0.01, 1e-17);
  p.delta_override = 0.0;
  EXPECT_EQ(p.delta(), 0.0);
  EXPECT_EQ(alpha_at(1e6, p), 1.0);
}

TEST(Model, Validation) {
  ModelParams p = figure_params();
  EXPECT_NO_THROW(p.validate());
  p.epsilon = 1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.epsilon = -0.1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = figure_params();
  p.omega = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = figure_params();
  p.n = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = figure_params();
  p.a3 = NAN;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = figure_params();
  p.delta_override = -1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = figure_params();
  p.epsilon = 0.0;
  EXPECT_NO_THROW(p.validate());
}

TEST(Model, DecayLawNames) {
  EXPECT_EQ(parse_decay_law("exponential"), DecayLaw::exponential);
  EXPECT_EQ(parse_decay_law(to_string(DecayLaw::polynomial)), DecayLaw::polynomial);
  EXPECT_THROW(parse_decay_law("linear"), std::invalid_argument);
}

TEST(Model, FrozenDecayConservesEnergy) {
  ModelParams p = figure_params();
  p.delta_override = 0.0;
  IntegratorConfig cfg;
  cfg.rtol = 1e-10;
  cfg.atol = 1e-12;
  cfg.t_end = 1000.0;
  cfg.sample_dt = 1.0;
  auto rhs = [&](double t, const Phase4& x) { return to_array(full_rhs(make_state(t, x), p)); };
  const auto sol = integrate<4>(rhs, to_array(figure_initial_state()), cfg);
  const double e0 = eval_hamiltonian(figure_initial_state(), p).value;
  double drift = 0.0;
  for (std::size_t k = 0; k < sol.t.size(); ++k) {
    drift = std::max(drift, std::abs(eval_hamiltonian(make_state(sol.t[k], sol.y[k]), p).value - e0));
  }
  EXPECT_LT(drift, 1e-7);
}

TEST(Model, EnergyBalanceWithDecay) {
  // dH/dt = ∂H/∂t = ε δ e^(−δt)(⅓a3 q2³ + a4 q1² q2)
  std::mt19937_64 rng(3);
  const ModelParams p = figure_params();
  for (int k = 0; k < 20; ++k) {
    const auto s = random_state(rng, 10.0 * k + 1.0);
    const auto r = full_rhs(s, p);
    const auto g = oracle::hamiltonian_gradient(s, p);
    const double along = g[0] * r.q1 + g[1] * r.v1 + g[2] * r.q2 + g[3] * r.v2;
    const double h = 1e-4;
    auto later = s;
    later.t += h;
    auto earlier = s;
    earlier.t -= h;
    const double dt = (eval_hamiltonian(later, p).value - eval_hamiltonian(earlier, p).value) / (2 * h);
    const double expected =
        p.epsilon * p.delta() * alpha_at(s.t, p) * (p.a3 * std::pow(s.q2, 3) / 3.0 + p.a4 * s.q1 * s.q1 * s.q2);
    EXPECT_NEAR(along, 0.0, 1e-8);
    EXPECT_NEAR(dt, expected, 1e-10);
  }
}

TEST(Model, MirrorSymmetryWithoutAsymmetricTerms) {
  ModelParams p = figure_params();
  p.a3 = p.a4 = 0.0;
  p.epsilon = 0.2;
  std::mt19937_64 rng(4);
  for (int k = 0; k < 5; ++k) {
    auto s = random_state(rng);
    auto m = s;
    m.q2 = -m.q2;
    m.v2 = -m.v2;
    const auto a = run(p, s, 100.0);
    const auto b = run(p, m, 100.0);
    for (std::size_t i = 0; i < a.t.size(); ++i) {
      EXPECT_NEAR(a.y[i][0], b.y[i][0], 1e-9);
      EXPECT_NEAR(a.y[i][1], b.y[i][1], 1e-9);
      EXPECT_NEAR(a.y[i][2], -b.y[i][2], 1e-9);
      EXPECT_NEAR(a.y[i][3], -b.y[i][3], 1e-9);
    }
  }
}

TEST(Model, AsymmetricTermsBreakMirrorSymmetry) {
  ModelParams p = figure_params();
  p.delta_override = 0.0;
  auto s = figure_initial_state();
  auto m = s;
  m.v2 = -m.v2;
  const auto a = run(p, s, 50.0);
  const auto b = run(p, m, 50.0);
  EXPECT_GT(std::abs(a.y.back()[0] - b.y.back()[0]), 1e-3);
}

TEST(Model, DissipativeFormRoundTrip) {
  std::mt19937_64 rng(5);
  const ModelParams p = figure_params();
  for (int k = 0; k < 50; ++k) {
    const auto s = random_state(rng, 20.0 * k);
    const auto back = from_dissipative(to_dissipative(s, p), p);
    EXPECT_NEAR(back.q1, s.q1, 1e-14);
    EXPECT_NEAR(back.v1, s.v1, 1e-14);
    EXPECT_NEAR(back.q2, s.q2, 1e-14);
    EXPECT_NEAR(back.v2, s.v2, 1e-14);
  }
}

TEST(Model, DissipativeFormIsEquivalentToIntermediateSystem) {
  ModelParams p = figure_params();
  p.epsilon = 0.2;
  p.delta_override = 0.05;
  const auto s0 = figure_initial_state();
  const auto q = run(p, s0, 100.0, true);

  IntegratorConfig cfg;
  cfg.rtol = 1e-12;
  cfg.atol = 1e-14;
  cfg.t_end = 100.0;
  cfg.sample_dt = 1.0;
  auto rhs = [&](double t, const Phase4& x) { return to_array(dissipative_rhs(make_state(t, x), p)); };
  const auto z = integrate<4>(rhs, to_array(to_dissipative(s0, p)), cfg);
  double worst = 0.0;
  for (std::size_t i = 0; i < q.t.size(); ++i) {
    const auto back = to_array(from_dissipative(make_state(z.t[i], z.y[i]), p));
    for (int j = 0; j < 4; ++j) worst = std::max(worst, std::abs(back[j] - q.y[i][j]));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Model, DissipativeFormNeedsExponentialDecay) {
  ModelParams p = figure_params();
  p.decay = DecayLaw::polynomial;
  EXPECT_THROW(dissipative_rhs(figure_initial_state(), p), Unsupported);
}
