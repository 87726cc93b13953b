#include "symevol/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "symevol/errors.hpp"
#include "symevol/quadrature.hpp"

namespace symevol {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

PolarState cart_to_polar(const CartesianState& s, double omega) {
  if (!(omega > 0.0)) throw std::invalid_argument("cart_to_polar: omega must be positive");
  PolarState p;
  p.r1 = std::hypot(s.q1, s.v1);
  p.r2 = std::hypot(s.q2, s.v2 / omega);
  if (p.r1 < kNormalModeThreshold) {
    throw PhaseUndefined(1, "phase of mode 1 undefined: amplitude " + std::to_string(p.r1));
  }
  if (p.r2 < kNormalModeThreshold) {
    throw PhaseUndefined(2, "phase of mode 2 undefined: amplitude " + std::to_string(p.r2));
  }
  p.psi1 = wrap_angle(std::atan2(-s.v1, s.q1) - s.t);
  p.psi2 = wrap_angle(std::atan2(-s.v2 / omega, s.q2) - omega * s.t);
  return p;
}

PolarState cart_to_polar(const CartesianState& state, const ModelParams& params) {
  PolarState p = cart_to_polar(state, params.omega);
  p.tau = params.delta() * state.t;
  return p;
}

CartesianState polar_to_cart(const PolarState& p, double omega, double t) {
  const double th1 = t + p.psi1;
  const double th2 = omega * t + p.psi2;
  return {t, p.r1 * std::cos(th1), -p.r1 * std::sin(th1), p.r2 * std::cos(th2),
          -omega * p.r2 * std::sin(th2)};
}

std::pair<double, double> amplitudes(const CartesianState& s, double omega) {
  return {std::hypot(s.q1, s.v1), std::hypot(s.q2, s.v2 / omega)};
}

ActionPair actions(const CartesianState& s, double omega) {
  return {0.5 * (s.v1 * s.v1 + s.q1 * s.q1), 0.5 * (s.v2 * s.v2 + omega * omega * s.q2 * s.q2)};
}

ActionPair actions(const PolarState& p, double omega) {
  return {0.5 * p.r1 * p.r1, 0.5 * omega * omega * p.r2 * p.r2};
}

double wrap_angle(double x) {
  double r = std::remainder(x, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

std::vector<double> unwrap_angles(std::span<const double> wrapped) {
  std::vector<double> out(wrapped.begin(), wrapped.end());
  for (std::size_t i = 1; i < out.size(); ++i) {
    out[i] = out[i - 1] + wrap_angle(wrapped[i] - wrapped[i - 1]);
  }
  return out;
}

std::string_view to_string(AngleKind kind) {
  switch (kind) {
    case AngleKind::chi12:
      return "chi12";
    case AngleKind::chi2:
      return "chi2";
    case AngleKind::chi3:
      return "chi3";
    case AngleKind::chi11:
      return "chi11";
  }
  return "unknown";
}

std::pair<int, int> angle_coefficients(AngleKind kind) {
  switch (kind) {
    case AngleKind::chi12:
      return {2, -1};
    case AngleKind::chi2:
      return {4, -2};
    case AngleKind::chi3:
      return {6, -2};
    case AngleKind::chi11:
      return {1, -1};
  }
  throw std::invalid_argument("unknown combination angle");
}

CombinationAngle combination_angle(AngleKind kind, double psi1, double psi2) {
  if (!std::isfinite(psi1) || !std::isfinite(psi2)) {
    throw std::invalid_argument("combination_angle: phases must be finite");
  }
  const auto [c1, c2] = angle_coefficients(kind);
  return {kind, wrap_angle(c1 * psi1 + c2 * psi2)};
}

namespace {

// Slow system with ε factored out.
Polar5 unit_slow_rhs(double t, const PolarState& s, const ModelParams& p, SlowTerms terms) {
  if (s.r1 == 0.0) throw PhaseUndefined(1, "slow system singular on r1 = 0");
  if (s.r2 == 0.0) throw PhaseUndefined(2, "slow system singular on r2 = 0");
  const double w = p.omega;
  const double th1 = t + s.psi1;
  const double th2 = w * t + s.psi2;
  const double q1 = s.r1 * std::cos(th1);
  const double q2 = s.r2 * std::cos(th2);

  double f1 = 0.0;  // forcing of q1'' + q1
  double f2 = 0.0;  // forcing of q2'' + ω² q2
  if (terms != SlowTerms::asymmetric) {
    f1 += p.a1 * q1 * q1 + p.a2 * q2 * q2;
    f2 += 2.0 * p.a2 * q1 * q2;
  }
  if (terms != SlowTerms::symmetric) {
    const double a = alpha(s.tau, p.decay, p.decay_power);
    f1 += a * 2.0 * p.a4 * q1 * q2;
    f2 += a * (p.a3 * q2 * q2 + p.a4 * q1 * q1);
  }
  return {-std::sin(th1) * f1, -std::cos(th1) * f1 / s.r1, -std::sin(th2) * f2 / w,
          -std::cos(th2) * f2 / (w * s.r2), 0.0};
}

}  // namespace

PolarRate slow_rhs(double t, const PolarState& state, const ModelParams& params, SlowTerms terms) {
  const Polar5 f = unit_slow_rhs(t, state, params, terms);
  const double eps = params.epsilon;
  return {eps * f[0], eps * f[1], eps * f[2], eps * f[3], params.delta()};
}

VectorField slow_field(const ModelParams& params, SlowTerms terms) {
  return [params, terms](double t, std::span<const double> y) {
    if (y.size() != 5) throw std::invalid_argument("slow_field: expected (r1, psi1, r2, psi2, tau)");
    const Polar5 f = unit_slow_rhs(t, {y[0], y[1], y[2], y[3], y[4]}, params, terms);
    return std::vector<double>(f.begin(), f.end());
  };
}

std::vector<double> period_average(const VectorField& f, double period, std::span<const double> y) {
  if (!(period > 0.0)) throw std::invalid_argument("period must be positive");
  auto integrand = [&](double s) { return f(s, y); };
  auto total = gauss16().integrate(integrand, 0.0, period, 8);
  for (double& v : total) v /= period;
  return total;
}

std::vector<double> near_identity_u(const VectorField& f1, double period, double t,
                                    std::span<const double> y, double mean_tol) {
  if (!(period > 0.0)) throw std::invalid_argument("near_identity_u: period must be positive");
  auto integrand = [&](double s) { return f1(s, y); };
  const auto& rule = gauss16();
  auto over_period = rule.integrate(integrand, 0.0, period, 8);

  // Scale the mean test by a typical integrand magnitude.
  double scale = 0.0;
  for (int k = 0; k < 16; ++k) {
    for (double v : f1(period * k / 16.0, y)) scale = std::max(scale, std::abs(v));
  }
  for (double v : over_period) {
    if (std::abs(v / period) > mean_tol * std::max(1.0, scale)) {
      throw std::domain_error("near_identity_u: vector field has non-zero mean over a period");
    }
  }
  if (t == 0.0) return std::vector<double>(over_period.size(), 0.0);

  const double cycles = std::floor(t / period);
  const double rest = t - cycles * period;
  std::vector<double> u(over_period.size(), 0.0);
  if (rest > 0.0) {
    const int panels = std::max(1, static_cast<int>(std::ceil(8.0 * rest / period)));
    u = rule.integrate(integrand, 0.0, rest, panels);
    u.resize(over_period.size(), 0.0);
  }
  for (std::size_t i = 0; i < u.size(); ++i) u[i] += cycles * over_period[i];
  return u;
}

std::vector<double> transformed_rhs(const VectorField& f2, double epsilon, double t,
                                    std::span<const double> y) {
  auto v = f2(t, y);
  for (double& x : v) x *= epsilon;
  return v;
}

}  // namespace symevol
