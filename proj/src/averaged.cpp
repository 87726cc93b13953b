#include "symevol/averaged.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "symevol/errors.hpp"

namespace symevol {

namespace {

void require_resonance(const ModelParams& p, double omega, const char* who) {
  if (std::abs(p.omega - omega) > 1e-12) {
    throw Unsupported(std::string(who) + ": requires omega = " + std::to_string(static_cast<int>(omega)));
  }
  if (p.decay != DecayLaw::exponential) {
    throw Unsupported(std::string(who) + ": averaged systems assume the exponential decay law");
  }
}

void require_amplitudes(const PolarState& s, const char* who) {
  if (s.r1 == 0.0) throw PhaseUndefined(1, std::string(who) + ": singular on r1 = 0");
  if (s.r2 == 0.0) throw PhaseUndefined(2, std::string(who) + ": singular on r2 = 0");
}

}  // namespace

PolarRate avg12_first_rhs(const PolarState& s, const ModelParams& p) {
  require_resonance(p, 2.0, "avg12_first_rhs");
  require_amplitudes(s, "avg12_first_rhs");
  const double k = p.epsilon * std::exp(-s.tau) * p.a4;
  const double chi = 2.0 * s.psi1 - s.psi2;
  const double sc = std::sin(chi);
  const double cc = std::cos(chi);
  return {-k / 2.0 * s.r1 * s.r2 * sc, -k / 2.0 * s.r2 * cc, k / 8.0 * s.r1 * s.r1 * sc,
          -k / 8.0 * s.r1 * s.r1 / s.r2 * cc, p.delta()};
}

double chi12_rhs(const PolarState& s, const ModelParams& p) {
  require_resonance(p, 2.0, "chi12_rhs");
  if (s.r2 == 0.0) throw PhaseUndefined(2, "chi12_rhs: singular on r2 = 0");
  const double chi = 2.0 * s.psi1 - s.psi2;
  return p.epsilon * p.a4 * std::exp(-s.tau) * (-s.r2 + s.r1 * s.r1 / (8.0 * s.r2)) * std::cos(chi);
}

PolarRate avg12_second_rhs(const PolarState& s, const ModelParams& p) {
  PolarRate out = avg12_first_rhs(s, p);
  const double e2 = p.epsilon * p.epsilon;
  const double x1 = s.r1 * s.r1;
  const double x2 = s.r2 * s.r2;
  const double a2t = std::exp(-2.0 * s.tau);
  out.psi1 -= e2 * (p.a1 * p.a1 * x1 / 24.0 + p.a1 * p.a2 * x2 / 2.0 +
                    a2t * (p.a3 * p.a4 * x2 / 8.0 + p.a4 * p.a4 * (9.0 * x1 + 4.0 * x2) / 64.0));
  out.psi2 -= e2 * (p.a1 * p.a2 * x1 / 4.0 + p.a2 * p.a2 * x1 / 30.0 + 29.0 * p.a2 * p.a2 * x2 / 120.0 +
                    a2t * (p.a3 * p.a4 * x1 / 16.0 + p.a4 * p.a4 * x1 / 32.0 +
                           5.0 * p.a3 * p.a3 * x2 / 96.0));
  return out;
}

QuadraticRate chi2_coefficients(double a1, double a2) {
  return {-a1 * a1 / 6.0 + a1 * a2 / 2.0 + a2 * a2 / 15.0, -2.0 * a1 * a2 + 29.0 * a2 * a2 / 60.0};
}

double chi2_rhs(double r1, double r2, const ModelParams& p) {
  const QuadraticRate c = chi2_coefficients(p.a1, p.a2);
  return p.epsilon * p.epsilon * (c.r1_sq * r1 * r1 + c.r2_sq * r2 * r2);
}

PolarRate avg13_rhs(const PolarState& s, const ModelParams& p) {
  require_resonance(p, 3.0, "avg13_rhs");
  const double e2 = p.epsilon * p.epsilon;
  const double x1 = s.r1 * s.r1;
  const double x2 = s.r2 * s.r2;
  const double a1 = p.a1;
  const double a2 = p.a2;
  PolarRate out;
  out.psi1 = -e2 * (5.0 / 12.0 * a1 * a1 * x1 + (a1 * a2 / 2.0 - a2 * a2 / 35.0) * x2);
  out.psi2 = -e2 * ((a1 * a2 / 6.0 + a2 * a2 / 105.0) * x1 + 23.0 / 140.0 * a2 * a2 * x2);
  out.tau = p.delta();
  return out;
}

QuadraticRate chi3_coefficients(double a1, double a2, Chi3Reading reading) {
  const double c1 = 2.5 * a1 * a1 - a1 * a2 / 6.0 - a2 * a2 / 105.0;
  const double last = reading == Chi3Reading::dimensional ? 47.0 / 140.0 * a2 * a2 : 47.0 / 140.0;
  const double c2 = 3.0 * a1 * a2 + last;
  return {-c1, c2};
}

double chi3_rhs(double r1, double r2, const ModelParams& p, Chi3Reading reading) {
  const QuadraticRate c = chi3_coefficients(p.a1, p.a2, reading);
  return p.epsilon * p.epsilon * (c.r1_sq * r1 * r1 + c.r2_sq * r2 * r2);
}

PolarRate avg11_rhs(const PolarState& s, const ModelParams& p) {
  require_resonance(p, 1.0, "avg11_rhs");
  require_amplitudes(s, "avg11_rhs");
  const double e2 = p.epsilon * p.epsilon;
  const double al = std::exp(-s.tau);
  const double x1 = s.r1 * s.r1;
  const double x2 = s.r2 * s.r2;
  const double chi = s.psi1 - s.psi2;
  const double s2 = std::sin(2.0 * chi);
  const double c2 = std::cos(2.0 * chi);
  const double c = p.a1 * p.a2 / 12.0 - p.a2 * p.a2 / 2.0;
  const double d = p.a3 * p.a4 / 12.0 - p.a4 * p.a4 / 2.0;
  const double k = c + al * d;
  const double b_sym = p.a1 * p.a2 / 2.0 + p.a2 * p.a2 / 3.0;
  const double b_asym = p.a3 * p.a4 / 2.0 + p.a4 * p.a4 / 3.0;

  PolarRate out;
  out.r1 = e2 * k * s.r1 * x2 * s2;
  out.r2 = -e2 * k * x1 * s.r2 * s2;
  out.psi1 = -e2 * (5.0 / 12.0 * p.a1 * p.a1 * x1 + b_sym * x2 - c * x2 * c2) -
             e2 * al * (b_asym * x2 + 5.0 / 12.0 * p.a4 * p.a4 * x1 - d * x2 * c2);
  out.psi2 = -e2 * (b_sym * x1 + 5.0 / 12.0 * p.a2 * p.a2 * x2 - c * x1 * c2) -
             e2 * al * (5.0 / 12.0 * p.a3 * p.a3 * x2 + b_asym * x1 - d * x1 * c2);
  out.tau = p.delta();
  return out;
}

ModelParams symmetric_limit(ModelParams params) {
  params.a3 = 0.0;
  params.a4 = 0.0;
  return params;
}

std::string_view to_string(AveragedSystem system) {
  switch (system) {
    case AveragedSystem::first_12:
      return "1:2";
    case AveragedSystem::second_12:
      return "1:2-second";
    case AveragedSystem::res_13:
      return "1:3";
    case AveragedSystem::res_11:
      return "1:1";
  }
  return "unknown";
}

PolarRate averaged_rhs(AveragedSystem system, const PolarState& state, const ModelParams& params) {
  switch (system) {
    case AveragedSystem::first_12:
      return avg12_first_rhs(state, params);
    case AveragedSystem::second_12:
      return avg12_second_rhs(state, params);
    case AveragedSystem::res_13:
      return avg13_rhs(state, params);
    case AveragedSystem::res_11:
      return avg11_rhs(state, params);
  }
  throw std::invalid_argument("unknown averaged system");
}

AveragedTrajectory integrate_averaged(AveragedSystem system, const PolarState& initial,
                                      const ModelParams& params, const IntegratorConfig& config) {
  auto rhs = [&](double, const Polar5& y) { return to_array(averaged_rhs(system, make_polar(y), params)); };
  auto sol = integrate<5>(rhs, to_array(initial), config);
  AveragedTrajectory out;
  out.t = std::move(sol.t);
  out.samples.reserve(sol.y.size());
  for (const auto& y : sol.y) out.samples.push_back(make_polar(y));
  out.stats = sol.stats;
  return out;
}

std::string_view to_string(InvariantName name) {
  switch (name) {
    case InvariantName::E0_12:
      return "E0_12";
    case InvariantName::I3_12:
      return "I3_12";
    case InvariantName::E0_11:
      return "E0_11";
    case InvariantName::I3_11:
      return "I3_11";
  }
  return "unknown";
}

InvariantName parse_invariant_name(std::string_view text) {
  for (auto n : {InvariantName::E0_12, InvariantName::I3_12, InvariantName::E0_11, InvariantName::I3_11}) {
    if (text == to_string(n)) return n;
  }
  throw std::invalid_argument("unknown invariant '" + std::string(text) + "'");
}

namespace {

double i3_11(const PolarState& s, const I3Coefficients& c) {
  const double x1 = s.r1 * s.r1;
  const double x2 = s.r2 * s.r2;
  return x1 * x2 * std::cos(2.0 * (s.psi1 - s.psi2)) + c.alpha * x1 * x1 + c.beta * x1;
}

I3Coefficients require_i3(const std::optional<I3Coefficients>& i3) {
  if (!i3) throw std::invalid_argument("I3_11 needs fitted coefficients (see fit_i3_11)");
  return *i3;
}

}  // namespace

InvariantValue invariant(InvariantName name, const PolarState& s, const ModelParams& p,
                         std::optional<I3Coefficients> i3) {
  const double x1 = s.r1 * s.r1;
  const double x2 = s.r2 * s.r2;
  switch (name) {
    case InvariantName::E0_12:
      return {name, 0.5 * x1 + 2.0 * x2};
    case InvariantName::I3_12:
      return {name, p.a4 * x1 * s.r2 * std::cos(2.0 * s.psi1 - s.psi2)};
    case InvariantName::E0_11:
      return {name, 0.5 * (x1 + x2)};
    case InvariantName::I3_11:
      return {name, i3_11(s, require_i3(i3))};
  }
  throw std::invalid_argument("unknown invariant");
}

InvariantValue invariant(InvariantName name, const CartesianState& s, const ModelParams& p,
                         std::optional<I3Coefficients> i3) {
  switch (name) {
    case InvariantName::E0_12:
      return {name, 0.5 * (s.v1 * s.v1 + s.q1 * s.q1) + 0.5 * (s.v2 * s.v2 + 4.0 * s.q2 * s.q2)};
    case InvariantName::I3_12:
      return {name, p.a4 * (s.q1 * s.q1 * s.q2 - s.v1 * s.v1 * s.q2 + s.q1 * s.v1 * s.v2)};
    case InvariantName::E0_11:
      return {name, 0.5 * (s.v1 * s.v1 + s.q1 * s.q1 + s.v2 * s.v2 + s.q2 * s.q2)};
    case InvariantName::I3_11:
      return {name, i3_11(cart_to_polar(s, 1.0), require_i3(i3))};
  }
  throw std::invalid_argument("unknown invariant");
}

I3Fit fit_i3_11(std::span<const PolarState> samples) {
  constexpr std::size_t kMinSamples = 200;
  if (samples.size() < kMinSamples) {
    throw Degenerate("fit_i3_11: need at least 200 samples, got " + std::to_string(samples.size()));
  }
  const auto n = static_cast<double>(samples.size());
  double scale = 0.0;
  double min_r1 = INFINITY;
  double min_r2 = INFINITY;
  for (const auto& s : samples) {
    scale += s.r1 * s.r1 + s.r2 * s.r2;
    min_r1 = std::min(min_r1, std::abs(s.r1));
    min_r2 = std::min(min_r2, std::abs(s.r2));
  }
  scale /= n;
  if (!(scale > 0.0) || min_r1 < kNormalModeThreshold || min_r2 < kNormalModeThreshold) {
    throw Degenerate("fit_i3_11: trajectory touches a normal mode");
  }

  // Centre g = r1²r2²cos2χ, h1 = r1⁴, h2 = r1² and solve the 2×2 normal
  // equations for var(g + α h1 + β h2) → min.
  double mg = 0.0, m1 = 0.0, m2 = 0.0;
  for (const auto& s : samples) {
    const double x1 = s.r1 * s.r1 / scale;
    mg += x1 * s.r2 * s.r2 / scale * std::cos(2.0 * (s.psi1 - s.psi2));
    m1 += x1 * x1;
    m2 += x1;
  }
  mg /= n;
  m1 /= n;
  m2 /= n;
  double s11 = 0.0, s12 = 0.0, s22 = 0.0, s1g = 0.0, s2g = 0.0;
  for (const auto& s : samples) {
    const double x1 = s.r1 * s.r1 / scale;
    const double g = x1 * s.r2 * s.r2 / scale * std::cos(2.0 * (s.psi1 - s.psi2)) - mg;
    const double h1 = x1 * x1 - m1;
    const double h2 = x1 - m2;
    s11 += h1 * h1;
    s12 += h1 * h2;
    s22 += h2 * h2;
    s1g += h1 * g;
    s2g += h2 * g;
  }
  if (s22 / n < 1e-16) throw Degenerate("fit_i3_11: r1 does not vary along the trajectory");
  const double det = s11 * s22 - s12 * s12;
  if (!(det > 1e-12 * s11 * s22)) throw Degenerate("fit_i3_11: ill-conditioned fit");
  // Coefficients in the scaled variables (r² / scale).
  const double a_hat = (-s1g * s22 + s2g * s12) / det;
  const double b_hat = (-s2g * s11 + s1g * s12) / det;

  double var = 0.0;
  for (const auto& s : samples) {
    const double x1 = s.r1 * s.r1 / scale;
    const double g = x1 * s.r2 * s.r2 / scale * std::cos(2.0 * (s.psi1 - s.psi2)) - mg;
    const double v = g + a_hat * (x1 * x1 - m1) + b_hat * (x1 - m2);
    var += v * v;
  }
  I3Fit fit;
  fit.alpha = a_hat;
  fit.beta = b_hat * scale;
  fit.residual = std::sqrt(var / n);
  fit.samples = samples.size();
  return fit;
}

}  // namespace symevol
