#include "symevol/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "symevol/errors.hpp"

namespace symevol {

std::string_view to_string(DecayLaw law) {
  switch (law) {
    case DecayLaw::exponential:
      return "exponential";
    case DecayLaw::polynomial:
      return "polynomial";
  }
  return "unknown";
}

DecayLaw parse_decay_law(std::string_view text) {
  if (text == "exponential") return DecayLaw::exponential;
  if (text == "polynomial") return DecayLaw::polynomial;
  throw std::invalid_argument("unknown decay law '" + std::string(text) + "'");
}

double ModelParams::delta() const {
  if (delta_override) return *delta_override;
  return std::pow(epsilon, n);
}

void ModelParams::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
  };
  require(std::isfinite(a1) && std::isfinite(a2) && std::isfinite(a3) && std::isfinite(a4),
          "cubic coefficients must be finite");
  require(std::isfinite(omega) && omega > 0.0, "omega must be positive");
  // ε = 0 is admitted: it is the linear limit several checks rely on.
  require(std::isfinite(epsilon) && epsilon >= 0.0 && epsilon < 1.0, "epsilon must lie in [0, 1)");
  require(n >= 1, "decay exponent n must be >= 1");
  require(std::isfinite(decay_power) && decay_power > 0.0, "decay_power must be positive");
  if (delta_override) {
    require(std::isfinite(*delta_override) && *delta_override >= 0.0,
            "delta override must be finite and non-negative");
  }
}

ModelParams figure_params(int n) {
  ModelParams p;
  p.a1 = 1.0;
  p.a2 = 1.0;
  p.a3 = 0.75;
  p.a4 = 1.5;
  p.omega = 2.0;
  p.epsilon = 0.1;
  p.n = n;
  return p;
}

CartesianState figure_initial_state() { return {0.0, 0.0, 0.5, 0.0, 0.5}; }

double alpha(double tau, DecayLaw law, double power) {
  if (!(tau >= 0.0)) throw std::invalid_argument("alpha: slow time must be non-negative");
  switch (law) {
    case DecayLaw::exponential:
      return std::exp(-tau);
    case DecayLaw::polynomial:
      return std::pow(1.0 + tau, -power);
  }
  throw std::invalid_argument("alpha: unknown decay law");
}

double alpha_at(double t, const ModelParams& params) {
  return alpha(params.delta() * t, params.decay, params.decay_power);
}

Energy eval_hamiltonian(const CartesianState& s, const ModelParams& p) {
  const double w2 = p.omega * p.omega;
  const double quadratic = 0.5 * (s.v1 * s.v1 + s.q1 * s.q1) + 0.5 * (s.v2 * s.v2 + w2 * s.q2 * s.q2);
  const double symmetric = p.a1 * s.q1 * s.q1 * s.q1 / 3.0 + p.a2 * s.q1 * s.q2 * s.q2;
  const double asymmetric = p.a3 * s.q2 * s.q2 * s.q2 / 3.0 + p.a4 * s.q1 * s.q1 * s.q2;
  return {quadratic - p.epsilon * symmetric - p.epsilon * alpha_at(s.t, p) * asymmetric};
}

namespace {

CartesianRate cubic_rhs(const CartesianState& s, const ModelParams& p, bool with_symmetric) {
  const double eps = p.epsilon;
  const double a = alpha_at(s.t, p);
  CartesianRate r;
  r.q1 = s.v1;
  r.q2 = s.v2;
  r.v1 = -s.q1 + eps * a * 2.0 * p.a4 * s.q1 * s.q2;
  r.v2 = -p.omega * p.omega * s.q2 + eps * a * (p.a3 * s.q2 * s.q2 + p.a4 * s.q1 * s.q1);
  if (with_symmetric) {
    r.v1 += eps * (p.a1 * s.q1 * s.q1 + p.a2 * s.q2 * s.q2);
    r.v2 += eps * 2.0 * p.a2 * s.q1 * s.q2;
  }
  return r;
}

}  // namespace

CartesianRate full_rhs(const CartesianState& state, const ModelParams& params) {
  return cubic_rhs(state, params, true);
}

CartesianRate intermediate_rhs(const CartesianState& state, const ModelParams& params) {
  return cubic_rhs(state, params, false);
}

CartesianRate dissipative_rhs(const CartesianState& z, const ModelParams& p) {
  if (p.decay != DecayLaw::exponential) {
    throw Unsupported("dissipative form exists only for the exponential decay law");
  }
  const double d = p.delta();
  const double eps = p.epsilon;
  CartesianRate r;
  r.q1 = z.v1;
  r.q2 = z.v2;
  r.v1 = -z.q1 - 2.0 * d * z.v1 - d * d * z.q1 + eps * 2.0 * p.a4 * z.q1 * z.q2;
  r.v2 = -p.omega * p.omega * z.q2 - 2.0 * d * z.v2 - d * d * z.q2 +
         eps * (p.a3 * z.q2 * z.q2 + p.a4 * z.q1 * z.q1);
  return r;
}

CartesianState to_dissipative(const CartesianState& s, const ModelParams& p) {
  const double d = p.delta();
  const double g = std::exp(-d * s.t);
  return {s.t, g * s.q1, g * (s.v1 - d * s.q1), g * s.q2, g * (s.v2 - d * s.q2)};
}

CartesianState from_dissipative(const CartesianState& z, const ModelParams& p) {
  const double d = p.delta();
  const double g = std::exp(d * z.t);
  return {z.t, g * z.q1, g * (z.v1 + d * z.q1), g * z.q2, g * (z.v2 + d * z.q2)};
}

}  // namespace symevol
