#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace symevol {

enum class DecayLaw { exponential, polynomial };

std::string_view to_string(DecayLaw law);
DecayLaw parse_decay_law(std::string_view text);

/// Parameters of the cubic two-dof model
///
///   H = ½(v1² + q1²) + ½(v2² + ω²q2²) − ε(⅓a1 q1³ + a2 q1 q2²)
///       − ε α(δt)(⅓a3 q2³ + a4 q1² q2),         δ = εⁿ.
///
/// The cubic terms carry ε explicitly (rescaled coordinates); ε = 1 gives the
/// unscaled Hamiltonian. a1, a2 are the mirror-symmetric couplings, a3, a4 the
/// asymmetric ones that are switched off by α.
struct ModelParams {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  double a4 = 0.0;
  double omega = 1.0;
  double epsilon = 0.1;
  int n = 1;
  DecayLaw decay = DecayLaw::exponential;
  /// Exponent p of the polynomial law α(τ) = (1 + τ)^(−p).
  double decay_power = 1.0;
  /// Replaces εⁿ when set; 0 freezes α at 1.
  std::optional<double> delta_override;

  double delta() const;
  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

/// fig1 coefficients: ε = 0.1, ω = 2, a1 = a2 = 1, a3 = 0.75, a4 = 1.5, n = 2.
ModelParams figure_params(int n = 2);

struct CartesianState {
  double t = 0.0;
  double q1 = 0.0;
  double v1 = 0.0;
  double q2 = 0.0;
  double v2 = 0.0;
};

/// q = 0, v = (0.5, 0.5) at t = 0.
CartesianState figure_initial_state();

/// Time derivative of (q1, v1, q2, v2).
struct CartesianRate {
  double q1 = 0.0;
  double v1 = 0.0;
  double q2 = 0.0;
  double v2 = 0.0;
};

struct Energy {
  double value = 0.0;
};

using Phase4 = std::array<double, 4>;

inline Phase4 to_array(const CartesianState& s) { return {s.q1, s.v1, s.q2, s.v2}; }
inline Phase4 to_array(const CartesianRate& r) { return {r.q1, r.v1, r.q2, r.v2}; }
inline CartesianState make_state(double t, const Phase4& x) { return {t, x[0], x[1], x[2], x[3]}; }

/// Decay function; exponential: e^(−τ), polynomial: (1 + τ)^(−p).
double alpha(double tau, DecayLaw law = DecayLaw::exponential, double power = 1.0);
/// α(δt) for the given model.
double alpha_at(double t, const ModelParams& params);

Energy eval_hamiltonian(const CartesianState& state, const ModelParams& params);

/// Full equations of motion.
CartesianRate full_rhs(const CartesianState& state, const ModelParams& params);

/// Intermediate normal form: the full system with the a1, a2 couplings removed.
CartesianRate intermediate_rhs(const CartesianState& state, const ModelParams& params);

/// Intermediate system after z = e^(−δt) q: autonomous, with friction 2δ.
/// Only defined for the exponential decay law.
CartesianRate dissipative_rhs(const CartesianState& zstate, const ModelParams& params);

/// q ↦ z with z = e^(−δt) q, ż = e^(−δt)(q̇ − δq).
CartesianState to_dissipative(const CartesianState& state, const ModelParams& params);
/// z ↦ q with q = e^(δt) z, q̇ = e^(δt)(ż + δz).
CartesianState from_dissipative(const CartesianState& zstate, const ModelParams& params);

}  // namespace symevol
