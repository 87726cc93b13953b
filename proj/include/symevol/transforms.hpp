#pragma once

#include <array>
#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "symevol/model.hpp"

namespace symevol {

/// Slowly varying amplitude/phase coordinates
///   q1 = r1 cos(t + ψ1),  v1 = −r1 sin(t + ψ1),
///   q2 = r2 cos(ωt + ψ2), v2 = −ω r2 sin(ωt + ψ2),
/// with the slow time τ = δt carried as an extra variable.
struct PolarState {
  double r1 = 0.0;
  double psi1 = 0.0;
  double r2 = 0.0;
  double psi2 = 0.0;
  double tau = 0.0;
};

struct PolarRate {
  double r1 = 0.0;
  double psi1 = 0.0;
  double r2 = 0.0;
  double psi2 = 0.0;
  double tau = 0.0;
};

using Polar5 = std::array<double, 5>;

inline Polar5 to_array(const PolarState& s) { return {s.r1, s.psi1, s.r2, s.psi2, s.tau}; }
inline Polar5 to_array(const PolarRate& r) { return {r.r1, r.psi1, r.r2, r.psi2, r.tau}; }
inline PolarState make_polar(const Polar5& y) { return {y[0], y[1], y[2], y[3], y[4]}; }

/// Amplitudes below this are treated as sitting on a normal mode.
inline constexpr double kNormalModeThreshold = 1e-8;

/// Phases come back wrapped to (−π, π]; τ = 0. Throws PhaseUndefined when a
/// mode amplitude is below kNormalModeThreshold.
PolarState cart_to_polar(const CartesianState& state, double omega);
/// As above with τ = δt taken from the model.
PolarState cart_to_polar(const CartesianState& state, const ModelParams& params);

CartesianState polar_to_cart(const PolarState& polar, double omega, double t);

/// Mode amplitudes only; defined everywhere.
std::pair<double, double> amplitudes(const CartesianState& state, double omega);

struct ActionPair {
  double E1 = 0.0;
  double E2 = 0.0;
};

ActionPair actions(const CartesianState& state, double omega);
ActionPair actions(const PolarState& polar, double omega);

/// Wraps to (−π, π].
double wrap_angle(double x);
/// Continuous lift of a wrapped phase series.
std::vector<double> unwrap_angles(std::span<const double> wrapped);

enum class AngleKind {
  chi12,  // 2ψ1 − ψ2
  chi2,   // 4ψ1 − 2ψ2
  chi3,   // 6ψ1 − 2ψ2
  chi11,  // ψ1 − ψ2
};

std::string_view to_string(AngleKind kind);
std::pair<int, int> angle_coefficients(AngleKind kind);

struct CombinationAngle {
  AngleKind kind = AngleKind::chi12;
  double value = 0.0;
};

CombinationAngle combination_angle(AngleKind kind, double psi1, double psi2);

enum class SlowTerms {
  all,
  symmetric,   // a1, a2 couplings only
  asymmetric,  // a3, a4 couplings only (with α)
};

/// Variation-of-constants form of the full equations in the coordinates
/// above, α taken at the state's τ. The τ component is δ.
/// Throws PhaseUndefined when r1 or r2 is exactly zero.
PolarRate slow_rhs(double t, const PolarState& state, const ModelParams& params,
                   SlowTerms terms = SlowTerms::all);

/// Vector field on y = (r1, ψ1, r2, ψ2, τ) in (t, y).
using VectorField = std::function<std::vector<double>(double, std::span<const double>)>;

/// slow_rhs with the factor ε removed and a zero τ component, i.e. the f in
/// ẏ = ε f(t, y). α is read from y[4].
VectorField slow_field(const ModelParams& params, SlowTerms terms);

/// (1/T)∫₀ᵀ f(s, y) ds by composite Gauss–Legendre (8 panels × 16 nodes).
std::vector<double> period_average(const VectorField& f, double period, std::span<const double> y);

/// u(t, y) = ∫₀ᵗ f1(s, y) ds for a T-periodic f1 of zero mean in s. Uses
/// periodicity, so the cost is independent of t. Throws std::domain_error if
/// the mean of f1 over a period exceeds mean_tol (u would then be unbounded).
std::vector<double> near_identity_u(const VectorField& f1, double period, double t,
                                    std::span<const double> y, double mean_tol = 1e-10);

/// Leading transformed vector field ε f2(t, y) of ẋ = ε f1 + ε f2 after the
/// near-identity change x = y + ε u(t, y).
std::vector<double> transformed_rhs(const VectorField& f2, double epsilon, double t,
                                    std::span<const double> y);

}  // namespace symevol
