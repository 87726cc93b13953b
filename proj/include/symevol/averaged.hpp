#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "symevol/integrators.hpp"
#include "symevol/model.hpp"
#include "symevol/transforms.hpp"

namespace symevol {

// Averaged (normal-form) vector fields. All take the slow time from
// state.tau, use α = e^(−τ) and return τ̇ = δ so they can be integrated as
// autonomous systems in (r1, ψ1, r2, ψ2, τ). Each checks that ω matches its
// resonance and that the decay law is exponential (Unsupported otherwise).

/// First-order 1:2 system (ω = 2). Throws PhaseUndefined for r1 = 0 or r2 = 0.
PolarRate avg12_first_rhs(const PolarState& state, const ModelParams& params);

/// dχ/dt for χ = 2ψ1 − ψ2 under the first-order 1:2 system.
double chi12_rhs(const PolarState& state, const ModelParams& params);

/// Second-order 1:2 system: first-order amplitudes, ε² phase corrections
/// including the e^(−2τ) blocks.
PolarRate avg12_second_rhs(const PolarState& state, const ModelParams& params);

/// Rate written as c_r1 r1² + c_r2 r2² with ε² factored out.
struct QuadraticRate {
  double r1_sq = 0.0;
  double r2_sq = 0.0;
};

/// dχ2/dt for χ2 = 4ψ1 − 2ψ2 on the long (1/ε²) time scale.
QuadraticRate chi2_coefficients(double a1, double a2);
double chi2_rhs(double r1, double r2, const ModelParams& params);

/// 1:3 system (ω = 3): constant amplitudes, ε² phase drift.
PolarRate avg13_rhs(const PolarState& state, const ModelParams& params);

/// How the constant 47/140 in the χ3 equation is read.
enum class Chi3Reading {
  dimensional,  // (47/140)·a2², like every other term
  literal,      // bare 47/140
};

QuadraticRate chi3_coefficients(double a1, double a2, Chi3Reading reading = Chi3Reading::dimensional);
/// dχ3/dt for χ3 = 6ψ1 − 2ψ2.
double chi3_rhs(double r1, double r2, const ModelParams& params,
                Chi3Reading reading = Chi3Reading::dimensional);

/// Second-order 1:1 system (ω = 1), α = e^(−τ) on the a3, a4 block.
/// Throws PhaseUndefined for r1 = 0 or r2 = 0.
PolarRate avg11_rhs(const PolarState& state, const ModelParams& params);

/// The model with a3 = a4 = 0, i.e. the mirror-symmetric end state.
ModelParams symmetric_limit(ModelParams params);

enum class AveragedSystem { first_12, second_12, res_13, res_11 };

std::string_view to_string(AveragedSystem system);
PolarRate averaged_rhs(AveragedSystem system, const PolarState& state, const ModelParams& params);

struct AveragedTrajectory {
  std::vector<double> t;
  std::vector<PolarState> samples;
  IntegratorStats stats;
};

AveragedTrajectory integrate_averaged(AveragedSystem system, const PolarState& initial,
                                      const ModelParams& params, const IntegratorConfig& config);

enum class InvariantName { E0_12, I3_12, E0_11, I3_11 };

std::string_view to_string(InvariantName name);
InvariantName parse_invariant_name(std::string_view text);

struct InvariantValue {
  InvariantName name = InvariantName::E0_12;
  double value = 0.0;
};

/// Constants of I3 = r1² r2² cos 2χ + α r1⁴ + β r1² for the symmetric 1:1
/// system; not known in closed form here, see fit_i3_11.
struct I3Coefficients {
  double alpha = 0.0;
  double beta = 0.0;
};

/// E0_12 = ½r1² + 2r2², I3_12 = a4 r1² r2 cos χ, E0_11 = ½(r1² + r2²),
/// I3_11 as above (requires coefficients).
InvariantValue invariant(InvariantName name, const PolarState& state, const ModelParams& params,
                         std::optional<I3Coefficients> i3 = std::nullopt);

/// Cartesian forms; I3_12 = a4(q1²q2 − v1²q2 + q1 v1 v2), which equals the
/// polar form under the ω = 2 coordinates.
InvariantValue invariant(InvariantName name, const CartesianState& state, const ModelParams& params,
                         std::optional<I3Coefficients> i3 = std::nullopt);

struct I3Fit {
  double alpha = 0.0;
  double beta = 0.0;
  /// Standard deviation of the fitted I3 along the samples over (r1² + r2²)².
  double residual = 0.0;
  std::size_t samples = 0;
};

/// Least-squares α, β minimising the variance of I3 along a trajectory of the
/// symmetric 1:1 system. Needs ≥ 200 samples with r1² actually varying; throws
/// Degenerate for normal-mode or constant-amplitude trajectories.
I3Fit fit_i3_11(std::span<const PolarState> samples);

}  // namespace symevol
