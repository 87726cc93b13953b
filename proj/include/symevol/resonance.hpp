#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "symevol/averaged.hpp"
#include "symevol/model.hpp"

namespace symevol {

/// Exact fraction with positive denominator in lowest terms.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// The exact fraction equal to x when its denominator is at most max_den.
std::optional<Rational> exact_rational(double x, std::int64_t max_den = 1'000'000);

enum class ResonanceKind { first_12, second_12, res_13 };

std::string_view to_string(ResonanceKind kind);

enum class AngleStability { unclassified, stable, unstable };

std::string_view to_string(AngleStability stability);

struct ManifoldAngle {
  double chi = 0.0;
  AngleStability stability = AngleStability::unclassified;
};

struct ResonanceManifold {
  ResonanceKind resonance = ResonanceKind::first_12;
  /// r1²/r2² on the manifold; empty when there is none.
  std::optional<double> amplitude_ratio;
  /// Same ratio as a fraction when the coefficients are rational.
  std::optional<Rational> ratio_exact;
  std::vector<ManifoldAngle> angles;
  /// Width O(ε^size_order).
  int size_order = 0;
  /// Interaction time O(1/ε^timescale_order).
  int timescale_order = 0;
  /// Both coefficients of the angle equation vanish.
  bool degenerate = false;
  /// Squared amplitudes on a given energy surface (first order only).
  std::optional<double> r1_sq;
  std::optional<double> r2_sq;
};

/// χ = 0, π with r1² = 8 r2², placed on ½r1² + 2r2² = E0.
ResonanceManifold locate_12_first(double E0);
/// Zero of the χ2 equation; χ = 0 stable, χ = π unstable.
ResonanceManifold locate_12_second(const ModelParams& params);
/// Zero of the χ3 equation.
ResonanceManifold locate_13(const ModelParams& params, Chi3Reading reading = Chi3Reading::dimensional);

enum class Mode11 { q1_normal_mode, q2_normal_mode, in_phase, out_of_phase };

std::string_view to_string(Mode11 mode);

enum class Existence { exists, absent, boundary };
enum class Stability { stable, unstable, boundary, not_applicable };

std::string_view to_string(Existence existence);
std::string_view to_string(Stability stability);

struct StabilityReport {
  Mode11 mode = Mode11::q1_normal_mode;
  Existence exists = Existence::exists;
  Stability stable = Stability::stable;
  /// a1 / (3 a2).
  double parameter = 0.0;
};

/// Parameter distance below which a value counts as sitting on a boundary.
inline constexpr double kBoundaryHalfWidth = 1e-9;

/// Normal modes and periodic orbits of the symmetric 1:1 system, in the order
/// q1 mode, q2 mode, in-phase, out-of-phase. Throws Degenerate for a2 = 0.
std::vector<StabilityReport> classify_11(double a1, double a2);
std::vector<StabilityReport> classify_11_parameter(double parameter);

enum class Verdict { consistent, contradicts, indeterminate };

std::string_view to_string(Verdict verdict);

struct VerifyOptions {
  /// Relative size of the initial perturbation.
  double seed = 1e-7;
  /// Horizon in units of 1/(ε² E0).
  double horizon = 500.0;
  double unstable_growth = 1e3;
  double stable_growth = 1e2;
  double rtol = 1e-11;
  double atol = 1e-14;
};

struct VerificationResult {
  Verdict verdict = Verdict::indeterminate;
  /// Existence as found from the angle equation on the energy surface.
  bool found = false;
  /// max |S(t) − S*| / |S(0) − S*| in Stokes coordinates.
  double growth = 0.0;
  /// r1²/r2² of the located periodic orbit (orbits only).
  std::optional<double> ratio;
};

/// Integrates the symmetric 1:1 averaged system (a2 = 1, a1 = 3·parameter)
/// from a perturbed mode or orbit on the surface ½(r1² + r2²) = E0 and checks
/// the observed growth against the report.
VerificationResult verify_stability_numerically(const StabilityReport& report, double E0, double epsilon,
                                                const VerifyOptions& options = {});

}  // namespace symevol
