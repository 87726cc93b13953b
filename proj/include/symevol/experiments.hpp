#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "symevol/averaged.hpp"
#include "symevol/integrators.hpp"
#include "symevol/model.hpp"
#include "symevol/transforms.hpp"

namespace symevol {

enum class Observable { actions, invariants, angles, velocities };

std::string_view to_string(Observable observable);
Observable parse_observable(std::string_view text);

struct ScenarioConfig {
  ModelParams params;
  CartesianState initial;
  /// Absolute end time.
  double horizon = 100.0;
  std::vector<Observable> observables{Observable::actions};
  std::string label;
  /// Method, tolerances and sample spacing; the time span comes from
  /// initial.t and horizon.
  IntegratorConfig integrator;

  void validate() const;
};

/// fig1 (n = 2) or fig2 (n = 3) scenario with the given horizon.
ScenarioConfig figure_scenario(int n, double horizon);

/// Named time series; column order is fixed by the order of insertion.
using Series = std::vector<std::pair<std::string, std::vector<double>>>;

struct Trajectory {
  std::vector<CartesianState> states;
  /// actions: E1, E2; invariants: E0_12, I3_12, E0_11; angles: the
  /// combination angle of the resonance ω ∈ {1, 2, 3} (NaN on a normal mode);
  /// velocities: v1, v2.
  Series series;
  IntegratorStats stats;

  const std::vector<double>& column(std::string_view name) const;
};

/// Integrates the full system. Integration failures propagate.
Trajectory run_scenario(const ScenarioConfig& config);

struct InvariantReport {
  InvariantName name = InvariantName::E0_12;
  double initial = 0.0;
  double min = 0.0;
  double max = 0.0;
  double max_drift = 0.0;
  /// max_drift over the initial E0 of the same resonance (E0_12 or E0_11).
  double normalized_drift = 0.0;
};

std::vector<InvariantReport> invariant_drift(const Trajectory& trajectory, const ModelParams& params,
                                             std::span<const InvariantName> names,
                                             std::optional<I3Coefficients> i3 = std::nullopt);

/// The averaged system matching ω: 1 → 1:1, 2 → 1:2, 3 → 1:3. Throws
/// Unsupported otherwise.
AveragedSystem default_averaged_system(double omega);
AveragedSystem parse_averaged_system(std::string_view text);

struct CompareOptions {
  /// Horizon L/ε (the scenario horizon is used when ε = 0).
  double L = 5.0;
  double sample_dt = 0.05;
  double rtol = 1e-11;
  double atol = 1e-13;
  /// Also compare against y + ε u(t, y), the averaged solution mapped back
  /// through the first-order near-identity transformation.
  bool near_identity = false;
};

struct CompareMetrics {
  double epsilon = 0.0;
  double horizon = 0.0;
  double r1_error = 0.0;
  double r2_error = 0.0;
  /// max of r1_error, r2_error.
  double amplitude_error = 0.0;
  double action_error = 0.0;
  std::optional<double> corrected_amplitude_error;
  std::size_t samples = 0;
};

/// Full versus averaged solution from the same polar initial data. Averaged
/// amplitudes are compared by magnitude (r → −r with ψ → ψ + π is the same
/// point). Throws PhaseUndefined for normal-mode data and Unsupported when ω
/// does not match the averaged system.
CompareMetrics compare_full_vs_averaged(const ScenarioConfig& config, AveragedSystem system,
                                        const CompareOptions& options = {});

/// Least-squares slope of log(error) against log(ε).
double scaling_exponent(std::span<const double> eps, std::span<const double> errors);

enum class SamplerKind { uniform, normal };

struct CoordinateSampler {
  SamplerKind kind = SamplerKind::uniform;
  /// uniform: [a, b]; normal: mean a, standard deviation b.
  double a = 0.0;
  double b = 0.0;

  double mean() const;
  double stddev() const;
};

struct EnsembleSpec {
  ScenarioConfig base;
  /// q1, v1, q2, v2.
  std::array<CoordinateSampler, 4> sampler;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  /// 0 picks SYMEVOL_THREADS or the hardware concurrency.
  std::size_t threads = 0;

  void validate() const;
};

/// Initial state of particle `index`; depends only on (spec, seed, index).
CartesianState sample_particle(const EnsembleSpec& spec, std::size_t index);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  /// Values outside [lo, hi] are counted in the end bins.
  std::vector<std::size_t> counts;
};

inline constexpr std::size_t kHistogramBins = 64;

struct DistributionReport {
  std::vector<double> t;
  std::vector<double> mean_v1, mean_v2;
  std::vector<double> dispersion_v1, dispersion_v2;
  std::vector<double> skewness_v1, skewness_v2;
  std::vector<double> mean_E1, mean_E2;
  std::vector<Histogram> histogram_v1, histogram_v2;
  /// Particles that reached the horizon (and enter the statistics).
  std::size_t count = 0;
  std::vector<std::size_t> failed;
};

/// Worker count from SYMEVOL_THREADS, else the hardware concurrency.
std::size_t default_thread_count();

DistributionReport run_ensemble(const EnsembleSpec& spec);

enum class FigureId { fig1, fig2 };

std::string_view to_string(FigureId id);
FigureId parse_figure(std::string_view text);

struct FigureBundle {
  FigureId id = FigureId::fig1;
  std::vector<double> t, v1, v2, E1, E2;
  double E0 = 0.0;
  /// Smallest t_s with max − min of E1 and of E2 over [t_s, T] below 0.1 E0.
  double stabilization_time = 0.0;
  /// Over the final quarter of the horizon.
  double final_variation_E1 = 0.0;
  double final_variation_E2 = 0.0;
  double final_min_gap = 0.0;
  IntegratorStats stats;
};

/// fig1: n = 2 over [0, 500]; fig2: n = 3 over [0, 10000]; both sampled at 0.05.
FigureBundle reproduce_figure(FigureId id);
FigureBundle reproduce_figure(FigureId id, double horizon, double sample_dt);

/// Smallest t_s such that both series vary by less than `band` over [t_s, T].
double stabilization_time(std::span<const double> t, std::span<const double> a, std::span<const double> b,
                          double band);

}  // namespace symevol
