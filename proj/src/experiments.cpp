#include "symevol/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

#include "symevol/errors.hpp"

namespace symevol {

std::string_view to_string(Observable observable) {
  switch (observable) {
    case Observable::actions:
      return "actions";
    case Observable::invariants:
      return "invariants";
    case Observable::angles:
      return "angles";
    case Observable::velocities:
      return "velocities";
  }
  return "unknown";
}

Observable parse_observable(std::string_view text) {
  for (auto o : {Observable::actions, Observable::invariants, Observable::angles, Observable::velocities}) {
    if (text == to_string(o)) return o;
  }
  throw std::invalid_argument("unknown observable '" + std::string(text) + "'");
}

void ScenarioConfig::validate() const {
  params.validate();
  if (!std::isfinite(horizon) || !(horizon > initial.t)) {
    throw std::invalid_argument("scenario: horizon must exceed the initial time");
  }
  for (double x : to_array(initial)) {
    if (!std::isfinite(x)) throw std::invalid_argument("scenario: initial state must be finite");
  }
  if (observables.empty()) throw std::invalid_argument("scenario: observables must be non-empty");
}

ScenarioConfig figure_scenario(int n, double horizon) {
  ScenarioConfig c;
  c.params = figure_params(n);
  c.initial = figure_initial_state();
  c.horizon = horizon;
  c.observables = {Observable::velocities, Observable::actions};
  c.label = n == 2 ? "fig1" : n == 3 ? "fig2" : "figure n=" + std::to_string(n);
  return c;
}

const std::vector<double>& Trajectory::column(std::string_view name) const {
  for (const auto& [key, values] : series) {
    if (key == name) return values;
  }
  throw std::out_of_range("trajectory has no series '" + std::string(name) + "'");
}

namespace {

IntegratorConfig span_config(const ScenarioConfig& config) {
  IntegratorConfig cfg = config.integrator;
  cfg.t_start = config.initial.t;
  cfg.t_end = config.horizon;
  return cfg;
}

Solution<4> integrate_full(const ModelParams& params, const CartesianState& initial, const IntegratorConfig& cfg) {
  auto rhs = [&params](double t, const Phase4& x) { return to_array(full_rhs(make_state(t, x), params)); };
  return integrate<4>(rhs, to_array(initial), cfg);
}

std::optional<AngleKind> resonance_angle(double omega) {
  if (omega == 1.0) return AngleKind::chi11;
  if (omega == 2.0) return AngleKind::chi12;
  if (omega == 3.0) return AngleKind::chi3;
  return std::nullopt;
}

}  // namespace

Trajectory run_scenario(const ScenarioConfig& config) {
  config.validate();
  const auto sol = integrate_full(config.params, config.initial, span_config(config));
  const auto& p = config.params;
  Trajectory out;
  out.stats = sol.stats;
  out.states.reserve(sol.t.size());
  for (std::size_t k = 0; k < sol.t.size(); ++k) out.states.push_back(make_state(sol.t[k], sol.y[k]));

  auto column = [&](auto&& f) {
    std::vector<double> v;
    v.reserve(out.states.size());
    for (const auto& s : out.states) v.push_back(f(s));
    return v;
  };
  for (Observable o : config.observables) {
    switch (o) {
      case Observable::actions:
        out.series.emplace_back("E1", column([&](const CartesianState& s) { return actions(s, p.omega).E1; }));
        out.series.emplace_back("E2", column([&](const CartesianState& s) { return actions(s, p.omega).E2; }));
        break;
      case Observable::invariants:
        for (auto name : {InvariantName::E0_12, InvariantName::I3_12, InvariantName::E0_11}) {
          out.series.emplace_back(std::string(to_string(name)),
                                  column([&](const CartesianState& s) { return invariant(name, s, p).value; }));
        }
        break;
      case Observable::angles: {
        const auto kind = resonance_angle(p.omega);
        if (!kind) break;
        out.series.emplace_back(std::string(to_string(*kind)), column([&](const CartesianState& s) {
                                  const auto [r1, r2] = amplitudes(s, p.omega);
                                  if (r1 < kNormalModeThreshold || r2 < kNormalModeThreshold) return std::nan("");
                                  const auto polar = cart_to_polar(s, p.omega);
                                  return combination_angle(*kind, polar.psi1, polar.psi2).value;
                                }));
        break;
      }
      case Observable::velocities:
        out.series.emplace_back("v1", column([](const CartesianState& s) { return s.v1; }));
        out.series.emplace_back("v2", column([](const CartesianState& s) { return s.v2; }));
        break;
    }
  }
  return out;
}

std::vector<InvariantReport> invariant_drift(const Trajectory& trajectory, const ModelParams& params,
                                             std::span<const InvariantName> names,
                                             std::optional<I3Coefficients> i3) {
  if (trajectory.states.empty()) throw std::invalid_argument("invariant_drift: empty trajectory");
  const auto& first = trajectory.states.front();
  std::vector<InvariantReport> out;
  for (auto name : names) {
    InvariantReport r;
    r.name = name;
    r.initial = invariant(name, first, params, i3).value;
    r.min = r.max = r.initial;
    for (const auto& s : trajectory.states) {
      const double v = invariant(name, s, params, i3).value;
      r.min = std::min(r.min, v);
      r.max = std::max(r.max, v);
      r.max_drift = std::max(r.max_drift, std::abs(v - r.initial));
    }
    const bool is11 = name == InvariantName::E0_11 || name == InvariantName::I3_11;
    const double scale = std::abs(invariant(is11 ? InvariantName::E0_11 : InvariantName::E0_12, first, params).value);
    r.normalized_drift = scale > 0.0 ? r.max_drift / scale : (r.max_drift == 0.0 ? 0.0 : INFINITY);
    out.push_back(r);
  }
  return out;
}

AveragedSystem default_averaged_system(double omega) {
  if (omega == 1.0) return AveragedSystem::res_11;
  if (omega == 2.0) return AveragedSystem::first_12;
  if (omega == 3.0) return AveragedSystem::res_13;
  throw Unsupported("no averaged system for omega = " + std::to_string(omega));
}

AveragedSystem parse_averaged_system(std::string_view text) {
  for (auto s : {AveragedSystem::first_12, AveragedSystem::second_12, AveragedSystem::res_13,
                 AveragedSystem::res_11}) {
    if (text == to_string(s)) return s;
  }
  throw std::invalid_argument("unknown resonance '" + std::string(text) + "' (expected 1:1, 1:2, 1:2-second, 1:3)");
}

namespace {

double required_omega(AveragedSystem system) {
  switch (system) {
    case AveragedSystem::first_12:
    case AveragedSystem::second_12:
      return 2.0;
    case AveragedSystem::res_13:
      return 3.0;
    case AveragedSystem::res_11:
      return 1.0;
  }
  return 0.0;
}

}  // namespace

CompareMetrics compare_full_vs_averaged(const ScenarioConfig& config, AveragedSystem system,
                                        const CompareOptions& options) {
  config.validate();
  const auto& p = config.params;
  if (p.omega != required_omega(system)) {
    throw Unsupported("no averaged system " + std::string(to_string(system)) + " for omega = " +
                      std::to_string(p.omega));
  }
  if (!(options.L > 0.0) || !(options.sample_dt > 0.0)) {
    throw std::invalid_argument("compare: L and sample_dt must be positive");
  }
  const PolarState polar0 = cart_to_polar(config.initial, p);

  IntegratorConfig cfg;
  cfg.rtol = options.rtol;
  cfg.atol = options.atol;
  cfg.sample_dt = options.sample_dt;
  cfg.t_start = config.initial.t;
  cfg.t_end = p.epsilon > 0.0 ? config.initial.t + options.L / p.epsilon : config.horizon;

  const auto full = integrate_full(p, config.initial, cfg);
  const auto avg = integrate_averaged(system, polar0, p, cfg);

  CompareMetrics m;
  m.epsilon = p.epsilon;
  m.horizon = cfg.t_end - cfg.t_start;
  m.samples = full.t.size();

  const VectorField f1 = slow_field(p, SlowTerms::all);
  const double period = 2.0 * std::numbers::pi;
  auto centred = [&f1, period](double t, std::span<const double> y) {
    auto v = f1(t, y);
    const auto mean = period_average(f1, period, y);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= mean[i];
    return v;
  };
  double corrected = 0.0;

  for (std::size_t k = 0; k < full.t.size(); ++k) {
    const CartesianState s = make_state(full.t[k], full.y[k]);
    const auto [r1, r2] = amplitudes(s, p.omega);
    const PolarState& y = avg.samples[k];
    const double e1 = std::abs(r1 - std::abs(y.r1));
    const double e2 = std::abs(r2 - std::abs(y.r2));
    m.r1_error = std::max(m.r1_error, e1);
    m.r2_error = std::max(m.r2_error, e2);
    const auto af = actions(s, p.omega);
    const auto aa = actions(y, p.omega);
    m.action_error = std::max({m.action_error, std::abs(af.E1 - aa.E1), std::abs(af.E2 - aa.E2)});

    if (options.near_identity && p.epsilon > 0.0) {
      const auto yv = to_array(y);
      auto u = near_identity_u(centred, period, full.t[k], yv);
      if (cfg.t_start != 0.0) {
        const auto u0 = near_identity_u(centred, period, cfg.t_start, yv);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] -= u0[i];
      }
      const double c1 = std::abs(y.r1 + p.epsilon * u[0]);
      const double c2 = std::abs(y.r2 + p.epsilon * u[2]);
      corrected = std::max({corrected, std::abs(r1 - c1), std::abs(r2 - c2)});
    }
  }
  m.amplitude_error = std::max(m.r1_error, m.r2_error);
  if (options.near_identity) m.corrected_amplitude_error = corrected;
  return m;
}

double scaling_exponent(std::span<const double> eps, std::span<const double> errors) {
  if (eps.size() != errors.size() || eps.size() < 2) {
    throw std::invalid_argument("scaling_exponent: need at least two (epsilon, error) pairs");
  }
  const std::size_t n = eps.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(eps[i] > 0.0) || !(errors[i] > 0.0)) {
      throw std::domain_error("scaling_exponent: epsilon and error must be positive");
    }
    mx += std::log(eps[i]);
    my += std::log(errors[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(eps[i]) - mx;
    sxy += dx * (std::log(errors[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw std::domain_error("scaling_exponent: epsilon values must differ");
  return sxy / sxx;
}

double CoordinateSampler::mean() const { return kind == SamplerKind::uniform ? 0.5 * (a + b) : a; }

double CoordinateSampler::stddev() const {
  return kind == SamplerKind::uniform ? (b - a) / std::sqrt(12.0) : b;
}

void EnsembleSpec::validate() const {
  base.validate();
  if (count < 1) throw std::invalid_argument("ensemble: count must be >= 1");
  for (const auto& s : sampler) {
    if (!std::isfinite(s.a) || !std::isfinite(s.b)) throw std::invalid_argument("ensemble: ranges must be finite");
    if (s.kind == SamplerKind::uniform && s.a > s.b) {
      throw std::invalid_argument("ensemble: uniform range needs a <= b");
    }
    if (s.kind == SamplerKind::normal && s.b < 0.0) {
      throw std::invalid_argument("ensemble: normal standard deviation must be >= 0");
    }
  }
}

CartesianState sample_particle(const EnsembleSpec& spec, std::size_t index) {
  const auto seed = spec.seed;
  const auto idx = static_cast<std::uint64_t>(index);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(idx), static_cast<std::uint32_t>(idx >> 32)};
  std::mt19937_64 rng(seq);
  Phase4 x{};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& s = spec.sampler[i];
    if (s.kind == SamplerKind::uniform) {
      x[i] = s.a == s.b ? s.a : std::uniform_real_distribution<double>(s.a, s.b)(rng);
    } else {
      x[i] = s.b == 0.0 ? s.a : std::normal_distribution<double>(s.a, s.b)(rng);
    }
  }
  return make_state(spec.base.initial.t, x);
}

std::size_t default_thread_count() {
  if (const char* env = std::getenv("SYMEVOL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

struct Moments {
  double mean = 0.0;
  double dispersion = 0.0;
  double skewness = 0.0;
};

// Shifted by the first value so that identical samples give exactly zero.
Moments moments(std::span<const double> x) {
  const double shift = x.front();
  const auto n = static_cast<double>(x.size());
  double m = 0.0;
  for (double v : x) m += v - shift;
  m /= n;
  double m2 = 0.0, m3 = 0.0;
  for (double v : x) {
    const double d = v - shift - m;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  Moments out;
  out.mean = shift + m;
  out.dispersion = std::sqrt(m2);
  out.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  return out;
}

Histogram histogram(std::span<const double> x, const CoordinateSampler& s) {
  const double half = s.stddev() > 0.0 ? 3.0 * s.stddev() : 1.0;
  Histogram h;
  h.lo = s.mean() - half;
  h.hi = s.mean() + half;
  h.counts.assign(kHistogramBins, 0);
  const double width = (h.hi - h.lo) / kHistogramBins;
  for (double v : x) {
    const double pos = std::floor((v - h.lo) / width);
    const auto bin = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(kHistogramBins - 1)));
    ++h.counts[bin];
  }
  return h;
}

}  // namespace

DistributionReport run_ensemble(const EnsembleSpec& spec) {
  spec.validate();
  const IntegratorConfig cfg = span_config(spec.base);
  cfg.validate();
  const auto grid = sample_grid(cfg.t_start, cfg.t_end, cfg.sample_dt);

  // Per particle: (v1, v2, E1, E2) on the grid, or empty after a failure.
  std::vector<std::vector<std::array<double, 4>>> paths(spec.count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const double omega = spec.base.params.omega;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= spec.count) return;
      try {
        const auto sol = integrate_full(spec.base.params, sample_particle(spec, i), cfg);
        auto& path = paths[i];
        path.reserve(sol.t.size());
        for (std::size_t k = 0; k < sol.t.size(); ++k) {
          const auto s = make_state(sol.t[k], sol.y[k]);
          const auto a = actions(s, omega);
          path.push_back({s.v1, s.v2, a.E1, a.E2});
        }
      } catch (const IntegrationFailure&) {
        paths[i].clear();
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = spec.count;
      }
    }
  };

  const std::size_t nthreads = std::min(spec.threads > 0 ? spec.threads : default_thread_count(), spec.count);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < nthreads; ++k) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  DistributionReport r;
  r.t = grid;
  std::vector<std::size_t> ok;
  for (std::size_t i = 0; i < spec.count; ++i) {
    if (paths[i].size() == grid.size()) {
      ok.push_back(i);
    } else {
      r.failed.push_back(i);
    }
  }
  r.count = ok.size();
  if (ok.empty()) return r;

  std::vector<double> v1(ok.size()), v2(ok.size()), e1(ok.size()), e2(ok.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (std::size_t j = 0; j < ok.size(); ++j) {
      const auto& x = paths[ok[j]][k];
      v1[j] = x[0];
      v2[j] = x[1];
      e1[j] = x[2];
      e2[j] = x[3];
    }
    const auto m1 = moments(v1);
    const auto m2 = moments(v2);
    r.mean_v1.push_back(m1.mean);
    r.mean_v2.push_back(m2.mean);
    r.dispersion_v1.push_back(m1.dispersion);
    r.dispersion_v2.push_back(m2.dispersion);
    r.skewness_v1.push_back(m1.skewness);
    r.skewness_v2.push_back(m2.skewness);
    r.mean_E1.push_back(moments(e1).mean);
    r.mean_E2.push_back(moments(e2).mean);
    r.histogram_v1.push_back(histogram(v1, spec.sampler[1]));
    r.histogram_v2.push_back(histogram(v2, spec.sampler[3]));
  }
  return r;
}

std::string_view to_string(FigureId id) { return id == FigureId::fig1 ? "fig1" : "fig2"; }

FigureId parse_figure(std::string_view text) {
  if (text == "fig1") return FigureId::fig1;
  if (text == "fig2") return FigureId::fig2;
  throw std::invalid_argument("unknown figure '" + std::string(text) + "' (expected fig1 or fig2)");
}

double stabilization_time(std::span<const double> t, std::span<const double> a, std::span<const double> b,
                          double band) {
  if (t.empty() || a.size() != t.size() || b.size() != t.size()) {
    throw std::invalid_argument("stabilization_time: series lengths differ");
  }
  double amax = a.back(), amin = a.back(), bmax = b.back(), bmin = b.back();
  for (std::size_t i = t.size(); i-- > 0;) {
    amax = std::max(amax, a[i]);
    amin = std::min(amin, a[i]);
    bmax = std::max(bmax, b[i]);
    bmin = std::min(bmin, b[i]);
    if (amax - amin >= band || bmax - bmin >= band) return t[i + 1 < t.size() ? i + 1 : i];
  }
  return t.front();
}

FigureBundle reproduce_figure(FigureId id) {
  return reproduce_figure(id, id == FigureId::fig1 ? 500.0 : 10000.0, 0.05);
}

FigureBundle reproduce_figure(FigureId id, double horizon, double sample_dt) {
  ScenarioConfig c = figure_scenario(id == FigureId::fig1 ? 2 : 3, horizon);
  c.integrator.sample_dt = sample_dt;
  const Trajectory traj = run_scenario(c);
  FigureBundle b;
  b.id = id;
  b.stats = traj.stats;
  for (const auto& s : traj.states) b.t.push_back(s.t);
  b.v1 = traj.column("v1");
  b.v2 = traj.column("v2");
  b.E1 = traj.column("E1");
  b.E2 = traj.column("E2");
  b.E0 = b.E1.front() + b.E2.front();
  b.stabilization_time = stabilization_time(b.t, b.E1, b.E2, 0.1 * b.E0);

  const double start = b.t.front() + 0.75 * (b.t.back() - b.t.front());
  double min1 = INFINITY, max1 = -INFINITY, min2 = INFINITY, max2 = -INFINITY;
  b.final_min_gap = INFINITY;
  for (std::size_t k = 0; k < b.t.size(); ++k) {
    if (b.t[k] < start) continue;
    min1 = std::min(min1, b.E1[k]);
    max1 = std::max(max1, b.E1[k]);
    min2 = std::min(min2, b.E2[k]);
    max2 = std::max(max2, b.E2[k]);
    b.final_min_gap = std::min(b.final_min_gap, std::abs(b.E1[k] - b.E2[k]));
  }
  b.final_variation_E1 = max1 - min1;
  b.final_variation_E2 = max2 - min2;
  return b;
}

}  // namespace symevol
