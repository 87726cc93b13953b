#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "symevol/averaged.hpp"
#include "symevol/cli.hpp"
#include "symevol/experiments.hpp"
#include "symevol/integrators.hpp"
#include "symevol/model.hpp"
#include "symevol/resonance.hpp"
#include "symevol/transforms.hpp"

using namespace symevol;
namespace fs = std::filesystem;

namespace {

// AC1
constexpr double kInvariantRelTol = 1e-12;
constexpr int kInvariantPoints = 1000;
// AC2
constexpr double kOracleTol = 1e-9;
constexpr int kOraclePoints = 100;
// AC3, AC4
constexpr double kEpsLadder[] = {0.1, 0.05, 0.025};
constexpr double kDriftRatioLo = 1.5;
constexpr double kDriftRatioHi = 2.8;
constexpr double kExponentLo = 0.7;
constexpr double kExponentHi = 1.3;
// AC5
constexpr double kRatioTol = 1e-10;
// AC6
constexpr double kLockEps = 0.05;
constexpr double kLockFactor = 0.5;
// AC7
constexpr double kFlatRatioMin = 1.5;
// AC8
constexpr int kGridPoints = 21;
constexpr double kBandHalfWidth = 0.02;
constexpr double kStabilityE0 = 0.25;
constexpr double kStabilityEps = 0.1;
// AC9
constexpr double kFinalVariation = 0.1;
constexpr double kFinalGap = 0.05;
// AC10
constexpr double kOrderLo = 3.7;
constexpr double kOrderHi = 4.3;
constexpr double kEnergyDrift = 1e-7;
constexpr double kReflection = 1e-9;
constexpr double kZTransform = 1e-6;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ModelParams params_at(double omega, double eps) {
  ModelParams p = figure_params();
  p.omega = omega;
  p.epsilon = eps;
  return p;
}

Solution<4> integrate_model(const ModelParams& p, const CartesianState& s0, double t_end, double dt, double rtol,
                            double atol, bool intermediate = false) {
  IntegratorConfig cfg;
  cfg.rtol = rtol;
  cfg.atol = atol;
  cfg.t_start = s0.t;
  cfg.t_end = t_end;
  cfg.sample_dt = dt;
  auto rhs = [&](double t, const Phase4& x) {
    const auto s = make_state(t, x);
    return to_array(intermediate ? intermediate_rhs(s, p) : full_rhs(s, p));
  };
  return integrate<4>(rhs, to_array(s0), cfg);
}

Outcome ac1() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  const ModelParams p12 = params_at(2.0, 0.1);
  const ModelParams p11 = params_at(1.0, 0.1);
  for (int k = 0; k < kInvariantPoints; ++k) {
    const PolarState s = oracle::random_polar(rng);
    const auto r = avg12_first_rhs(s, p12);
    const double chi = 2 * s.psi1 - s.psi2;
    const double chidot = 2 * r.psi1 - r.psi2;
    const double e_terms[] = {s.r1 * r.r1, 4 * s.r2 * r.r2};
    const double i_terms[] = {2 * p12.a4 * s.r1 * s.r2 * std::cos(chi) * r.r1,
                              p12.a4 * s.r1 * s.r1 * std::cos(chi) * r.r2,
                              -p12.a4 * s.r1 * s.r1 * s.r2 * std::sin(chi) * chidot};
    const auto rel = [](std::initializer_list<double> terms) {
      double sum = 0.0, mag = 0.0;
      for (double x : terms) {
        sum += x;
        mag += std::abs(x);
      }
      return mag > 0.0 ? std::abs(sum) / mag : 0.0;
    };
    worst = std::max(worst, rel({e_terms[0], e_terms[1]}));
    worst = std::max(worst, rel({i_terms[0], i_terms[1], i_terms[2]}));
    const auto q = avg11_rhs(s, p11);
    worst = std::max(worst, rel({s.r1 * q.r1, s.r2 * q.r2}));
  }
  return {worst <= kInvariantRelTol, fmt("max relative derivative %.3g", worst)};
}

Outcome ac2() {
  std::mt19937_64 rng(102);
  const ModelParams p = params_at(2.0, 0.1);
  double worst = 0.0;
  for (int k = 0; k < kOraclePoints; ++k) {
    const PolarState s = oracle::random_polar(rng);
    const auto avg = oracle::first_order_average<double>({s.r1, s.psi1, s.r2, s.psi2}, p, std::exp(-s.tau));
    const auto r = to_array(avg12_first_rhs(s, p));
    for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(r[i] / p.epsilon - avg[i]));
  }
  return {worst < kOracleTol, fmt("max residual %.3g", worst)};
}

ScenarioConfig fig1_at(double eps, double horizon) {
  ScenarioConfig c = figure_scenario(2, horizon);
  c.params.epsilon = eps;
  c.observables = {Observable::invariants};
  c.integrator.sample_dt = 0.05;
  c.integrator.rtol = 1e-11;
  c.integrator.atol = 1e-13;
  return c;
}

Outcome ac3() {
  std::vector<double> e0, i3;
  const InvariantName names[] = {InvariantName::E0_12, InvariantName::I3_12};
  for (double eps : kEpsLadder) {
    const auto c = fig1_at(eps, 1.0 / eps);
    const auto rep = invariant_drift(run_scenario(c), c.params, names);
    e0.push_back(rep[0].max_drift);
    i3.push_back(rep[1].max_drift);
  }
  bool pass = true;
  std::string detail = "ratios E0_12";
  for (const auto* v : {&e0, &i3}) {
    if (v == &i3) detail += "; I3_12";
    for (std::size_t k = 0; k + 1 < v->size(); ++k) {
      const double ratio = (*v)[k] / (*v)[k + 1];
      pass = pass && ratio >= kDriftRatioLo && ratio <= kDriftRatioHi;
      detail += fmt(" %.3f", ratio);
    }
  }
  return {pass, detail};
}

Outcome ac4() {
  std::vector<double> eps, err;
  for (double e : kEpsLadder) {
    const auto m = compare_full_vs_averaged(fig1_at(e, 1.0), AveragedSystem::first_12);
    eps.push_back(e);
    err.push_back(m.amplitude_error);
  }
  const double slope = scaling_exponent(eps, err);
  return {slope >= kExponentLo && slope <= kExponentHi,
          fmt("exponent %.3f (errors %.3g %.3g %.3g)", slope, err[0], err[1], err[2])};
}

Outcome ac5() {
  ModelParams p = params_at(2.0, 0.1);
  p.a1 = p.a2 = 1.0;
  const auto m2 = locate_12_second(p);
  p.omega = 3.0;
  const auto m3 = locate_13(p, Chi3Reading::dimensional);
  ModelParams z = p;
  z.a1 = 0.0;
  const auto n3 = locate_13(z);
  z.omega = 2.0;
  const auto n2 = locate_12_second(z);
  const bool ok2 = m2.amplitude_ratio && std::abs(*m2.amplitude_ratio - 91.0 / 24.0) <= kRatioTol;
  const bool ok3 = m3.amplitude_ratio && std::abs(*m3.amplitude_ratio - 1401.0 / 976.0) <= kRatioTol;
  const bool none = !n2.amplitude_ratio && !n3.amplitude_ratio;
  return {ok2 && ok3 && none, fmt("omega=2 %s, omega=3 %s, a1=0 %s", m2.ratio_exact ? m2.ratio_exact->str().c_str() : "-",
                                  m3.ratio_exact ? m3.ratio_exact->str().c_str() : "-", none ? "none" : "found")};
}

Outcome ac6() {
  const ModelParams p = params_at(2.0, kLockEps);
  const auto m = locate_12_first(0.25);
  const PolarState s0{std::sqrt(*m.r1_sq), 0.0, std::sqrt(*m.r2_sq), 0.0, 0.0};
  const auto sol = integrate_model(p, polar_to_cart(s0, 2.0, 0.0), 1.0 / kLockEps, 0.01, 1e-11, 1e-13);
  double worst = 0.0;
  for (std::size_t k = 0; k < sol.t.size(); ++k) {
    const auto [r1, r2] = amplitudes(make_state(sol.t[k], sol.y[k]), 2.0);
    worst = std::max(worst, std::abs(r1 * r1 - 8 * r2 * r2));
  }
  return {worst <= kLockFactor * kLockEps, fmt("max |r1^2 - 8 r2^2| %.4f (bound %.4f)", worst, kLockFactor * kLockEps)};
}

Outcome ac7() {
  std::vector<double> var;
  for (double eps : kEpsLadder) {
    ModelParams p = params_at(3.0, eps);
    p.a1 = p.a2 = 1.0;
    const CartesianState s0{0.0, 0.0, 0.5, 0.0, 0.5};
    const auto sol = integrate_model(p, s0, 1.0 / (eps * eps), 0.05, 1e-10, 1e-12);
    const auto [a1, a2] = amplitudes(s0, 3.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < sol.t.size(); ++k) {
      const auto [r1, r2] = amplitudes(make_state(sol.t[k], sol.y[k]), 3.0);
      worst = std::max({worst, std::abs(r1 - a1), std::abs(r2 - a2)});
    }
    var.push_back(worst);
  }
  const double r0 = var[0] / var[1];
  const double r1 = var[1] / var[2];
  return {r0 >= kFlatRatioMin && r1 >= kFlatRatioMin,
          fmt("variations %.3g %.3g %.3g, ratios %.3f %.3f", var[0], var[1], var[2], r0, r1)};
}

Outcome ac8() {
  const double boundaries[] = {-1.0 / 3.0, 2.0 / 15.0, 1.0 / 3.0, 2.0 / 3.0};
  int checked = 0, contradictions = 0, skipped = 0;
  std::string where;
  for (int k = 1; k <= kGridPoints; ++k) {
    const double p = -1.0 + 2.0 * k / (kGridPoints + 1);
    const bool in_band =
        std::any_of(std::begin(boundaries), std::end(boundaries), [p](double b) { return std::abs(p - b) < kBandHalfWidth; });
    if (in_band) {
      ++skipped;
      continue;
    }
    for (const auto& report : classify_11_parameter(p)) {
      const auto v = verify_stability_numerically(report, kStabilityE0, kStabilityEps);
      ++checked;
      if (v.verdict == Verdict::contradicts) {
        ++contradictions;
        where += fmt(" %s@%.3f", std::string(to_string(report.mode)).c_str(), p);
      }
    }
  }
  return {contradictions == 0 && checked > 0,
          fmt("%d checks, %d contradictions, %d grid points in boundary bands", checked, contradictions, skipped) +
              where};
}

Outcome ac9() {
  const auto f1 = reproduce_figure(FigureId::fig1);
  const auto f2 = reproduce_figure(FigureId::fig2);
  const bool start = f1.E1.front() == 0.125 && f1.E2.front() == 0.125;
  const bool settled = f1.final_variation_E1 < kFinalVariation * f1.E0 && f1.final_variation_E2 < kFinalVariation * f1.E0;
  const bool apart = f1.final_min_gap > kFinalGap * f1.E0;
  const bool order = f2.stabilization_time > f1.stabilization_time;
  return {start && settled && apart && order,
          fmt("fig1 final variation %.4f %.4f, min gap %.4f, E0 %.3g; stabilization fig1 %.1f < fig2 %.1f",
              f1.final_variation_E1, f1.final_variation_E2, f1.final_min_gap, f1.E0, f1.stabilization_time,
              f2.stabilization_time)};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

bool reruns_identical() {
  const fs::path dir = fs::temp_directory_path() / "symevol-acceptance";
  fs::remove_all(dir);
  const std::string cfg = (fs::path(SYMEVOL_CONFIG_DIR) / "fig1.ini").string();
  const std::string ens = (fs::path(SYMEVOL_CONFIG_DIR) / "ensemble_fig1.ini").string();
  std::ostringstream sink;
  bool ok = true;
  for (const char* run : {"a", "b"}) {
    const std::string out = (dir / run).string();
    ok = ok && run_cli({"symevol", "simulate", cfg, "--out", out + "/sim"}, sink, sink) == 0;
    ok = ok && run_cli({"symevol", "--horizon", "50", "ensemble", ens, "--out", out + "/ens"}, sink, sink) == 0;
  }
  for (const char* name : {"sim/trajectory.csv", "ens/ensemble.csv", "ens/histograms.json", "ens/ensemble.json"}) {
    const auto a = slurp(dir / "a" / name);
    ok = ok && !a.empty() && a == slurp(dir / "b" / name);
  }
  fs::remove_all(dir);
  return ok;
}

Outcome ac10() {
  const ModelParams fig = figure_params();
  auto rhs = [&fig](double t, const Phase4& x) { return to_array(full_rhs(make_state(t, x), fig)); };
  const std::vector<double> steps{0.2, 0.1, 0.05, 0.025};
  const auto order = order_check<4>(rhs, to_array(figure_initial_state()), 10.0, steps);
  const bool order_ok = !order.saturated && order.slope >= kOrderLo && order.slope <= kOrderHi;

  ModelParams frozen = fig;
  frozen.delta_override = 0.0;
  const auto s0 = figure_initial_state();
  const auto e = integrate_model(frozen, s0, 1000.0, 1.0, 1e-10, 1e-12);
  const double h0 = eval_hamiltonian(s0, frozen).value;
  double drift = 0.0;
  for (std::size_t k = 0; k < e.t.size(); ++k) {
    drift = std::max(drift, std::abs(eval_hamiltonian(make_state(e.t[k], e.y[k]), frozen).value - h0));
  }

  ModelParams sym = fig;
  sym.a3 = sym.a4 = 0.0;
  const CartesianState a0{0.0, 0.3, 0.1, 0.2, -0.4};
  const CartesianState m0{0.0, 0.3, 0.1, -0.2, 0.4};
  const auto a = integrate_model(sym, a0, 100.0, 1.0, 1e-12, 1e-14);
  const auto b = integrate_model(sym, m0, 100.0, 1.0, 1e-12, 1e-14);
  double reflect = 0.0;
  for (std::size_t k = 0; k < a.t.size(); ++k) {
    reflect = std::max({reflect, std::abs(a.y[k][0] - b.y[k][0]), std::abs(a.y[k][1] - b.y[k][1]),
                        std::abs(a.y[k][2] + b.y[k][2]), std::abs(a.y[k][3] + b.y[k][3])});
  }

  ModelParams zp = fig;
  zp.epsilon = 0.2;
  zp.delta_override = 0.05;
  const auto q = integrate_model(zp, s0, 100.0, 1.0, 1e-12, 1e-14, true);
  IntegratorConfig cfg;
  cfg.rtol = 1e-12;
  cfg.atol = 1e-14;
  cfg.t_end = 100.0;
  cfg.sample_dt = 1.0;
  auto zrhs = [&zp](double t, const Phase4& x) { return to_array(dissipative_rhs(make_state(t, x), zp)); };
  const auto z = integrate<4>(zrhs, to_array(to_dissipative(s0, zp)), cfg);
  double zres = 0.0;
  for (std::size_t k = 0; k < q.t.size(); ++k) {
    const auto back = to_array(from_dissipative(make_state(z.t[k], z.y[k]), zp));
    for (int i = 0; i < 4; ++i) zres = std::max(zres, std::abs(back[i] - q.y[k][i]));
  }

  const bool identical = reruns_identical();
  const bool pass = order_ok && drift < kEnergyDrift && reflect < kReflection && zres < kZTransform && identical;
  return {pass, fmt("order %.3f, energy drift %.3g, reflection %.3g, z-transform %.3g, reruns %s", order.slope, drift,
                    reflect, zres, identical ? "identical" : "differ")};
}

struct Criterion {
  const char* id;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"AC1", 5.0, ac1},   {"AC2", 30.0, ac2},  {"AC3", 60.0, ac3},  {"AC4", 120.0, ac4}, {"AC5", 5.0, ac5},
      {"AC6", 30.0, ac6},  {"AC7", 120.0, ac7}, {"AC8", 180.0, ac8}, {"AC9", 120.0, ac9}, {"AC10", 120.0, ac10},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s %s  %s  [%.2f s of %.0f s]\n", c.id, pass ? "PASS" : "FAIL", o.detail.c_str(), secs, c.budget_s);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
