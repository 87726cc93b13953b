#include "symevol/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>

#include "symevol/config.hpp"
#include "symevol/errors.hpp"
#include "symevol/experiments.hpp"
#include "symevol/resonance.hpp"

#ifndef SYMEVOL_VERSION
#define SYMEVOL_VERSION "dev"
#endif

namespace symevol {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

constexpr const char* kFooter = R"(Output files (columns in this order, numbers with 17 significant digits):
  simulate          trajectory.csv   t,q1,v1,q2,v2,E1,E2
  compare           compare.csv      epsilon,horizon,amplitude_error,r1_error,r2_error,action_error[,corrected_amplitude_error]
                    compare.json     rows and fitted scaling exponent ("n/a" for a single epsilon)
  ensemble          ensemble.csv     t,mean_v1,dispersion_v1,skewness_v1,mean_v2,dispersion_v2,skewness_v2,mean_E1,mean_E2
                    histograms.json  64-bin v1/v2 histograms per output time
                    ensemble.json    particle and failure counts
  reproduce-figure  figN.csv         t,v1,v2,E1,E2
                    figN.json        stabilization time and final-window diagnostics
  every command     manifest.json    command, config digest, seed, version, wall time, outputs
Exit codes: 0 ok, 2 usage or configuration error, 3 numerical failure.
Environment: SYMEVOL_THREADS caps the number of ensemble workers.)";

struct Globals {
  std::optional<double> rtol;
  std::optional<double> atol;
  std::optional<double> sample_dt;
  std::optional<double> horizon;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void apply_overrides(ConfigMap& c, const Globals& g) {
  if (g.rtol) c["run.rtol"] = format_double(*g.rtol);
  if (g.atol) c["run.atol"] = format_double(*g.atol);
  if (g.sample_dt) c["run.sample_dt"] = format_double(*g.sample_dt);
  if (g.horizon) c["run.horizon"] = format_double(*g.horizon);
  if (g.seed) c["ensemble.seed"] = std::to_string(*g.seed);
}

class Output {
 public:
  Output(std::string dir, std::string command) : dir_(std::move(dir)), command_(std::move(command)) {}

  void write(const std::string& name, const std::string& content) {
    fs::create_directories(dir_);
    const fs::path path = fs::path(dir_) / name;
    std::ofstream f(path, std::ios::binary);
    f << content;
    if (!f) throw ConfigError("cannot write " + path.string());
    files_.push_back(name);
  }

  void manifest(const std::string& digest, std::optional<std::uint64_t> seed) {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json m;
    m["command"] = command_;
    m["config_digest"] = digest;
    m["seed"] = seed ? json(*seed) : json(nullptr);
    m["tool_version"] = SYMEVOL_VERSION;
    m["wall_time_s"] = wall;
    m["outputs"] = files_;
    write("manifest.json", m.dump(2) + "\n");
  }

 private:
  std::string dir_;
  std::string command_;
  std::vector<std::string> files_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

class Csv {
 public:
  explicit Csv(const std::string& header) : text_(header + "\n") {}
  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      if (!first) text_ += ',';
      text_ += format_double(v);
      first = false;
    }
    text_ += '\n';
  }
  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) text_ += ',';
      text_ += format_double(values[i]);
    }
    text_ += '\n';
  }
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

json optional_number(std::optional<double> v) { return v ? json(*v) : json("none"); }

json to_json(const ResonanceManifold& m) {
  json j;
  j["resonance"] = to_string(m.resonance);
  j["manifold"] = m.amplitude_ratio ? "exists" : (m.degenerate ? "degenerate" : "none");
  j["ratio"] = optional_number(m.amplitude_ratio);
  j["ratio_exact"] = m.ratio_exact ? json(m.ratio_exact->str()) : json(nullptr);
  j["angles"] = json::array();
  for (const auto& a : m.angles) j["angles"].push_back({{"chi", a.chi}, {"stability", to_string(a.stability)}});
  j["size_order"] = m.size_order;
  j["timescale_order"] = m.timescale_order;
  j["degenerate"] = m.degenerate;
  if (m.r1_sq) j["r1_sq"] = *m.r1_sq;
  if (m.r2_sq) j["r2_sq"] = *m.r2_sq;
  return j;
}

json to_json(const StabilityReport& r) {
  return {{"mode", to_string(r.mode)},
          {"exists", to_string(r.exists)},
          {"stable", to_string(r.stable)},
          {"parameter", r.parameter}};
}

json histograms_json(const std::vector<Histogram>& hs) {
  json j = json::array();
  for (const auto& h : hs) j.push_back({{"lo", h.lo}, {"hi", h.hi}, {"counts", h.counts}});
  return j;
}

int cmd_simulate(const std::string& path, const Globals& g, std::ostream& out) {
  ConfigMap c = load_config(path);
  apply_overrides(c, g);
  const ScenarioConfig s = scenario_from_config(c);
  const Trajectory traj = run_scenario(s);
  Csv csv("t,q1,v1,q2,v2,E1,E2");
  for (const auto& st : traj.states) {
    const auto a = actions(st, s.params.omega);
    csv.row({st.t, st.q1, st.v1, st.q2, st.v2, a.E1, a.E2});
  }
  Output o(g.out, "simulate");
  o.write("trajectory.csv", csv.str());
  o.manifest(config_digest(c), std::nullopt);
  out << "wrote " << traj.states.size() << " samples to " << (fs::path(g.out) / "trajectory.csv").string() << "\n";
  return kExitOk;
}

struct CompareFlags {
  std::string resonance;
  std::string eps_list;
  std::optional<double> L;
  bool near_identity = false;
};

int cmd_compare(const std::string& path, const CompareFlags& f, const Globals& g, std::ostream& out) {
  ConfigMap c = load_config(path);
  apply_overrides(c, g);
  if (!f.resonance.empty()) c["compare.resonance"] = f.resonance;
  if (!f.eps_list.empty()) c["compare.eps_list"] = f.eps_list;
  if (f.L) c["compare.L"] = format_double(*f.L);
  if (f.near_identity) c["compare.near_identity"] = "true";

  ScenarioConfig s = scenario_from_config(c);
  CompareSettings cs = compare_from_config(c);
  const AveragedSystem system = cs.resonance ? *cs.resonance : default_averaged_system(s.params.omega);
  if (cs.eps_list.empty()) cs.eps_list = {s.params.epsilon};
  if (auto v = find_double(c, "run.sample_dt")) cs.options.sample_dt = *v;
  if (auto v = find_double(c, "run.rtol")) cs.options.rtol = *v;
  if (auto v = find_double(c, "run.atol")) cs.options.atol = *v;

  std::string header = "epsilon,horizon,amplitude_error,r1_error,r2_error,action_error";
  if (cs.options.near_identity) header += ",corrected_amplitude_error";
  Csv csv(header);
  json rows = json::array();
  std::vector<double> errors;
  for (double eps : cs.eps_list) {
    s.params.epsilon = eps;
    s.params.validate();
    const CompareMetrics m = compare_full_vs_averaged(s, system, cs.options);
    std::vector<double> row{m.epsilon, m.horizon, m.amplitude_error, m.r1_error, m.r2_error, m.action_error};
    if (m.corrected_amplitude_error) row.push_back(*m.corrected_amplitude_error);
    csv.row(row);
    json r{{"epsilon", m.epsilon},          {"horizon", m.horizon},   {"amplitude_error", m.amplitude_error},
           {"r1_error", m.r1_error},        {"r2_error", m.r2_error}, {"action_error", m.action_error},
           {"samples", m.samples}};
    if (m.corrected_amplitude_error) r["corrected_amplitude_error"] = *m.corrected_amplitude_error;
    rows.push_back(r);
    errors.push_back(m.corrected_amplitude_error.value_or(m.amplitude_error));
  }
  json summary;
  summary["resonance"] = to_string(system);
  summary["metric"] = cs.options.near_identity ? "corrected_amplitude_error" : "amplitude_error";
  summary["rows"] = rows;
  if (cs.eps_list.size() >= 2) {
    summary["exponent"] = scaling_exponent(cs.eps_list, errors);
  } else {
    summary["exponent"] = "n/a";
  }
  Output o(g.out, "compare");
  o.write("compare.csv", csv.str());
  o.write("compare.json", summary.dump(2) + "\n");
  o.manifest(config_digest(c), std::nullopt);
  out << "exponent: "
      << (summary["exponent"].is_number() ? format_double(summary["exponent"].get<double>()) : "n/a") << "\n";
  return kExitOk;
}

struct ResonanceFlags {
  double omega = 2.0;
  double a1 = 1.0, a2 = 1.0, a3 = 0.75, a4 = 1.5;
  double E0 = 0.25;
  bool chi3_literal = false;
};

int cmd_resonance(const ResonanceFlags& f, const Globals& g, std::ostream& out) {
  ModelParams p;
  p.omega = f.omega;
  p.a1 = f.a1;
  p.a2 = f.a2;
  p.a3 = f.a3;
  p.a4 = f.a4;
  json j;
  j["omega"] = f.omega;
  if (f.omega == 2.0) {
    j["manifolds"] = {to_json(locate_12_first(f.E0)), to_json(locate_12_second(p))};
  } else if (f.omega == 3.0) {
    j["manifolds"] = {to_json(locate_13(p, f.chi3_literal ? Chi3Reading::literal : Chi3Reading::dimensional))};
  } else if (f.omega == 1.0) {
    json list = json::array();
    for (const auto& r : classify_11(f.a1, f.a2)) list.push_back(to_json(r));
    j["classification"] = list;
  } else {
    throw Unsupported("no resonance analysis for omega = " + format_double(f.omega));
  }
  const std::string text = j.dump(2) + "\n";
  out << text;
  if (!g.out.empty()) {
    ConfigMap c{{"model.omega", format_double(f.omega)}, {"model.a1", format_double(f.a1)},
                {"model.a2", format_double(f.a2)},       {"model.a3", format_double(f.a3)},
                {"model.a4", format_double(f.a4)},       {"resonance.E0", format_double(f.E0)},
                {"resonance.chi3_literal", f.chi3_literal ? "true" : "false"}};
    Output o(g.out, "resonance");
    o.write("resonance.json", text);
    o.manifest(config_digest(c), std::nullopt);
  }
  return kExitOk;
}

int cmd_ensemble(const std::string& path, const Globals& g, std::ostream& out) {
  ConfigMap c = load_config(path);
  apply_overrides(c, g);
  const EnsembleSpec spec = ensemble_from_config(c);
  const DistributionReport r = run_ensemble(spec);
  Csv csv("t,mean_v1,dispersion_v1,skewness_v1,mean_v2,dispersion_v2,skewness_v2,mean_E1,mean_E2");
  for (std::size_t k = 0; k < r.t.size() && r.count > 0; ++k) {
    csv.row({r.t[k], r.mean_v1[k], r.dispersion_v1[k], r.skewness_v1[k], r.mean_v2[k], r.dispersion_v2[k],
             r.skewness_v2[k], r.mean_E1[k], r.mean_E2[k]});
  }
  json h;
  h["bins"] = kHistogramBins;
  h["t"] = r.t;
  h["v1"] = histograms_json(r.histogram_v1);
  h["v2"] = histograms_json(r.histogram_v2);
  json summary{{"particles", spec.count}, {"count", r.count}, {"failures", r.failed.size()}, {"failed", r.failed}};

  Output o(g.out, "ensemble");
  o.write("ensemble.csv", csv.str());
  o.write("histograms.json", h.dump() + "\n");
  o.write("ensemble.json", summary.dump(2) + "\n");
  o.manifest(config_digest(c), spec.seed);
  out << "particles: " << spec.count << ", failures: " << r.failed.size() << "\n";
  return kExitOk;
}

int cmd_figure(const std::string& which, const Globals& g, std::ostream& out) {
  const FigureId id = parse_figure(which);
  const double horizon = g.horizon.value_or(id == FigureId::fig1 ? 500.0 : 10000.0);
  const double dt = g.sample_dt.value_or(0.05);
  const FigureBundle b = reproduce_figure(id, horizon, dt);
  Csv csv("t,v1,v2,E1,E2");
  for (std::size_t k = 0; k < b.t.size(); ++k) csv.row({b.t[k], b.v1[k], b.v2[k], b.E1[k], b.E2[k]});
  json summary{{"figure", to_string(id)},
               {"E0", b.E0},
               {"E1_0", b.E1.front()},
               {"E2_0", b.E2.front()},
               {"stabilization_time", b.stabilization_time},
               {"final_variation_E1", b.final_variation_E1},
               {"final_variation_E2", b.final_variation_E2},
               {"final_min_gap", b.final_min_gap}};
  const std::string name(to_string(id));
  Output o(g.out, "reproduce-figure");
  o.write(name + ".csv", csv.str());
  o.write(name + ".json", summary.dump(2) + "\n");
  const ConfigMap c{{"figure.id", name}, {"run.horizon", format_double(horizon)}, {"run.sample_dt", format_double(dt)}};
  o.manifest(config_digest(c), std::nullopt);
  out << name << ": stabilization time " << format_double(b.stabilization_time) << "\n";
  return kExitOk;
}

struct OrderFlags {
  std::string config;
  double t_end = 10.0;
  std::string steps = "0.1,0.05,0.025,0.0125";
};

int cmd_order_check(const OrderFlags& f, const Globals& g, std::ostream& out) {
  ConfigMap c;
  if (!f.config.empty()) c = load_config(f.config);
  apply_overrides(c, g);
  const ScenarioConfig s = f.config.empty() ? figure_scenario(2, 100.0) : scenario_from_config(c);
  const auto steps = parse_double_list(f.steps);
  const auto& p = s.params;
  const double t0 = s.initial.t;
  auto rhs = [&p, t0](double t, const Phase4& x) { return to_array(full_rhs(make_state(t0 + t, x), p)); };
  const OrderEstimate e = order_check<4>(rhs, to_array(s.initial), f.t_end, steps);
  json j;
  j["slope"] = e.saturated ? json(nullptr) : json(e.slope);
  j["saturated"] = e.saturated;
  j["steps"] = e.steps;
  j["errors"] = e.errors;
  const std::string text = j.dump(2) + "\n";
  out << text;
  if (!g.out.empty()) {
    c["order.t_end"] = format_double(f.t_end);
    c["order.steps"] = f.steps;
    Output o(g.out, "order-check");
    o.write("order.json", text);
    o.manifest(config_digest(c), std::nullopt);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-degree-of-freedom cubic oscillator with decaying asymmetry: simulation, averaging and "
               "resonance analysis"};
  app.footer(kFooter);
  app.require_subcommand(1);
  app.set_version_flag("--version", SYMEVOL_VERSION);

  Globals g;
  app.add_option("--rtol", g.rtol, "Relative tolerance of the adaptive integrator");
  app.add_option("--atol", g.atol, "Absolute tolerance of the adaptive integrator");
  app.add_option("--sample-dt", g.sample_dt, "Output sample spacing");
  app.add_option("--horizon", g.horizon, "End time");
  app.add_option("--seed", g.seed, "Ensemble seed");
  app.add_option("--out", g.out, "Output directory");

  std::string config_path;
  auto* sim = app.add_subcommand("simulate", "Integrate the full system and write trajectory.csv");
  sim->add_option("config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);

  CompareFlags cf;
  auto* cmp = app.add_subcommand("compare", "Full versus averaged error for a list of epsilon values");
  cmp->add_option("config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
  cmp->add_option("--resonance", cf.resonance, "1:1, 1:2, 1:2-second or 1:3 (default from omega)");
  cmp->add_option("--eps-list", cf.eps_list, "Comma-separated epsilon values");
  cmp->add_option("--L", cf.L, "Horizon in units of 1/epsilon");
  cmp->add_flag("--near-identity", cf.near_identity, "Also compare through the near-identity transformation");

  ResonanceFlags rf;
  auto* res = app.add_subcommand("resonance", "Resonance manifolds (omega 2, 3) or 1:1 classification (omega 1)");
  res->add_option("--omega", rf.omega, "Frequency ratio")->capture_default_str();
  res->add_option("--a1", rf.a1)->capture_default_str();
  res->add_option("--a2", rf.a2)->capture_default_str();
  res->add_option("--a3", rf.a3)->capture_default_str();
  res->add_option("--a4", rf.a4)->capture_default_str();
  res->add_option("--E0", rf.E0, "Energy of the first-order 1:2 manifold")->capture_default_str();
  res->add_flag("--chi3-literal", rf.chi3_literal, "Read the 47/140 term of the chi3 equation without a2^2");

  auto* ens = app.add_subcommand("ensemble", "Velocity statistics of a sampled ensemble");
  ens->add_option("config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);

  std::string figure;
  auto* fig = app.add_subcommand("reproduce-figure", "Time series for fig1 (n = 2) or fig2 (n = 3)");
  fig->add_option("which", figure, "fig1 or fig2")->required()->check(CLI::IsMember({"fig1", "fig2"}));

  OrderFlags of;
  auto* ord = app.add_subcommand("order-check", "Measured convergence order of fixed-step RK4");
  ord->add_option("config", of.config, "Configuration file (default: fig1 scenario)")->check(CLI::ExistingFile);
  ord->add_option("--t-end", of.t_end, "Integration end time")->capture_default_str();
  ord->add_option("--steps", of.steps, "Comma-separated step sizes in geometric progression")->capture_default_str();

  for (auto* sub : {sim, cmp, res, ens, fig, ord}) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const bool files = *sim || *cmp || *ens || *fig;
    if (files && g.out.empty()) g.out = "symevol-out";
    if (*sim) return cmd_simulate(config_path, g, out);
    if (*cmp) return cmd_compare(config_path, cf, g, out);
    if (*res) return cmd_resonance(rf, g, out);
    if (*ens) return cmd_ensemble(config_path, g, out);
    if (*fig) return cmd_figure(figure, g, out);
    if (*ord) return cmd_order_check(of, g, out);
  } catch (const IntegrationFailure& e) {
    err << "error: integration failed; last good time t = " << format_double(e.last_time()) << ": " << e.what()
        << "\n";
    return kExitNumerical;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Degenerate& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PhaseUndefined& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace symevol
