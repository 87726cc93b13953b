#include "symevol/config.hpp"

#include <openssl/evp.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

namespace symevol {

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"model", {"a1", "a2", "a3", "a4", "omega", "epsilon", "n", "decay", "decay_power", "delta"}},
      {"initial", {"t", "q1", "v1", "q2", "v2"}},
      {"run", {"horizon", "method", "step", "rtol", "atol", "sample_dt", "max_steps", "label", "observables"}},
      {"compare", {"resonance", "eps_list", "L", "near_identity"}},
      {"ensemble", {"count", "seed", "threads", "q1", "v1", "q2", "v2"}},
  };
  return s;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(std::string_view text, const std::string& key) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (t.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError("config: " + key + " = '" + std::string(text) + "' is not a number");
  }
  return v;
}

std::uint64_t to_unsigned(std::string_view text, const std::string& key) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (t.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError("config: " + key + " = '" + std::string(text) + "' is not a non-negative integer");
  }
  return v;
}

std::vector<std::string> split(std::string_view text, char sep, bool keep_empty = false) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (keep_empty || !item.empty()) out.push_back(item);
  }
  return out;
}

std::optional<std::string> find(const ConfigMap& c, const std::string& key) {
  const auto it = c.find(key);
  if (it == c.end()) return std::nullopt;
  return it->second;
}

template <class F>
auto wrap_invalid(F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

CoordinateSampler parse_sampler(const std::string& text, const std::string& key) {
  const auto parts = split(text, ' ');
  if (parts.empty()) throw ConfigError("config: " + key + " is empty");
  CoordinateSampler s;
  if (parts[0] == "fixed" && parts.size() == 2) {
    s.kind = SamplerKind::uniform;
    s.a = s.b = to_double(parts[1], key);
  } else if ((parts[0] == "uniform" || parts[0] == "normal") && parts.size() == 3) {
    s.kind = parts[0] == "uniform" ? SamplerKind::uniform : SamplerKind::normal;
    s.a = to_double(parts[1], key);
    s.b = to_double(parts[2], key);
  } else {
    throw ConfigError("config: " + key + " = '" + text +
                      "' (expected 'fixed x', 'uniform lo hi' or 'normal mean sd')");
  }
  return s;
}

}  // namespace

ConfigMap parse_config(std::string_view text) {
  boost::property_tree::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config: " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  ConfigMap out;
  for (const auto& [section, body] : tree) {
    const auto it = schema().find(section);
    if (it == schema().end() || !body.data().empty()) {
      throw ConfigError("config: unknown section or top-level key '" + section + "'");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) throw ConfigError("config: unknown key '" + section + "." + key + "'");
      out[section + "." + key] = trim(value.data());
    }
  }
  return out;
}

ConfigMap load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string canonical_config(const ConfigMap& config) {
  std::string out;
  for (const auto& [key, value] : config) out += key + "=" + value + "\n";
  return out;
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[md[i] >> 4];
    hex += kHex[md[i] & 0xf];
  }
  return hex;
}

std::string config_digest(const ConfigMap& config) { return sha256_hex(canonical_config(config)); }

std::optional<double> find_double(const ConfigMap& config, const std::string& key) {
  const auto v = find(config, key);
  if (!v) return std::nullopt;
  return to_double(*v, key);
}

double get_double(const ConfigMap& config, const std::string& key, double fallback) {
  return find_double(config, key).value_or(fallback);
}

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  if (trim(std::string(text)).empty()) throw ConfigError("config: empty list");
  for (const auto& item : split(text, ',', true)) out.push_back(to_double(item, "list"));
  if (out.empty()) throw ConfigError("config: empty list");
  return out;
}

ScenarioConfig scenario_from_config(const ConfigMap& c) {
  ScenarioConfig s;
  auto& p = s.params;
  p.a1 = get_double(c, "model.a1", p.a1);
  p.a2 = get_double(c, "model.a2", p.a2);
  p.a3 = get_double(c, "model.a3", p.a3);
  p.a4 = get_double(c, "model.a4", p.a4);
  p.omega = get_double(c, "model.omega", p.omega);
  p.epsilon = get_double(c, "model.epsilon", p.epsilon);
  if (auto n = find(c, "model.n")) p.n = static_cast<int>(to_unsigned(*n, "model.n"));
  if (auto d = find(c, "model.decay")) p.decay = wrap_invalid([&] { return parse_decay_law(*d); });
  p.decay_power = get_double(c, "model.decay_power", p.decay_power);
  p.delta_override = find_double(c, "model.delta");

  s.initial.t = get_double(c, "initial.t", 0.0);
  s.initial.q1 = get_double(c, "initial.q1", 0.0);
  s.initial.v1 = get_double(c, "initial.v1", 0.0);
  s.initial.q2 = get_double(c, "initial.q2", 0.0);
  s.initial.v2 = get_double(c, "initial.v2", 0.0);

  s.horizon = get_double(c, "run.horizon", s.horizon);
  auto& ic = s.integrator;
  if (auto m = find(c, "run.method")) ic.method = wrap_invalid([&] { return parse_method(*m); });
  ic.step = get_double(c, "run.step", ic.step);
  ic.rtol = get_double(c, "run.rtol", ic.rtol);
  ic.atol = get_double(c, "run.atol", ic.atol);
  ic.sample_dt = get_double(c, "run.sample_dt", ic.sample_dt);
  if (auto m = find(c, "run.max_steps")) ic.max_steps = to_unsigned(*m, "run.max_steps");
  s.label = find(c, "run.label").value_or("");
  if (auto o = find(c, "run.observables")) {
    s.observables.clear();
    for (const auto& item : split(*o, ',')) {
      s.observables.push_back(wrap_invalid([&] { return parse_observable(item); }));
    }
  }

  wrap_invalid([&] {
    s.validate();
    IntegratorConfig probe = ic;
    probe.t_start = s.initial.t;
    probe.t_end = s.horizon;
    probe.validate();
    return 0;
  });
  return s;
}

EnsembleSpec ensemble_from_config(const ConfigMap& c) {
  EnsembleSpec e;
  e.base = scenario_from_config(c);
  if (auto v = find(c, "ensemble.count")) e.count = to_unsigned(*v, "ensemble.count");
  if (auto v = find(c, "ensemble.seed")) e.seed = to_unsigned(*v, "ensemble.seed");
  if (auto v = find(c, "ensemble.threads")) e.threads = to_unsigned(*v, "ensemble.threads");
  const char* names[] = {"q1", "v1", "q2", "v2"};
  const double centre[] = {e.base.initial.q1, e.base.initial.v1, e.base.initial.q2, e.base.initial.v2};
  for (std::size_t i = 0; i < 4; ++i) {
    const std::string key = std::string("ensemble.") + names[i];
    if (auto v = find(c, key)) {
      e.sampler[i] = parse_sampler(*v, key);
    } else {
      e.sampler[i] = {SamplerKind::uniform, centre[i], centre[i]};
    }
  }
  wrap_invalid([&] {
    e.validate();
    return 0;
  });
  return e;
}

CompareSettings compare_from_config(const ConfigMap& c) {
  CompareSettings s;
  if (auto r = find(c, "compare.resonance")) {
    s.resonance = wrap_invalid([&] { return parse_averaged_system(*r); });
  }
  if (auto l = find(c, "compare.eps_list")) s.eps_list = parse_double_list(*l);
  s.options.L = get_double(c, "compare.L", s.options.L);
  if (auto v = find(c, "compare.near_identity")) {
    if (*v != "true" && *v != "false") throw ConfigError("config: compare.near_identity must be true or false");
    s.options.near_identity = *v == "true";
  }
  return s;
}

}  // namespace symevol
