#include "safesde/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

namespace safesde {

namespace {

std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& raw, const std::string& key) {
  if (raw == "inf" || raw == "+inf") return INFINITY;
  if (raw == "-inf") return -INFINITY;
  try {
    size_t pos = 0;
    double v = std::stod(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + ": cannot parse '" + raw + "' as a number");
  }
}

long parse_long(const std::string& raw, const std::string& key) {
  try {
    size_t pos = 0;
    long v = std::stol(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + ": cannot parse '" + raw + "' as an integer");
  }
}

std::vector<double> parse_vector(const std::string& raw, const std::string& key) {
  std::istringstream in(raw);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(parse_double(tok, key));
  return out;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// Flat model of the file: "section.key" -> raw value string.
using FlatMap = std::map<std::string, std::string>;

FlatMap parse_ini(const std::string& text, const std::string& source) {
  FlatMap out;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[' && s.back() == ']') {
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: " + source + ":" + std::to_string(lineno) +
                        ": expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (section.empty() || key.empty())
      throw ConfigError("config: " + source + ":" + std::to_string(lineno) +
                        ": key outside a [section]");
    out[section + "." + key] = val;
  }
  return out;
}

FlatMap parse_json_config(const std::string& text, const std::string& source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError("config: " + source + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: " + source + ": top level must be an object");
  FlatMap out;
  for (auto& [section, body] : doc.items()) {
    if (!body.is_object())
      throw ConfigError("config: " + source + ": section '" + section + "' must be an object");
    for (auto& [key, val] : body.items()) {
      std::string flat;
      if (val.is_string()) {
        flat = val.get<std::string>();
      } else if (val.is_array()) {
        // vectors "a b", or lists of vectors joined with ';'
        std::vector<std::string> parts;
        for (auto& el : val) {
          if (el.is_array()) {
            std::string seg;
            for (auto& x : el) seg += (seg.empty() ? "" : " ") + fmt_double(x.get<double>());
            parts.push_back(seg);
          } else {
            parts.push_back(fmt_double(el.get<double>()));
          }
        }
        bool nested = !val.empty() && val[0].is_array();
        for (size_t i = 0; i < parts.size(); ++i)
          flat += (i ? (nested ? "; " : " ") : "") + parts[i];
      } else if (val.is_number_integer()) {
        flat = std::to_string(val.get<long long>());
      } else if (val.is_number()) {
        flat = fmt_double(val.get<double>());
      } else {
        throw ConfigError("config: " + source + ": unsupported value type at " + section + "." + key);
      }
      out[section + "." + key] = flat;
    }
  }
  return out;
}

}  // namespace

CampaignConfig default_config() {
  CampaignConfig cfg;
  Eigen::VectorXd theta0(2);
  theta0 << -M_PI / 3.0, M_PI / 3.0;
  cfg.gamma0.push_back(theta0);
  return cfg;
}

BenchmarkControl CampaignConfig::make_control(const Eigen::VectorXd& theta) const {
  BenchmarkControl c;
  c.theta = theta;
  c.v = v;
  c.kappa = kappa;
  c.t_explo = t_explo;
  c.u_max = u_max;
  c.mu0 = system.initial_mean;
  return c;
}

ModelConfig CampaignConfig::make_model_config() const {
  ModelConfig mc;
  mc.kernel = MaternKernel{nu, gamma, kappa0};
  mc.policy = ridge_policy == "fixed" ? RidgePolicy::FixedRidge : RidgePolicy::InverseN;
  mc.fixed_ridge = ridge_value;
  mc.time_scale = system.t_max;
  mc.density_time_scale = density_time_scale;
  mc.density_ridge = density_ridge;
  return mc;
}

ConfidenceConfig CampaignConfig::make_confidence_config() const {
  ConfidenceConfig cc;
  cc.mode = beta_mode == "theoretical" ? ConfidenceConfig::Mode::Theoretical
                                       : ConfidenceConfig::Mode::Heuristic;
  cc.beta = beta;
  cc.norm_bound_s = norm_bound_s;
  cc.norm_bound_r = norm_bound_r;
  cc.err_proxy_s = err_proxy_s;
  cc.err_proxy_r = err_proxy_r;
  return cc;
}

CampaignConfig parse_config_text(const std::string& text, const std::string& source) {
  size_t first = text.find_first_not_of(" \t\r\n");
  FlatMap flat = (first != std::string::npos && text[first] == '{')
                     ? parse_json_config(text, source)
                     : parse_ini(text, source);

  CampaignConfig cfg = default_config();
  bool gamma0_set = false;

  auto take = [&](const std::string& key) -> const std::string* {
    auto it = flat.find(key);
    if (it == flat.end()) return nullptr;
    return &it->second;
  };
  std::vector<std::string> seen;
  auto num = [&](const std::string& key, double& dst) {
    if (const std::string* raw = take(key)) { dst = parse_double(*raw, key); seen.push_back(key); }
  };
  auto integer = [&](const std::string& key, int& dst) {
    if (const std::string* raw = take(key)) { dst = int(parse_long(*raw, key)); seen.push_back(key); }
  };
  auto longer = [&](const std::string& key, long& dst) {
    if (const std::string* raw = take(key)) { dst = parse_long(*raw, key); seen.push_back(key); }
  };
  auto text_field = [&](const std::string& key, std::string& dst) {
    if (const std::string* raw = take(key)) { dst = *raw; seen.push_back(key); }
  };
  auto vec2 = [&](const std::string& key, Eigen::Vector2d& dst) {
    if (const std::string* raw = take(key)) {
      auto v = parse_vector(*raw, key);
      if (v.size() != 2) throw ConfigError("config: " + key + ": expected 2 components");
      dst = Eigen::Vector2d(v[0], v[1]);
      seen.push_back(key);
    }
  };
  auto u64 = [&](const std::string& key, std::uint64_t& dst) {
    if (const std::string* raw = take(key)) {
      dst = std::uint64_t(parse_long(*raw, key));
      seen.push_back(key);
    }
  };

  num("system.noise_amp", cfg.system.noise_amp);
  vec2("system.noise_center", cfg.system.noise_center);
  num("system.noise_sigma", cfg.system.noise_sigma);
  num("system.initial_std", cfg.system.initial_std);
  vec2("system.initial_mean", cfg.system.initial_mean);
  num("system.t_max", cfg.system.t_max);
  num("system.bound", cfg.system.bound);
  num("system.reset_radius", cfg.system.reset_radius);

  num("control.v", cfg.v);
  num("control.kappa", cfg.kappa);
  num("control.t_explo", cfg.t_explo);
  integer("control.segments", cfg.segments);
  bool u_max_given = flat.count("control.u_max") != 0;
  num("control.u_max", cfg.u_max);
  if (!u_max_given) cfg.u_max = 2.0 * cfg.v;

  integer("simulate.q", cfg.q);
  integer("simulate.n_steps", cfg.n_steps);
  longer("simulate.q_prime", cfg.q_prime);
  text_field("simulate.prob_source", cfg.prob_source);

  num("model.nu", cfg.nu);
  num("model.gamma", cfg.gamma);
  num("model.kappa0", cfg.kappa0);
  text_field("model.ridge_policy", cfg.ridge_policy);
  num("model.ridge_value", cfg.ridge_value);
  num("model.nu_kde", cfg.nu_kde);
  text_field("model.beta_mode", cfg.beta_mode);
  num("model.beta", cfg.beta);
  num("model.density_time_scale", cfg.density_time_scale);
  num("model.density_ridge", cfg.density_ridge);
  num("model.norm_bound_s", cfg.norm_bound_s);
  num("model.norm_bound_r", cfg.norm_bound_r);
  num("model.err_proxy_s", cfg.err_proxy_s);
  num("model.err_proxy_r", cfg.err_proxy_r);

  num("explore.eps", cfg.eps);
  num("explore.xi", cfg.xi);
  num("explore.eta", cfg.eta);
  integer("explore.max_iterations", cfg.max_iterations);
  integer("explore.theta_resolution", cfg.theta_resolution);
  integer("explore.time_nodes", cfg.time_nodes);
  num("explore.time_band_lo", cfg.time_band_lo);
  num("explore.time_band_hi", cfg.time_band_hi);
  integer("explore.time_band_nodes", cfg.time_band_nodes);
  num("explore.theta_min", cfg.theta_min);
  num("explore.theta_max", cfg.theta_max);
  text_field("explore.scan_mode", cfg.scan_mode);
  u64("explore.scan_seed", cfg.scan_seed);
  if (const std::string* raw = take("explore.gamma0")) {
    seen.push_back("explore.gamma0");
    cfg.gamma0.clear();
    gamma0_set = true;
    std::istringstream groups(*raw);
    std::string group;
    while (std::getline(groups, group, ';')) {
      auto v = parse_vector(group, "explore.gamma0");
      if (v.empty()) continue;
      cfg.gamma0.push_back(Eigen::Map<Eigen::VectorXd>(v.data(), long(v.size())));
    }
    if (cfg.gamma0.empty())
      throw ConfigError("config: explore.gamma0: needs at least one control");
  }

  integer("evaluate.controls", cfg.eval_controls);
  integer("evaluate.paths", cfg.eval_paths);
  integer("evaluate.oracle_paths", cfg.oracle_paths);

  u64("seeds.seed", cfg.seed);
  text_field("output.dir", cfg.out_dir);

  for (const auto& [key, val] : flat) {
    (void)val;
    bool known = std::find(seen.begin(), seen.end(), key) != seen.end() ||
                 key == "control.u_max" || key == "explore.gamma0";
    if (!known) throw ConfigError("config: unknown key '" + key + "'");
  }

  // validation
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError("config: " + msg);
  };
  require(cfg.system.t_max > 0, "system.t_max: must be positive");
  require(cfg.system.noise_sigma > 0, "system.noise_sigma: must be positive");
  require(cfg.segments >= 1, "control.segments: must be >= 1");
  require(cfg.t_explo > 0 && cfg.t_explo <= cfg.system.t_max,
          "control.t_explo: must lie in (0, t_max]");
  require(cfg.u_max > 0, "control.u_max: must be positive");
  require(cfg.q >= 1, "simulate.q: must be >= 1");
  require(cfg.n_steps >= 1, "simulate.n_steps: must be >= 1");
  require(cfg.prob_source == "samples" || cfg.prob_source == "density",
          "simulate.prob_source: must be samples or density");
  require(cfg.nu > 0 && cfg.gamma > 0 && cfg.kappa0 > 0,
          "model.nu/gamma/kappa0: must be positive");
  require(cfg.ridge_policy == "inverse_n" || cfg.ridge_policy == "fixed",
          "model.ridge_policy: must be inverse_n or fixed");
  require(cfg.ridge_value > 0, "model.ridge_value: must be positive");
  require(cfg.beta_mode == "heuristic" || cfg.beta_mode == "theoretical",
          "model.beta_mode: must be heuristic or theoretical");
  require(cfg.beta >= 0, "model.beta: must be nonnegative");
  require(cfg.density_time_scale >= 0,
          "model.density_time_scale: must be nonnegative");
  require(cfg.density_ridge >= 0, "model.density_ridge: must be nonnegative");
  auto ok_slack = [](double x) { return std::isinf(x) ? x > 0 : (x >= 0.0 && x <= 1.0); };
  require(ok_slack(cfg.eps), "explore.eps: must lie in [0,1] or be inf");
  require(ok_slack(cfg.xi), "explore.xi: must lie in [0,1] or be inf");
  require(cfg.eta > 0, "explore.eta: must be positive");
  require(cfg.max_iterations >= 0, "explore.max_iterations: must be >= 0");
  require(cfg.theta_resolution >= 2, "explore.theta_resolution: must be >= 2");
  require(cfg.time_nodes >= 1 && cfg.time_nodes <= cfg.n_steps,
          "explore.time_nodes: must lie in [1, n_steps]");
  require(cfg.time_band_nodes >= 0, "explore.time_band_nodes: must be >= 0");
  if (cfg.time_band_nodes > 0)
    require(cfg.time_band_lo > 0.0 && cfg.time_band_lo < cfg.time_band_hi &&
                cfg.time_band_hi <= cfg.system.t_max,
            "explore.time_band_lo/hi: band must lie within (0, t_max]");
  require(cfg.theta_min < cfg.theta_max, "explore.theta_min/max: empty range");
  require(cfg.scan_mode == "shuffled" || cfg.scan_mode == "lexicographic",
          "explore.scan_mode: must be shuffled or lexicographic");
  for (const auto& g : cfg.gamma0)
    require(int(g.size()) == cfg.segments,
            "explore.gamma0: control dimension must equal control.segments");
  require(cfg.eval_controls >= 1, "evaluate.controls: must be >= 1");
  require(cfg.eval_paths >= 1, "evaluate.paths: must be >= 1");
  require(cfg.oracle_paths >= 1, "evaluate.oracle_paths: must be >= 1");
  (void)gamma0_set;
  return cfg;
}

CampaignConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::string serialize_config(const CampaignConfig& c) {
  std::ostringstream out;
  auto kv = [&](const char* key, const std::string& val) { out << key << " = " << val << "\n"; };
  auto kvd = [&](const char* key, double v) { kv(key, fmt_double(v)); };
  auto kvi = [&](const char* key, long v) { kv(key, std::to_string(v)); };
  auto kv2 = [&](const char* key, const Eigen::Vector2d& v) {
    kv(key, fmt_double(v[0]) + " " + fmt_double(v[1]));
  };

  out << "[system]\n";
  kvd("noise_amp", c.system.noise_amp);
  kv2("noise_center", c.system.noise_center);
  kvd("noise_sigma", c.system.noise_sigma);
  kvd("initial_std", c.system.initial_std);
  kv2("initial_mean", c.system.initial_mean);
  kvd("t_max", c.system.t_max);
  kvd("bound", c.system.bound);
  kvd("reset_radius", c.system.reset_radius);
  out << "\n[control]\n";
  kvd("v", c.v);
  kvd("kappa", c.kappa);
  kvd("t_explo", c.t_explo);
  kvi("segments", c.segments);
  kvd("u_max", c.u_max);
  out << "\n[simulate]\n";
  kvi("q", c.q);
  kvi("n_steps", c.n_steps);
  kvi("q_prime", c.q_prime);
  kv("prob_source", c.prob_source);
  out << "\n[model]\n";
  kvd("nu", c.nu);
  kvd("gamma", c.gamma);
  kvd("kappa0", c.kappa0);
  kv("ridge_policy", c.ridge_policy);
  kvd("ridge_value", c.ridge_value);
  kvd("nu_kde", c.nu_kde);
  kv("beta_mode", c.beta_mode);
  kvd("beta", c.beta);
  kvd("density_time_scale", c.density_time_scale);
  kvd("density_ridge", c.density_ridge);
  kvd("norm_bound_s", c.norm_bound_s);
  kvd("norm_bound_r", c.norm_bound_r);
  kvd("err_proxy_s", c.err_proxy_s);
  kvd("err_proxy_r", c.err_proxy_r);
  out << "\n[explore]\n";
  kvd("eps", c.eps);
  kvd("xi", c.xi);
  kvd("eta", c.eta);
  kvi("max_iterations", c.max_iterations);
  kvi("theta_resolution", c.theta_resolution);
  kvi("time_nodes", c.time_nodes);
  kvd("time_band_lo", c.time_band_lo);
  kvd("time_band_hi", c.time_band_hi);
  kvi("time_band_nodes", c.time_band_nodes);
  kvd("theta_min", c.theta_min);
  kvd("theta_max", c.theta_max);
  {
    std::string joined;
    for (size_t i = 0; i < c.gamma0.size(); ++i) {
      if (i) joined += "; ";
      for (int j = 0; j < c.gamma0[i].size(); ++j)
        joined += (j ? " " : "") + fmt_double(c.gamma0[i][j]);
    }
    kv("gamma0", joined);
  }
  kv("scan_mode", c.scan_mode);
  kvi("scan_seed", long(c.scan_seed));
  out << "\n[evaluate]\n";
  kvi("controls", c.eval_controls);
  kvi("paths", c.eval_paths);
  kvi("oracle_paths", c.oracle_paths);
  out << "\n[seeds]\n";
  kvi("seed", long(c.seed));
  out << "\n[output]\n";
  kv("dir", c.out_dir);
  return out.str();
}

std::string config_hash(const CampaignConfig& cfg) {
  const std::string text = serialize_config(cfg);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

}  // namespace safesde
