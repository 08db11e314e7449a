#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "safesde/kernel_model.hpp"
#include "safesde/system.hpp"

namespace safesde {

// Raised on malformed or out-of-range configuration; message names the
// offending section.key. Mapped to exit code 1 by the harness.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Campaign settings; the flat key-value sections mirror this struct one to
// one, and a JSON object with the same section/key layout is also accepted.
struct CampaignConfig {
  // [system]
  BenchmarkParams system;

  // [control]
  double v = 2.0;
  double kappa = 0.5;
  double t_explo = 6.0;
  int segments = 2;        // m
  double u_max = 4.0;      // 2v

  // [simulate]
  int q = 200;             // paths per observation
  int n_steps = 500;
  long q_prime = 100000;   // density-integration points
  std::string prob_source = "samples";  // or "density"

  // [model]
  double nu = 2.5;
  double gamma = 1.0;
  double kappa0 = 1.0;
  std::string ridge_policy = "inverse_n";  // or "fixed"
  double ridge_value = 1e-3;               // N*lambda under "fixed"
  double nu_kde = 2.5;
  std::string beta_mode = "heuristic";     // or "theoretical"
  double beta = 2.0;
  // Kernel time scale for the density map; 0 shares t_max with the s map.
  // The state distribution moves on the drift's time scale, so a few time
  // units is a good default for the benchmark.
  double density_time_scale = 2.0;
  // Ridge for the density map; 0 shares the scalar maps' schedule. Heavier
  // than the scalar ridge because near-interpolation weights amplify the
  // oscillatory KDE tails.
  double density_ridge = 1.0;
  double norm_bound_s = 1.0;
  double norm_bound_r = 1.0;
  double err_proxy_s = 0.0;
  double err_proxy_r = 0.0;

  // [explore]
  double eps = 0.1;  // "inf" accepted
  double xi = 0.1;
  double eta = 0.05;
  int max_iterations = 1000;
  int theta_resolution = 40;
  int time_nodes = 50;
  // Optional extra observation times, uniform over [time_band_lo,
  // time_band_hi]: concentrates candidates where excursions peak.
  double time_band_lo = 0.0;
  double time_band_hi = 0.0;
  int time_band_nodes = 0;
  double theta_min = -M_PI;
  double theta_max = M_PI;
  std::vector<Eigen::VectorXd> gamma0;  // initial safe controls; default (-pi/3, pi/3)
  std::string scan_mode = "shuffled";   // candidate enumeration: shuffled | lexicographic
  std::uint64_t scan_seed = 0x5afe;

  // [evaluate]
  int eval_controls = 1000;
  int eval_paths = 100;
  int oracle_paths = 10000;

  // [seeds]
  std::uint64_t seed = 1;

  // [output]
  std::string out_dir = "out";

  SystemSpec make_system() const { return double_integrator_system(system); }
  RegionSpec make_regions() const { return box_disk_regions(system); }
  BenchmarkControl make_control(const Eigen::VectorXd& theta) const;
  ModelConfig make_model_config() const;
  ConfidenceConfig make_confidence_config() const;
};

CampaignConfig default_config();

// Accepts the sectioned key-value format or JSON (sniffed from the first
// non-space byte). Unknown keys and malformed values raise ConfigError.
CampaignConfig parse_config_text(const std::string& text, const std::string& source);
CampaignConfig parse_config_file(const std::string& path);

// Canonical serialization: fixed section and key order, full precision.
// parse(serialize(c)) == c, and serialize is a fixed point after one round.
std::string serialize_config(const CampaignConfig& cfg);

// FNV-1a over the canonical serialization, as 16 hex digits.
std::string config_hash(const CampaignConfig& cfg);

}  // namespace safesde
