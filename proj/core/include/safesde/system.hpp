#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "safesde/rng.hpp"
#include "safesde/types.hpp"

namespace safesde {

using ControlLaw =
    std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& state)>;

// Controlled diffusion dX = b(X,u) dt + a(X,u) dW on R^{state_dim}.
// The leading observed_dim components are the observed state: regions and
// density estimates act on that block. First order systems have
// observed_dim == state_dim; the double integrator carries velocity in the
// trailing block. X(0): observed block ~ N(initial_mean, initial_std^2 I),
// trailing block zero.
struct SystemSpec {
  int state_dim = 1;
  int observed_dim = 1;
  int control_dim = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> drift;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> diffusion;
  Eigen::VectorXd initial_mean;
  double initial_std = 0.0;
  double t_max = 1.0;
};

// Indicator functions over the observed state; >= 0 means inside.
struct RegionSpec {
  std::function<double(const Eigen::VectorXd&)> safe;
  std::function<double(const Eigen::VectorXd&)> reset;
};

// Piecewise constant heading control: until t_explo the target velocity is
// v (cos theta_i, sin theta_i) with segment i = min(floor(t m / t_explo), m-1);
// afterwards steer back to mu0 with gain kappa. Components clipped to
// [-u_max, u_max].
struct BenchmarkControl {
  Eigen::VectorXd theta;
  double v = 2.0;
  double kappa = 0.5;
  double t_explo = 6.0;
  double u_max = 4.0;
  Eigen::Vector2d mu0 = Eigen::Vector2d::Zero();
};

Eigen::Vector2d eval_control(const BenchmarkControl& c, double t,
                             const Eigen::Vector2d& x, const Eigen::Vector2d& v);
ControlLaw make_control_law(const BenchmarkControl& c);

struct TrajectoryBatch {
  Eigen::VectorXd theta;   // control parameters the batch was generated under
  double horizon = 0.0;
  std::uint64_t seed = 0;
  int observed_dim = 1;
  Eigen::VectorXd time_grid;                // n_steps + 1 nodes, uniform
  std::vector<Eigen::MatrixXd> states;      // per path, (n_steps+1) x state_dim

  int n_paths() const { return int(states.size()); }
  int nearest_index(double t) const;
  Eigen::VectorXd observed(int path, int step) const {
    return states[path].row(step).head(observed_dim).transpose();
  }
};

// Euler-Maruyama over [0, horizon] with n_steps uniform steps. Path p draws
// from child_seed(seed, p), so the batch is reproducible bit for bit for any
// thread count. Throws on non-finite states, naming path and step.
TrajectoryBatch integrate_paths(const SystemSpec& spec, const ControlLaw& law,
                                const Eigen::VectorXd& theta_tag, double horizon,
                                int q, int n_steps, std::uint64_t seed);
TrajectoryBatch integrate_paths(const SystemSpec& spec, const BenchmarkControl& control,
                                int q, int n_steps, std::uint64_t seed);

// Initial state draw shared by integrate_paths (path index as stream id).
Eigen::VectorXd initial_state(const SystemSpec& spec, Rng& rng);
// Reset: a fresh initial state from (seed, stream 0).
Eigen::VectorXd reset_state(const SystemSpec& spec, std::uint64_t seed);

// Single path driven by a caller supplied generator; visit(step, t, state)
// is called at every grid node including the initial one. Shared by the
// batch integrator and the Monte Carlo oracles, which avoid storing paths.
template <class Visitor>
void run_path(const SystemSpec& spec, const ControlLaw& law, double horizon,
              int n_steps, Rng& rng, Visitor&& visit);

struct BenchmarkParams {
  double noise_amp = 5.0;
  Eigen::Vector2d noise_center = Eigen::Vector2d(5.0, 5.0);
  double noise_sigma = 2.0;
  double initial_std = 0.1;
  Eigen::Vector2d initial_mean = Eigen::Vector2d::Zero();
  double t_max = 20.0;
  double bound = 10.0;        // safe box (-bound, bound)^2
  double reset_radius = 2.5;  // reset disk around initial_mean
};

// State (x, v) in R^4: dx = v dt, dv = u dt + a(x) dW with the Gaussian
// noise bump a(x) = noise_amp exp(-|x - c|^2 / (2 noise_sigma^2)).
SystemSpec double_integrator_system(const BenchmarkParams& p);
RegionSpec box_disk_regions(const BenchmarkParams& p);
double noise_amplitude(const BenchmarkParams& p, const Eigen::Vector2d& x);

// 1d Ornstein-Uhlenbeck dX = -rate X dt + diffusion dW, used by tests and
// oracles; analytic moments live in oracles.hpp.
SystemSpec ou_system(double x0, double rate, double diffusion);

// --- template definition ---

template <class Visitor>
void run_path(const SystemSpec& spec, const ControlLaw& law, double horizon,
              int n_steps, Rng& rng, Visitor&& visit) {
  const double dt = horizon / n_steps;
  const double sq_dt = std::sqrt(dt);
  Eigen::VectorXd x = initial_state(spec, rng);
  Eigen::VectorXd xi(spec.state_dim);
  visit(0, 0.0, x);
  for (int l = 0; l < n_steps; ++l) {
    const double t = l * dt;
    const Eigen::VectorXd u = law(t, x);
    for (int i = 0; i < spec.state_dim; ++i) xi[i] = rng.normal();
    x += spec.drift(x, u) * dt + spec.diffusion(x, u) * (sq_dt * xi);
    visit(l + 1, (l + 1) * dt, x);
  }
}

}  // namespace safesde
