#include "safesde/system.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>

#include "safesde/parallel.hpp"

namespace safesde {

Eigen::Vector2d eval_control(const BenchmarkControl& c, double t,
                             const Eigen::Vector2d& x, const Eigen::Vector2d& v) {
  Eigen::Vector2d u;
  const int m = int(c.theta.size());
  if (t <= c.t_explo) {
    int i = std::min(int(std::floor(t * m / c.t_explo)), m - 1);
    u = c.v * Eigen::Vector2d(std::cos(c.theta[i]), std::sin(c.theta[i])) - v;
  } else {
    Eigen::Vector2d to_home = c.mu0 - x;
    double dist = to_home.norm();
    if (dist == 0.0) {
      u = -c.kappa * v;
    } else {
      u = c.kappa * (c.v * to_home / dist - v);
    }
  }
  return u.cwiseMax(-c.u_max).cwiseMin(c.u_max);
}

ControlLaw make_control_law(const BenchmarkControl& c) {
  return [c](double t, const Eigen::VectorXd& state) -> Eigen::VectorXd {
    return eval_control(c, t, state.head<2>(), state.segment<2>(2));
  };
}

int TrajectoryBatch::nearest_index(double t) const {
  const int n = int(time_grid.size());
  if (n == 1) return 0;
  const double dt = time_grid[1] - time_grid[0];
  int idx = int(std::lround(t / dt));
  return std::min(std::max(idx, 0), n - 1);
}

Eigen::VectorXd initial_state(const SystemSpec& spec, Rng& rng) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(spec.state_dim);
  for (int i = 0; i < spec.observed_dim; ++i)
    x[i] = spec.initial_mean[i] + spec.initial_std * rng.normal();
  return x;
}

Eigen::VectorXd reset_state(const SystemSpec& spec, std::uint64_t seed) {
  Rng rng(child_seed(seed, 0));
  return initial_state(spec, rng);
}

TrajectoryBatch integrate_paths(const SystemSpec& spec, const ControlLaw& law,
                                const Eigen::VectorXd& theta_tag, double horizon,
                                int q, int n_steps, std::uint64_t seed) {
  if (q < 1 || n_steps < 1) throw std::invalid_argument("integrate_paths: q and n_steps must be >= 1");
  if (!(horizon > 0.0) || horizon > spec.t_max + 1e-12)
    throw std::invalid_argument("integrate_paths: horizon must lie in (0, t_max]");

  TrajectoryBatch batch;
  batch.theta = theta_tag;
  batch.horizon = horizon;
  batch.seed = seed;
  batch.observed_dim = spec.observed_dim;
  batch.time_grid = Eigen::VectorXd::LinSpaced(n_steps + 1, 0.0, horizon);
  batch.states.assign(q, Eigen::MatrixXd(n_steps + 1, spec.state_dim));

  std::atomic<long long> bad_path{-1};
  std::atomic<int> bad_step{-1};
  parallel_blocks(q, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t p = lo; p < hi; ++p) {
      Rng rng(child_seed(seed, std::uint64_t(p)));
      bool ok = true;
      run_path(spec, law, horizon, n_steps, rng,
               [&](int step, double, const Eigen::VectorXd& x) {
                 if (ok && !x.allFinite()) {
                   ok = false;
                   bad_path = p;
                   bad_step = step;
                 }
                 batch.states[p].row(step) = x.transpose();
               });
      if (!ok) return;
    }
  });
  if (bad_path >= 0)
    throw std::runtime_error("integrate_paths: non-finite state at path " +
                             std::to_string(bad_path.load()) + ", step " +
                             std::to_string(bad_step.load()));
  return batch;
}

TrajectoryBatch integrate_paths(const SystemSpec& spec, const BenchmarkControl& control,
                                int q, int n_steps, std::uint64_t seed) {
  return integrate_paths(spec, make_control_law(control), control.theta,
                         spec.t_max, q, n_steps, seed);
}

double noise_amplitude(const BenchmarkParams& p, const Eigen::Vector2d& x) {
  return p.noise_amp *
         std::exp(-(x - p.noise_center).squaredNorm() / (2.0 * p.noise_sigma * p.noise_sigma));
}

SystemSpec double_integrator_system(const BenchmarkParams& p) {
  SystemSpec spec;
  spec.state_dim = 4;
  spec.observed_dim = 2;
  spec.control_dim = 2;
  spec.initial_mean = p.initial_mean;
  spec.initial_std = p.initial_std;
  spec.t_max = p.t_max;
  spec.drift = [](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    Eigen::VectorXd b(4);
    b.head<2>() = x.segment<2>(2);
    b.tail<2>() = u;
    return b;
  };
  spec.diffusion = [p](const Eigen::VectorXd& x, const Eigen::VectorXd&) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
    const double amp = noise_amplitude(p, x.head<2>());
    a(2, 2) = amp;
    a(3, 3) = amp;
    return a;
  };
  return spec;
}

RegionSpec box_disk_regions(const BenchmarkParams& p) {
  RegionSpec regions;
  const double bound = p.bound;
  regions.safe = [bound](const Eigen::VectorXd& x) {
    return std::min(bound - std::fabs(x[0]), bound - std::fabs(x[1]));
  };
  const Eigen::Vector2d center = p.initial_mean;
  const double radius = p.reset_radius;
  regions.reset = [center, radius](const Eigen::VectorXd& x) {
    return radius - (x.head<2>() - center).norm();
  };
  return regions;
}

SystemSpec ou_system(double x0, double rate, double diffusion) {
  SystemSpec spec;
  spec.state_dim = 1;
  spec.observed_dim = 1;
  spec.control_dim = 0;
  spec.initial_mean = Eigen::VectorXd::Constant(1, x0);
  spec.initial_std = 0.0;
  spec.t_max = 1e12;  // horizon chosen per call
  spec.drift = [rate](const Eigen::VectorXd& x, const Eigen::VectorXd&) {
    return Eigen::VectorXd(-rate * x);
  };
  spec.diffusion = [diffusion](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Constant(1, 1, diffusion);
  };
  return spec;
}

}  // namespace safesde
