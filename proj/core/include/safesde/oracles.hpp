#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "safesde/system.hpp"

namespace safesde {

// Brute force reference map over a set of controls: per row of thetas,
// s_inf = the minimum over eval_steps of the pointwise safe fraction (the
// same time discretization the regression sees), and the terminal reset
// fraction. Candidate c draws its paths from child streams of
// child_seed(seed, c), so the map is independent of thread count.
struct OracleMap {
  Eigen::MatrixXd thetas;      // n_controls x m
  double horizon = 0.0;
  Eigen::VectorXd s_inf;       // min pointwise safe fraction per control
  Eigen::VectorXd r_terminal;  // reset fraction at the horizon
  int paths_per_point = 0;
  std::uint64_t seed = 0;

  // Bernoulli standard error bound, <= 1/(2 sqrt(paths)).
  double standard_error(int row) const;
};

using LawFactory = std::function<ControlLaw(const Eigen::VectorXd& theta)>;

// eval_steps are simulation step indices in [0, n_steps]; empty means every
// step.
OracleMap mc_truth_map(const SystemSpec& spec, const RegionSpec& regions,
                       const LawFactory& laws, const Eigen::MatrixXd& thetas,
                       double horizon, int paths_per_point, int n_steps,
                       std::uint64_t seed, const std::vector<int>& eval_steps = {});

// Indicator fractions for one control: safety at the grid node nearest to
// t, reset at the horizon.
struct PointTruth {
  double s = 0.0;
  double r = 0.0;
};
PointTruth mc_truth_at(const SystemSpec& spec, const RegionSpec& regions,
                       const ControlLaw& law, double t, double horizon,
                       int paths, int n_steps, std::uint64_t seed);

// Transition density of dX = -rate X dt + diffusion dW started at x0:
// Gaussian with mean x0 e^{-rate t} and variance
// diffusion^2 (1 - e^{-2 rate t}) / (2 rate); rate = 0 degenerates to
// Brownian variance diffusion^2 t.
double ou_density(double x, double t, double x0, double rate, double diffusion);
double ou_mean(double t, double x0, double rate);
double ou_variance(double t, double rate, double diffusion);

// Reference ridge solve by explicit dense inverse: mean = targets' (K +
// ridge I)^{-1} kvec, variance = kzz - kvec' (K + ridge I)^{-1} kvec.
// Verifies the solve by residual (<= 1e-12 relative) and fails loudly.
struct ReferenceSolve {
  double mean = 0.0;
  double variance = 0.0;
};
ReferenceSolve dense_reference_solve(const Eigen::MatrixXd& gram, double ridge,
                                     const Eigen::VectorXd& targets,
                                     const Eigen::VectorXd& kvec, double kzz);

}  // namespace safesde
