#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>

#include "safesde/system.hpp"
#include "safesde/types.hpp"

namespace safesde {

// Band-limited radial kernel rho_R(x) = R^{n/2} |x|^{-n/2} J_{n/2}(2 pi R |x|).
// Integrates to one over R^n; rho_R(0) = (pi R^2)^{n/2} / Gamma(n/2 + 1).
// Below 2 pi R |x| = 1e-4 a three term expansion around zero replaces the
// direct form, which is 0/0 there.
double bessel_kernel(const Eigen::VectorXd& x, double bandwidth);
double bessel_kernel_radial(double norm, int dim, double bandwidth);

// R = Q^{1/(n + 2 nu)}. Requires Q >= 1 and nu > n/2.
double bandwidth_rule(int q, int dim, double nu);

// Kernel density estimate from Q observed states: mean of rho_R(x - X_i).
// Values can be negative; they are clipped only when reported as
// probabilities.
struct KdeEstimate {
  Eigen::MatrixXd samples;  // Q x n
  double bandwidth = 1.0;

  int q() const { return int(samples.rows()); }
  int dim() const { return int(samples.cols()); }
};

double kde_density(const KdeEstimate& est, const Eigen::VectorXd& x);

// One exploration step's data at (theta, t): sampled probabilities for the
// safety and reset indicators plus the density handle. kde is absent for
// synthetic fits that only carry scalar targets.
struct ObservationRecord {
  ControlPoint point;
  double s_hat = 0.0;
  double r_hat = 0.0;
  std::optional<KdeEstimate> kde;
};

struct SnapInfo {
  bool snapped = false;
  double used_t = 0.0;
};

// Fraction of paths whose observed state at time t satisfies indicator >= 0.
// t is snapped to the nearest grid node; snap reports whether it moved.
double probability_from_samples(const TrajectoryBatch& batch, double t,
                                const std::function<double(const Eigen::VectorXd&)>& indicator,
                                SnapInfo* snap = nullptr);

// Monte Carlo integral of the density over {indicator >= 0} on an axis
// aligned box, clipped to [0,1]. The box must cover the samples plus a
// 3/R margin.
double probability_from_density(const KdeEstimate& est,
                                const std::function<double(const Eigen::VectorXd&)>& indicator,
                                const Eigen::VectorXd& box_lo, const Eigen::VectorXd& box_hi,
                                int q_prime, std::uint64_t seed);

}  // namespace safesde
