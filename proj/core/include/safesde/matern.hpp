#pragma once

#include <Eigen/Dense>

namespace safesde {

// Matern covariance with amplitude kappa0 and length scale gamma. Closed
// forms for nu in {1/2, 3/2, 5/2, 7/2}, modified Bessel evaluation for other
// positive orders. matern(0) = kappa0.
struct MaternKernel {
  double nu = 2.5;
  double gamma = 1.0;
  double kappa0 = 1.0;

  double at_distance(double d) const;
  double operator()(const Eigen::VectorXd& z1, const Eigen::VectorXd& z2) const {
    return at_distance((z1 - z2).norm());
  }
};

}  // namespace safesde
