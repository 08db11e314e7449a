#pragma once

#include <Eigen/Dense>

namespace safesde {

// A candidate control: segment angles theta, observation time t, and the
// horizon T the trajectory is run to before resetting. t <= horizon.
struct ControlPoint {
  Eigen::VectorXd theta;
  double t = 0.0;
  double horizon = 0.0;
};

}  // namespace safesde
