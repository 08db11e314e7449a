#include "safesde/matern.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <stdexcept>

namespace safesde {

double MaternKernel::at_distance(double d) const {
  if (!(nu > 0.0) || !(gamma > 0.0) || !(kappa0 > 0.0))
    throw std::invalid_argument("matern: nu, gamma, kappa0 must be positive");
  if (d < 0.0) throw std::invalid_argument("matern: negative distance");
  const double r = d / gamma;
  if (r < 1e-14) return kappa0;

  if (std::fabs(nu - 0.5) < 1e-12) return kappa0 * std::exp(-r);
  if (std::fabs(nu - 1.5) < 1e-12) {
    const double a = std::sqrt(3.0) * r;
    return kappa0 * (1.0 + a) * std::exp(-a);
  }
  if (std::fabs(nu - 2.5) < 1e-12) {
    const double a = std::sqrt(5.0) * r;
    return kappa0 * (1.0 + a + a * a / 3.0) * std::exp(-a);
  }
  if (std::fabs(nu - 3.5) < 1e-12) {
    const double a = std::sqrt(7.0) * r;
    return kappa0 * (1.0 + a + 0.4 * a * a + a * a * a / 15.0) * std::exp(-a);
  }
  const double a = std::sqrt(2.0 * nu) * r;
  return kappa0 * std::pow(2.0, 1.0 - nu) / std::tgamma(nu) * std::pow(a, nu) *
         boost::math::cyl_bessel_k(nu, a);
}

}  // namespace safesde
