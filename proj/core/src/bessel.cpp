#include "safesde/bessel.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <stdexcept>

namespace safesde {

namespace {

// sum_k (-z^2/4)^k / (k! (nu+1)...(nu+k)), prefactor (z/2)^nu / Gamma(nu+1).
// At z <= 0.5 the k-th term falls below 1e-17 by k = 8.
double series_j(double nu, double z) {
  const double q = -0.25 * z * z;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= 12; ++k) {
    term *= q / (double(k) * (nu + double(k)));
    sum += term;
    if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
  }
  return std::pow(0.5 * z, nu) / std::tgamma(nu + 1.0) * sum;
}

bool is_half_integer(double nu, int& k) {
  double twice = 2.0 * nu;
  double r = std::round(twice);
  if (std::fabs(twice - r) > 1e-12) return false;
  int ri = int(r);
  if (ri % 2 == 0) return false;
  k = (ri - 1) / 2;  // nu = k + 1/2
  return true;
}

}  // namespace

double bessel_j(double nu, double z) {
  if (z < 0.0 || nu < 0.0) throw std::invalid_argument("bessel_j: requires nu >= 0, z >= 0");
  if (z == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  if (z <= 0.5) return series_j(nu, z);

  int k = 0;
  if (is_half_integer(nu, k) && k <= 3) {
    const double env = std::sqrt(2.0 / (M_PI * z));
    const double s = std::sin(z), c = std::cos(z);
    const double iz = 1.0 / z;
    switch (k) {
      case 0: return env * s;
      case 1: return env * (s * iz - c);
      case 2: return env * ((3.0 * iz * iz - 1.0) * s - 3.0 * iz * c);
      default:
        return env * ((15.0 * iz * iz * iz - 6.0 * iz) * s -
                      (15.0 * iz * iz - 1.0) * c);
    }
  }
  return boost::math::cyl_bessel_j(nu, z);
}

}  // namespace safesde
