#include "safesde/kde.hpp"

#include <cmath>
#include <stdexcept>

#include "safesde/bessel.hpp"

namespace safesde {

double bessel_kernel_radial(double norm, int dim, double bandwidth) {
  if (norm < 0.0 || dim < 1 || bandwidth <= 0.0)
    throw std::invalid_argument("bessel_kernel: requires norm >= 0, dim >= 1, bandwidth > 0");
  const double nu = 0.5 * dim;
  const double z = 2.0 * M_PI * bandwidth * norm;
  if (z <= 1e-4) {
    // rho = (pi R^2)^{n/2} / Gamma(n/2+1) [1 - z^2/(4(nu+1)) + z^4/(32(nu+1)(nu+2))]
    const double head = std::pow(M_PI * bandwidth * bandwidth, nu) / std::tgamma(nu + 1.0);
    const double z2 = z * z;
    return head * (1.0 - z2 / (4.0 * (nu + 1.0)) +
                   z2 * z2 / (32.0 * (nu + 1.0) * (nu + 2.0)));
  }
  return std::pow(bandwidth, nu) * std::pow(norm, -nu) * bessel_j(nu, z);
}

double bessel_kernel(const Eigen::VectorXd& x, double bandwidth) {
  return bessel_kernel_radial(x.norm(), int(x.size()), bandwidth);
}

double bandwidth_rule(int q, int dim, double nu) {
  if (q < 1) throw std::invalid_argument("bandwidth_rule: q must be >= 1");
  if (!(nu > 0.5 * dim))
    throw std::invalid_argument("bandwidth_rule: requires nu > dim/2");
  return std::pow(double(q), 1.0 / (dim + 2.0 * nu));
}

double kde_density(const KdeEstimate& est, const Eigen::VectorXd& x) {
  if (est.q() < 1) throw std::invalid_argument("kde_density: empty sample set");
  if (x.size() != est.dim()) throw std::invalid_argument("kde_density: dimension mismatch");
  const int n = est.dim();
  double acc = 0.0;
  for (int i = 0; i < est.q(); ++i) {
    const double norm = (x.transpose() - est.samples.row(i)).norm();
    acc += bessel_kernel_radial(norm, n, est.bandwidth);
  }
  return acc / est.q();
}

double probability_from_samples(const TrajectoryBatch& batch, double t,
                                const std::function<double(const Eigen::VectorXd&)>& indicator,
                                SnapInfo* snap) {
  const int idx = batch.nearest_index(t);
  if (snap) {
    snap->used_t = batch.time_grid[idx];
    snap->snapped = std::fabs(snap->used_t - t) > 1e-9 * std::max(1.0, batch.horizon);
  }
  int hits = 0;
  for (int p = 0; p < batch.n_paths(); ++p)
    if (indicator(batch.observed(p, idx)) >= 0.0) ++hits;
  return double(hits) / batch.n_paths();
}

double probability_from_density(const KdeEstimate& est,
                                const std::function<double(const Eigen::VectorXd&)>& indicator,
                                const Eigen::VectorXd& box_lo, const Eigen::VectorXd& box_hi,
                                int q_prime, std::uint64_t seed) {
  const int n = est.dim();
  if (box_lo.size() != n || box_hi.size() != n)
    throw std::invalid_argument("probability_from_density: box dimension mismatch");
  const double margin = 3.0 / est.bandwidth;
  for (int j = 0; j < n; ++j) {
    if (box_lo[j] > est.samples.col(j).minCoeff() - margin ||
        box_hi[j] < est.samples.col(j).maxCoeff() + margin)
      throw std::invalid_argument(
          "probability_from_density: box must cover samples plus 3/R margin");
  }
  double volume = 1.0;
  for (int j = 0; j < n; ++j) volume *= box_hi[j] - box_lo[j];

  Rng rng(child_seed(seed, 0));
  Eigen::VectorXd x(n);
  double acc = 0.0;
  for (int k = 0; k < q_prime; ++k) {
    for (int j = 0; j < n; ++j)
      x[j] = box_lo[j] + (box_hi[j] - box_lo[j]) * rng.uniform();
    if (indicator(x) >= 0.0) acc += kde_density(est, x);
  }
  const double p = volume * acc / q_prime;
  return std::min(1.0, std::max(0.0, p));
}

}  // namespace safesde
