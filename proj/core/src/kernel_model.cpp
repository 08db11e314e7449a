#include "safesde/kernel_model.hpp"

#include <cmath>
#include <stdexcept>

#include "safesde/parallel.hpp"

namespace safesde {

namespace {
// Relative jitter applied to the Gram diagonal when a factorization update
// runs out of positive mass (exact duplicates at tiny ridge).
constexpr double kJitterScale = 1e-10;
// Tolerance for the predictive variance clamp: rounding may push the
// Schur complement slightly negative near interpolation.
constexpr double kVarianceFloor = -1e-10;
}  // namespace

double KernelModel::ridge() const {
  switch (cfg_.policy) {
    case RidgePolicy::InverseN:
      return 1.0;
    case RidgePolicy::FixedRidge:
      return cfg_.fixed_ridge;
  }
  return 1.0;
}

double KernelModel::lambda() const {
  if (obs_.empty()) return 0.0;
  return ridge() / double(obs_.size());
}

Eigen::VectorXd KernelModel::embed(const Eigen::VectorXd& theta, double t) const {
  Eigen::VectorXd z(theta.size() + 1);
  z.head(theta.size()) = theta;
  z[theta.size()] = t / cfg_.time_scale;
  return z;
}

double KernelModel::density_scale() const {
  return cfg_.density_time_scale > 0.0 ? cfg_.density_time_scale : cfg_.time_scale;
}

double KernelModel::density_ridge() const {
  return cfg_.density_ridge > 0.0 ? cfg_.density_ridge : ridge();
}

Eigen::VectorXd KernelModel::kvec(const Eigen::VectorXd& z) const {
  Eigen::VectorXd k(z_.rows());
  for (Eigen::Index i = 0; i < z_.rows(); ++i) {
    k[i] = cfg_.kernel.at_distance((z_.row(i).transpose() - z).norm());
  }
  return k;
}

Eigen::VectorXd KernelModel::kvec_theta(const Eigen::VectorXd& theta) const {
  Eigen::VectorXd k(zt_.rows());
  for (Eigen::Index i = 0; i < zt_.rows(); ++i) {
    k[i] = cfg_.kernel.at_distance((zt_.row(i).transpose() - theta).norm());
  }
  return k;
}

Eigen::VectorXd KernelModel::kvec_density(const Eigen::VectorXd& z) const {
  Eigen::VectorXd k(zd_.rows());
  for (Eigen::Index i = 0; i < zd_.rows(); ++i) {
    k[i] = cfg_.kernel.at_distance((zd_.row(i).transpose() - z).norm());
  }
  return k;
}

void KernelModel::fit(const std::vector<ObservationRecord>& obs) {
  obs_ = obs;
  sigma_log_.clear();
  ridge_log_.clear();
  jittered_ = false;
  rebuild();
}

void KernelModel::add_point(const ObservationRecord& obs) {
  sigma_log_.push_back(predictive_std(obs.point.theta, obs.point.t));
  ridge_log_.push_back(ridge());
  extend_factor(obs);
}

void KernelModel::rebuild() {
  const int n = int(obs_.size());
  if (n == 0) {
    z_.resize(0, 0);
    zt_.resize(0, 0);
    zd_.resize(0, 0);
    s_t_.resize(0);
    r_t_.resize(0);
    lfac_.resize(0, 0);
    lfacr_.resize(0, 0);
    lfacd_.resize(0, 0);
    ws_.resize(0);
    wr_.resize(0);
    return;
  }
  const int m = int(obs_[0].point.theta.size());
  z_.resize(n, m + 1);
  zt_.resize(n, m);
  zd_.resize(n, m + 1);
  s_t_.resize(n);
  r_t_.resize(n);
  for (int i = 0; i < n; ++i) {
    z_.row(i) = embed(obs_[i].point.theta, obs_[i].point.t).transpose();
    zt_.row(i) = obs_[i].point.theta.transpose();
    zd_.row(i) = z_.row(i);
    zd_(i, m) = obs_[i].point.t / density_scale();
    s_t_[i] = obs_[i].s_hat;
    r_t_[i] = obs_[i].r_hat;
  }

  auto factor = [&](const Eigen::MatrixXd& pts, Eigen::MatrixXd* lfac,
                    double base_shift) -> bool {
    Eigen::MatrixXd gram(n, n);
    for (int i = 0; i < n; ++i) {
      gram(i, i) = cfg_.kernel.kappa0;
      for (int j = 0; j < i; ++j) {
        const double k = cfg_.kernel.at_distance((pts.row(i) - pts.row(j)).norm());
        gram(i, j) = k;
        gram(j, i) = k;
      }
    }
    double shift = base_shift;
    if (jittered_) shift += kJitterScale * cfg_.kernel.kappa0 * n;
    gram.diagonal().array() += shift;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) return false;
    *lfac = llt.matrixL();
    return true;
  };

  auto all = [&]() {
    return factor(z_, &lfac_, ridge()) && factor(zt_, &lfacr_, ridge()) &&
           factor(zd_, &lfacd_, density_ridge());
  };
  if (!all()) {
    if (jittered_) throw std::runtime_error("kernel model: Gram factorization failed");
    jittered_ = true;
    if (!all()) {
      throw std::runtime_error("kernel model: Gram factorization failed");
    }
  }
  refresh_weights();
}

void KernelModel::extend_factor(const ObservationRecord& obs) {
  if (obs_.empty()) {
    obs_.push_back(obs);
    rebuild();
    return;
  }
  const int n = int(obs_.size());
  double diag = cfg_.kernel.kappa0 + ridge();
  double diag_d = cfg_.kernel.kappa0 + density_ridge();
  if (jittered_) {
    diag += kJitterScale * cfg_.kernel.kappa0 * (n + 1);
    diag_d += kJitterScale * cfg_.kernel.kappa0 * (n + 1);
  }

  const Eigen::VectorXd z = embed(obs.point.theta, obs.point.t);
  Eigen::VectorXd zd = z;
  zd[zd.size() - 1] = obs.point.t / density_scale();
  const Eigen::VectorXd b = kvec(z);
  const Eigen::VectorXd bt = kvec_theta(obs.point.theta);
  const Eigen::VectorXd bd = kvec_density(zd);
  const Eigen::VectorXd l =
      lfac_.triangularView<Eigen::Lower>().solve(b);
  const Eigen::VectorXd lt =
      lfacr_.triangularView<Eigen::Lower>().solve(bt);
  const Eigen::VectorXd ld =
      lfacd_.triangularView<Eigen::Lower>().solve(bd);
  const double rem = diag - l.squaredNorm();
  const double remt = diag - lt.squaredNorm();
  const double remd = diag_d - ld.squaredNorm();
  if (rem <= 0.0 || remt <= 0.0 || remd <= 0.0) {
    // Duplicate input at negligible ridge; refactor with jitter.
    jittered_ = true;
    obs_.push_back(obs);
    rebuild();
    return;
  }

  obs_.push_back(obs);
  const int m = int(obs.point.theta.size());
  z_.conservativeResize(n + 1, m + 1);
  z_.row(n) = z.transpose();
  zt_.conservativeResize(n + 1, m);
  zt_.row(n) = obs.point.theta.transpose();
  zd_.conservativeResize(n + 1, m + 1);
  zd_.row(n) = zd.transpose();
  s_t_.conservativeResize(n + 1);
  s_t_[n] = obs.s_hat;
  r_t_.conservativeResize(n + 1);
  r_t_[n] = obs.r_hat;

  lfac_.conservativeResize(n + 1, n + 1);
  lfac_.row(n).head(n) = l.transpose();
  lfac_.col(n).head(n).setZero();
  lfac_(n, n) = std::sqrt(rem);
  lfacr_.conservativeResize(n + 1, n + 1);
  lfacr_.row(n).head(n) = lt.transpose();
  lfacr_.col(n).head(n).setZero();
  lfacr_(n, n) = std::sqrt(remt);
  lfacd_.conservativeResize(n + 1, n + 1);
  lfacd_.row(n).head(n) = ld.transpose();
  lfacd_.col(n).head(n).setZero();
  lfacd_(n, n) = std::sqrt(remd);
  refresh_weights();
}

void KernelModel::refresh_weights() {
  ws_ = lfac_.triangularView<Eigen::Lower>().solve(s_t_);
  lfac_.triangularView<Eigen::Lower>().transpose().solveInPlace(ws_);
  wr_ = lfacr_.triangularView<Eigen::Lower>().solve(r_t_);
  lfacr_.triangularView<Eigen::Lower>().transpose().solveInPlace(wr_);
}

double KernelModel::predict_safety(const Eigen::VectorXd& theta, double t) const {
  if (obs_.empty()) return 0.0;
  return kvec(embed(theta, t)).dot(ws_);
}

double KernelModel::predict_reset(const Eigen::VectorXd& theta) const {
  if (obs_.empty()) return 0.0;
  return kvec_theta(theta).dot(wr_);
}

double KernelModel::predictive_std(const Eigen::VectorXd& theta, double t) const {
  if (obs_.empty()) return std::sqrt(cfg_.kernel.kappa0);
  const Eigen::VectorXd k = kvec(embed(theta, t));
  const Eigen::VectorXd l = lfac_.triangularView<Eigen::Lower>().solve(k);
  const double var = cfg_.kernel.kappa0 - l.squaredNorm();
  if (var < kVarianceFloor) {
    throw std::runtime_error("kernel model: negative predictive variance");
  }
  return std::sqrt(std::max(var, 0.0));
}

double KernelModel::reset_std(const Eigen::VectorXd& theta) const {
  if (obs_.empty()) return std::sqrt(cfg_.kernel.kappa0);
  const Eigen::VectorXd k = kvec_theta(theta);
  const Eigen::VectorXd l = lfacr_.triangularView<Eigen::Lower>().solve(k);
  const double var = cfg_.kernel.kappa0 - l.squaredNorm();
  if (var < kVarianceFloor) {
    throw std::runtime_error("kernel model: negative predictive variance");
  }
  return std::sqrt(std::max(var, 0.0));
}

void KernelModel::predict_batch(const Eigen::MatrixXd& zq, Eigen::VectorXd* s_mean,
                                Eigen::VectorXd* stds) const {
  const Eigen::Index q = zq.cols();
  if (obs_.empty()) {
    if (s_mean) *s_mean = Eigen::VectorXd::Zero(q);
    if (stds) *stds = Eigen::VectorXd::Constant(q, std::sqrt(cfg_.kernel.kappa0));
    return;
  }
  Eigen::MatrixXd kq(z_.rows(), q);
  for (Eigen::Index j = 0; j < q; ++j) {
    kq.col(j) = kvec(zq.col(j));
  }
  if (s_mean) *s_mean = kq.transpose() * ws_;
  if (stds) {
    lfac_.triangularView<Eigen::Lower>().solveInPlace(kq);
    stds->resize(q);
    for (Eigen::Index j = 0; j < q; ++j) {
      const double var = cfg_.kernel.kappa0 - kq.col(j).squaredNorm();
      if (var < kVarianceFloor) {
        throw std::runtime_error("kernel model: negative predictive variance");
      }
      (*stds)[j] = std::sqrt(std::max(var, 0.0));
    }
  }
}

double KernelModel::predict_density(const Eigen::VectorXd& theta, double t,
                                    const Eigen::VectorXd& x) const {
  Eigen::MatrixXd xs(1, x.size());
  xs.row(0) = x.transpose();
  return predict_density_grid(theta, t, xs)[0];
}

Eigen::VectorXd KernelModel::predict_density_grid(const Eigen::VectorXd& theta, double t,
                                                  const Eigen::MatrixXd& xs) const {
  if (obs_.empty()) return Eigen::VectorXd::Zero(xs.rows());
  Eigen::VectorXd zd = embed(theta, t);
  zd[zd.size() - 1] = t / density_scale();
  Eigen::VectorXd alpha = lfacd_.triangularView<Eigen::Lower>().solve(kvec_density(zd));
  lfacd_.triangularView<Eigen::Lower>().transpose().solveInPlace(alpha);

  // Drop negligible mixture terms; each surviving one costs a KDE sweep.
  const double cutoff = 1e-12 * alpha.cwiseAbs().maxCoeff();
  std::vector<int> active;
  for (int i = 0; i < alpha.size(); ++i) {
    if (std::abs(alpha[i]) > cutoff) {
      if (!obs_[i].kde) {
        throw std::runtime_error("kernel model: record lacks a density estimate");
      }
      active.push_back(i);
    }
  }

  Eigen::VectorXd out = Eigen::VectorXd::Zero(xs.rows());
  parallel_blocks(xs.rows(), [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t r = lo; r < hi; ++r) {
      const Eigen::VectorXd x = xs.row(r).transpose();
      double acc = 0.0;
      for (int i : active) {
        acc += alpha[i] * kde_density(*obs_[i].kde, x);
      }
      out[r] = acc;
    }
  });
  return out;
}

double KernelModel::information_gain() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < sigma_log_.size(); ++i) {
    acc += 0.5 * std::log1p(sigma_log_[i] * sigma_log_[i] / ridge_log_[i]);
  }
  return acc;
}

KernelModel KernelModel::from_parts(ModelConfig cfg, std::vector<ObservationRecord> obs,
                                    std::vector<double> sigma_log,
                                    std::vector<double> ridge_log) {
  KernelModel model(cfg);
  model.obs_ = std::move(obs);
  model.sigma_log_ = std::move(sigma_log);
  model.ridge_log_ = std::move(ridge_log);
  model.rebuild();
  return model;
}

ConfidenceParams confidence_params(const KernelModel& model, const ConfidenceConfig& cfg) {
  ConfidenceParams out;
  if (cfg.mode == ConfidenceConfig::Mode::Heuristic) {
    out.beta_s = cfg.beta;
    out.beta_r = cfg.beta;
    return out;
  }
  const double n = double(model.n());
  const double ridge = n > 0 ? model.ridge() : 1.0;
  out.beta_s = std::sqrt(n) * cfg.err_proxy_s / ridge + cfg.norm_bound_s;
  out.beta_r = std::sqrt(n) * cfg.err_proxy_r / ridge + cfg.norm_bound_r;
  return out;
}

}  // namespace safesde
