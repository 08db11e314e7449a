#pragma once

#include <Eigen/Dense>
#include <vector>

#include "safesde/kde.hpp"
#include "safesde/matern.hpp"
#include "safesde/types.hpp"

namespace safesde {

// Ridge schedule for K + N lambda I. InverseN keeps lambda = 1/N so the
// shift is the identity; FixedRidge keeps N lambda pinned at fixed_ridge.
// Either way the shift is constant in N, which is what makes the
// incremental Cholesky extension exact and the predictive variance
// monotone under added data.
enum class RidgePolicy { InverseN, FixedRidge };

struct ModelConfig {
  MaternKernel kernel;
  RidgePolicy policy = RidgePolicy::InverseN;
  double fixed_ridge = 1e-3;  // N * lambda when policy == FixedRidge
  double time_scale = 1.0;    // t is divided by this inside the kernel metric
  // Time scale for the density map only; 0 shares time_scale. The state
  // distribution decorrelates much faster than the safety map varies, so
  // the density head usually wants a shorter scale.
  double density_time_scale = 0.0;
  // Ridge for the density map only; 0 shares the scalar maps' schedule.
  // Near-interpolation weights amplify the oscillatory KDE tails, so the
  // density head usually wants a heavier ridge.
  double density_ridge = 0.0;
};

struct ConfidenceConfig {
  enum class Mode { Heuristic, Theoretical };
  Mode mode = Mode::Heuristic;
  double beta = 2.0;  // heuristic value, shared by both maps
  // Theoretical mode: beta = sqrt(N) * err_proxy / ridge + norm_bound,
  // with err_proxy bounding max_i |target_i - truth(z_i)|.
  double norm_bound_s = 1.0;
  double norm_bound_r = 1.0;
  double err_proxy_s = 0.0;
  double err_proxy_r = 0.0;
};

struct ConfidenceParams {
  double beta_s = 2.0;
  double beta_r = 2.0;
};

// Kernel ridge regressors sharing one observation log. The safety map and
// the density map live on inputs z = (theta, t/ts); the reset map is a
// terminal-time quantity, so it regresses the same records' r targets over
// theta alone with its own Gram factorization.
class KernelModel {
 public:
  KernelModel() = default;
  explicit KernelModel(ModelConfig cfg) : cfg_(cfg) {}

  // Replaces all data with a batch; selection history (sigma log) is reset.
  void fit(const std::vector<ObservationRecord>& obs);
  // Records the prior predictive std at the new point, then refits by
  // extending both Cholesky factors. Bit-compatible with a full refit up
  // to 1e-9 in the coefficients.
  void add_point(const ObservationRecord& obs);

  int n() const { return int(obs_.size()); }
  double ridge() const;                 // N * lambda; defined for N >= 1
  double lambda() const;                // ridge / N, 0 when N == 0
  const ModelConfig& config() const { return cfg_; }
  const std::vector<ObservationRecord>& data() const { return obs_; }
  const std::vector<double>& sigma_log() const { return sigma_log_; }
  const std::vector<double>& ridge_log() const { return ridge_log_; }
  bool jittered() const { return jittered_; }

  Eigen::VectorXd embed(const Eigen::VectorXd& theta, double t) const;

  double predict_safety(const Eigen::VectorXd& theta, double t) const;
  double predictive_std(const Eigen::VectorXd& theta, double t) const;

  // Terminal reset map and its predictive std, functions of theta only.
  double predict_reset(const Eigen::VectorXd& theta) const;
  double reset_std(const Eigen::VectorXd& theta) const;

  // Batched safety queries: zq columns are embedded inputs. Either output
  // may be null.
  void predict_batch(const Eigen::MatrixXd& zq, Eigen::VectorXd* s_mean,
                     Eigen::VectorXd* stds) const;

  // Density map: mixture of the stored density estimates with ridge
  // regression weights alpha = (K + ridge I)^{-1} k(theta,t), taken over
  // the density-scale Gram. Requires all records to carry a density
  // handle. xs rows are query states.
  double predict_density(const Eigen::VectorXd& theta, double t,
                         const Eigen::VectorXd& x) const;
  Eigen::VectorXd predict_density_grid(const Eigen::VectorXd& theta, double t,
                                       const Eigen::MatrixXd& xs) const;

  // 1/2 sum_i log(1 + sigma_i^2 / ridge_i), over the add_point history.
  double information_gain() const;

  // Checkpoint support: rebuild from persisted parts.
  static KernelModel from_parts(ModelConfig cfg, std::vector<ObservationRecord> obs,
                                std::vector<double> sigma_log, std::vector<double> ridge_log);

 private:
  void rebuild();
  void extend_factor(const ObservationRecord& obs);
  void refresh_weights();
  double density_scale() const;
  double density_ridge() const;
  Eigen::VectorXd kvec(const Eigen::VectorXd& z) const;
  Eigen::VectorXd kvec_theta(const Eigen::VectorXd& theta) const;
  Eigen::VectorXd kvec_density(const Eigen::VectorXd& z) const;

  ModelConfig cfg_;
  std::vector<ObservationRecord> obs_;
  Eigen::MatrixXd z_;     // N x p embedded (theta, t/ts) inputs
  Eigen::MatrixXd zt_;    // N x m theta inputs for the reset map
  Eigen::MatrixXd zd_;    // N x p embedded (theta, t/density scale) inputs
  Eigen::VectorXd s_t_, r_t_;
  Eigen::MatrixXd lfac_;  // lower Cholesky of K + ridge I over (theta, t/ts)
  Eigen::MatrixXd lfacr_; // lower Cholesky of the theta-only Gram
  Eigen::MatrixXd lfacd_; // lower Cholesky of the density-scale Gram
  Eigen::VectorXd ws_, wr_;
  std::vector<double> sigma_log_, ridge_log_;
  bool jittered_ = false;
};

ConfidenceParams confidence_params(const KernelModel& model, const ConfidenceConfig& cfg);

}  // namespace safesde
