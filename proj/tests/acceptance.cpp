// Acceptance runner: each criterion prints exactly one line,
//   criterion <n>: PASS|FAIL (detail)
// and the process exits nonzero if any requested criterion fails. Criteria
// are selected by number on the command line; no arguments runs all nine.
// Campaign products are cached in-process so criteria sharing a run (5 and
// 9, 6 and 8) pay for it once.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "safesde/checkpoint.hpp"
#include "safesde/config.hpp"
#include "safesde/explorer.hpp"
#include "safesde/kde.hpp"
#include "safesde/kernel_model.hpp"
#include "safesde/oracles.hpp"
#include "safesde/rng.hpp"
#include "safesde/system.hpp"

using namespace safesde;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double now_s() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

// ---- shared campaign cache ----------------------------------------------

CampaignConfig benchmark_config(const std::string& variant) {
  const std::filesystem::path repo = SAFESDE_REPO_DIR;
  CampaignConfig cfg =
      parse_config_file((repo / "configs" / ("benchmark_" + variant + ".cfg")).string());
  cfg.seed = 1;
  return cfg;
}

const CampaignReport& campaign(const std::string& variant) {
  static std::map<std::string, CampaignReport> cache;
  auto it = cache.find(variant);
  if (it == cache.end()) {
    it = cache.emplace(variant, explore(benchmark_config(variant))).first;
  }
  return it->second;
}

// ---- criterion 1: solves match the dense reference and the primal form ---

Outcome crit1() {
  Rng rng(2024);
  double worst_mean = 0.0, worst_var = 0.0, worst_reset = 0.0, worst_primal = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const int m = 1 + int(rng.next_u64() % 3);  // embedded dim m+1 <= 4
    const int n = 1 + int(rng.next_u64() % 20);
    ModelConfig mc;
    mc.kernel.nu = std::vector<double>{1.5, 2.5, 3.5}[rng.next_u64() % 3];
    mc.kernel.gamma = 0.5 + 1.5 * rng.uniform();
    mc.kernel.kappa0 = 0.5 + 1.5 * rng.uniform();
    mc.policy = inst % 2 == 0 ? RidgePolicy::InverseN : RidgePolicy::FixedRidge;
    mc.fixed_ridge = std::pow(10.0, -3.0 + 2.0 * rng.uniform());
    mc.time_scale = 1.0 + 4.0 * rng.uniform();

    std::vector<ObservationRecord> obs(n);
    for (int i = 0; i < n; ++i) {
      obs[i].point.theta.resize(m);
      for (int j = 0; j < m; ++j) obs[i].point.theta[j] = 2.0 * rng.uniform() - 1.0;
      obs[i].point.t = 5.0 * rng.uniform();
      obs[i].s_hat = rng.uniform();
      obs[i].r_hat = rng.uniform();
    }
    KernelModel model(mc);
    model.fit(obs);

    Eigen::VectorXd th(m);
    for (int j = 0; j < m; ++j) th[j] = 2.0 * rng.uniform() - 1.0;
    const double t = 5.0 * rng.uniform();
    const Eigen::VectorXd zq = model.embed(th, t);

    Eigen::MatrixXd gram(n, n), gram_th(n, n);
    Eigen::VectorXd s(n), r(n), kv(n), kv_th(n);
    for (int i = 0; i < n; ++i) {
      s[i] = obs[i].s_hat;
      r[i] = obs[i].r_hat;
      const Eigen::VectorXd zi = model.embed(obs[i].point.theta, obs[i].point.t);
      kv[i] = mc.kernel(zi, zq);
      kv_th[i] = mc.kernel.at_distance((obs[i].point.theta - th).norm());
      for (int j = 0; j < n; ++j) {
        gram(i, j) = mc.kernel(zi, model.embed(obs[j].point.theta, obs[j].point.t));
        gram_th(i, j) =
            mc.kernel.at_distance((obs[i].point.theta - obs[j].point.theta).norm());
      }
    }
    const double kzz = mc.kernel.kappa0;
    const ReferenceSolve ref = dense_reference_solve(gram, model.ridge(), s, kv, kzz);
    const ReferenceSolve ref_r =
        dense_reference_solve(gram_th, model.ridge(), r, kv_th, kzz);

    const double mean = model.predict_safety(th, t);
    const double sd = model.predictive_std(th, t);
    worst_mean = std::max(worst_mean, std::fabs(mean - ref.mean));
    worst_var = std::max(worst_var, std::fabs(sd * sd - ref.variance));
    worst_reset = std::max(worst_reset, std::fabs(model.predict_reset(th) - ref_r.mean));
    const double rsd = model.reset_std(th);
    worst_reset = std::max(worst_reset, std::fabs(rsd * rsd - ref_r.variance));

    // primal form: exact span features from the Cholesky factor of the
    // bordered Gram, sample covariance C, then lambda |C_lambda^{-1/2} phi|^2
    Eigen::MatrixXd big(n + 1, n + 1);
    big.topLeftCorner(n, n) = gram;
    big.topRightCorner(n, 1) = kv;
    big.bottomLeftCorner(1, n) = kv.transpose();
    big(n, n) = kzz;
    Eigen::LLT<Eigen::MatrixXd> llt;
    for (double jitter = 0.0;; jitter = std::max(1e-12, jitter * 10)) {
      Eigen::MatrixXd shifted = big;
      shifted.diagonal().array() += jitter * mc.kernel.kappa0;
      llt.compute(shifted);
      if (llt.info() == Eigen::Success) break;
      if (jitter > 1e-8) return {false, "primal feature factorization failed"};
    }
    const Eigen::MatrixXd lfac = llt.matrixL();
    const Eigen::MatrixXd phi = lfac.topRows(n);        // data features, rows
    const Eigen::VectorXd phi_z = lfac.row(n).transpose();
    const double lambda = model.ridge() / n;
    Eigen::MatrixXd cov = phi.transpose() * phi / double(n);
    cov.diagonal().array() += lambda;
    const double primal = lambda * phi_z.dot(cov.llt().solve(phi_z));
    worst_primal = std::max(worst_primal, std::fabs(primal - ref.variance));
  }
  const bool ok =
      worst_mean <= 1e-10 && worst_var <= 1e-10 && worst_reset <= 1e-10 && worst_primal <= 1e-8;
  return {ok, "50 instances, dense diff mean " + fmt(worst_mean) + " var " + fmt(worst_var) +
                  " reset " + fmt(worst_reset) + " (tol 1e-10), primal diff " +
                  fmt(worst_primal) + " (tol 1e-8)"};
}

// ---- criterion 2: variance monotone under the 1/N schedule ---------------

Outcome crit2() {
  ModelConfig mc;
  mc.policy = RidgePolicy::InverseN;
  mc.time_scale = 5.0;
  KernelModel model(mc);
  Rng rng(515);

  const int n_query = 100;
  Eigen::MatrixXd zq(3, n_query);
  for (int j = 0; j < n_query; ++j) {
    Eigen::VectorXd th(2);
    th << 2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0;
    zq.col(j) = model.embed(th, 5.0 * rng.uniform());
  }
  Eigen::VectorXd prev = Eigen::VectorXd::Constant(n_query, 1.0);
  double worst = -1.0;
  for (int step = 0; step < 50; ++step) {
    ObservationRecord o;
    o.point.theta.resize(2);
    o.point.theta << 2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0;
    o.point.t = 5.0 * rng.uniform();
    o.s_hat = rng.uniform();
    o.r_hat = rng.uniform();
    model.add_point(o);
    Eigen::VectorXd sd;
    model.predict_batch(zq, nullptr, &sd);
    worst = std::max(worst, (sd - prev).maxCoeff());
    prev = sd;
  }
  return {worst <= 1e-10,
          "50 updates x 100 queries, max increase " + fmt(worst) + " (tol 1e-10)"};
}

// ---- criterion 3: confidence coverage with the theoretical width ---------

Outcome crit3() {
  ModelConfig mc;
  mc.policy = RidgePolicy::InverseN;  // ridge = 1
  mc.time_scale = 1.0;
  KernelModel model(mc);

  // target in the unit-norm ball of the model's own space: a scaled kernel
  // translate, |s|_H = 0.8
  const double c = 0.8, center = 0.3;
  auto s_true = [&](double x) { return c * mc.kernel.at_distance(std::fabs(x - center)); };

  const int n = 64;
  const double noise = 1.0 / std::sqrt(double(n));
  Rng rng(99);
  std::vector<ObservationRecord> obs(n);
  for (int i = 0; i < n; ++i) {
    const double x = -2.0 + 4.0 * rng.uniform();
    obs[i].point.theta = Eigen::VectorXd::Constant(1, x);
    obs[i].point.t = 1.0;
    obs[i].s_hat = s_true(x) + noise * (2.0 * rng.uniform() - 1.0);
    obs[i].r_hat = obs[i].s_hat;
  }
  model.fit(obs);

  ConfidenceConfig cc;
  cc.mode = ConfidenceConfig::Mode::Theoretical;
  cc.norm_bound_s = c;
  cc.err_proxy_s = noise;
  const ConfidenceParams conf = confidence_params(model, cc);
  // sqrt(N) err / ridge + norm = 1 + 0.8
  if (std::fabs(conf.beta_s - 1.8) > 1e-12)
    return {false, "beta_s " + fmt(conf.beta_s) + ", expected 1.8"};

  int covered = 0;
  const int grid = 200;
  for (int g = 0; g < grid; ++g) {
    const double x = -2.0 + 4.0 * g / (grid - 1);
    Eigen::VectorXd th = Eigen::VectorXd::Constant(1, x);
    const double mean = model.predict_safety(th, 1.0);
    const double sd = model.predictive_std(th, 1.0);
    if (std::fabs(mean - s_true(x)) <= conf.beta_s * sd + 1e-12) ++covered;
  }
  return {covered >= 198, "beta 1.8, coverage " + std::to_string(covered) +
                              "/200 (needs >= 198)"};
}

// ---- criterion 4: density estimator sup-norm rate ------------------------

Outcome crit4() {
  const double x0 = 2.0, rate = 1.0, diff = 1.0, t = 1.0;
  const double m = ou_mean(t, x0, rate);
  const double sd = std::sqrt(ou_variance(t, rate, diff));
  const std::vector<int> qs = {100, 1000, 10000};
  std::vector<double> avg(qs.size(), 0.0);

  for (int seed = 0; seed < 10; ++seed) {
    for (size_t qi = 0; qi < qs.size(); ++qi) {
      const int q = qs[qi];
      Rng rng(child_seed(4040, std::uint64_t(seed * 16 + int(qi))));
      KdeEstimate est;
      est.samples.resize(q, 1);
      for (int i = 0; i < q; ++i) est.samples(i, 0) = m + sd * rng.normal();
      est.bandwidth = bandwidth_rule(q, 1, 2.0);
      double sup = 0.0;
      for (int g = 0; g <= 80; ++g) {
        const double x = m - 4 * sd + 8 * sd * g / 80.0;
        Eigen::VectorXd v = Eigen::VectorXd::Constant(1, x);
        sup = std::max(sup, std::fabs(kde_density(est, v) - ou_density(x, t, x0, rate, diff)));
      }
      avg[qi] += sup / 10.0;
    }
  }

  const bool decreasing = avg[0] > avg[1] && avg[1] > avg[2];
  // least squares slope of log err against log q; target -3/10 +- 50%
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < qs.size(); ++i) {
    const double x = std::log10(double(qs[i])), y = std::log10(avg[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = double(qs.size());
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  const bool in_band = slope >= -0.45 && slope <= -0.15;
  return {decreasing && in_band,
          "avg sup errors " + fmt(avg[0]) + " > " + fmt(avg[1]) + " > " + fmt(avg[2]) +
              ", slope " + fmt(slope) + " in [-0.45, -0.15]"};
}

// ---- criterion 5: strict-threshold run is safe ---------------------------

Outcome crit5() {
  const CampaignReport& report = campaign("eps01");
  const CampaignConfig& cfg = report.config;

  // (a) every selection was feasible when it was made, straight from the
  // logged bounds; seed controls are feasible by assumption
  int logged_ok = 0;
  for (const auto& row : report.rows) {
    bool seeded = false;
    for (const auto& g : cfg.gamma0) seeded = seeded || (row.point.theta - g).norm() < 1e-9;
    const bool ok = seeded || (row.lcb_s >= 1.0 - cfg.eps - 1e-9 &&
                               row.lcb_r >= 1.0 - cfg.xi - 1e-9);
    logged_ok += ok;
  }
  const int rows = int(report.rows.size());
  if (logged_ok != rows)
    return {false, "feasible-at-selection " + std::to_string(logged_ok) + "/" +
                       std::to_string(rows)};

  // (b) brute force oracle on every distinct selected control
  std::map<std::pair<double, double>, int> uses;
  std::vector<std::pair<double, double>> order;
  for (const auto& row : report.rows) {
    const auto key = std::make_pair(row.point.theta[0], row.point.theta[1]);
    if (uses.emplace(key, 0).second) order.push_back(key);
    ++uses[key];
  }
  Eigen::MatrixXd thetas(int(order.size()), 2);
  for (int i = 0; i < int(order.size()); ++i) {
    thetas(i, 0) = order[i].first;
    thetas(i, 1) = order[i].second;
  }
  const double dt = cfg.system.t_max / cfg.n_steps;
  std::vector<int> eval_steps;
  for (int j = 0; j < report.grid.n_t(); ++j)
    eval_steps.push_back(int(std::lround(report.grid.times[j] / dt)));

  const SystemSpec spec = cfg.make_system();
  const RegionSpec regions = cfg.make_regions();
  const LawFactory laws = [&](const Eigen::VectorXd& th) {
    return make_control_law(cfg.make_control(th));
  };
  const OracleMap om = mc_truth_map(spec, regions, laws, thetas, cfg.system.t_max,
                                    10000, cfg.n_steps, 777, eval_steps);

  int violations = 0;
  double worst = 1.0;
  for (int i = 0; i < int(order.size()); ++i) {
    worst = std::min(worst, om.s_inf[i]);
    if (om.s_inf[i] < 1.0 - cfg.eps - 0.05) violations += uses[order[i]];
  }
  const int budget = int(std::floor(0.05 * rows));
  return {violations <= budget,
          "all " + std::to_string(rows) + " selections feasible at selection; oracle (1e4 "
          "paths) s_inf >= 0.85 violated by " +
              std::to_string(violations) + "/" + std::to_string(rows) + " (budget " +
              std::to_string(budget) + ", worst s_inf " + fmt(worst) + ")"};
}

// ---- criterion 6: error ladder across thresholds -------------------------

double eval_mse(const CampaignReport& report) {
  const CampaignConfig& cfg = report.config;
  const CandidateGrid grid = make_candidate_grid(cfg);
  const SystemSpec system = cfg.make_system();
  const RegionSpec regions = cfg.make_regions();

  Rng pick(child_seed(cfg.seed, 0xe7a1));
  const int controls = cfg.eval_controls, paths = cfg.eval_paths;
  std::vector<int> ids(controls);
  for (int i = 0; i < controls; ++i)
    ids[i] = int(pick.next_u64() % std::uint64_t(grid.count()));

  double se = 0.0;
  for (int i = 0; i < controls; ++i) {
    const ControlPoint p = grid.point(ids[i]);
    const double s_hat = std::clamp(report.model.predict_safety(p.theta, p.t), 0.0, 1.0);
    const ControlLaw law = make_control_law(cfg.make_control(p.theta));
    const PointTruth truth =
        mc_truth_at(system, regions, law, p.t, p.horizon, paths, cfg.n_steps,
                    child_seed(cfg.seed, 0x10000ull + std::uint64_t(i)));
    se += (s_hat - truth.s) * (s_hat - truth.s);
  }
  return se / controls;
}

Outcome crit6() {
  const char* variants[] = {"eps01", "eps03", "eps05", "epsinf"};
  std::vector<double> mse;
  std::string detail = "mse";
  for (const char* v : variants) {
    mse.push_back(eval_mse(campaign(v)));
    detail += " " + fmt(mse.back());
  }
  bool ordered = true;
  for (size_t i = 1; i < mse.size(); ++i) ordered = ordered && mse[i] < mse[i - 1];
  const bool tail_ok = mse.back() <= 0.05;
  return {ordered && tail_ok,
          detail + " strictly decreasing, unconstrained <= 0.05 (1000 controls x 100 paths)"};
}

// ---- criterion 7: stopping rule ------------------------------------------

Outcome crit7() {
  // a threshold at the prior scale stops before anything is simulated
  CampaignConfig coarse = default_config();
  coarse.q = 20;
  coarse.n_steps = 30;
  coarse.theta_resolution = 4;
  coarse.time_nodes = 3;
  coarse.eps = INFINITY;
  coarse.xi = INFINITY;
  coarse.eta = 1.0;  // sqrt(kappa0)
  coarse.max_iterations = 50;
  coarse.seed = 12;
  CampaignReport at_prior = explore(coarse);
  if (!at_prior.rows.empty() || at_prior.stop_reason != "uncertainty_threshold")
    return {false, "eta = sqrt(kappa0): " + std::to_string(at_prior.rows.size()) +
                       " iterations, stop " + at_prior.stop_reason};

  // a reachable threshold stops on its own, and an exhaustive rescan of the
  // candidate grid confirms the claim the stop makes
  CampaignConfig fine = coarse;
  fine.theta_resolution = 5;
  fine.ridge_policy = "fixed";
  fine.ridge_value = 1e-3;
  fine.eta = 0.3;
  fine.max_iterations = 1000;
  CampaignReport run = explore(fine);
  if (run.stop_reason != "uncertainty_threshold")
    return {false, "eta 0.3 run stopped by " + run.stop_reason + " after " +
                       std::to_string(run.rows.size()) + " iterations"};

  const CandidateGrid& grid = run.grid;
  double max_sigma = 0.0;
  for (int row = 0; row < grid.n_theta(); ++row) {
    Eigen::MatrixXd zq(grid.thetas.cols() + 1, grid.n_t());
    for (int j = 0; j < grid.n_t(); ++j)
      zq.col(j) = run.model.embed(grid.thetas.row(row).transpose(), grid.times[j]);
    Eigen::VectorXd sd;
    run.model.predict_batch(zq, nullptr, &sd);
    max_sigma = std::max(max_sigma, sd.maxCoeff());
  }
  return {max_sigma < fine.eta,
          "prior-scale eta halts at iteration 0; eta 0.3 stop after " +
              std::to_string(run.rows.size()) + " iterations, grid rescan max sigma " +
              fmt(max_sigma) + " < 0.3"};
}

// ---- criterion 8: information gain diagnostics ---------------------------

Outcome crit8() {
  const char* variants[] = {"eps01", "eps03", "eps05", "epsinf"};
  double worst_drop = 0.0;
  std::map<std::string, double> final_gain;
  size_t matched_n = SIZE_MAX;
  for (const char* v : variants) {
    const CampaignReport& report = campaign(v);
    double prev = 0.0;
    for (const auto& row : report.rows) {
      worst_drop = std::min(worst_drop, row.gain_total - prev);
      prev = row.gain_total;
    }
    final_gain[v] = prev;
    matched_n = std::min(matched_n, report.rows.size());
  }
  const bool monotone = worst_drop >= -1e-12;
  // all four runs share seed and iteration count, so the endpoints compare
  // at matched N
  const bool matched = matched_n == campaign("eps01").rows.size();
  const bool free_leads = final_gain["epsinf"] >= final_gain["eps01"];
  return {monotone && matched && free_leads,
          "gain non-decreasing (worst step " + fmt(worst_drop) + "); at N=" +
              std::to_string(matched_n) + " unconstrained " + fmt(final_gain["epsinf"]) +
              " >= strict " + fmt(final_gain["eps01"])};
}

// ---- criterion 9: predicted density covers the true dynamics -------------

Outcome crit9() {
  const CampaignReport& report = campaign("eps01");
  const CampaignConfig& cfg = report.config;
  const CandidateGrid& grid = report.grid;
  const KernelModel& model = report.model;

  const ConfidenceParams conf = confidence_params(model, cfg.make_confidence_config());
  const CertifiedSet cert =
      certify_set(model, grid, Thresholds{cfg.eps, cfg.xi}, conf);
  if (cert.ids.empty()) return {false, "no certified controls"};

  // rank certified thetas by their worst-node uncertainty and keep the
  // three best-resolved distinct ones that carry observations
  std::map<int, char> cert_rows;
  for (int id : cert.ids) cert_rows[grid.theta_of(id)] = 1;
  std::vector<std::pair<double, int>> ranked;
  for (const auto& [row, flag] : cert_rows) {
    (void)flag;
    Eigen::MatrixXd zq(grid.thetas.cols() + 1, grid.n_t());
    for (int j = 0; j < grid.n_t(); ++j)
      zq.col(j) = model.embed(grid.thetas.row(row).transpose(), grid.times[j]);
    Eigen::VectorXd sd;
    model.predict_batch(zq, nullptr, &sd);
    ranked.push_back({sd.maxCoeff(), row});
  }
  std::sort(ranked.begin(), ranked.end());

  const auto& data = model.data();
  std::vector<int> picks;
  for (const auto& [sig, row] : ranked) {
    (void)sig;
    const Eigen::VectorXd theta = grid.thetas.row(row).transpose();
    bool dup = false;
    for (int p : picks)
      dup = dup || (grid.thetas.row(p) - grid.thetas.row(row)).norm() < 1e-9;
    bool observed = false;
    for (const auto& o : data)
      observed = observed || (o.point.theta - theta).norm() < 1e-9;
    if (!dup && observed) picks.push_back(row);
    if (picks.size() == 3) break;
  }
  if (picks.size() != 3)
    return {false, "only " + std::to_string(picks.size()) + " observed certified controls"};

  const SystemSpec spec = cfg.make_system();
  const int res = 41;
  const double half = cfg.system.bound;
  const double step = 2.0 * half / (res - 1);
  Eigen::MatrixXd xs(res * res, 2);
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j) {
      xs(i * res + j, 0) = -half + step * i;
      xs(i * res + j, 1) = -half + step * j;
    }

  int min_hits = 100;
  int checked = 0;
  for (int row : picks) {
    const Eigen::VectorXd theta = grid.thetas.row(row).transpose();
    std::vector<double> times;
    for (const auto& o : data)
      if ((o.point.theta - theta).norm() < 1e-9) times.push_back(o.point.t);
    std::sort(times.begin(), times.end());
    while (times.size() > 3) times.erase(times.begin() + 1);  // keep ends + one mid
    const ControlLaw law = make_control_law(cfg.make_control(theta));
    for (double t : times) {
      const int idx = int(std::lround(t / (cfg.system.t_max / cfg.n_steps)));
      std::vector<Eigen::Vector2d> truth;
      for (int p = 0; p < 100; ++p) {
        Rng rng(child_seed(424242, std::uint64_t(p)));
        run_path(spec, law, cfg.system.t_max, cfg.n_steps, rng,
                 [&](int s, double, const Eigen::VectorXd& x) {
                   if (s == idx) truth.push_back(x.head(2));
                 });
      }
      // negative lobes are clipped before ranking; the top half of the
      // clipped mass is the predicted region
      Eigen::VectorXd dens = model.predict_density_grid(theta, t, xs).cwiseMax(0.0);
      std::vector<int> order(res * res);
      for (int i = 0; i < res * res; ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return dens(a) > dens(b); });
      std::vector<char> inside(res * res, 0);
      for (int i = 0; i < res * res / 2; ++i)
        if (dens(order[i]) > 0.0) inside[order[i]] = 1;
      int hits = 0;
      for (const auto& x : truth) {
        const int i = int(std::lround((x(0) + half) / step));
        const int j = int(std::lround((x(1) + half) / step));
        if (i >= 0 && i < res && j >= 0 && j < res && inside[i * res + j]) ++hits;
      }
      min_hits = std::min(min_hits, hits);
      ++checked;
    }
  }
  return {min_hits >= 60, "3 controls, " + std::to_string(checked) +
                              " checked times, min coverage " + std::to_string(min_hits) +
                              "/100 (needs >= 60)"};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  if (wanted.empty()) wanted = {1, 2, 3, 4, 5, 6, 7, 8, 9};

  Outcome (*const table[])() = {crit1, crit2, crit3, crit4, crit5,
                                crit6, crit7, crit8, crit9};
  bool all_pass = true;
  for (int n : wanted) {
    if (n < 1 || n > 9) {
      std::printf("criterion %d: FAIL (no such criterion)\n", n);
      all_pass = false;
      continue;
    }
    const double t0 = now_s();
    Outcome out;
    try {
      out = table[n - 1]();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d: %s (%s) [%.1fs]\n", n, out.pass ? "PASS" : "FAIL",
                out.detail.c_str(), now_s() - t0);
    std::fflush(stdout);
    all_pass = all_pass && out.pass;
  }
  return all_pass ? 0 : 1;
}
