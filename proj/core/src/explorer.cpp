#include "safesde/explorer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "safesde/parallel.hpp"

namespace safesde {

namespace {

double now_s() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

// Per-theta-row feasibility and uncertainty, shared by select_next and
// certify_set. One batched triangular solve per row.
struct RowEval {
  bool feasible = false;
  Eigen::VectorXd s_mean, sigma;
  double lcb_s = 0.0, lcb_r = 0.0;
};

RowEval eval_row(const KernelModel& model, const CandidateGrid& grid, int row,
                 const Thresholds& th, const ConfidenceParams& conf) {
  RowEval out;
  const int nt = grid.n_t();
  const Eigen::VectorXd theta = grid.thetas.row(row).transpose();
  Eigen::MatrixXd zq(grid.thetas.cols() + 1, nt);
  for (int j = 0; j < nt; ++j) zq.col(j) = model.embed(theta, grid.times[j]);
  model.predict_batch(zq, &out.s_mean, &out.sigma);
  out.s_mean = out.s_mean.cwiseMax(0.0).cwiseMin(1.0);  // maps are probabilities

  out.lcb_s = (out.s_mean - conf.beta_s * out.sigma).minCoeff();
  out.lcb_r = std::clamp(model.predict_reset(theta), 0.0, 1.0) -
              conf.beta_r * model.reset_std(theta);
  const bool unconstrained = std::isinf(th.eps) && std::isinf(th.xi);
  const bool s_ok = std::isinf(th.eps) || out.lcb_s >= 1.0 - th.eps;
  const bool r_ok = std::isinf(th.xi) || out.lcb_r >= 1.0 - th.xi;
  out.feasible = grid.gamma0_row[row] != 0 || unconstrained || (s_ok && r_ok);
  return out;
}

}  // namespace

ControlPoint CandidateGrid::point(int id) const {
  ControlPoint p;
  p.theta = thetas.row(theta_of(id)).transpose();
  p.t = times[time_of(id)];
  p.horizon = horizon;
  return p;
}

double CandidateGrid::distance(int id_a, int id_b) const {
  const double dth =
      (thetas.row(theta_of(id_a)) - thetas.row(theta_of(id_b))).squaredNorm();
  const double dt = (times[time_of(id_a)] - times[time_of(id_b)]) / time_scale;
  return std::sqrt(dth + dt * dt);
}

double CandidateGrid::cell_diagonal() const {
  // Lattice spacing per theta dim plus one time step, in the rescaled metric.
  double acc = 0.0;
  const int m = int(thetas.cols());
  std::vector<double> lo(m, INFINITY), hi(m, -INFINITY);
  for (int i = 0; i < n_theta(); ++i)
    for (int j = 0; j < m; ++j) {
      lo[j] = std::min(lo[j], thetas(i, j));
      hi[j] = std::max(hi[j], thetas(i, j));
    }
  // spacing from the lattice resolution: smallest nonzero coordinate gap
  for (int j = 0; j < m; ++j) {
    double best = hi[j] - lo[j];
    for (int i = 1; i < n_theta(); ++i) {
      double gap = std::fabs(thetas(i, j) - thetas(0, j));
      if (gap > 1e-12 && gap < best) best = gap;
    }
    acc += best * best;
  }
  const double dt = n_t() > 1 ? (times[1] - times[0]) / time_scale : 0.0;
  return std::sqrt(acc + dt * dt);
}

double CandidateGrid::diameter() const {
  double acc = 0.0;
  for (int j = 0; j < thetas.cols(); ++j) {
    const double span = thetas.col(j).maxCoeff() - thetas.col(j).minCoeff();
    acc += span * span;
  }
  const double tspan = (times[n_t() - 1] - times[0]) / time_scale;
  return std::sqrt(acc + tspan * tspan);
}

CandidateGrid make_candidate_grid(const CampaignConfig& cfg) {
  CandidateGrid grid;
  const int m = cfg.segments;
  const int res = cfg.theta_resolution;
  int rows = 1;
  for (int j = 0; j < m; ++j) rows *= res;

  grid.thetas.resize(rows + int(cfg.gamma0.size()), m);
  std::vector<int> idx(m, 0);
  for (int r = 0; r < rows; ++r) {
    for (int j = 0; j < m; ++j)
      grid.thetas(r, j) =
          cfg.theta_min + (cfg.theta_max - cfg.theta_min) * idx[j] / (res - 1);
    for (int j = m - 1; j >= 0; --j) {
      if (++idx[j] < res) break;
      idx[j] = 0;
    }
  }
  grid.gamma0_row.assign(rows + cfg.gamma0.size(), 0);
  for (size_t g = 0; g < cfg.gamma0.size(); ++g) {
    grid.thetas.row(rows + int(g)) = cfg.gamma0[g].transpose();
    grid.gamma0_row[rows + g] = 1;
  }

  // Observation times: n_steps is subsampled to time_nodes nodes ending at
  // t_max; t = 0 carries no information and is excluded. An optional band
  // adds extra nodes where excursions concentrate. All nodes are snapped
  // to simulation steps.
  const double dt = cfg.system.t_max / cfg.n_steps;
  const int stride = cfg.n_steps / cfg.time_nodes;
  if (stride < 1) throw ConfigError("config: explore.time_nodes: exceeds n_steps");
  std::set<int> steps;
  for (int k = cfg.n_steps % cfg.time_nodes == 0 ? stride : cfg.n_steps - (cfg.time_nodes - 1) * stride;
       k <= cfg.n_steps; k += stride)
    steps.insert(k);
  for (int b = 0; b < cfg.time_band_nodes; ++b) {
    const double t = cfg.time_band_lo +
                     (cfg.time_band_hi - cfg.time_band_lo) * b /
                         std::max(1, cfg.time_band_nodes - 1);
    steps.insert(std::min(std::max(int(std::lround(t / dt)), 1), cfg.n_steps));
  }
  std::vector<double> times;
  for (int k : steps) times.push_back(k * dt);
  grid.times = Eigen::Map<Eigen::VectorXd>(times.data(), long(times.size()));
  grid.horizon = cfg.system.t_max;
  grid.time_scale = cfg.system.t_max;

  grid.scan_order.resize(grid.count());
  std::iota(grid.scan_order.begin(), grid.scan_order.end(), 0);
  if (cfg.scan_mode == "shuffled") {
    Rng rng(cfg.scan_seed);
    for (int i = grid.count() - 1; i > 0; --i) {
      int j = int(rng.next_u64() % std::uint64_t(i + 1));
      std::swap(grid.scan_order[i], grid.scan_order[j]);
    }
  }
  return grid;
}

ExplorerState::ExplorerState(CandidateGrid g) : grid(std::move(g)) {
  selected.assign(grid.count(), 0);
  excluded.assign(grid.count(), 0);
  dist_to_p.assign(grid.count(), INFINITY);
  radius = grid.cell_diagonal();
  for (int id = 0; id < grid.count(); ++id)
    if (grid.in_gamma0(id)) add_p_member(id);
}

void ExplorerState::add_p_member(int id) {
  for (int other = 0; other < grid.count(); ++other) {
    const double d = grid.distance(other, id);
    if (d < dist_to_p[other]) dist_to_p[other] = d;
  }
}

double lcb_safety(const KernelModel& model, const Eigen::VectorXd& theta, double T,
                  double beta, const Eigen::VectorXd& times) {
  double best = INFINITY;
  std::vector<int> keep;
  for (int j = 0; j < times.size(); ++j)
    if (times[j] <= T + 1e-9) keep.push_back(j);
  if (keep.empty()) throw std::invalid_argument("lcb_safety: no grid nodes in [0, T]");
  Eigen::MatrixXd zq(theta.size() + 1, long(keep.size()));
  for (size_t j = 0; j < keep.size(); ++j)
    zq.col(long(j)) = model.embed(theta, times[keep[j]]);
  Eigen::VectorXd mean, sigma;
  model.predict_batch(zq, &mean, &sigma);
  for (long j = 0; j < mean.size(); ++j)
    best = std::min(best, std::clamp(mean[j], 0.0, 1.0) - beta * sigma[j]);
  return best;
}

double lcb_reset(const KernelModel& model, const Eigen::VectorXd& theta, double beta) {
  return std::clamp(model.predict_reset(theta), 0.0, 1.0) - beta * model.reset_std(theta);
}

bool is_feasible(const KernelModel& model, const ControlPoint& point, bool in_gamma0,
                 const Thresholds& th, const ConfidenceParams& conf,
                 const Eigen::VectorXd& times) {
  if (in_gamma0) return true;
  if (std::isinf(th.eps) && std::isinf(th.xi)) return true;
  if (point.t > point.horizon + 1e-9) return false;
  if (!std::isinf(th.eps) &&
      lcb_safety(model, point.theta, point.horizon, conf.beta_s, times) < 1.0 - th.eps)
    return false;
  if (!std::isinf(th.xi) && lcb_reset(model, point.theta, conf.beta_r) < 1.0 - th.xi)
    return false;
  return true;
}

std::optional<SelectionResult> select_next(const KernelModel& model, ExplorerState& state,
                                           const Thresholds& th, const ConfidenceParams& conf,
                                           double eta) {
  if (state.stopped) return std::nullopt;
  const CandidateGrid& grid = state.grid;
  const double diameter = grid.diameter();
  // The radius doubles once per iteration (and again within the call while
  // the search comes up empty), so the locality gate relaxes to the whole
  // grid after logarithmically many iterations.
  if (state.calls++ > 0) state.radius = std::min(state.radius * 2.0, diameter);
  // Row evaluations stay valid for the whole call: the model does not
  // change between radius growths, only the search radius does.
  std::vector<char> row_done(grid.n_theta(), 0);
  std::vector<RowEval> rows(grid.n_theta());

  for (;;) {
    std::vector<int> need;
    for (int row = 0; row < grid.n_theta(); ++row) {
      if (row_done[row]) continue;
      for (int j = 0; j < grid.n_t(); ++j) {
        const int id = grid.id_of(row, j);
        if (!state.selected[id] && !state.excluded[id] && state.dist_to_p[id] <= state.radius) {
          need.push_back(row);
          break;
        }
      }
    }
    parallel_blocks(std::int64_t(need.size()), [&](std::int64_t lo, std::int64_t hi) {
      for (std::int64_t i = lo; i < hi; ++i)
        rows[need[i]] = eval_row(model, grid, need[i], th, conf);
    });
    for (int row : need) row_done[row] = 1;

    bool saw_candidate = false;  // any unselected feasible candidate this sweep
    for (int id : grid.scan_order) {
      if (state.selected[id] || state.excluded[id]) continue;
      if (state.dist_to_p[id] > state.radius) continue;
      const RowEval& row = rows[grid.theta_of(id)];
      if (!row.feasible) continue;
      saw_candidate = true;
      const double sigma = row.sigma[grid.time_of(id)];
      if (sigma > eta) {
        state.selected[id] = 1;
        state.add_p_member(id);
        SelectionResult res;
        res.id = id;
        res.point = grid.point(id);
        res.sigma = sigma;
        res.lcb_s = row.lcb_s;
        res.lcb_r = row.lcb_r;
        return res;
      }
      state.excluded[id] = 1;
    }
    if (state.radius >= diameter) {
      state.stopped = true;
      state.stop_reason = saw_candidate ? "uncertainty_threshold" : "exhausted";
      return std::nullopt;
    }
    state.radius *= 2.0;
  }
}

CertifiedSet certify_set(const KernelModel& model, const CandidateGrid& grid,
                         const Thresholds& th, const ConfidenceParams& conf) {
  CertifiedSet out;
  std::vector<char> feasible(grid.n_theta(), 0);
  parallel_blocks(grid.n_theta(), [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t row = lo; row < hi; ++row)
      feasible[row] = eval_row(model, grid, int(row), th, conf).feasible ? 1 : 0;
  });
  for (int row = 0; row < grid.n_theta(); ++row) {
    if (!feasible[row]) continue;
    for (int j = 0; j < grid.n_t(); ++j) {
      const int id = grid.id_of(row, j);
      out.ids.push_back(id);
      out.points.push_back(grid.point(id));
    }
  }
  return out;
}

CampaignReport explore(const CampaignConfig& cfg) {
  CampaignReport report;
  report.config = cfg;
  report.grid = make_candidate_grid(cfg);
  report.model = KernelModel(cfg.make_model_config());

  const SystemSpec system = cfg.make_system();
  const RegionSpec regions = cfg.make_regions();
  const Thresholds th{cfg.eps, cfg.xi};
  const ConfidenceConfig conf_cfg = cfg.make_confidence_config();

  ExplorerState state(report.grid);
  const double t_start = now_s();
  double gain_total = 0.0;

  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    const double t0 = now_s();
    const ConfidenceParams conf = confidence_params(report.model, conf_cfg);
    auto pick = select_next(report.model, state, th, conf, cfg.eta);
    const double t1 = now_s();
    if (!pick) break;

    const BenchmarkControl control = cfg.make_control(pick->point.theta);
    TrajectoryBatch batch = integrate_paths(system, control, cfg.q, cfg.n_steps,
                                            child_seed(cfg.seed, std::uint64_t(iter)));
    const double t2 = now_s();

    ObservationRecord obs;
    obs.point = pick->point;
    KdeEstimate kde;
    kde.bandwidth = bandwidth_rule(cfg.q, system.observed_dim, cfg.nu_kde);
    kde.samples.resize(cfg.q, system.observed_dim);
    const int step = batch.nearest_index(pick->point.t);
    for (int p = 0; p < cfg.q; ++p)
      kde.samples.row(p) = batch.observed(p, step).transpose();
    obs.kde = std::move(kde);
    // s is estimated at the queried time, r at the horizon (the reset map
    // is a terminal quantity).
    if (cfg.prob_source == "density") {
      Eigen::VectorXd lo = Eigen::VectorXd::Constant(system.observed_dim,
                                                     -cfg.system.bound - 3.0 / obs.kde->bandwidth - 1.0);
      Eigen::VectorXd hi = -lo;
      obs.s_hat = probability_from_density(*obs.kde, regions.safe, lo, hi, int(cfg.q_prime),
                                           child_seed(cfg.seed, 0x70000000ull + iter));
      KdeEstimate term;
      term.bandwidth = obs.kde->bandwidth;
      term.samples.resize(cfg.q, system.observed_dim);
      for (int p = 0; p < cfg.q; ++p)
        term.samples.row(p) = batch.observed(p, cfg.n_steps).transpose();
      obs.r_hat = probability_from_density(term, regions.reset, lo, hi, int(cfg.q_prime),
                                           child_seed(cfg.seed, 0x71000000ull + iter));
    } else {
      obs.s_hat = probability_from_samples(batch, pick->point.t, regions.safe);
      obs.r_hat = probability_from_samples(batch, pick->point.horizon, regions.reset);
    }
    const double t3 = now_s();

    report.model.add_point(obs);
    const double t4 = now_s();

    IterationRow row;
    row.iteration = iter;
    row.candidate_id = pick->id;
    row.point = pick->point;
    row.sigma = pick->sigma;
    row.s_hat = obs.s_hat;
    row.r_hat = obs.r_hat;
    row.lcb_s = pick->lcb_s;
    row.lcb_r = pick->lcb_r;
    row.gain_increment =
        0.5 * std::log1p(pick->sigma * pick->sigma / report.model.ridge());
    gain_total += row.gain_increment;
    row.gain_total = gain_total;
    report.rows.push_back(row);

    report.clock.select_s += t1 - t0;
    report.clock.simulate_s += t2 - t1;
    report.clock.estimate_s += t3 - t2;
    report.clock.fit_s += t4 - t3;
  }

  report.stop_reason = state.stopped ? state.stop_reason : "max_iterations";
  const ConfidenceParams conf = confidence_params(report.model, conf_cfg);
  report.certified = certify_set(report.model, report.grid, th, conf);
  report.clock.total_s = now_s() - t_start;
  return report;
}

}  // namespace safesde
