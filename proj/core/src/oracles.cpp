#include "safesde/oracles.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "safesde/parallel.hpp"

namespace safesde {

double OracleMap::standard_error(int row) const {
  const double p = s_inf[row];
  return std::sqrt(p * (1.0 - p) / paths_per_point);
}

OracleMap mc_truth_map(const SystemSpec& spec, const RegionSpec& regions,
                       const LawFactory& laws, const Eigen::MatrixXd& thetas,
                       double horizon, int paths_per_point, int n_steps,
                       std::uint64_t seed, const std::vector<int>& eval_steps) {
  OracleMap map;
  map.thetas = thetas;
  map.horizon = horizon;
  map.paths_per_point = paths_per_point;
  map.seed = seed;
  const int nc = int(thetas.rows());
  map.s_inf.resize(nc);
  map.r_terminal.resize(nc);

  std::vector<char> wanted(n_steps + 1, eval_steps.empty() ? 1 : 0);
  for (int s : eval_steps) {
    if (s < 0 || s > n_steps)
      throw std::invalid_argument("mc_truth_map: eval step out of range");
    wanted[s] = 1;
  }

  parallel_blocks(nc, [&](std::int64_t lo, std::int64_t hi) {
    std::vector<int> safe_hits;
    for (std::int64_t c = lo; c < hi; ++c) {
      const ControlLaw law = laws(thetas.row(c).transpose());
      const std::uint64_t cand_seed = child_seed(seed, std::uint64_t(c));
      safe_hits.assign(n_steps + 1, 0);
      int reset_hits = 0;
      for (int p = 0; p < paths_per_point; ++p) {
        Rng rng(child_seed(cand_seed, std::uint64_t(p)));
        run_path(spec, law, horizon, n_steps, rng,
                 [&](int step, double, const Eigen::VectorXd& x) {
                   const Eigen::VectorXd obs = x.head(spec.observed_dim);
                   if (wanted[step] && regions.safe(obs) >= 0.0) ++safe_hits[step];
                   if (step == n_steps && regions.reset(obs) >= 0.0) ++reset_hits;
                 });
      }
      int worst = paths_per_point;
      for (int s = 0; s <= n_steps; ++s)
        if (wanted[s]) worst = std::min(worst, safe_hits[s]);
      map.s_inf[c] = double(worst) / paths_per_point;
      map.r_terminal[c] = double(reset_hits) / paths_per_point;
    }
  });
  return map;
}

PointTruth mc_truth_at(const SystemSpec& spec, const RegionSpec& regions,
                       const ControlLaw& law, double t, double horizon,
                       int paths, int n_steps, std::uint64_t seed) {
  const double dt = horizon / n_steps;
  int idx = std::min(std::max(int(std::lround(t / dt)), 0), n_steps);
  std::atomic<int> s_hits{0}, r_hits{0};
  parallel_blocks(paths, [&](std::int64_t lo, std::int64_t hi) {
    int s_local = 0, r_local = 0;
    for (std::int64_t p = lo; p < hi; ++p) {
      Rng rng(child_seed(seed, std::uint64_t(p)));
      run_path(spec, law, horizon, n_steps, rng,
               [&](int step, double, const Eigen::VectorXd& x) {
                 const Eigen::VectorXd obs = x.head(spec.observed_dim);
                 if (step == idx && regions.safe(obs) >= 0.0) ++s_local;
                 if (step == n_steps && regions.reset(obs) >= 0.0) ++r_local;
               });
    }
    s_hits += s_local;
    r_hits += r_local;
  });
  return {double(s_hits) / paths, double(r_hits) / paths};
}

double ou_mean(double t, double x0, double rate) { return x0 * std::exp(-rate * t); }

double ou_variance(double t, double rate, double diffusion) {
  if (rate == 0.0) return diffusion * diffusion * t;
  return diffusion * diffusion * (1.0 - std::exp(-2.0 * rate * t)) / (2.0 * rate);
}

double ou_density(double x, double t, double x0, double rate, double diffusion) {
  const double var = ou_variance(t, rate, diffusion);
  if (!(var > 0.0)) throw std::invalid_argument("ou_density: degenerate variance");
  const double d = x - ou_mean(t, x0, rate);
  return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * M_PI * var);
}

ReferenceSolve dense_reference_solve(const Eigen::MatrixXd& gram, double ridge,
                                     const Eigen::VectorXd& targets,
                                     const Eigen::VectorXd& kvec, double kzz) {
  const int n = int(gram.rows());
  if (gram.cols() != n || targets.size() != n || kvec.size() != n)
    throw std::invalid_argument("dense_reference_solve: inconsistent shapes");
  Eigen::MatrixXd a = gram;
  a.diagonal().array() += ridge;
  const Eigen::MatrixXd inv = a.inverse();
  const Eigen::VectorXd x = inv * kvec;
  const double scale = std::max(1.0, kvec.norm());
  if ((a * x - kvec).norm() > 1e-12 * scale * std::max(1.0, a.norm()))
    throw std::runtime_error("dense_reference_solve: regularized system is numerically singular");
  ReferenceSolve out;
  out.mean = targets.dot(x);
  out.variance = kzz - kvec.dot(x);
  return out;
}

}  // namespace safesde
