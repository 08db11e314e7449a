#include "safesde/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>

#include <json.hpp>

#include "safesde/checkpoint.hpp"
#include "safesde/explorer.hpp"
#include "safesde/oracles.hpp"
#include "safesde/report.hpp"

namespace safesde {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Loads the campaign a query command runs against. The model always comes
// from the checkpoint; the query side (grid, evaluate knobs, seed) follows
// --config when given, the checkpoint config otherwise.
struct LoadedRun {
  CampaignConfig cfg;
  KernelModel model;
};

LoadedRun load_run(const std::string& config_path, const std::string& checkpoint_path,
                   const std::optional<std::uint64_t>& seed, const std::string& out_dir) {
  std::string ckpt = checkpoint_path;
  std::optional<CampaignConfig> file_cfg;
  if (!config_path.empty()) file_cfg = parse_config_file(config_path);
  if (ckpt.empty()) {
    std::string dir = !out_dir.empty()  ? out_dir
                      : file_cfg        ? file_cfg->out_dir
                                        : std::string();
    if (dir.empty())
      throw ConfigError("no checkpoint: give --checkpoint, or --config/--out to locate one");
    ckpt = (std::filesystem::path(dir) / "checkpoint.json").string();
  }
  Checkpoint loaded = load_checkpoint(ckpt);
  LoadedRun run{file_cfg ? *file_cfg : loaded.config, std::move(loaded.model)};
  if (seed) run.cfg.seed = *seed;
  return run;
}

std::string resolve_out_dir(const CampaignConfig& cfg, const std::string& flag) {
  return flag.empty() ? cfg.out_dir : flag;
}

int guard(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

}  // namespace

int cmd_explore(const ExploreArgs& args) {
  return guard([&] {
    if (args.config_path.empty()) throw ConfigError("explore: --config is required");
    CampaignConfig cfg = parse_config_file(args.config_path);
    if (args.seed) cfg.seed = *args.seed;
    const std::string out_dir = resolve_out_dir(cfg, args.out_dir);

    CampaignReport report = explore(cfg);
    write_campaign_artifacts(report, out_dir);

    std::printf("explore: %zu iterations, stop=%s, certified=%zu/%d, gain=%s\n",
                report.rows.size(), report.stop_reason.c_str(), report.certified.ids.size(),
                report.grid.count(), fmt(report.model.information_gain()).c_str());
    std::printf("artifacts: %s\n", out_dir.c_str());
    return 0;
  });
}

int cmd_evaluate(const EvaluateArgs& args) {
  return guard([&] {
    LoadedRun run = load_run(args.config_path, args.checkpoint_path, args.seed, args.out_dir);
    CampaignConfig& cfg = run.cfg;
    const std::string out_dir = resolve_out_dir(cfg, args.out_dir);
    const int controls = args.controls > 0 ? args.controls : cfg.eval_controls;
    const int paths = args.paths > 0 ? args.paths : cfg.eval_paths;

    const CandidateGrid grid = make_candidate_grid(cfg);
    const SystemSpec system = cfg.make_system();
    const RegionSpec regions = cfg.make_regions();

    Rng pick(child_seed(cfg.seed, 0xe7a1));
    std::vector<int> ids(controls);
    for (int i = 0; i < controls; ++i)
      ids[i] = int(pick.next_u64() % std::uint64_t(grid.count()));

    std::string csv = artifact_header(cfg);
    csv += "candidate_id,t";
    for (int j = 0; j < cfg.segments; ++j) csv += ",theta_" + std::to_string(j);
    csv += ",s_hat,r_hat,s_mc,r_mc\n";

    double se_s = 0.0, se_r = 0.0, se2_s = 0.0, se2_r = 0.0;
    for (int i = 0; i < controls; ++i) {
      const ControlPoint p = grid.point(ids[i]);
      const double s_hat = std::clamp(run.model.predict_safety(p.theta, p.t), 0.0, 1.0);
      const double r_hat = std::clamp(run.model.predict_reset(p.theta), 0.0, 1.0);
      const ControlLaw law = make_control_law(cfg.make_control(p.theta));
      const PointTruth truth =
          mc_truth_at(system, regions, law, p.t, p.horizon, paths, cfg.n_steps,
                      child_seed(cfg.seed, 0x10000ull + std::uint64_t(i)));
      const double ds = s_hat - truth.s, dr = r_hat - truth.r;
      se_s += ds * ds;
      se_r += dr * dr;
      se2_s += ds * ds * ds * ds;
      se2_r += dr * dr * dr * dr;

      csv += std::to_string(ids[i]);
      csv += ',';
      csv += fmt(p.t);
      for (long j = 0; j < p.theta.size(); ++j) csv += ',' + fmt(p.theta[j]);
      for (double v : {s_hat, r_hat, truth.s, truth.r}) csv += ',' + fmt(v);
      csv += '\n';
    }
    const double mse_s = se_s / controls, mse_r = se_r / controls;
    const double sd_s = std::sqrt(std::max(0.0, se2_s / controls - mse_s * mse_s));
    const double sd_r = std::sqrt(std::max(0.0, se2_r / controls - mse_r * mse_r));

    write_file_atomic((std::filesystem::path(out_dir) / "evaluation.csv").string(), csv);
    nlohmann::json j;
    j["config_hash"] = config_hash(cfg);
    j["seed"] = cfg.seed;
    j["controls"] = controls;
    j["paths"] = paths;
    j["observations"] = run.model.n();
    j["mse_s"] = mse_s;
    j["mse_r"] = mse_r;
    j["sd_sq_err_s"] = sd_s;
    j["sd_sq_err_r"] = sd_r;
    write_file_atomic((std::filesystem::path(out_dir) / "evaluation.json").string(),
                      j.dump(2) + "\n");

    std::printf("evaluate: controls=%d paths=%d mse_s=%s (sd %s) mse_r=%s (sd %s)\n", controls,
                paths, fmt(mse_s).c_str(), fmt(sd_s).c_str(), fmt(mse_r).c_str(),
                fmt(sd_r).c_str());
    return 0;
  });
}

int cmd_predict(const PredictArgs& args) {
  return guard([&] {
    LoadedRun run = load_run(args.config_path, args.checkpoint_path, args.seed, args.out_dir);
    CampaignConfig& cfg = run.cfg;
    const std::string out_dir = resolve_out_dir(cfg, args.out_dir);
    if (int(args.theta.size()) != cfg.segments)
      throw ConfigError("predict: --theta needs exactly " + std::to_string(cfg.segments) +
                        " values");
    if (args.resolution < 2) throw ConfigError("predict: --resolution must be at least 2");
    const Eigen::VectorXd theta =
        Eigen::Map<const Eigen::VectorXd>(args.theta.data(), cfg.segments);
    const double t = args.t ? *args.t : cfg.system.t_max;
    if (!(t > 0.0) || t > cfg.system.t_max + 1e-9)
      throw ConfigError("predict: --t must lie in (0, t_max]");

    const double s_hat = std::clamp(run.model.predict_safety(theta, t), 0.0, 1.0);
    const double r_hat = std::clamp(run.model.predict_reset(theta), 0.0, 1.0);
    const double sigma = run.model.predictive_std(theta, t);
    const double sigma_r = run.model.reset_std(theta);
    const ConfidenceParams conf = confidence_params(run.model, cfg.make_confidence_config());

    const SystemSpec system = cfg.make_system();
    if (system.observed_dim != 2)
      throw std::runtime_error("predict: density grid expects a planar observed state");
    const int res = args.resolution;
    const double b = cfg.system.bound;
    Eigen::MatrixXd xs(res * res, 2);
    for (int i = 0; i < res; ++i)
      for (int j = 0; j < res; ++j) {
        xs(i * res + j, 0) = -b + 2.0 * b * j / (res - 1);
        xs(i * res + j, 1) = -b + 2.0 * b * i / (res - 1);
      }
    const Eigen::VectorXd raw = run.model.predict_density_grid(theta, t, xs);

    std::string csv = artifact_header(cfg);
    csv += "x1,x2,density,clipped\n";
    for (int k = 0; k < res * res; ++k) {
      csv += fmt(xs(k, 0)) + ',' + fmt(xs(k, 1)) + ',' + fmt(raw[k]) + ',' +
             fmt(std::max(0.0, raw[k])) + '\n';
    }
    write_file_atomic((std::filesystem::path(out_dir) / "density.csv").string(), csv);

    nlohmann::json j;
    j["config_hash"] = config_hash(cfg);
    j["seed"] = cfg.seed;
    j["observations"] = run.model.n();
    j["t"] = t;
    j["theta"] = args.theta;
    j["s_hat"] = s_hat;
    j["r_hat"] = r_hat;
    j["sigma"] = sigma;
    j["sigma_r"] = sigma_r;
    j["lcb_s"] = s_hat - conf.beta_s * sigma;
    j["lcb_r"] = r_hat - conf.beta_r * sigma_r;
    j["resolution"] = res;
    write_file_atomic((std::filesystem::path(out_dir) / "prediction.json").string(),
                      j.dump(2) + "\n");

    std::printf("predict: t=%s s_hat=%s r_hat=%s sigma=%s\n", fmt(t).c_str(), fmt(s_hat).c_str(),
                fmt(r_hat).c_str(), fmt(sigma).c_str());
    return 0;
  });
}

int cmd_maps(const MapsArgs& args) {
  return guard([&] {
    LoadedRun run = load_run(args.config_path, args.checkpoint_path, args.seed, args.out_dir);
    CampaignConfig& cfg = run.cfg;
    const std::string out_dir = resolve_out_dir(cfg, args.out_dir);

    const CandidateGrid grid = make_candidate_grid(cfg);
    const Thresholds th{cfg.eps, cfg.xi};
    const ConfidenceParams conf = confidence_params(run.model, cfg.make_confidence_config());
    const int nt = grid.n_t();

    OracleMap oracle;
    if (args.oracle) {
      const int paths = args.oracle_paths > 0 ? args.oracle_paths : cfg.oracle_paths;
      const SystemSpec system = cfg.make_system();
      const RegionSpec regions = cfg.make_regions();
      Eigen::MatrixXd lattice = grid.thetas.topRows(grid.n_theta());
      std::vector<int> eval_steps;
      const double dt = grid.horizon / cfg.n_steps;
      for (int j = 0; j < nt; ++j) eval_steps.push_back(int(std::lround(grid.times[j] / dt)));
      oracle = mc_truth_map(
          system, regions,
          [&](const Eigen::VectorXd& th_row) { return make_control_law(cfg.make_control(th_row)); },
          lattice, grid.horizon, paths, cfg.n_steps, child_seed(cfg.seed, 0x0a1c), eval_steps);
    }

    std::string csv = artifact_header(cfg);
    for (int j = 0; j < cfg.segments; ++j)
      csv += (j ? ",theta_" : "theta_") + std::to_string(j);
    csv += ",s_min,s_T,r_T,sigma_T,lcb_s,lcb_r,feasible";
    if (args.oracle) csv += ",s_inf_mc,r_T_mc";
    csv += '\n';

    int feasible_rows = 0;
    for (int row = 0; row < grid.n_theta(); ++row) {
      const Eigen::VectorXd theta_row = grid.thetas.row(row).transpose();
      Eigen::MatrixXd zq(cfg.segments + 1, nt);
      for (int j = 0; j < nt; ++j) zq.col(j) = run.model.embed(theta_row, grid.times[j]);
      Eigen::VectorXd s_mean, sigma;
      run.model.predict_batch(zq, &s_mean, &sigma);
      s_mean = s_mean.cwiseMax(0.0).cwiseMin(1.0);
      const double r_hat = std::clamp(run.model.predict_reset(theta_row), 0.0, 1.0);
      const double lcb_s = (s_mean - conf.beta_s * sigma).minCoeff();
      const double lcb_r = r_hat - conf.beta_r * run.model.reset_std(theta_row);
      const bool unconstrained = std::isinf(th.eps) && std::isinf(th.xi);
      const bool feasible = grid.gamma0_row[row] != 0 || unconstrained ||
                            ((std::isinf(th.eps) || lcb_s >= 1.0 - th.eps) &&
                             (std::isinf(th.xi) || lcb_r >= 1.0 - th.xi));
      feasible_rows += feasible;

      for (int j = 0; j < cfg.segments; ++j) csv += (j ? "," : "") + fmt(grid.thetas(row, j));
      for (double v : {s_mean.minCoeff(), s_mean[nt - 1], r_hat, sigma[nt - 1], lcb_s, lcb_r})
        csv += ',' + fmt(v);
      csv += feasible ? ",1" : ",0";
      if (args.oracle) {
        csv += ',' + fmt(oracle.s_inf[row]) + ',' + fmt(oracle.r_terminal[row]);
      }
      csv += '\n';
    }
    write_file_atomic((std::filesystem::path(out_dir) / "maps.csv").string(), csv);

    std::printf("maps: rows=%d feasible=%d out=%s\n", grid.n_theta(), feasible_rows,
                out_dir.c_str());
    return 0;
  });
}

}  // namespace safesde
