// Command line front end: explore / evaluate / predict / maps.

#include <CLI11.hpp>

#include "safesde/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"safe exploration for controlled stochastic dynamics"};
  app.require_subcommand(1);

  safesde::ExploreArgs explore_args;
  auto* explore = app.add_subcommand("explore", "run an exploration campaign");
  explore->add_option("--config", explore_args.config_path, "campaign config file")->required();
  explore->add_option("--seed", explore_args.seed, "override the config seed");
  explore->add_option("--out", explore_args.out_dir, "artifact directory");

  safesde::EvaluateArgs eval_args;
  auto* evaluate = app.add_subcommand("evaluate", "score a checkpoint against Monte Carlo truth");
  evaluate->add_option("--config", eval_args.config_path, "campaign config file");
  evaluate->add_option("--checkpoint", eval_args.checkpoint_path, "checkpoint path");
  evaluate->add_option("--seed", eval_args.seed, "override the config seed");
  evaluate->add_option("--out", eval_args.out_dir, "artifact directory");
  evaluate->add_option("--controls", eval_args.controls, "number of sampled controls");
  evaluate->add_option("--paths", eval_args.paths, "Monte Carlo paths per control");

  safesde::PredictArgs predict_args;
  auto* predict = app.add_subcommand("predict", "query the maps at one control");
  predict->add_option("--config", predict_args.config_path, "campaign config file");
  predict->add_option("--checkpoint", predict_args.checkpoint_path, "checkpoint path");
  predict->add_option("--seed", predict_args.seed, "override the config seed");
  predict->add_option("--out", predict_args.out_dir, "artifact directory");
  predict->add_option("--theta", predict_args.theta, "control parameter, one value per segment")
      ->expected(-1);
  predict->add_option("--t", predict_args.t, "query time (default: the horizon)");
  predict->add_option("--resolution", predict_args.resolution, "density grid nodes per axis");

  safesde::MapsArgs maps_args;
  auto* maps = app.add_subcommand("maps", "tabulate the maps over the candidate lattice");
  maps->add_option("--config", maps_args.config_path, "campaign config file");
  maps->add_option("--checkpoint", maps_args.checkpoint_path, "checkpoint path");
  maps->add_option("--seed", maps_args.seed, "override the config seed");
  maps->add_option("--out", maps_args.out_dir, "artifact directory");
  maps->add_flag("--oracle", maps_args.oracle, "append Monte Carlo reference columns (slow)");
  maps->add_option("--oracle-paths", maps_args.oracle_paths, "paths per control for --oracle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (explore->parsed()) return safesde::cmd_explore(explore_args);
  if (evaluate->parsed()) return safesde::cmd_evaluate(eval_args);
  if (predict->parsed()) return safesde::cmd_predict(predict_args);
  return safesde::cmd_maps(maps_args);
}
