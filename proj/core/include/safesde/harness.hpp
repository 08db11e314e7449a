#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace safesde {

// Subcommand drivers shared by the command line tool and the tests. Each
// returns a process exit code: 0 on success, 1 for configuration or usage
// errors, 2 for runtime failures. Messages go to stdout/stderr.

struct ExploreArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;  // overrides [seeds] seed
  std::string out_dir;                // overrides [output] dir
};
int cmd_explore(const ExploreArgs& args);

struct EvaluateArgs {
  std::string config_path;      // optional when a checkpoint is given
  std::string checkpoint_path;  // default: <out_dir>/checkpoint.json
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  int controls = 0;  // 0 keeps the config value
  int paths = 0;
};
int cmd_evaluate(const EvaluateArgs& args);

struct PredictArgs {
  std::string config_path;
  std::string checkpoint_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::vector<double> theta;  // control parameter, one value per segment
  std::optional<double> t;    // query time; default: the horizon
  int resolution = 61;        // density grid nodes per axis
};
int cmd_predict(const PredictArgs& args);

struct MapsArgs {
  std::string config_path;
  std::string checkpoint_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool oracle = false;  // append Monte Carlo reference columns (slow)
  int oracle_paths = 0;
};
int cmd_maps(const MapsArgs& args);

}  // namespace safesde
