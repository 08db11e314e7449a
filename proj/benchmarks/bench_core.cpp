#include <benchmark/benchmark.h>

#include "safesde/bessel.hpp"
#include "safesde/config.hpp"
#include "safesde/explorer.hpp"
#include "safesde/kde.hpp"
#include "safesde/kernel_model.hpp"
#include "safesde/system.hpp"

namespace {

using namespace safesde;

void BM_bessel_j(benchmark::State& state) {
  double z = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_j(1.0, z));
    z += 1e-3;
    if (z > 40.0) z = 0.1;
  }
}
BENCHMARK(BM_bessel_j);

void BM_integrate_paths(benchmark::State& state) {
  const CampaignConfig cfg = default_config();
  const SystemSpec spec = cfg.make_system();
  const BenchmarkControl control = cfg.make_control(cfg.gamma0[0]);
  for (auto _ : state) {
    TrajectoryBatch batch = integrate_paths(spec, control, int(state.range(0)), 500, 7);
    benchmark::DoNotOptimize(batch.states.back()(0, 0));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 500);
}
BENCHMARK(BM_integrate_paths)->Arg(20)->Arg(200);

KernelModel seeded_model(int n) {
  CampaignConfig cfg = default_config();
  cfg.ridge_policy = "fixed";
  cfg.ridge_value = 1e-3;
  KernelModel model(cfg.make_model_config());
  Rng rng(11);
  for (int i = 0; i < n; ++i) {
    ObservationRecord obs;
    obs.point.theta = Eigen::Vector2d(rng.uniform() * 6.0 - 3.0, rng.uniform() * 6.0 - 3.0);
    obs.point.t = 0.4 + 19.6 * rng.uniform();
    obs.point.horizon = 20.0;
    obs.s_hat = rng.uniform();
    obs.r_hat = rng.uniform();
    model.add_point(obs);
  }
  return model;
}

void BM_model_add_point(benchmark::State& state) {
  const KernelModel base = seeded_model(int(state.range(0)));
  ObservationRecord obs;
  obs.point.theta = Eigen::Vector2d(0.5, -0.5);
  obs.point.t = 10.0;
  obs.point.horizon = 20.0;
  obs.s_hat = 0.9;
  obs.r_hat = 0.8;
  for (auto _ : state) {
    KernelModel model = base;
    model.add_point(obs);
    benchmark::DoNotOptimize(model.n());
  }
}
BENCHMARK(BM_model_add_point)->Arg(50)->Arg(200);

void BM_predict_batch(benchmark::State& state) {
  const KernelModel model = seeded_model(int(state.range(0)));
  Eigen::MatrixXd zq(3, 50);
  for (int j = 0; j < 50; ++j)
    zq.col(j) = model.embed(Eigen::Vector2d(0.3, 0.1), 0.4 * (j + 1));
  Eigen::VectorXd s, sd;
  for (auto _ : state) {
    model.predict_batch(zq, &s, &sd);
    benchmark::DoNotOptimize(sd[0]);
  }
  state.SetItemsProcessed(state.iterations() * 50);
}
BENCHMARK(BM_predict_batch)->Arg(50)->Arg(200);

void BM_kde_density(benchmark::State& state) {
  KdeEstimate est;
  est.bandwidth = bandwidth_rule(200, 2, 2.5);
  est.samples.resize(200, 2);
  Rng rng(3);
  for (int i = 0; i < 200; ++i)
    est.samples.row(i) = Eigen::RowVector2d(rng.normal(), rng.normal());
  Eigen::Vector2d x(0.2, -0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kde_density(est, x));
    x[0] += 1e-3;
    if (x[0] > 3.0) x[0] = -3.0;
  }
  state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(BM_kde_density);

}  // namespace

BENCHMARK_MAIN();
