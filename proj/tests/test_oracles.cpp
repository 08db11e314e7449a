#include <cmath>
#include <vector>

#include "doctest.h"
#include "safesde/oracles.hpp"
#include "safesde/rng.hpp"
#include "safesde/system.hpp"

using namespace safesde;

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// P(sup_{[0,T]} |W| < a), theta function series.
double band_survival(double a, double T) {
  double sum = 0.0;
  for (int k = 1; k <= 19; k += 2) {
    const double sgn = ((k - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
    sum += (4.0 / M_PI) * sgn / k * std::exp(-k * k * M_PI * M_PI * T / (8 * a * a));
  }
  return sum;
}

}  // namespace

TEST_CASE("brownian band survival matches the reflection series") {
  SystemSpec spec = ou_system(0.0, 0.0, 1.0);
  ControlLaw law = [](double, const Eigen::VectorXd&) {
    return Eigen::VectorXd::Zero(1);
  };
  const int paths = 30000, steps = 2500;
  int alive = 0;
  for (int p = 0; p < paths; ++p) {
    Rng rng(child_seed(31, p));
    bool inside = true;
    run_path(spec, law, 1.0, steps, rng,
             [&](int, double, const Eigen::VectorXd& x) {
               if (std::fabs(x[0]) >= 1.0) inside = false;
             });
    alive += inside;
  }
  const double mc = double(alive) / paths;
  const double truth = band_survival(1.0, 1.0);
  CHECK(truth == doctest::Approx(0.3706).epsilon(1e-3));
  // discrete monitoring misses excursions between nodes, so mc sits a
  // little above the continuous truth
  CHECK(std::fabs(mc - truth) < 0.03);
  CHECK(mc > truth - 0.01);
}

TEST_CASE("oracle map takes the minimum over the checked nodes") {
  SystemSpec spec = ou_system(0.0, 0.0, 1.0);
  RegionSpec regions;
  regions.safe = [](const Eigen::VectorXd& x) { return 1.0 - std::fabs(x[0]); };
  regions.reset = regions.safe;
  LawFactory laws = [](const Eigen::VectorXd&) {
    return ControlLaw([](double, const Eigen::VectorXd&) {
      return Eigen::VectorXd::Zero(1);
    });
  };
  Eigen::MatrixXd thetas = Eigen::MatrixXd::Zero(1, 1);

  // pointwise band probabilities shrink in t for brownian motion, so the
  // minimum over {0.25, 0.5, 1.0} sits at the horizon
  OracleMap map = mc_truth_map(spec, regions, laws, thetas, 1.0, 20000, 100, 77,
                               {25, 50, 100});
  const double p1 = 2 * normal_cdf(1.0) - 1;
  CHECK(map.s_inf[0] == doctest::Approx(p1).epsilon(0.02));
  CHECK(map.r_terminal[0] == doctest::Approx(p1).epsilon(0.02));

  // dropping the horizon node from the checked set raises the minimum
  OracleMap early = mc_truth_map(spec, regions, laws, thetas, 1.0, 20000, 100, 77,
                                 {25, 50});
  const double p05 = 2 * normal_cdf(1.0 / std::sqrt(0.5)) - 1;
  CHECK(early.s_inf[0] == doctest::Approx(p05).epsilon(0.02));
  CHECK(early.s_inf[0] > map.s_inf[0]);

  CHECK(map.standard_error(0) ==
        doctest::Approx(std::sqrt(map.s_inf[0] * (1 - map.s_inf[0]) / 20000)));
  CHECK(map.standard_error(0) <= 0.5 / std::sqrt(20000.0) + 1e-12);
}

TEST_CASE("oracle map is reproducible and rejects bad nodes") {
  SystemSpec spec = ou_system(0.5, 1.0, 0.8);
  RegionSpec regions;
  regions.safe = [](const Eigen::VectorXd& x) { return 2.0 - std::fabs(x[0]); };
  regions.reset = [](const Eigen::VectorXd& x) { return 1.0 - std::fabs(x[0]); };
  LawFactory laws = [](const Eigen::VectorXd&) {
    return ControlLaw([](double, const Eigen::VectorXd&) {
      return Eigen::VectorXd::Zero(1);
    });
  };
  Eigen::MatrixXd thetas(2, 1);
  thetas << 0.0, 1.0;
  OracleMap a = mc_truth_map(spec, regions, laws, thetas, 1.0, 500, 50, 5);
  OracleMap b = mc_truth_map(spec, regions, laws, thetas, 1.0, 500, 50, 5);
  CHECK((a.s_inf - b.s_inf).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.r_terminal - b.r_terminal).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(mc_truth_map(spec, regions, laws, thetas, 1.0, 10, 50, 5, {51}),
                  std::invalid_argument);
  CHECK_THROWS_AS(mc_truth_map(spec, regions, laws, thetas, 1.0, 10, 50, 5, {-1}),
                  std::invalid_argument);
}

TEST_CASE("pointwise truth snaps to the nearest node") {
  SystemSpec spec = ou_system(0.0, 0.0, 1.0);
  RegionSpec regions;
  regions.safe = [](const Eigen::VectorXd& x) { return 1.0 - std::fabs(x[0]); };
  regions.reset = regions.safe;
  ControlLaw law = [](double, const Eigen::VectorXd&) {
    return Eigen::VectorXd::Zero(1);
  };
  PointTruth on = mc_truth_at(spec, regions, law, 0.50, 1.0, 2000, 100, 9);
  PointTruth off = mc_truth_at(spec, regions, law, 0.503, 1.0, 2000, 100, 9);
  CHECK(on.s == off.s);
  CHECK(on.r == off.r);
  CHECK(on.s == doctest::Approx(2 * normal_cdf(1.0 / std::sqrt(0.5)) - 1).epsilon(0.05));
}

TEST_CASE("ou analytic moments") {
  CHECK(ou_mean(2.0, 3.0, 0.5) == doctest::Approx(3.0 * std::exp(-1.0)));
  CHECK(ou_variance(2.0, 0.5, 1.5) ==
        doctest::Approx(1.5 * 1.5 * (1 - std::exp(-2.0)) / 1.0));
  // rate zero degenerates to brownian scaling
  CHECK(ou_mean(2.0, 3.0, 0.0) == doctest::Approx(3.0));
  CHECK(ou_variance(2.0, 0.0, 1.5) == doctest::Approx(1.5 * 1.5 * 2.0));

  // density is the gaussian with those moments and integrates to one
  const double m = ou_mean(1.0, 2.0, 1.0), v = ou_variance(1.0, 1.0, 1.0);
  CHECK(ou_density(m, 1.0, 2.0, 1.0, 1.0) ==
        doctest::Approx(1.0 / std::sqrt(2 * M_PI * v)));
  double mass = 0.0;
  const double dx = 0.01;
  for (double x = m - 8; x <= m + 8; x += dx)
    mass += ou_density(x, 1.0, 2.0, 1.0, 1.0) * dx;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-4));
  CHECK_THROWS_AS(ou_density(0.0, 0.0, 1.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("dense reference solve") {
  Eigen::MatrixXd gram(2, 2);
  gram << 1.0, 0.5, 0.5, 1.0;
  Eigen::VectorXd targets(2), kv(2);
  targets << 1.0, 0.0;
  kv << 0.8, 0.4;
  ReferenceSolve ref = dense_reference_solve(gram, 0.1, targets, kv, 1.0);
  // hand solve of (K + 0.1 I) w = k
  Eigen::MatrixXd shifted = gram + 0.1 * Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd w = shifted.fullPivLu().solve(kv);
  CHECK(ref.mean == doctest::Approx(targets.dot(w)).epsilon(1e-12));
  CHECK(ref.variance == doctest::Approx(1.0 - kv.dot(w)).epsilon(1e-12));

  CHECK_THROWS_AS(dense_reference_solve(gram, 0.1, targets, Eigen::VectorXd::Ones(3), 1.0),
                  std::invalid_argument);
  // rank one gram with no ridge cannot pass the residual audit
  Eigen::MatrixXd singular = Eigen::MatrixXd::Ones(2, 2);
  CHECK_THROWS_AS(dense_reference_solve(singular, 0.0, targets, kv, 1.0),
                  std::runtime_error);
}
