#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "safesde/config.hpp"
#include "safesde/kernel_model.hpp"
#include "safesde/types.hpp"

namespace safesde {

struct Thresholds {
  double eps = 0.1;  // safety slack; INFINITY disables the constraint
  double xi = 0.1;   // reset slack
};

// Candidate lattice over (theta, t) with a common horizon. Rows of thetas
// are the lattice points followed by any appended initial safe controls.
// The metric used for search radii is Euclidean over (theta, t/time_scale).
struct CandidateGrid {
  Eigen::MatrixXd thetas;  // n_theta x m
  Eigen::VectorXd times;   // ascending, last node == horizon
  double horizon = 0.0;
  double time_scale = 1.0;
  std::vector<char> gamma0_row;  // per theta row: whole time column is in Gamma0
  std::vector<int> scan_order;   // fixed enumeration of candidate ids

  int n_theta() const { return int(thetas.rows()); }
  int n_t() const { return int(times.size()); }
  int count() const { return n_theta() * n_t(); }
  int id_of(int theta_row, int time_idx) const { return theta_row * n_t() + time_idx; }
  int theta_of(int id) const { return id / n_t(); }
  int time_of(int id) const { return id % n_t(); }
  ControlPoint point(int id) const;
  bool in_gamma0(int id) const { return gamma0_row[theta_of(id)] != 0; }
  double distance(int id_a, int id_b) const;

  double cell_diagonal() const;  // rescaled diagonal of one lattice cell
  double diameter() const;       // rescaled diameter of the candidate set
};

CandidateGrid make_candidate_grid(const CampaignConfig& cfg);

struct SelectionResult {
  int id = -1;
  ControlPoint point;
  double sigma = 0.0;
  double lcb_s = 0.0;
  double lcb_r = 0.0;
};

// Search state: P starts as Gamma0 and accumulates selections; A collects
// candidates whose uncertainty fell to eta or below. The radius only grows.
struct ExplorerState {
  CandidateGrid grid;
  std::vector<char> selected;
  std::vector<char> excluded;
  std::vector<double> dist_to_p;  // rescaled distance to the nearest P member
  double radius = 0.0;
  int calls = 0;  // select_next invocations; the radius doubles per call
  bool stopped = false;
  std::string stop_reason;  // "", "uncertainty_threshold", "exhausted"

  explicit ExplorerState(CandidateGrid g);
  void add_p_member(int id);
};

// inf over the time grid nodes <= T of (s_hat - beta sigma).
double lcb_safety(const KernelModel& model, const Eigen::VectorXd& theta, double T,
                  double beta, const Eigen::VectorXd& times);
// r_hat(theta) - beta sigma_r(theta) on the terminal reset map.
double lcb_reset(const KernelModel& model, const Eigen::VectorXd& theta, double beta);

// Gamma0 members are feasible by assumption. Otherwise requires t <= T and
// both lower confidence bounds to clear their thresholds; infinite eps and
// xi short circuit to true.
bool is_feasible(const KernelModel& model, const ControlPoint& point, bool in_gamma0,
                 const Thresholds& th, const ConfidenceParams& conf,
                 const Eigen::VectorXd& times);

// One step of the region growing search: scan candidates within the radius
// of P in the fixed order, skipping selected and excluded ones; the first
// feasible candidate with sigma > eta is selected. The radius starts at one
// cell diagonal, doubles every iteration, and doubles again after any full
// sweep without an acceptance; once it covers the grid and a sweep still
// accepts nothing the state is stopped, with the reason recording whether
// feasible candidates remained (all at sigma <= eta) or none were left.
std::optional<SelectionResult> select_next(const KernelModel& model, ExplorerState& state,
                                           const Thresholds& th, const ConfidenceParams& conf,
                                           double eta);

struct CertifiedSet {
  std::vector<int> ids;
  std::vector<ControlPoint> points;
};
CertifiedSet certify_set(const KernelModel& model, const CandidateGrid& grid,
                         const Thresholds& th, const ConfidenceParams& conf);

struct IterationRow {
  int iteration = 0;
  int candidate_id = -1;
  ControlPoint point;
  double sigma = 0.0;
  double s_hat = 0.0;
  double r_hat = 0.0;
  double lcb_s = 0.0;
  double lcb_r = 0.0;
  double gain_increment = 0.0;
  double gain_total = 0.0;
};

struct WallClock {
  double total_s = 0.0;
  double select_s = 0.0;
  double simulate_s = 0.0;
  double estimate_s = 0.0;
  double fit_s = 0.0;
};

struct CampaignReport {
  CampaignConfig config;
  KernelModel model;
  CandidateGrid grid;
  std::vector<IterationRow> rows;
  CertifiedSet certified;
  std::string stop_reason;  // max_iterations | uncertainty_threshold | exhausted
  WallClock clock;
};

CampaignReport explore(const CampaignConfig& cfg);

}  // namespace safesde
