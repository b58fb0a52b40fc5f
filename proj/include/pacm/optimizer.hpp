#pragma once

#include <functional>
#include <vector>

#include "pacm/config.hpp"
#include "pacm/mma.hpp"
#include "pacm/sensitivity.hpp"

namespace pacm {

/// Continuation: beta = min(2^floor((iter-1)/period), beta_max), iter >= 1.
double beta_schedule(int iter, int period = 50, double beta_max = 128.0);

/// Dilated volume target V_d* = (V_i*/V(rho_i)) * V(rho_d) (volume fractions).
double dilated_volume_update(double vi_star, double vf_intermediate, double vf_dilated);

/// One convergence-log record per completed iteration.
struct OptRecord {
  int iter = 0;
  double beta = 1.0;
  double f0_e = 0.0, f0_i = 0.0, f0_d = 0.0;
  double vf_e = 0.0, vf_i = 0.0, vf_d = 0.0;
  double mnd_i = 0.0;
  double delta_i = 0.0;
};

using OptLog = std::vector<OptRecord>;

/// CSV with a header row matching the log fields exactly.
std::string log_to_csv(const OptLog& log);

struct OptResult {
  Eigen::VectorXd rho;  // final design vector
  DesignState state;    // fields at the final iterate
  OptLog log;
  bool stopped_early = false;
  double vd_star = 0.0;  // final dilated volume target (fraction)
};

struct RunCallbacks {
  // Called after each iteration with the just-logged record and design.
  std::function<void(const OptRecord&, const Eigen::VectorXd& rho)> on_iteration;
  // Checkpoint sink, called every config.checkpoint_every iterations.
  std::function<void(int iter, const Eigen::VectorXd& rho)> on_checkpoint;
};

/// Robust min-max optimization loop over the three projected realizations.
OptResult run_optimization(const RunConfig& cfg, const RunCallbacks& cb = {});

}  // namespace pacm
