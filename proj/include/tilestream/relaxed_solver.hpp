#ifndef TILESTREAM_RELAXED_SOLVER_HPP_
#define TILESTREAM_RELAXED_SOLVER_HPP_

#include <span>
#include <vector>

#include "tilestream/fov.hpp"
#include "tilestream/qoe.hpp"
#include "tilestream/timeline.hpp"
#include "tilestream/types.hpp"
#include "tilestream/utility.hpp"

namespace tilestream {

// Projected-subgradient settings. The solver stops once the best objective
// has not improved by epsilon (relative) for `patience` consecutive
// iterations, then refines the best iterate with golden-section line
// searches along coordinate and tile-group directions.
struct SolverSettings {
  int max_iterations = 100000;
  double epsilon = 1e-6;
  int patience = 50;
  double step_scale = 1.0;   // first-round step = step_scale * (R_m - R_0)
  int decay_rounds = 24;     // geometric step-decay rounds, each restarted
  double round_decay = 0.6;  // from the incumbent best iterate
  int restarts = 3;          // deterministic starts: midpoint, R_0, R_m
  int polish_passes = 40;
  int polish_line_iters = 48;
  bool polish_singles = true;
  int fine_cycles = 0;  // extra decay+polish cycles at 1e-3 smaller steps

  // Heavier settings for desk-scale instances where oracle tests demand
  // near-exact optima.
  static SolverSettings precise();
  // Cheap settings for per-window solves inside the online driver.
  static SolverSettings fast();
};

struct SolverCertificate {
  double projected_subgradient_norm = 0.0;
  double box_residual = 0.0;
  double stall_residual = 0.0;  // |internal stall - timeline recompute|
  int iterations = 0;
};

struct RelaxedSolution {
  ContinuousRatePlan rates;
  double objective_value = 0.0;
  std::vector<double> gamma;  // per-chunk min over the robust set (robust only)
  SolverCertificate certificate;
};

// Maximizes the expected objective over box-constrained continuous rates.
// Timing variables are eliminated: the stall is recomputed exactly from the
// rates at every evaluation. Throws on non-concave utilities and reports
// divergence (NaN objective) as a runtime error.
RelaxedSolution solve_relaxed_expected(const FovDistribution& dist,
                                       std::span<const double> capacity_mbps,
                                       const VideoConfig& config, const Utility& utility,
                                       const QoeWeights& weights, const SolverSettings& settings);
RelaxedSolution solve_relaxed_expected(const FovDistribution& dist,
                                       std::span<const double> capacity_mbps,
                                       const VideoConfig& config, const Utility& utility,
                                       const QoeWeights& weights, const SolverSettings& settings,
                                       const TimelineContext& ctx);

// Robust variant: maximizes sum of U(min over the robust set) minus
// lambda * stall. The returned gamma equals the per-chunk minimum over the
// robust set at the solution.
RelaxedSolution solve_relaxed_robust(const std::vector<std::vector<int>>& robust_sets,
                                     std::span<const double> capacity_mbps,
                                     const VideoConfig& config, const Utility& utility,
                                     double lambda, const SolverSettings& settings);
RelaxedSolution solve_relaxed_robust(const std::vector<std::vector<int>>& robust_sets,
                                     std::span<const double> capacity_mbps,
                                     const VideoConfig& config, const Utility& utility,
                                     double lambda, const SolverSettings& settings,
                                     const TimelineContext& ctx);

}  // namespace tilestream

#endif  // TILESTREAM_RELAXED_SOLVER_HPP_
