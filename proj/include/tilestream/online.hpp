#ifndef TILESTREAM_ONLINE_HPP_
#define TILESTREAM_ONLINE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tilestream/bandwidth.hpp"
#include "tilestream/fov.hpp"
#include "tilestream/planners.hpp"
#include "tilestream/qoe.hpp"
#include "tilestream/relaxed_solver.hpp"
#include "tilestream/types.hpp"
#include "tilestream/utility.hpp"

namespace tilestream {

// Sliding-window driver settings. Planner names: alg1, alg2, alg3, baseline,
// greedy, oracle.
struct OnlineSettings {
  int window_chunks = 2;   // W
  int warmup_chunks = 1;   // eta: initial chunks forced to the base layer
  std::string planner = "alg1";
  bool repredict_bandwidth = true;  // redraw capacity predictions every window
  bool repredict_fov = true;        // recompute robust sets every window
  // Divides every predicted capacity before planning. Setting it to 1 + p
  // makes plans safe against the worst multiplicative prediction error, the
  // conservative-bandwidth option; 1.0 plans on the raw predictions.
  double capacity_derate = 1.0;
  SolverSettings solver = SolverSettings::fast();
  std::optional<int> quality_cap;   // algorithm3 consistency cap

  void validate(const VideoConfig& config) const;
};

struct DecisionRecord {
  int window_index = 0;
  int committed_chunk = 0;  // 0-based chunk whose rates were just fixed
  double clock_s = 0.0;     // wall clock at the decision
  std::vector<double> predicted_capacity_mbps;
  std::vector<int> committed_levels;
};

struct RunResult {
  RatePlan executed;
  Timeline realized;
  RealizedReport report;
  std::vector<DecisionRecord> decisions;
};

// Exact ground-truth executor: drains each chunk's bits against the
// (cyclically extended) trace, honoring buffer-cap waits.
Timeline event_simulate(const RatePlan& plan, const ThroughputTrace& trace,
                        const VideoConfig& config);

// Runs the online protocol: warmup chunks at the base layer, then after each
// chunk completes, predict capacity over the next W chunks, re-plan the
// window, and commit only the next chunk. Delivery is simulated exactly
// against the trace; all randomness derives from the seed.
RunResult run_online(const OnlineSettings& settings, const FovDistribution& dist,
                     const ThroughputTrace& trace, const PredictionModel& model,
                     const VideoConfig& config, const Utility& utility,
                     const QoeWeights& weights, std::uint64_t seed);

// One JSON object per decision, newline separated.
std::string decision_log_jsonl(const RunResult& result);

}  // namespace tilestream

#endif  // TILESTREAM_ONLINE_HPP_
