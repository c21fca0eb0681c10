#ifndef TILESTREAM_PLANNERS_HPP_
#define TILESTREAM_PLANNERS_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tilestream/fov.hpp"
#include "tilestream/qoe.hpp"
#include "tilestream/relaxed_solver.hpp"
#include "tilestream/timeline.hpp"
#include "tilestream/types.hpp"
#include "tilestream/utility.hpp"

namespace tilestream {

struct PlannerDiagnostics {
  std::vector<int> upgrades_per_chunk;  // tiles raised above their quantized level
  bool early_exit = false;              // no residual budget / base plan already stalls
};

struct PlannerOutput {
  RatePlan plan;
  // Residual bit budget L_k after each chunk's upgrades; nonnegative at
  // every accepted upgrade.
  std::vector<double> residual_budget_mbits;
  // Per-chunk min rate over the robust set (filled by algorithm2/algorithm3).
  std::vector<double> gamma_mbps;
  PlannerDiagnostics diagnostics;
};

// Largest ladder level not exceeding / smallest not below the given rate.
int down_level(double rate_mbps, const VideoConfig& config);
int up_level(double rate_mbps, const VideoConfig& config);

// Maps every relaxed rate to the highest ladder level that does not exceed
// it; never increases any chunk size, hence never increases stall.
RatePlan down_quantize(const ContinuousRatePlan& relaxed, const VideoConfig& config);

// Quantize-then-upgrade for the expected objective: banks the bits saved by
// down-quantization (L_k, in megabits) and spends them raising the
// most-likely q-tile sets one ladder level, growing q from the viewport
// size, carrying leftovers to the next chunk. Upgrades are accepted only
// while the bit budget covers them, the total stall stays within the relaxed
// solution's stall, and the expected objective does not decrease.
PlannerOutput algorithm1(const ContinuousRatePlan& relaxed, const FovDistribution& dist,
                         std::span<const double> capacity_mbps, const VideoConfig& config,
                         const Utility& utility, const QoeWeights& weights);
PlannerOutput algorithm1(const ContinuousRatePlan& relaxed, const FovDistribution& dist,
                         std::span<const double> capacity_mbps, const VideoConfig& config,
                         const Utility& utility, const QoeWeights& weights,
                         const TimelineContext& ctx);

// Robust counterpart: per chunk, upgrades the whole robust set one level
// (all-or-nothing) when the banked budget covers it and stall does not grow.
PlannerOutput algorithm2(const ContinuousRatePlan& relaxed_robust,
                         const std::vector<std::vector<int>>& robust_sets,
                         std::span<const double> capacity_mbps, const VideoConfig& config);
PlannerOutput algorithm2(const ContinuousRatePlan& relaxed_robust,
                         const std::vector<std::vector<int>>& robust_sets,
                         std::span<const double> capacity_mbps, const VideoConfig& config,
                         const TimelineContext& ctx);

// Level-by-level greedy over chunks: starting from an all-base plan, raises
// each chunk's robust set through the ladder, keeping an upgrade only if the
// total stall does not exceed the all-base stall. Tiles outside the robust
// set stay at the base layer unless quality_cap is set, in which case the
// residual headroom may raise them up to the cap as well.
PlannerOutput algorithm3(const std::vector<std::vector<int>>& robust_sets,
                         std::span<const double> capacity_mbps, const VideoConfig& config,
                         double lambda, std::optional<int> quality_cap = std::nullopt);
PlannerOutput algorithm3(const std::vector<std::vector<int>>& robust_sets,
                         std::span<const double> capacity_mbps, const VideoConfig& config,
                         double lambda, std::optional<int> quality_cap,
                         const TimelineContext& ctx);

// Fetches every tile of a chunk at the same quality, as high as the all-base
// stall allows, earlier chunks first.
PlannerOutput baseline_uniform(std::span<const double> capacity_mbps, const VideoConfig& config);
PlannerOutput baseline_uniform(std::span<const double> capacity_mbps, const VideoConfig& config,
                               const TimelineContext& ctx);

// Fetches only the most likely viewport of each chunk (ties: lowest anchor
// tile); all other tiles are skipped entirely.
PlannerOutput baseline_greedy_fov(const FovDistribution& dist,
                                  std::span<const double> capacity_mbps,
                                  const VideoConfig& config);
PlannerOutput baseline_greedy_fov(const FovDistribution& dist,
                                  std::span<const double> capacity_mbps,
                                  const VideoConfig& config, const TimelineContext& ctx);

enum class ObjectiveKind { kExpected, kRobust };

struct BruteForceResult {
  RatePlan plan;
  double objective = 0.0;
  std::uint64_t plans_evaluated = 0;
};

// Exhaustive exact argmax over all (m+1)^(N*K) discrete plans, ties broken
// by lexicographic plan order. `parallel` switches between the OpenMP
// enumeration and the serial reference; both return bit-identical results.
// Throws when the instance exceeds 1e7 plans.
BruteForceResult brute_force_optimal(ObjectiveKind kind, const FovDistribution* dist,
                                     const std::vector<std::vector<int>>* robust_sets,
                                     std::span<const double> capacity_mbps,
                                     const VideoConfig& config, const Utility& utility,
                                     const QoeWeights& weights, bool parallel = true);
BruteForceResult brute_force_optimal(ObjectiveKind kind, const FovDistribution* dist,
                                     const std::vector<std::vector<int>>* robust_sets,
                                     std::span<const double> capacity_mbps,
                                     const VideoConfig& config, const Utility& utility,
                                     const QoeWeights& weights, bool parallel,
                                     const TimelineContext& ctx);

}  // namespace tilestream

#endif  // TILESTREAM_PLANNERS_HPP_
