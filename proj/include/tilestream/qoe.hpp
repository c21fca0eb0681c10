#ifndef TILESTREAM_QOE_HPP_
#define TILESTREAM_QOE_HPP_

#include <span>
#include <string>
#include <vector>

#include "tilestream/fov.hpp"
#include "tilestream/timeline.hpp"
#include "tilestream/types.hpp"
#include "tilestream/utility.hpp"

namespace tilestream {

struct QoeWeights {
  double gamma = 0.0;   // weight on the summed tile utility in the FoV
  double lambda = 0.0;  // stall weight
  double alpha = 1.0;   // robustness probability

  void validate() const;
};

// Expected per-chunk QoE: the exact expectation over the chunk's viewport
// distribution of min-tile utility plus gamma times the summed tile utility.
double expected_chunk_qoe(std::span<const double> tile_rates_mbps,
                          const FovDistribution& dist, int chunk,
                          const Utility& utility, double gamma);

// Sum of expected chunk QoE over all chunks (the stall-free part of the
// expected objective).
double expected_qoe_sum(const ContinuousRatePlan& rates, const FovDistribution& dist,
                        const Utility& utility, double gamma);

// Sum over chunks of U(min rate over the chunk's robust set).
double robust_qoe_sum(const ContinuousRatePlan& rates,
                      const std::vector<std::vector<int>>& robust_sets,
                      const Utility& utility);

// Full expected objective: QoE sum minus lambda times the stall of the plan
// under the given capacities.
double objective_expected(const RatePlan& plan, const FovDistribution& dist,
                          std::span<const double> capacity_mbps, const VideoConfig& config,
                          const Utility& utility, const QoeWeights& weights);
double objective_expected(const ContinuousRatePlan& rates, const FovDistribution& dist,
                          std::span<const double> capacity_mbps, const VideoConfig& config,
                          const Utility& utility, const QoeWeights& weights);
double objective_expected(const ContinuousRatePlan& rates, const FovDistribution& dist,
                          std::span<const double> capacity_mbps, const VideoConfig& config,
                          const Utility& utility, const QoeWeights& weights,
                          const TimelineContext& ctx);

// Full robust objective: sum of U(min over the robust set) minus
// lambda * stall.
double objective_robust(const RatePlan& plan, const std::vector<std::vector<int>>& robust_sets,
                        std::span<const double> capacity_mbps, const VideoConfig& config,
                        const Utility& utility, double lambda);
double objective_robust(const ContinuousRatePlan& rates,
                        const std::vector<std::vector<int>>& robust_sets,
                        std::span<const double> capacity_mbps, const VideoConfig& config,
                        const Utility& utility, double lambda);
double objective_robust(const ContinuousRatePlan& rates,
                        const std::vector<std::vector<int>>& robust_sets,
                        std::span<const double> capacity_mbps, const VideoConfig& config,
                        const Utility& utility, double lambda, const TimelineContext& ctx);

// Outcome of executing a plan against a realized FoV trace.
struct RealizedReport {
  double mean_fov_rate_mbps = 0.0;      // mean tile rate inside the realized FoV
  double mean_min_fov_rate_mbps = 0.0;  // mean over chunks of the min FoV tile rate
  double guaranteed_rate_mbps = 0.0;    // mean over chunks of min rate over A_{alpha,k}
  double stall_s = 0.0;
  std::vector<double> per_chunk_guaranteed_mbps;
  // Downloaded-tile histogram: bin 0 counts unfetched tiles, bin j+1 counts
  // tiles at ladder level j. Sums to N*K.
  std::vector<long long> histogram;

  std::string to_json() const;
};

// robust_sets may be null when no guaranteed-rate accounting is wanted;
// realized may supply an externally simulated timeline (otherwise one is
// computed from the capacities).
RealizedReport realized_metrics(const RatePlan& plan, const FovTrace& fov_trace,
                                std::span<const double> capacity_mbps,
                                const VideoConfig& config,
                                const std::vector<std::vector<int>>* robust_sets = nullptr,
                                const Timeline* realized = nullptr);

}  // namespace tilestream

#endif  // TILESTREAM_QOE_HPP_
