#include "tilestream/qoe.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace tilestream {

void QoeWeights::validate() const {
  if (gamma < 0.0) throw std::invalid_argument("gamma must be nonnegative");
  if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
  if (!(alpha > 0.0) || alpha > 1.0) throw std::invalid_argument("alpha must lie in (0, 1]");
}

double expected_chunk_qoe(std::span<const double> tile_rates_mbps,
                          const FovDistribution& dist, int chunk,
                          const Utility& utility, double gamma) {
  if (chunk < 0 || chunk >= dist.num_chunks()) throw std::out_of_range("chunk index out of range");
  double total = 0.0;
  for (const auto& entry : dist.chunks[static_cast<std::size_t>(chunk)]) {
    double min_u = std::numeric_limits<double>::infinity();
    double sum_u = 0.0;
    for (int t : entry.viewport.tiles) {
      const double u = utility(tile_rates_mbps[static_cast<std::size_t>(t)]);
      min_u = std::min(min_u, u);
      sum_u += u;
    }
    total += entry.probability * (min_u + gamma * sum_u);
  }
  return total;
}

double expected_qoe_sum(const ContinuousRatePlan& rates, const FovDistribution& dist,
                        const Utility& utility, double gamma) {
  double total = 0.0;
  for (int k = 0; k < rates.num_chunks; ++k) {
    const std::span<const double> row(rates.rates_mbps.data() +
                                          static_cast<std::size_t>(k) * rates.num_tiles,
                                      static_cast<std::size_t>(rates.num_tiles));
    total += expected_chunk_qoe(row, dist, k, utility, gamma);
  }
  return total;
}

double robust_qoe_sum(const ContinuousRatePlan& rates,
                      const std::vector<std::vector<int>>& robust_sets,
                      const Utility& utility) {
  if (static_cast<int>(robust_sets.size()) < rates.num_chunks) {
    throw std::invalid_argument("robust set list shorter than the plan");
  }
  double total = 0.0;
  for (int k = 0; k < rates.num_chunks; ++k) {
    const auto& set = robust_sets[static_cast<std::size_t>(k)];
    if (set.empty()) throw std::invalid_argument("robust set is empty");
    double min_rate = std::numeric_limits<double>::infinity();
    for (int t : set) min_rate = std::min(min_rate, rates.rate(k, t));
    total += utility(min_rate);
  }
  return total;
}

double objective_expected(const ContinuousRatePlan& rates, const FovDistribution& dist,
                          std::span<const double> capacity_mbps, const VideoConfig& config,
                          const Utility& utility, const QoeWeights& weights,
                          const TimelineContext& ctx) {
  const Timeline tl = compute_timeline(rates, capacity_mbps, config, ctx);
  return expected_qoe_sum(rates, dist, utility, weights.gamma) - weights.lambda * stall_time(tl);
}

double objective_expected(const ContinuousRatePlan& rates, const FovDistribution& dist,
                          std::span<const double> capacity_mbps, const VideoConfig& config,
                          const Utility& utility, const QoeWeights& weights) {
  return objective_expected(rates, dist, capacity_mbps, config, utility, weights,
                            TimelineContext::cold_start(config));
}

double objective_expected(const RatePlan& plan, const FovDistribution& dist,
                          std::span<const double> capacity_mbps, const VideoConfig& config,
                          const Utility& utility, const QoeWeights& weights) {
  return objective_expected(to_continuous(plan, config), dist, capacity_mbps, config,
                            utility, weights);
}

double objective_robust(const ContinuousRatePlan& rates,
                        const std::vector<std::vector<int>>& robust_sets,
                        std::span<const double> capacity_mbps, const VideoConfig& config,
                        const Utility& utility, double lambda, const TimelineContext& ctx) {
  const Timeline tl = compute_timeline(rates, capacity_mbps, config, ctx);
  return robust_qoe_sum(rates, robust_sets, utility) - lambda * stall_time(tl);
}

double objective_robust(const ContinuousRatePlan& rates,
                        const std::vector<std::vector<int>>& robust_sets,
                        std::span<const double> capacity_mbps, const VideoConfig& config,
                        const Utility& utility, double lambda) {
  return objective_robust(rates, robust_sets, capacity_mbps, config, utility, lambda,
                          TimelineContext::cold_start(config));
}

double objective_robust(const RatePlan& plan, const std::vector<std::vector<int>>& robust_sets,
                        std::span<const double> capacity_mbps, const VideoConfig& config,
                        const Utility& utility, double lambda) {
  return objective_robust(to_continuous(plan, config), robust_sets, capacity_mbps, config,
                          utility, lambda);
}

RealizedReport realized_metrics(const RatePlan& plan, const FovTrace& fov_trace,
                                std::span<const double> capacity_mbps,
                                const VideoConfig& config,
                                const std::vector<std::vector<int>>* robust_sets,
                                const Timeline* realized) {
  if (static_cast<int>(fov_trace.chunks.size()) != plan.num_chunks) {
    throw std::invalid_argument("FoV trace length does not match the plan");
  }
  RealizedReport report;
  report.histogram.assign(static_cast<std::size_t>(config.num_levels()) + 1, 0);

  double fov_rate_sum = 0.0;
  double min_fov_sum = 0.0;
  for (int k = 0; k < plan.num_chunks; ++k) {
    const auto& fov = fov_trace.chunks[static_cast<std::size_t>(k)];
    double sum = 0.0;
    double min_rate = std::numeric_limits<double>::infinity();
    for (int t : fov.tiles) {
      const double r = plan.rate_mbps(config, k, t);
      sum += r;
      min_rate = std::min(min_rate, r);
    }
    fov_rate_sum += sum / static_cast<double>(fov.tiles.size());
    min_fov_sum += min_rate;

    for (int i = 0; i < plan.num_tiles; ++i) {
      const int level = plan.level(k, i);
      ++report.histogram[static_cast<std::size_t>(level == kUnfetched ? 0 : level + 1)];
    }
    if (robust_sets != nullptr) {
      const auto& set = (*robust_sets)[static_cast<std::size_t>(k)];
      double guarded = std::numeric_limits<double>::infinity();
      for (int t : set) guarded = std::min(guarded, plan.rate_mbps(config, k, t));
      report.per_chunk_guaranteed_mbps.push_back(guarded);
    }
  }
  report.mean_fov_rate_mbps = fov_rate_sum / plan.num_chunks;
  report.mean_min_fov_rate_mbps = min_fov_sum / plan.num_chunks;
  if (!report.per_chunk_guaranteed_mbps.empty()) {
    double sum = 0.0;
    for (double g : report.per_chunk_guaranteed_mbps) sum += g;
    report.guaranteed_rate_mbps = sum / static_cast<double>(report.per_chunk_guaranteed_mbps.size());
  }
  if (realized != nullptr) {
    report.stall_s = realized->total_stall_s;
  } else {
    report.stall_s = stall_time(compute_timeline(plan, capacity_mbps, config));
  }
  return report;
}

std::string RealizedReport::to_json() const {
  nlohmann::json doc{{"mean_fov_rate_mbps", mean_fov_rate_mbps},
                     {"mean_min_fov_rate_mbps", mean_min_fov_rate_mbps},
                     {"guaranteed_rate_mbps", guaranteed_rate_mbps},
                     {"stall_s", stall_s},
                     {"per_chunk_guaranteed_mbps", per_chunk_guaranteed_mbps},
                     {"histogram", histogram}};
  return doc.dump();
}

}  // namespace tilestream
