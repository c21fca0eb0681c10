#include "tilestream/planners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tilestream {

namespace {

double ladder_rate(const VideoConfig& config, int level) {
  return config.rate_levels_mbps[static_cast<std::size_t>(level)];
}

double plan_stall(const RatePlan& plan, std::span<const double> caps,
                  const VideoConfig& config, const TimelineContext& ctx) {
  const auto sizes = chunk_sizes_mbits(plan, config);
  return compute_timeline_from_sizes(sizes, caps, config, ctx).total_stall_s;
}

double min_rate_over(const RatePlan& plan, const VideoConfig& config, int chunk,
                     const std::vector<int>& tiles) {
  double m = std::numeric_limits<double>::infinity();
  for (int t : tiles) m = std::min(m, plan.rate_mbps(config, chunk, t));
  return m;
}

}  // namespace

int down_level(double rate_mbps, const VideoConfig& config) {
  const auto& ladder = config.rate_levels_mbps;
  auto it = std::upper_bound(ladder.begin(), ladder.end(), rate_mbps);
  if (it == ladder.begin()) return 0;  // below the box; clamp to the base layer
  return static_cast<int>(std::distance(ladder.begin(), it)) - 1;
}

int up_level(double rate_mbps, const VideoConfig& config) {
  const auto& ladder = config.rate_levels_mbps;
  auto it = std::lower_bound(ladder.begin(), ladder.end(), rate_mbps);
  if (it == ladder.end()) return config.top_level();
  return static_cast<int>(std::distance(ladder.begin(), it));
}

RatePlan down_quantize(const ContinuousRatePlan& relaxed, const VideoConfig& config) {
  RatePlan plan;
  plan.num_chunks = relaxed.num_chunks;
  plan.num_tiles = relaxed.num_tiles;
  plan.levels.resize(relaxed.rates_mbps.size());
  for (std::size_t i = 0; i < relaxed.rates_mbps.size(); ++i) {
    plan.levels[i] = down_level(relaxed.rates_mbps[i], config);
  }
  return plan;
}

PlannerOutput algorithm1(const ContinuousRatePlan& relaxed, const FovDistribution& dist,
                         std::span<const double> capacity_mbps, const VideoConfig& config,
                         const Utility& utility, const QoeWeights& weights,
                         const TimelineContext& ctx) {
  const int chunks = relaxed.num_chunks;
  const int tiles = relaxed.num_tiles;
  const double L = config.chunk_duration_s;
  const int l = config.viewport_tiles();

  PlannerOutput out;
  out.plan = down_quantize(relaxed, config);
  out.residual_budget_mbits.assign(static_cast<std::size_t>(chunks), 0.0);
  out.diagnostics.upgrades_per_chunk.assign(static_cast<std::size_t>(chunks), 0);

  // Bits saved per chunk by down-quantization.
  std::vector<double> saved(static_cast<std::size_t>(chunks), 0.0);
  double total_saved = 0.0;
  for (int k = 0; k < chunks; ++k) {
    double sum = 0.0;
    for (int i = 0; i < tiles; ++i) {
      sum += relaxed.rate(k, i) - out.plan.rate_mbps(config, k, i);
    }
    saved[static_cast<std::size_t>(k)] = L * sum;
    total_saved += L * sum;
  }
  if (total_saved == 0.0) {
    // The relaxed optimum was already on the ladder; it is the optimum here too.
    out.diagnostics.early_exit = true;
    return out;
  }

  const double relaxed_stall =
      compute_timeline(relaxed, capacity_mbps, config, ctx).total_stall_s;
  auto objective_of = [&](const RatePlan& plan) {
    return expected_qoe_sum(to_continuous(plan, config), dist, utility, weights.gamma) -
           weights.lambda * plan_stall(plan, capacity_mbps, config, ctx);
  };
  double current_objective = objective_of(out.plan);

  double budget = 0.0;
  for (int k = 0; k < chunks; ++k) {
    budget += saved[static_cast<std::size_t>(k)];
    std::vector<char> upgraded(static_cast<std::size_t>(tiles), 0);
    for (int q = l; q <= tiles; ++q) {
      const auto target = most_likely_set(dist, k, q, config);
      double cost = 0.0;
      std::vector<int> to_raise;
      for (int t : target) {
        if (upgraded[static_cast<std::size_t>(t)]) continue;
        const int up = up_level(relaxed.rate(k, t), config);
        if (up > out.plan.level(k, t)) {
          cost += L * (ladder_rate(config, up) - out.plan.rate_mbps(config, k, t));
          to_raise.push_back(t);
        }
      }
      if (cost > budget + 1e-9) break;  // 1e-9 Mbit absorbs quantization dust

      if (!to_raise.empty()) {
        RatePlan tentative = out.plan;
        for (int t : to_raise) tentative.level(k, t) = up_level(relaxed.rate(k, t), config);
        const double new_stall = plan_stall(tentative, capacity_mbps, config, ctx);
        const double new_objective = objective_of(tentative);
        if (new_stall > relaxed_stall || new_objective < current_objective) break;
        out.plan = std::move(tentative);
        current_objective = new_objective;
        budget = std::max(0.0, budget - cost);
        out.diagnostics.upgrades_per_chunk[static_cast<std::size_t>(k)] +=
            static_cast<int>(to_raise.size());
      }
      for (int t : target) upgraded[static_cast<std::size_t>(t)] = 1;
    }
    out.residual_budget_mbits[static_cast<std::size_t>(k)] = budget;
  }
  return out;
}

PlannerOutput algorithm1(const ContinuousRatePlan& relaxed, const FovDistribution& dist,
                         std::span<const double> capacity_mbps, const VideoConfig& config,
                         const Utility& utility, const QoeWeights& weights) {
  return algorithm1(relaxed, dist, capacity_mbps, config, utility, weights,
                    TimelineContext::cold_start(config));
}

PlannerOutput algorithm2(const ContinuousRatePlan& relaxed_robust,
                         const std::vector<std::vector<int>>& robust_sets,
                         std::span<const double> capacity_mbps, const VideoConfig& config,
                         const TimelineContext& ctx) {
  const int chunks = relaxed_robust.num_chunks;
  const int tiles = relaxed_robust.num_tiles;
  const double L = config.chunk_duration_s;
  if (static_cast<int>(robust_sets.size()) < chunks) {
    throw std::invalid_argument("robust set list shorter than the plan");
  }

  PlannerOutput out;
  out.plan = down_quantize(relaxed_robust, config);
  out.residual_budget_mbits.assign(static_cast<std::size_t>(chunks), 0.0);
  out.gamma_mbps.assign(static_cast<std::size_t>(chunks), 0.0);
  out.diagnostics.upgrades_per_chunk.assign(static_cast<std::size_t>(chunks), 0);

  std::vector<double> saved(static_cast<std::size_t>(chunks), 0.0);
  double total_saved = 0.0;
  for (int k = 0; k < chunks; ++k) {
    double sum = 0.0;
    for (int i = 0; i < tiles; ++i) {
      sum += relaxed_robust.rate(k, i) - out.plan.rate_mbps(config, k, i);
    }
    saved[static_cast<std::size_t>(k)] = L * sum;
    total_saved += L * sum;
  }

  const double relaxed_stall =
      compute_timeline(relaxed_robust, capacity_mbps, config, ctx).total_stall_s;

  double budget = 0.0;
  const bool skip_upgrades = total_saved == 0.0;
  out.diagnostics.early_exit = skip_upgrades;
  for (int k = 0; k < chunks; ++k) {
    budget += saved[static_cast<std::size_t>(k)];
    if (!skip_upgrades) {
      const auto& set = robust_sets[static_cast<std::size_t>(k)];
      double cost = 0.0;
      std::vector<int> to_raise;
      for (int t : set) {
        const int up = up_level(relaxed_robust.rate(k, t), config);
        if (up > out.plan.level(k, t)) {
          cost += L * (ladder_rate(config, up) - out.plan.rate_mbps(config, k, t));
          to_raise.push_back(t);
        }
      }
      // All-or-nothing: the whole set moves one level or the chunk is skipped.
      if (!to_raise.empty() && cost <= budget + 1e-9) {
        RatePlan tentative = out.plan;
        for (int t : to_raise) tentative.level(k, t) = up_level(relaxed_robust.rate(k, t), config);
        if (plan_stall(tentative, capacity_mbps, config, ctx) <= relaxed_stall) {
          out.plan = std::move(tentative);
          budget = std::max(0.0, budget - cost);
          out.diagnostics.upgrades_per_chunk[static_cast<std::size_t>(k)] =
              static_cast<int>(to_raise.size());
        }
      }
    }
    out.residual_budget_mbits[static_cast<std::size_t>(k)] = budget;
    out.gamma_mbps[static_cast<std::size_t>(k)] =
        min_rate_over(out.plan, config, k, robust_sets[static_cast<std::size_t>(k)]);
  }
  return out;
}

PlannerOutput algorithm2(const ContinuousRatePlan& relaxed_robust,
                         const std::vector<std::vector<int>>& robust_sets,
                         std::span<const double> capacity_mbps, const VideoConfig& config) {
  return algorithm2(relaxed_robust, robust_sets, capacity_mbps, config,
                    TimelineContext::cold_start(config));
}

namespace {

// Shared greedy fill: per chunk in order, raise the chunk's target tiles
// through the ladder, keeping each level only if the total stall stays at or
// below the all-base stall. Early exit when the base plan already stalls.
PlannerOutput greedy_level_fill(const std::vector<std::vector<int>>& targets,
                                RatePlan base, std::span<const double> caps,
                                const VideoConfig& config, const TimelineContext& ctx,
                                std::optional<int> level_cap,
                                const std::vector<std::vector<int>>* gamma_sets) {
  const int chunks = base.num_chunks;
  PlannerOutput out;
  out.plan = std::move(base);
  out.residual_budget_mbits.assign(static_cast<std::size_t>(chunks), 0.0);
  out.diagnostics.upgrades_per_chunk.assign(static_cast<std::size_t>(chunks), 0);

  // An upgrade is kept only if the total stall stays at the all-base stall;
  // when capacity is too low for any upgrade this naturally returns the
  // all-base plan.
  const double base_stall = plan_stall(out.plan, caps, config, ctx);
  const int max_level = level_cap.has_value()
                            ? std::min(*level_cap, config.top_level())
                            : config.top_level();
  int accepted = 0;
  for (int k = 0; k < chunks; ++k) {
    for (int j = 1; j <= max_level; ++j) {
      RatePlan tentative = out.plan;
      for (int t : targets[static_cast<std::size_t>(k)]) tentative.level(k, t) = j;
      if (plan_stall(tentative, caps, config, ctx) <= base_stall) {
        out.plan = std::move(tentative);
        out.diagnostics.upgrades_per_chunk[static_cast<std::size_t>(k)] = j;
        ++accepted;
      }
    }
  }
  out.diagnostics.early_exit = base_stall > 0.0 && accepted == 0;
  if (gamma_sets != nullptr) {
    out.gamma_mbps.resize(static_cast<std::size_t>(chunks));
    for (int k = 0; k < chunks; ++k) {
      out.gamma_mbps[static_cast<std::size_t>(k)] =
          min_rate_over(out.plan, config, k, (*gamma_sets)[static_cast<std::size_t>(k)]);
    }
  }
  return out;
}

}  // namespace

PlannerOutput algorithm3(const std::vector<std::vector<int>>& robust_sets,
                         std::span<const double> capacity_mbps, const VideoConfig& config,
                         double lambda, std::optional<int> quality_cap,
                         const TimelineContext& ctx) {
  (void)lambda;  // decisions reduce to the stall test once lambda exceeds the utility budget
  const int chunks = static_cast<int>(robust_sets.size());
  for (const auto& set : robust_sets) {
    if (set.empty()) throw std::invalid_argument("robust set is empty");
  }
  VideoConfig sub = config;
  sub.num_chunks = chunks;
  RatePlan base = RatePlan::uniform(sub, 0);

  PlannerOutput out =
      greedy_level_fill(robust_sets, std::move(base), capacity_mbps, sub, ctx, quality_cap,
                        &robust_sets);
  if (quality_cap.has_value() && !out.diagnostics.early_exit) {
    // Residual headroom may raise the remaining tiles up to the cap too.
    const double base_stall = 0.0;
    const int cap = std::min(*quality_cap, sub.top_level());
    for (int k = 0; k < chunks; ++k) {
      std::vector<char> in_set(static_cast<std::size_t>(sub.tiles_per_chunk()), 0);
      for (int t : robust_sets[static_cast<std::size_t>(k)]) in_set[static_cast<std::size_t>(t)] = 1;
      for (int j = 1; j <= cap; ++j) {
        RatePlan tentative = out.plan;
        for (int t = 0; t < sub.tiles_per_chunk(); ++t) {
          if (!in_set[static_cast<std::size_t>(t)] && tentative.level(k, t) < j) {
            tentative.level(k, t) = j;
          }
        }
        if (plan_stall(tentative, capacity_mbps, sub, ctx) <= base_stall) {
          out.plan = std::move(tentative);
        }
      }
      out.gamma_mbps[static_cast<std::size_t>(k)] =
          min_rate_over(out.plan, sub, k, robust_sets[static_cast<std::size_t>(k)]);
    }
  }
  return out;
}

PlannerOutput algorithm3(const std::vector<std::vector<int>>& robust_sets,
                         std::span<const double> capacity_mbps, const VideoConfig& config,
                         double lambda, std::optional<int> quality_cap) {
  return algorithm3(robust_sets, capacity_mbps, config, lambda, quality_cap,
                    TimelineContext::cold_start(config));
}

PlannerOutput baseline_uniform(std::span<const double> capacity_mbps, const VideoConfig& config,
                               const TimelineContext& ctx) {
  std::vector<int> all(static_cast<std::size_t>(config.tiles_per_chunk()));
  for (int t = 0; t < config.tiles_per_chunk(); ++t) all[static_cast<std::size_t>(t)] = t;
  std::vector<std::vector<int>> targets(static_cast<std::size_t>(config.num_chunks), all);
  return greedy_level_fill(targets, RatePlan::uniform(config, 0), capacity_mbps, config, ctx,
                           std::nullopt, nullptr);
}

PlannerOutput baseline_uniform(std::span<const double> capacity_mbps, const VideoConfig& config) {
  return baseline_uniform(capacity_mbps, config, TimelineContext::cold_start(config));
}

PlannerOutput baseline_greedy_fov(const FovDistribution& dist,
                                  std::span<const double> capacity_mbps,
                                  const VideoConfig& config, const TimelineContext& ctx) {
  const int chunks = dist.num_chunks();
  VideoConfig sub = config;
  sub.num_chunks = chunks;

  RatePlan base;
  base.num_chunks = chunks;
  base.num_tiles = sub.tiles_per_chunk();
  base.levels.assign(static_cast<std::size_t>(chunks) * base.num_tiles, kUnfetched);

  std::vector<std::vector<int>> targets(static_cast<std::size_t>(chunks));
  for (int k = 0; k < chunks; ++k) {
    const FovDistribution::Entry* best = nullptr;
    for (const auto& entry : dist.chunks[static_cast<std::size_t>(k)]) {
      if (best == nullptr || entry.probability > best->probability ||
          (entry.probability == best->probability &&
           entry.viewport.top_left_tile < best->viewport.top_left_tile)) {
        best = &entry;
      }
    }
    targets[static_cast<std::size_t>(k)] = best->viewport.tiles;
    for (int t : best->viewport.tiles) base.level(k, t) = 0;
  }
  return greedy_level_fill(targets, std::move(base), capacity_mbps, sub, ctx, std::nullopt,
                           nullptr);
}

PlannerOutput baseline_greedy_fov(const FovDistribution& dist,
                                  std::span<const double> capacity_mbps,
                                  const VideoConfig& config) {
  return baseline_greedy_fov(dist, capacity_mbps, config, TimelineContext::cold_start(config));
}

namespace {

struct BruteState {
  double best = -std::numeric_limits<double>::infinity();
  std::uint64_t best_idx = 0;
  bool any = false;
};

void merge_candidate(BruteState& state, double value, std::uint64_t idx) {
  if (!state.any || value > state.best || (value == state.best && idx < state.best_idx)) {
    state.any = true;
    state.best = value;
    state.best_idx = idx;
  }
}

}  // namespace

BruteForceResult brute_force_optimal(ObjectiveKind kind, const FovDistribution* dist,
                                     const std::vector<std::vector<int>>* robust_sets,
                                     std::span<const double> capacity_mbps,
                                     const VideoConfig& config, const Utility& utility,
                                     const QoeWeights& weights, bool parallel,
                                     const TimelineContext& ctx) {
  const int chunks = kind == ObjectiveKind::kExpected
                         ? (dist != nullptr ? dist->num_chunks() : 0)
                         : (robust_sets != nullptr ? static_cast<int>(robust_sets->size()) : 0);
  if (kind == ObjectiveKind::kExpected && dist == nullptr) {
    throw std::invalid_argument("expected objective requires a FoV distribution");
  }
  if (kind == ObjectiveKind::kRobust && robust_sets == nullptr) {
    throw std::invalid_argument("robust objective requires robust sets");
  }
  const int tiles = config.tiles_per_chunk();
  const int digits = chunks * tiles;
  const int levels = config.num_levels();

  double total_d = 1.0;
  for (int p = 0; p < digits; ++p) total_d *= levels;
  if (total_d > 1e7) throw std::invalid_argument("instance too large for exhaustive enumeration");
  const std::uint64_t total = static_cast<std::uint64_t>(total_d);

  // Digit p (chunk-major, tile-minor) is most significant at p = 0 so that
  // ascending indices enumerate plans in lexicographic order.
  std::vector<std::uint64_t> place(static_cast<std::size_t>(digits), 1);
  for (int p = digits - 2; p >= 0; --p) {
    place[static_cast<std::size_t>(p)] = place[static_cast<std::size_t>(p + 1)] *
                                         static_cast<std::uint64_t>(levels);
  }

  VideoConfig sub = config;
  sub.num_chunks = chunks;
  const double L = sub.chunk_duration_s;

  auto evaluate = [&](std::uint64_t idx, std::vector<int>& level_buf,
                      std::vector<double>& size_buf, std::vector<double>& rate_buf,
                      std::vector<double>& play_buf) {
    std::uint64_t rem = idx;
    for (int p = 0; p < digits; ++p) {
      const std::uint64_t digit = rem / place[static_cast<std::size_t>(p)];
      rem -= digit * place[static_cast<std::size_t>(p)];
      level_buf[static_cast<std::size_t>(p)] = static_cast<int>(digit);
    }
    for (int k = 0; k < chunks; ++k) {
      double sum = 0.0;
      for (int t = 0; t < tiles; ++t) {
        const double r = config.rate_levels_mbps[static_cast<std::size_t>(
            level_buf[static_cast<std::size_t>(k * tiles + t)])];
        rate_buf[static_cast<std::size_t>(k * tiles + t)] = r;
        sum += r;
      }
      size_buf[static_cast<std::size_t>(k)] = L * sum;
    }
    const double stall = stall_from_sizes(size_buf, capacity_mbps, sub, ctx, play_buf);
    double qoe = 0.0;
    if (kind == ObjectiveKind::kExpected) {
      for (int k = 0; k < chunks; ++k) {
        const std::span<const double> row(rate_buf.data() + static_cast<std::size_t>(k) * tiles,
                                          static_cast<std::size_t>(tiles));
        qoe += expected_chunk_qoe(row, *dist, k, utility, weights.gamma);
      }
    } else {
      for (int k = 0; k < chunks; ++k) {
        double min_r = std::numeric_limits<double>::infinity();
        for (int t : (*robust_sets)[static_cast<std::size_t>(k)]) {
          min_r = std::min(min_r, rate_buf[static_cast<std::size_t>(k * tiles + t)]);
        }
        qoe += utility(min_r);
      }
    }
    return qoe - weights.lambda * stall;
  };

  BruteState best;
  if (parallel) {
#ifdef _OPENMP
#pragma omp parallel
    {
      BruteState local;
      std::vector<int> level_buf(static_cast<std::size_t>(digits));
      std::vector<double> size_buf(static_cast<std::size_t>(chunks));
      std::vector<double> rate_buf(static_cast<std::size_t>(digits));
      std::vector<double> play_buf;
#pragma omp for schedule(static)
      for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(total); ++idx) {
        merge_candidate(local, evaluate(static_cast<std::uint64_t>(idx), level_buf, size_buf,
                                        rate_buf, play_buf),
                        static_cast<std::uint64_t>(idx));
      }
#pragma omp critical
      {
        if (local.any) merge_candidate(best, local.best, local.best_idx);
      }
    }
#else
    parallel = false;
#endif
  }
  if (!parallel) {
    std::vector<int> level_buf(static_cast<std::size_t>(digits));
    std::vector<double> size_buf(static_cast<std::size_t>(chunks));
    std::vector<double> rate_buf(static_cast<std::size_t>(digits));
    std::vector<double> play_buf;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      merge_candidate(best, evaluate(idx, level_buf, size_buf, rate_buf, play_buf), idx);
    }
  }

  BruteForceResult result;
  result.plans_evaluated = total;
  result.objective = best.best;
  result.plan.num_chunks = chunks;
  result.plan.num_tiles = tiles;
  result.plan.levels.resize(static_cast<std::size_t>(digits));
  std::uint64_t rem = best.best_idx;
  for (int p = 0; p < digits; ++p) {
    const std::uint64_t digit = rem / place[static_cast<std::size_t>(p)];
    rem -= digit * place[static_cast<std::size_t>(p)];
    result.plan.levels[static_cast<std::size_t>(p)] = static_cast<int>(digit);
  }
  return result;
}

BruteForceResult brute_force_optimal(ObjectiveKind kind, const FovDistribution* dist,
                                     const std::vector<std::vector<int>>* robust_sets,
                                     std::span<const double> capacity_mbps,
                                     const VideoConfig& config, const Utility& utility,
                                     const QoeWeights& weights, bool parallel) {
  return brute_force_optimal(kind, dist, robust_sets, capacity_mbps, config, utility, weights,
                             parallel, TimelineContext::cold_start(config));
}

}  // namespace tilestream
