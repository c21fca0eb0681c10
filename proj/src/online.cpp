#include "tilestream/online.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "tilestream/rng.hpp"
#include "tilestream/timeline.hpp"

namespace tilestream {

namespace {

// Incremental realized timeline sharing the compute_timeline recursion but
// draining bits against the trace instead of a constant capacity.
class EventClock {
 public:
  EventClock(const ThroughputTrace& trace, const VideoConfig& config)
      : trace_(trace), config_(config) {
    finish_prev_ = 0.0;
    play_prev_ = config.startup_delay_s - config.chunk_duration_s;
  }

  void append(double size_mbits) {
    const int k = static_cast<int>(tl_.download_finish_s.size());
    const int dep = k - config_.max_buffer_chunks;
    double wait = 0.0;
    if (dep >= 0) {
      wait = std::max(0.0, tl_.play_time_s[static_cast<std::size_t>(dep)] - finish_prev_);
    }
    const double start = finish_prev_ + wait;
    const double finish = advance_time(trace_, start, size_mbits);
    const double play = std::max(play_prev_ + config_.chunk_duration_s, finish);
    tl_.wait_s.push_back(wait);
    tl_.download_start_s.push_back(start);
    tl_.download_finish_s.push_back(finish);
    tl_.play_time_s.push_back(play);
    finish_prev_ = finish;
    play_prev_ = play;
  }

  Timeline finalize() const {
    Timeline tl = tl_;
    const int count = static_cast<int>(tl.play_time_s.size());
    tl.total_stall_s =
        count == 0 ? 0.0
                   : tl.play_time_s.back() - (config_.startup_delay_s - config_.chunk_duration_s +
                                              count * config_.chunk_duration_s);
    return tl;
  }

  double finish_of(int chunk) const { return tl_.download_finish_s[static_cast<std::size_t>(chunk)]; }
  double play_of(int chunk) const { return tl_.play_time_s[static_cast<std::size_t>(chunk)]; }

 private:
  const ThroughputTrace& trace_;
  const VideoConfig& config_;
  Timeline tl_;
  double finish_prev_;
  double play_prev_;
};

const std::vector<std::string>& planner_names() {
  static const std::vector<std::string> names = {"alg1", "alg2", "alg3",
                                                 "baseline", "greedy", "oracle"};
  return names;
}

}  // namespace

void OnlineSettings::validate(const VideoConfig& config) const {
  if (window_chunks < 1) throw std::invalid_argument("window_chunks must be at least 1");
  if (!(capacity_derate >= 1.0)) throw std::invalid_argument("capacity_derate must be at least 1");
  if (warmup_chunks < 0 || warmup_chunks > config.num_chunks) {
    throw std::invalid_argument("warmup_chunks must lie in [0, K]");
  }
  const auto& names = planner_names();
  if (std::find(names.begin(), names.end(), planner) == names.end()) {
    throw std::invalid_argument("unknown planner: " + planner);
  }
}

Timeline event_simulate(const RatePlan& plan, const ThroughputTrace& trace,
                        const VideoConfig& config) {
  trace.validate();
  EventClock clock(trace, config);
  for (int k = 0; k < plan.num_chunks; ++k) {
    clock.append(chunk_size_mbits(plan, k, config));
  }
  return clock.finalize();
}

RunResult run_online(const OnlineSettings& settings, const FovDistribution& dist,
                     const ThroughputTrace& trace, const PredictionModel& model,
                     const VideoConfig& config, const Utility& utility,
                     const QoeWeights& weights, std::uint64_t seed) {
  config.validate();
  settings.validate(config);
  weights.validate();
  model.validate();
  trace.validate();
  const int K = config.num_chunks;
  if (dist.num_chunks() < K) throw std::invalid_argument("FoV distribution shorter than the video");

  Rng master(seed);
  const std::uint64_t fov_seed = master.next_u64();
  Rng bw_rng = master.fork(2);

  const FovDistribution full_dist = dist.slice(0, K);
  const FovTrace fov_trace = sample_trace(full_dist, fov_seed);
  const auto sets_full = robust_sets(full_dist, weights.alpha);

  // Frozen start-of-run predictions for the no-repredict variants.
  std::vector<double> frozen_caps;
  if (!settings.repredict_bandwidth) {
    frozen_caps = predicted_capacity(trace, model, 0.0, K, config, &bw_rng);
  }

  RunResult result;
  result.executed = RatePlan::uniform(config, 0);
  EventClock clock(trace, config);

  for (int c = 0; c < K; ++c) {
    if (c >= settings.warmup_chunks) {
      const double now = c == 0 ? 0.0 : clock.finish_of(c - 1);
      const int w = std::min(settings.window_chunks, K - c);

      std::vector<double> caps;
      if (settings.repredict_bandwidth) {
        caps = predicted_capacity(trace, model, now, w, config, &bw_rng);
      } else {
        caps.assign(frozen_caps.begin() + c, frozen_caps.begin() + c + w);
      }
      if (settings.capacity_derate != 1.0) {
        for (double& cap : caps) cap /= settings.capacity_derate;
      }

      TimelineContext ctx;
      ctx.clock_s = now;
      ctx.prev_play_s = c == 0 ? config.startup_delay_s - config.chunk_duration_s
                               : clock.play_of(c - 1);
      const int prior = std::min(config.max_buffer_chunks, c);
      for (int j = c - prior; j < c; ++j) ctx.prior_play_s.push_back(clock.play_of(j));

      VideoConfig sub = config;
      sub.num_chunks = w;
      const FovDistribution sub_dist = full_dist.slice(c, w);
      std::vector<std::vector<int>> sub_sets;
      if (settings.repredict_fov) {
        sub_sets = robust_sets(sub_dist, weights.alpha);
      } else {
        sub_sets.assign(sets_full.begin() + c, sets_full.begin() + c + w);
      }

      RatePlan window_plan;
      if (settings.planner == "alg1") {
        const RelaxedSolution sol = solve_relaxed_expected(sub_dist, caps, sub, utility,
                                                           weights, settings.solver, ctx);
        window_plan = algorithm1(sol.rates, sub_dist, caps, sub, utility, weights, ctx).plan;
      } else if (settings.planner == "alg2") {
        const RelaxedSolution sol = solve_relaxed_robust(sub_sets, caps, sub, utility,
                                                         weights.lambda, settings.solver, ctx);
        window_plan = algorithm2(sol.rates, sub_sets, caps, sub, ctx).plan;
      } else if (settings.planner == "alg3") {
        window_plan =
            algorithm3(sub_sets, caps, sub, weights.lambda, settings.quality_cap, ctx).plan;
      } else if (settings.planner == "baseline") {
        window_plan = baseline_uniform(caps, sub, ctx).plan;
      } else if (settings.planner == "greedy") {
        window_plan = baseline_greedy_fov(sub_dist, caps, sub, ctx).plan;
      } else {  // oracle
        window_plan = brute_force_optimal(ObjectiveKind::kExpected, &sub_dist, nullptr, caps,
                                          sub, utility, weights, true, ctx)
                          .plan;
      }

      DecisionRecord record;
      record.window_index = static_cast<int>(result.decisions.size());
      record.committed_chunk = c;
      record.clock_s = now;
      record.predicted_capacity_mbps = caps;
      record.committed_levels.resize(static_cast<std::size_t>(config.tiles_per_chunk()));
      for (int t = 0; t < config.tiles_per_chunk(); ++t) {
        result.executed.level(c, t) = window_plan.level(0, t);
        record.committed_levels[static_cast<std::size_t>(t)] = window_plan.level(0, t);
      }
      result.decisions.push_back(std::move(record));
    }
    clock.append(chunk_size_mbits(result.executed, c, config));
  }

  result.realized = clock.finalize();
  result.report = realized_metrics(result.executed, fov_trace, {}, config, &sets_full,
                                   &result.realized);
  return result;
}

std::string decision_log_jsonl(const RunResult& result) {
  std::ostringstream out;
  for (const auto& d : result.decisions) {
    nlohmann::json record{{"window_index", d.window_index},
                          {"committed_chunk", d.committed_chunk},
                          {"clock_s", d.clock_s},
                          {"predicted_capacity_mbps", d.predicted_capacity_mbps},
                          {"committed_levels", d.committed_levels}};
    out << record.dump() << "\n";
  }
  return out.str();
}

}  // namespace tilestream
