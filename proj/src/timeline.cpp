#include "tilestream/timeline.hpp"

#include <algorithm>
#include <stdexcept>

namespace tilestream {

namespace {

template <typename Plan>
double chunk_size_impl(const Plan& plan, int chunk, const VideoConfig& config) {
  if (chunk < 0 || chunk >= plan.num_chunks) throw std::out_of_range("chunk index out of range");
  double sum = 0.0;
  for (int i = 0; i < plan.num_tiles; ++i) {
    if constexpr (std::is_same_v<Plan, RatePlan>) {
      sum += plan.rate_mbps(config, chunk, i);
    } else {
      sum += plan.rate(chunk, i);
    }
  }
  return config.chunk_duration_s * sum;
}

}  // namespace

double chunk_size_mbits(const RatePlan& plan, int chunk, const VideoConfig& config) {
  return chunk_size_impl(plan, chunk, config);
}

double chunk_size_mbits(const ContinuousRatePlan& plan, int chunk, const VideoConfig& config) {
  return chunk_size_impl(plan, chunk, config);
}

std::vector<double> chunk_sizes_mbits(const RatePlan& plan, const VideoConfig& config) {
  std::vector<double> sizes(static_cast<std::size_t>(plan.num_chunks));
  for (int k = 0; k < plan.num_chunks; ++k) sizes[static_cast<std::size_t>(k)] = chunk_size_mbits(plan, k, config);
  return sizes;
}

std::vector<double> chunk_sizes_mbits(const ContinuousRatePlan& plan, const VideoConfig& config) {
  std::vector<double> sizes(static_cast<std::size_t>(plan.num_chunks));
  for (int k = 0; k < plan.num_chunks; ++k) sizes[static_cast<std::size_t>(k)] = chunk_size_mbits(plan, k, config);
  return sizes;
}

Timeline compute_timeline_from_sizes(std::span<const double> sizes_mbits,
                                     std::span<const double> capacity_mbps,
                                     const VideoConfig& config,
                                     const TimelineContext& ctx) {
  const int count = static_cast<int>(sizes_mbits.size());
  if (static_cast<int>(capacity_mbps.size()) < count) {
    throw std::invalid_argument("capacity list shorter than the plan");
  }
  for (int k = 0; k < count; ++k) {
    if (!(capacity_mbps[static_cast<std::size_t>(k)] > 0.0)) {
      throw std::invalid_argument("capacities must be positive");
    }
  }

  Timeline tl;
  tl.download_start_s.resize(static_cast<std::size_t>(count));
  tl.download_finish_s.resize(static_cast<std::size_t>(count));
  tl.wait_s.resize(static_cast<std::size_t>(count));
  tl.play_time_s.resize(static_cast<std::size_t>(count));
  if (count == 0) {
    tl.total_stall_s = 0.0;
    return tl;
  }

  const double L = config.chunk_duration_s;
  const int B = config.max_buffer_chunks;
  const int prior = static_cast<int>(ctx.prior_play_s.size());

  double finish_prev = ctx.clock_s;
  double play_prev = ctx.prev_play_s;
  for (int k = 0; k < count; ++k) {
    // Buffer cap: chunk k (0-based) may not start downloading before the
    // play time of the chunk B positions earlier.
    double wait = 0.0;
    const int dep = k - B;  // 0-based window index of the gating chunk
    if (dep >= 0) {
      wait = std::max(0.0, tl.play_time_s[static_cast<std::size_t>(dep)] - finish_prev);
    } else if (dep + prior >= 0) {
      wait = std::max(0.0, ctx.prior_play_s[static_cast<std::size_t>(dep + prior)] - finish_prev);
    }
    const double start = finish_prev + wait;
    const double finish = start + sizes_mbits[static_cast<std::size_t>(k)] / capacity_mbps[static_cast<std::size_t>(k)];
    const double play = std::max(play_prev + L, finish);

    tl.wait_s[static_cast<std::size_t>(k)] = wait;
    tl.download_start_s[static_cast<std::size_t>(k)] = start;
    tl.download_finish_s[static_cast<std::size_t>(k)] = finish;
    tl.play_time_s[static_cast<std::size_t>(k)] = play;
    finish_prev = finish;
    play_prev = play;
  }

  tl.total_stall_s = tl.play_time_s.back() - (ctx.prev_play_s + count * L);
  return tl;
}

Timeline compute_timeline(const RatePlan& plan, std::span<const double> capacity_mbps,
                          const VideoConfig& config, const TimelineContext& ctx) {
  const auto sizes = chunk_sizes_mbits(plan, config);
  return compute_timeline_from_sizes(sizes, capacity_mbps, config, ctx);
}

Timeline compute_timeline(const RatePlan& plan, std::span<const double> capacity_mbps,
                          const VideoConfig& config) {
  return compute_timeline(plan, capacity_mbps, config, TimelineContext::cold_start(config));
}

Timeline compute_timeline(const ContinuousRatePlan& plan, std::span<const double> capacity_mbps,
                          const VideoConfig& config, const TimelineContext& ctx) {
  const auto sizes = chunk_sizes_mbits(plan, config);
  return compute_timeline_from_sizes(sizes, capacity_mbps, config, ctx);
}

Timeline compute_timeline(const ContinuousRatePlan& plan, std::span<const double> capacity_mbps,
                          const VideoConfig& config) {
  return compute_timeline(plan, capacity_mbps, config, TimelineContext::cold_start(config));
}

double stall_time(const Timeline& timeline) { return timeline.total_stall_s; }

double stall_from_sizes(std::span<const double> sizes_mbits,
                        std::span<const double> capacity_mbps, const VideoConfig& config,
                        const TimelineContext& ctx, std::vector<double>& play_scratch) {
  const int count = static_cast<int>(sizes_mbits.size());
  if (count == 0) return 0.0;
  const double L = config.chunk_duration_s;
  const int B = config.max_buffer_chunks;
  const int prior = static_cast<int>(ctx.prior_play_s.size());
  play_scratch.resize(static_cast<std::size_t>(count));

  double finish_prev = ctx.clock_s;
  double play_prev = ctx.prev_play_s;
  for (int k = 0; k < count; ++k) {
    double start = finish_prev;
    const int dep = k - B;
    if (dep >= 0) {
      start = std::max(start, play_scratch[static_cast<std::size_t>(dep)]);
    } else if (dep + prior >= 0) {
      start = std::max(start, ctx.prior_play_s[static_cast<std::size_t>(dep + prior)]);
    }
    const double finish =
        start + sizes_mbits[static_cast<std::size_t>(k)] / capacity_mbps[static_cast<std::size_t>(k)];
    const double play = std::max(play_prev + L, finish);
    play_scratch[static_cast<std::size_t>(k)] = play;
    finish_prev = finish;
    play_prev = play;
  }
  return play_prev - (ctx.prev_play_s + count * L);
}

}  // namespace tilestream
