#ifndef TILESTREAM_TIMELINE_HPP_
#define TILESTREAM_TIMELINE_HPP_

#include <span>
#include <vector>

#include "tilestream/types.hpp"

namespace tilestream {

// Anchors a (possibly windowed) timeline computation to an ongoing session.
// A cold start models the beginning of playback: downloads begin at time 0
// and the first chunk's ideal play time is the startup delay.
struct TimelineContext {
  double clock_s = 0.0;       // download clock when the window opens
  double prev_play_s = 0.0;   // play time of the chunk just before the window
  // Play times of up to max_buffer_chunks chunks preceding the window,
  // oldest first; used by the buffer-cap wait rule.
  std::vector<double> prior_play_s;

  static TimelineContext cold_start(const VideoConfig& config) {
    TimelineContext ctx;
    ctx.clock_s = 0.0;
    // Virtual play time of "chunk 0" so that chunk 1's deadline is t_ini.
    ctx.prev_play_s = config.startup_delay_s - config.chunk_duration_s;
    return ctx;
  }
};

// Size of chunk k in megabits: L * sum over tiles of the tile rate.
double chunk_size_mbits(const RatePlan& plan, int chunk, const VideoConfig& config);
double chunk_size_mbits(const ContinuousRatePlan& plan, int chunk, const VideoConfig& config);

std::vector<double> chunk_sizes_mbits(const RatePlan& plan, const VideoConfig& config);
std::vector<double> chunk_sizes_mbits(const ContinuousRatePlan& plan, const VideoConfig& config);

// Event-ordered timing of a download schedule under per-chunk constant
// capacities. Chunk k starts downloading when chunk k-1 finished plus any
// buffer-cap wait, finishes size/C_k later; play times follow the recursion
// play_k = max(play_{k-1} + L, finish_k). The wait before chunk k is the
// minimal nonnegative delay keeping its download start at or after the play
// time of chunk k - B.
Timeline compute_timeline_from_sizes(std::span<const double> sizes_mbits,
                                     std::span<const double> capacity_mbps,
                                     const VideoConfig& config,
                                     const TimelineContext& ctx);

Timeline compute_timeline(const RatePlan& plan, std::span<const double> capacity_mbps,
                          const VideoConfig& config);
Timeline compute_timeline(const RatePlan& plan, std::span<const double> capacity_mbps,
                          const VideoConfig& config, const TimelineContext& ctx);
Timeline compute_timeline(const ContinuousRatePlan& plan, std::span<const double> capacity_mbps,
                          const VideoConfig& config);
Timeline compute_timeline(const ContinuousRatePlan& plan, std::span<const double> capacity_mbps,
                          const VideoConfig& config, const TimelineContext& ctx);

// Total rebuffering time: play_K - (K-1)L - t_ini (window-relative when the
// timeline was computed against a warm context). Never negative.
double stall_time(const Timeline& timeline);

// Stall without materializing the timeline; play_scratch is caller-owned
// scratch reused across calls (hot enumeration loops).
double stall_from_sizes(std::span<const double> sizes_mbits,
                        std::span<const double> capacity_mbps, const VideoConfig& config,
                        const TimelineContext& ctx, std::vector<double>& play_scratch);

}  // namespace tilestream

#endif  // TILESTREAM_TIMELINE_HPP_
