#ifndef TILESTREAM_TYPES_HPP_
#define TILESTREAM_TYPES_HPP_

#include <string>
#include <vector>

namespace tilestream {

// Static video / tiling / rate-ladder geometry. Tiles are indexed row-major
// on a tile_rows x tile_cols grid; a viewport is a viewport_rows x
// viewport_cols rectangle of tiles (wrapping horizontally, never vertically).
struct VideoConfig {
  int num_chunks = 0;                    // K
  int tile_rows = 0;                     // grid height
  int tile_cols = 0;                     // grid width; N = rows * cols
  double chunk_duration_s = 0.0;         // L
  std::vector<double> rate_levels_mbps;  // {R_0, ..., R_m}, strictly increasing
  int viewport_rows = 0;                 // vrows
  int viewport_cols = 0;                 // vcols; l = vrows * vcols
  double startup_delay_s = 0.0;          // t_ini
  int max_buffer_chunks = 0;             // B

  int tiles_per_chunk() const { return tile_rows * tile_cols; }
  int viewport_tiles() const { return viewport_rows * viewport_cols; }
  int num_levels() const { return static_cast<int>(rate_levels_mbps.size()); }
  int top_level() const { return num_levels() - 1; }
  double base_rate_mbps() const { return rate_levels_mbps.front(); }
  double top_rate_mbps() const { return rate_levels_mbps.back(); }

  // Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

// Level index marking a tile the greedy baseline does not fetch at all
// (delivered rate 0). Every other planner keeps all tiles at >= level 0.
inline constexpr int kUnfetched = -1;

// Discrete decision matrix: one rate-level index per tile per chunk.
struct RatePlan {
  int num_chunks = 0;
  int num_tiles = 0;
  std::vector<int> levels;  // row-major [chunk][tile]

  static RatePlan uniform(const VideoConfig& config, int level);

  int level(int chunk, int tile) const { return levels[static_cast<std::size_t>(chunk) * num_tiles + tile]; }
  int& level(int chunk, int tile) { return levels[static_cast<std::size_t>(chunk) * num_tiles + tile]; }

  double rate_mbps(const VideoConfig& config, int chunk, int tile) const {
    const int j = level(chunk, tile);
    return j == kUnfetched ? 0.0 : config.rate_levels_mbps[static_cast<std::size_t>(j)];
  }

  // Discrete feasibility: every entry a valid ladder index (kUnfetched
  // tolerated only when allow_unfetched is set).
  bool feasible(const VideoConfig& config, bool allow_unfetched = false) const;
};

// Relaxed decision matrix: real per-tile rates in Mbps.
struct ContinuousRatePlan {
  int num_chunks = 0;
  int num_tiles = 0;
  std::vector<double> rates_mbps;  // row-major [chunk][tile]

  static ContinuousRatePlan filled(const VideoConfig& config, double mbps);

  double rate(int chunk, int tile) const { return rates_mbps[static_cast<std::size_t>(chunk) * num_tiles + tile]; }
  double& rate(int chunk, int tile) { return rates_mbps[static_cast<std::size_t>(chunk) * num_tiles + tile]; }

  bool within_box(const VideoConfig& config, double tol = 1e-9) const;
};

ContinuousRatePlan to_continuous(const RatePlan& plan, const VideoConfig& config);

// Timing consequences of a plan: per-chunk download window, buffer wait,
// play time, and the total stall.
struct Timeline {
  std::vector<double> download_start_s;
  std::vector<double> download_finish_s;
  std::vector<double> wait_s;       // buffer-cap wait before each download
  std::vector<double> play_time_s;  // when each chunk starts playing
  double total_stall_s = 0.0;
};

}  // namespace tilestream

#endif  // TILESTREAM_TYPES_HPP_
