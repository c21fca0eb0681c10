#include "tilestream/types.hpp"

#include <stdexcept>

namespace tilestream {

void VideoConfig::validate() const {
  if (num_chunks <= 0) throw std::invalid_argument("num_chunks must be positive");
  if (tile_rows <= 0 || tile_cols <= 0) throw std::invalid_argument("tile grid dimensions must be positive");
  if (chunk_duration_s <= 0.0) throw std::invalid_argument("chunk_duration_s must be positive");
  if (rate_levels_mbps.size() < 2) throw std::invalid_argument("rate ladder needs at least 2 levels");
  if (rate_levels_mbps.front() <= 0.0) throw std::invalid_argument("base layer rate must be positive");
  for (std::size_t j = 1; j < rate_levels_mbps.size(); ++j) {
    if (rate_levels_mbps[j] <= rate_levels_mbps[j - 1]) {
      throw std::invalid_argument("rate ladder must be strictly increasing");
    }
  }
  if (viewport_rows <= 0 || viewport_cols <= 0) throw std::invalid_argument("viewport dimensions must be positive");
  if (viewport_rows > tile_rows || viewport_cols > tile_cols) {
    throw std::invalid_argument("viewport does not fit the tile grid");
  }
  if (startup_delay_s < 0.0) throw std::invalid_argument("startup_delay_s must be nonnegative");
  if (max_buffer_chunks <= 0) throw std::invalid_argument("max_buffer_chunks must be positive");
}

RatePlan RatePlan::uniform(const VideoConfig& config, int level) {
  RatePlan plan;
  plan.num_chunks = config.num_chunks;
  plan.num_tiles = config.tiles_per_chunk();
  plan.levels.assign(static_cast<std::size_t>(plan.num_chunks) * plan.num_tiles, level);
  return plan;
}

bool RatePlan::feasible(const VideoConfig& config, bool allow_unfetched) const {
  if (num_chunks != config.num_chunks || num_tiles != config.tiles_per_chunk()) return false;
  for (int j : levels) {
    if (j == kUnfetched && allow_unfetched) continue;
    if (j < 0 || j >= config.num_levels()) return false;
  }
  return true;
}

ContinuousRatePlan ContinuousRatePlan::filled(const VideoConfig& config, double mbps) {
  ContinuousRatePlan plan;
  plan.num_chunks = config.num_chunks;
  plan.num_tiles = config.tiles_per_chunk();
  plan.rates_mbps.assign(static_cast<std::size_t>(plan.num_chunks) * plan.num_tiles, mbps);
  return plan;
}

bool ContinuousRatePlan::within_box(const VideoConfig& config, double tol) const {
  for (double r : rates_mbps) {
    if (r < config.base_rate_mbps() - tol || r > config.top_rate_mbps() + tol) return false;
  }
  return true;
}

ContinuousRatePlan to_continuous(const RatePlan& plan, const VideoConfig& config) {
  ContinuousRatePlan out;
  out.num_chunks = plan.num_chunks;
  out.num_tiles = plan.num_tiles;
  out.rates_mbps.resize(plan.levels.size());
  for (std::size_t i = 0; i < plan.levels.size(); ++i) {
    const int j = plan.levels[i];
    out.rates_mbps[i] = j == kUnfetched ? 0.0 : config.rate_levels_mbps[static_cast<std::size_t>(j)];
  }
  return out;
}

}  // namespace tilestream
