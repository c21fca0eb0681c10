#ifndef TILESTREAM_FOV_HPP_
#define TILESTREAM_FOV_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tilestream/types.hpp"

namespace tilestream {

// A candidate field of view: a viewport_rows x viewport_cols rectangle of
// tiles anchored at top_left_tile, wrapping horizontally on the cylinder.
struct Viewport {
  int top_left_tile = 0;
  std::vector<int> tiles;  // sorted ascending, exactly l distinct indices
};

// Builds the viewport anchored at the given tile. Throws if the rectangle
// would overflow the grid vertically.
Viewport viewport_at(const VideoConfig& config, int top_left_tile);

// All distinct viewports, row-major by top-left tile. Horizontal anchors
// cover every column (wrap-around) unless the viewport spans the full width,
// in which case each row yields a single viewport.
std::vector<Viewport> enumerate_viewports(const VideoConfig& config);

// Per-chunk probability distribution over viewports.
struct FovDistribution {
  struct Entry {
    Viewport viewport;
    double probability = 0.0;
  };
  std::vector<std::vector<Entry>> chunks;

  int num_chunks() const { return static_cast<int>(chunks.size()); }
  // Probabilities nonnegative and summing to 1 per chunk (tolerance 1e-9).
  void validate(const VideoConfig& config) const;
  // Distribution restricted to chunks [first, first + count).
  FovDistribution slice(int first, int count) const;
};

// One realized viewport per chunk; ground truth for evaluating a run.
struct FovTrace {
  std::vector<Viewport> chunks;
};

// Synthetic model: the designated viewport of each chunk has mass beta; the
// remaining mass is spread uniformly over the other enumerated viewports.
// designated_top_left holds one anchor tile per chunk.
FovDistribution synthetic_distribution(std::span<const int> designated_top_left,
                                       double beta, const VideoConfig& config);

// Probability that the chunk's FoV is contained in the given tile set.
double containment_probability(const FovDistribution& dist, int chunk,
                               std::span<const int> tiles);

// Smallest tile set found whose containment probability is at least alpha
// (greedy cover + prune; exact minimality is checked against an exhaustive
// oracle at test scale). Deterministic; sorted ascending.
std::vector<int> robust_set(const FovDistribution& dist, int chunk, double alpha);

// robust_set for every chunk.
std::vector<std::vector<int>> robust_sets(const FovDistribution& dist, double alpha);

// q-tile set maximizing the containment probability. For q below the
// viewport size the probability is necessarily 0 and the lexicographically
// smallest q-set is returned; ties always break lexicographically.
std::vector<int> most_likely_set(const FovDistribution& dist, int chunk, int q,
                                 const VideoConfig& config);

// Independent per-chunk draws; a given seed always yields the same trace.
FovTrace sample_trace(const FovDistribution& dist, std::uint64_t seed);

// JSON document interface: {"chunks": [[{"top_left_tile": t, "probability": p}, ...], ...]}.
FovDistribution load_fov_json(const std::string& path, const VideoConfig& config);
void save_fov_json(const std::string& path, const FovDistribution& dist);

}  // namespace tilestream

#endif  // TILESTREAM_FOV_HPP_
