#include "tilestream/fov.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "tilestream/rng.hpp"

namespace tilestream {

namespace {

constexpr double kProbTol = 1e-9;

bool tiles_subset_of(const std::vector<int>& tiles, const std::vector<char>& present) {
  for (int t : tiles) {
    if (t >= static_cast<int>(present.size()) || !present[static_cast<std::size_t>(t)]) return false;
  }
  return true;
}

std::vector<char> presence_mask(std::span<const int> tiles) {
  int max_tile = -1;
  for (int t : tiles) max_tile = std::max(max_tile, t);
  std::vector<char> present(static_cast<std::size_t>(max_tile + 1), 0);
  for (int t : tiles) present[static_cast<std::size_t>(t)] = 1;
  return present;
}

// Entries ordered by descending probability, anchor index breaking ties.
std::vector<const FovDistribution::Entry*> sorted_entries(const std::vector<FovDistribution::Entry>& entries) {
  std::vector<const FovDistribution::Entry*> order;
  order.reserve(entries.size());
  for (const auto& e : entries) order.push_back(&e);
  std::stable_sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    if (a->probability != b->probability) return a->probability > b->probability;
    if (a->viewport.top_left_tile != b->viewport.top_left_tile) {
      return a->viewport.top_left_tile < b->viewport.top_left_tile;
    }
    return a->viewport.tiles < b->viewport.tiles;
  });
  return order;
}

void check_chunk_index(const FovDistribution& dist, int chunk) {
  if (chunk < 0 || chunk >= dist.num_chunks()) throw std::out_of_range("chunk index out of range");
}

}  // namespace

Viewport viewport_at(const VideoConfig& config, int top_left_tile) {
  const int cols = config.tile_cols;
  if (top_left_tile < 0 || top_left_tile >= config.tiles_per_chunk()) {
    throw std::out_of_range("viewport anchor out of range");
  }
  const int row = top_left_tile / cols;
  const int col = top_left_tile % cols;
  if (row + config.viewport_rows > config.tile_rows) {
    throw std::invalid_argument("viewport overflows the grid vertically");
  }
  Viewport vp;
  vp.top_left_tile = top_left_tile;
  vp.tiles.reserve(static_cast<std::size_t>(config.viewport_tiles()));
  for (int dr = 0; dr < config.viewport_rows; ++dr) {
    for (int dc = 0; dc < config.viewport_cols; ++dc) {
      vp.tiles.push_back((row + dr) * cols + (col + dc) % cols);
    }
  }
  std::sort(vp.tiles.begin(), vp.tiles.end());
  return vp;
}

std::vector<Viewport> enumerate_viewports(const VideoConfig& config) {
  config.validate();
  std::vector<Viewport> out;
  const int anchor_rows = config.tile_rows - config.viewport_rows + 1;
  const int anchor_cols = config.viewport_cols < config.tile_cols ? config.tile_cols : 1;
  out.reserve(static_cast<std::size_t>(anchor_rows) * anchor_cols);
  for (int r = 0; r < anchor_rows; ++r) {
    for (int c = 0; c < anchor_cols; ++c) {
      out.push_back(viewport_at(config, r * config.tile_cols + c));
    }
  }
  return out;
}

void FovDistribution::validate(const VideoConfig& config) const {
  const int l = config.viewport_tiles();
  const int n = config.tiles_per_chunk();
  for (const auto& chunk : chunks) {
    if (chunk.empty()) throw std::invalid_argument("chunk has an empty viewport distribution");
    double sum = 0.0;
    for (const auto& entry : chunk) {
      if (entry.probability < 0.0) throw std::invalid_argument("negative viewport probability");
      if (static_cast<int>(entry.viewport.tiles.size()) != l) {
        throw std::invalid_argument("viewport tile count does not match the config");
      }
      for (int t : entry.viewport.tiles) {
        if (t < 0 || t >= n) throw std::invalid_argument("viewport tile index out of range");
      }
      sum += entry.probability;
    }
    if (std::abs(sum - 1.0) > kProbTol) {
      throw std::invalid_argument("chunk viewport probabilities do not sum to 1");
    }
  }
}

FovDistribution FovDistribution::slice(int first, int count) const {
  if (first < 0 || count < 0 || first + count > num_chunks()) {
    throw std::out_of_range("distribution slice out of range");
  }
  FovDistribution out;
  out.chunks.assign(chunks.begin() + first, chunks.begin() + first + count);
  return out;
}

FovDistribution synthetic_distribution(std::span<const int> designated_top_left,
                                       double beta, const VideoConfig& config) {
  if (beta < 0.0 || beta > 1.0) throw std::invalid_argument("beta must lie in [0, 1]");
  const auto viewports = enumerate_viewports(config);
  FovDistribution dist;
  dist.chunks.resize(designated_top_left.size());
  for (std::size_t k = 0; k < designated_top_left.size(); ++k) {
    const Viewport designated = viewport_at(config, designated_top_left[k]);
    auto& chunk = dist.chunks[k];
    if (viewports.size() == 1) {
      chunk.push_back({designated, 1.0});
      continue;
    }
    const double residual = (1.0 - beta) / static_cast<double>(viewports.size() - 1);
    if (beta > 0.0) chunk.push_back({designated, beta});
    if (residual > 0.0) {
      for (const auto& vp : viewports) {
        if (vp.tiles == designated.tiles) continue;
        chunk.push_back({vp, residual});
      }
    }
  }
  return dist;
}

double containment_probability(const FovDistribution& dist, int chunk,
                               std::span<const int> tiles) {
  check_chunk_index(dist, chunk);
  const auto present = presence_mask(tiles);
  double prob = 0.0;
  for (const auto& entry : dist.chunks[static_cast<std::size_t>(chunk)]) {
    if (tiles_subset_of(entry.viewport.tiles, present)) prob += entry.probability;
  }
  return prob;
}

std::vector<int> robust_set(const FovDistribution& dist, int chunk, double alpha) {
  check_chunk_index(dist, chunk);
  if (!(alpha > 0.0) || alpha > 1.0) throw std::invalid_argument("alpha must lie in (0, 1]");
  const auto& entries = dist.chunks[static_cast<std::size_t>(chunk)];
  const auto order = sorted_entries(entries);

  // Accumulate viewports by descending probability until the mass reaches
  // alpha, then drop tiles (descending index) whose removal keeps coverage.
  std::vector<int> tiles;
  double mass = 0.0;
  for (const auto* entry : order) {
    if (mass >= alpha - kProbTol && !tiles.empty()) break;
    if (entry->probability <= 0.0) continue;
    tiles.insert(tiles.end(), entry->viewport.tiles.begin(), entry->viewport.tiles.end());
    mass += entry->probability;
  }
  std::sort(tiles.begin(), tiles.end());
  tiles.erase(std::unique(tiles.begin(), tiles.end()), tiles.end());

  const std::vector<int> scan = tiles;  // one pass, descending tile index
  for (auto it = scan.rbegin(); it != scan.rend(); ++it) {
    std::vector<int> reduced;
    reduced.reserve(tiles.size() - 1);
    for (int t : tiles) {
      if (t != *it) reduced.push_back(t);
    }
    if (containment_probability(dist, chunk, reduced) >= alpha - kProbTol) {
      tiles = std::move(reduced);
    }
  }
  return tiles;
}

std::vector<std::vector<int>> robust_sets(const FovDistribution& dist, double alpha) {
  std::vector<std::vector<int>> sets(static_cast<std::size_t>(dist.num_chunks()));
  for (int k = 0; k < dist.num_chunks(); ++k) sets[static_cast<std::size_t>(k)] = robust_set(dist, k, alpha);
  return sets;
}

namespace {

struct CandidateSet {
  double probability = -1.0;
  std::vector<int> tiles;
};

std::vector<int> pad_to_q(std::uint64_t mask, int q, int num_tiles) {
  std::vector<int> tiles;
  tiles.reserve(static_cast<std::size_t>(q));
  for (int t = 0; t < num_tiles; ++t) {
    if (mask & (1ULL << t)) tiles.push_back(t);
  }
  for (int t = 0; t < num_tiles && static_cast<int>(tiles.size()) < q; ++t) {
    if (!(mask & (1ULL << t))) tiles.push_back(t);
  }
  std::sort(tiles.begin(), tiles.end());
  return tiles;
}

void consider(CandidateSet& best, double prob, std::vector<int> tiles) {
  if (prob > best.probability ||
      (prob == best.probability && (best.tiles.empty() || tiles < best.tiles))) {
    best.probability = prob;
    best.tiles = std::move(tiles);
  }
}

// Exhaustive search over viewport subsets whose tile union fits in q tiles.
void union_dfs(const std::vector<std::uint64_t>& masks, const std::vector<double>& probs,
               const std::vector<double>& suffix, std::size_t i, std::uint64_t mask,
               double prob, int q, int num_tiles, CandidateSet& best, long& nodes) {
  if (++nodes > 4'000'000) return;  // deterministic safety valve
  if (i == masks.size()) {
    consider(best, prob, pad_to_q(mask, q, num_tiles));
    return;
  }
  if (prob + suffix[i] < best.probability) return;
  const std::uint64_t merged = mask | masks[i];
  if (std::popcount(merged) <= q) {
    union_dfs(masks, probs, suffix, i + 1, merged, prob + probs[i], q, num_tiles, best, nodes);
  }
  union_dfs(masks, probs, suffix, i + 1, mask, prob, q, num_tiles, best, nodes);
}

}  // namespace

std::vector<int> most_likely_set(const FovDistribution& dist, int chunk, int q,
                                 const VideoConfig& config) {
  check_chunk_index(dist, chunk);
  const int n = config.tiles_per_chunk();
  if (q < 0 || q > n) throw std::out_of_range("q must lie in [0, N]");
  if (q == 0) return {};

  const auto order = sorted_entries(dist.chunks[static_cast<std::size_t>(chunk)]);
  CandidateSet best;

  // Greedy packing of top-probability viewports; always available and used
  // as the result when the support is too large for the exhaustive search.
  {
    std::vector<int> tiles;
    for (const auto* entry : order) {
      std::vector<int> merged = tiles;
      merged.insert(merged.end(), entry->viewport.tiles.begin(), entry->viewport.tiles.end());
      std::sort(merged.begin(), merged.end());
      merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
      if (static_cast<int>(merged.size()) <= q) tiles = std::move(merged);
    }
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    for (int t : tiles) used[static_cast<std::size_t>(t)] = 1;
    for (int t = 0; t < n && static_cast<int>(tiles.size()) < q; ++t) {
      if (!used[static_cast<std::size_t>(t)]) tiles.push_back(t);
    }
    std::sort(tiles.begin(), tiles.end());
    consider(best, containment_probability(dist, chunk, tiles), std::move(tiles));
  }

  if (n <= 64 && order.size() <= 16) {
    std::vector<std::uint64_t> masks;
    std::vector<double> probs;
    masks.reserve(order.size());
    for (const auto* entry : order) {
      std::uint64_t mask = 0;
      for (int t : entry->viewport.tiles) mask |= 1ULL << t;
      masks.push_back(mask);
      probs.push_back(entry->probability);
    }
    std::vector<double> suffix(order.size() + 1, 0.0);
    for (std::size_t i = order.size(); i-- > 0;) suffix[i] = suffix[i + 1] + probs[i];
    long nodes = 0;
    union_dfs(masks, probs, suffix, 0, 0, 0.0, q, n, best, nodes);
  }
  return best.tiles;
}

FovTrace sample_trace(const FovDistribution& dist, std::uint64_t seed) {
  Rng rng(seed);
  FovTrace trace;
  trace.chunks.reserve(static_cast<std::size_t>(dist.num_chunks()));
  for (const auto& chunk : dist.chunks) {
    const double u = rng.next_unit();
    double cum = 0.0;
    const FovDistribution::Entry* chosen = &chunk.back();
    for (const auto& entry : chunk) {
      cum += entry.probability;
      if (u < cum) {
        chosen = &entry;
        break;
      }
    }
    trace.chunks.push_back(chosen->viewport);
  }
  return trace;
}

FovDistribution load_fov_json(const std::string& path, const VideoConfig& config) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open FoV file: " + path);
  nlohmann::json doc;
  in >> doc;
  if (!doc.contains("chunks") || !doc["chunks"].is_array()) {
    throw std::runtime_error("FoV document missing \"chunks\" array: " + path);
  }
  FovDistribution dist;
  for (const auto& chunk : doc["chunks"]) {
    std::vector<FovDistribution::Entry> entries;
    for (const auto& item : chunk) {
      FovDistribution::Entry entry;
      entry.viewport = viewport_at(config, item.at("top_left_tile").get<int>());
      entry.probability = item.at("probability").get<double>();
      entries.push_back(std::move(entry));
    }
    dist.chunks.push_back(std::move(entries));
  }
  dist.validate(config);
  return dist;
}

void save_fov_json(const std::string& path, const FovDistribution& dist) {
  nlohmann::json chunks = nlohmann::json::array();
  for (const auto& chunk : dist.chunks) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& entry : chunk) {
      items.push_back({{"top_left_tile", entry.viewport.top_left_tile},
                       {"probability", entry.probability}});
    }
    chunks.push_back(std::move(items));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write FoV file: " + path);
  out << nlohmann::json{{"chunks", std::move(chunks)}}.dump(2) << "\n";
}

}  // namespace tilestream
