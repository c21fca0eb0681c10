#include "tilestream/relaxed_solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <stdexcept>

namespace tilestream {

namespace {

struct StallGradient {
  double stall = 0.0;
  std::vector<double> dstall_dsize;  // per-chunk sensitivity of the stall
};

// Forward timeline recursion recording active branches, then reverse
// accumulation of d(stall)/d(size_k). The objective is monotone decreasing
// in every play time, so any active-branch choice yields a valid
// subgradient; ties resolve to the download-bound branch.
StallGradient stall_gradient(std::span<const double> sizes,
                             std::span<const double> caps,
                             const VideoConfig& config, const TimelineContext& ctx) {
  const int count = static_cast<int>(sizes.size());
  const double L = config.chunk_duration_s;
  const int B = config.max_buffer_chunks;
  const int prior = static_cast<int>(ctx.prior_play_s.size());

  // Per-chunk start-gate kind: 0 = previous finish, 1 = a window play time
  // (gradient flows to it), 2 = a constant (prior play; chain is cut).
  std::vector<double> finish(static_cast<std::size_t>(count));
  std::vector<double> play(static_cast<std::size_t>(count));
  std::vector<char> gate_kind(static_cast<std::size_t>(count), 0);
  std::vector<char> play_from_finish(static_cast<std::size_t>(count), 0);

  double finish_prev = ctx.clock_s;
  double play_prev = ctx.prev_play_s;
  for (int k = 0; k < count; ++k) {
    const int dep = k - B;
    double gate = -std::numeric_limits<double>::infinity();
    bool window_dep = false;
    if (dep >= 0) {
      gate = play[static_cast<std::size_t>(dep)];
      window_dep = true;
    } else if (dep + prior >= 0) {
      gate = ctx.prior_play_s[static_cast<std::size_t>(dep + prior)];
    }
    const bool waiting = gate > finish_prev;
    gate_kind[static_cast<std::size_t>(k)] = waiting ? (window_dep ? 1 : 2) : 0;
    const double start = waiting ? gate : finish_prev;
    finish[static_cast<std::size_t>(k)] =
        start + sizes[static_cast<std::size_t>(k)] / caps[static_cast<std::size_t>(k)];
    const double deadline = play_prev + L;
    play_from_finish[static_cast<std::size_t>(k)] = finish[static_cast<std::size_t>(k)] >= deadline;
    play[static_cast<std::size_t>(k)] = std::max(deadline, finish[static_cast<std::size_t>(k)]);
    finish_prev = finish[static_cast<std::size_t>(k)];
    play_prev = play[static_cast<std::size_t>(k)];
  }

  StallGradient out;
  out.dstall_dsize.assign(static_cast<std::size_t>(count), 0.0);
  if (count == 0) return out;
  out.stall = play[static_cast<std::size_t>(count - 1)] - (ctx.prev_play_s + count * L);

  std::vector<double> c_play(static_cast<std::size_t>(count), 0.0);
  std::vector<double> c_fin(static_cast<std::size_t>(count), 0.0);
  c_play[static_cast<std::size_t>(count - 1)] = 1.0;
  for (int k = count - 1; k >= 0; --k) {
    if (play_from_finish[static_cast<std::size_t>(k)]) {
      c_fin[static_cast<std::size_t>(k)] += c_play[static_cast<std::size_t>(k)];
    } else if (k > 0) {
      c_play[static_cast<std::size_t>(k - 1)] += c_play[static_cast<std::size_t>(k)];
    }
    const double cf = c_fin[static_cast<std::size_t>(k)];
    if (cf == 0.0) continue;
    out.dstall_dsize[static_cast<std::size_t>(k)] += cf / caps[static_cast<std::size_t>(k)];
    switch (gate_kind[static_cast<std::size_t>(k)]) {
      case 1:
        c_play[static_cast<std::size_t>(k - B)] += cf;
        break;
      case 2:
        break;  // constant gate cuts the chain
      default:
        if (k > 0) c_fin[static_cast<std::size_t>(k - 1)] += cf;
        break;
    }
  }
  return out;
}

using Objective = std::function<double(const ContinuousRatePlan&, std::vector<double>*)>;

double box_clip(double x, double lo, double hi) { return std::min(hi, std::max(lo, x)); }

// A signed search direction: each entry moves one flat tile index by +1 or
// -1 times the line parameter. Mixed signs express bit transfers between
// chunks, which same-sign group moves cannot.
using Direction = std::vector<std::pair<int, double>>;

struct LineCandidate {
  double s = 0.0;
  double value = -std::numeric_limits<double>::infinity();
  double added = 0.0;  // total rate added along the direction, ties prefer less
};

// Maximizes the (concave) objective along rates + s * direction within the
// box. Exact endpoint candidates are always considered so optima on the box
// boundary are hit exactly; plateau ties resolve toward fewer bits.
bool line_search(const Objective& objective, ContinuousRatePlan& rates,
                 const Direction& direction, const VideoConfig& config,
                 double current_value, int iters, double* new_value) {
  double s_lo = -std::numeric_limits<double>::infinity();
  double s_hi = std::numeric_limits<double>::infinity();
  double weight_sum = 0.0;
  for (const auto& [idx, w] : direction) {
    const double r = rates.rates_mbps[static_cast<std::size_t>(idx)];
    if (w > 0.0) {
      s_lo = std::max(s_lo, (config.base_rate_mbps() - r) / w);
      s_hi = std::min(s_hi, (config.top_rate_mbps() - r) / w);
    } else if (w < 0.0) {
      s_lo = std::max(s_lo, (config.top_rate_mbps() - r) / w);
      s_hi = std::min(s_hi, (config.base_rate_mbps() - r) / w);
    }
    weight_sum += w;
  }
  if (!(s_hi > s_lo)) return false;

  ContinuousRatePlan probe = rates;
  const auto eval_at = [&](double s) {
    for (const auto& [idx, w] : direction) {
      probe.rates_mbps[static_cast<std::size_t>(idx)] = box_clip(
          rates.rates_mbps[static_cast<std::size_t>(idx)] + w * s, config.base_rate_mbps(),
          config.top_rate_mbps());
    }
    return objective(probe, nullptr);
  };

  // Golden-section interior search.
  const double inv_phi = 0.6180339887498949;
  double a = s_lo, b = s_hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = eval_at(x1), f2 = eval_at(x2);
  for (int it = 0; it < iters; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = eval_at(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = eval_at(x1);
    }
  }
  const double s_gs = f1 >= f2 ? x1 : x2;

  LineCandidate cands[4] = {{0.0, current_value, 0.0},
                            {s_lo, eval_at(s_lo), s_lo * weight_sum},
                            {s_hi, eval_at(s_hi), s_hi * weight_sum},
                            {s_gs, std::max(f1, f2), s_gs * weight_sum}};
  const LineCandidate* best = &cands[0];
  for (const auto& c : cands) {
    if (c.value > best->value || (c.value == best->value && c.added < best->added)) best = &c;
  }
  if (best->s == 0.0 || !(best->value > current_value)) {
    // A plateau tie toward fewer bits is still worth applying.
    if (!(best->value == current_value && best->added < 0.0)) return false;
  }
  for (const auto& [idx, w] : direction) {
    rates.rates_mbps[static_cast<std::size_t>(idx)] = box_clip(
        rates.rates_mbps[static_cast<std::size_t>(idx)] + w * best->s, config.base_rate_mbps(),
        config.top_rate_mbps());
  }
  *new_value = best->value;
  return true;
}

struct DirectionSet {
  std::vector<Direction> directions;
  std::vector<std::vector<int>> chunk_groups;  // flat indices per chunk "all" group
  std::vector<double> chunk_group_weights;     // per-tile weight making moves time-neutral

  void add(int chunk, std::span<const int> tiles, int num_tiles) {
    std::vector<int> flat;
    flat.reserve(tiles.size());
    for (int t : tiles) flat.push_back(chunk * num_tiles + t);
    std::sort(flat.begin(), flat.end());
    flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
    add_flat(flat);
  }

  void add_flat(const std::vector<int>& flat) {
    if (flat.empty()) return;
    Direction dir;
    dir.reserve(flat.size());
    for (int idx : flat) dir.emplace_back(idx, 1.0);
    if (seen_.insert(dir).second) directions.push_back(std::move(dir));
  }

  // Bit transfer: raise one group while lowering another.
  void add_transfer(const std::vector<int>& up, const std::vector<int>& down) {
    Direction dir;
    dir.reserve(up.size() + down.size());
    for (int idx : up) dir.emplace_back(idx, 1.0);
    for (int idx : down) dir.emplace_back(idx, -1.0);
    if (seen_.insert(dir).second) directions.push_back(std::move(dir));
  }

  // Bit-neutral and download-time-neutral transfers between chunk groups.
  // The time-neutral weights let the search move along stall-kink ridges
  // where equal-weight moves would change the stall.
  void add_chunk_transfers() {
    for (std::size_t a = 0; a < chunk_groups.size(); ++a) {
      for (std::size_t b = a + 1; b < chunk_groups.size(); ++b) {
        add_transfer(chunk_groups[a], chunk_groups[b]);
        Direction dir;
        for (int idx : chunk_groups[a]) dir.emplace_back(idx, chunk_group_weights[a]);
        for (int idx : chunk_groups[b]) dir.emplace_back(idx, -chunk_group_weights[b]);
        if (seen_.insert(dir).second) directions.push_back(std::move(dir));
      }
    }
  }

  void add_pairwise_within(const std::vector<int>& flat) {
    for (std::size_t a = 0; a < flat.size(); ++a) {
      for (std::size_t b = a + 1; b < flat.size(); ++b) {
        add_transfer({flat[a]}, {flat[b]});
      }
    }
  }

 private:
  std::set<Direction> seen_;
};

RelaxedSolution solve(const Objective& objective, const VideoConfig& config, int num_chunks,
                      const SolverSettings& settings,
                      const std::function<DirectionSet(const ContinuousRatePlan&)>& directions) {
  const double lo = config.base_rate_mbps();
  const double hi = config.top_rate_mbps();
  const int num_tiles = config.tiles_per_chunk();
  const std::size_t dim = static_cast<std::size_t>(num_chunks) * num_tiles;

  std::vector<double> start_levels = {0.5 * (lo + hi), lo, hi};
  start_levels.resize(static_cast<std::size_t>(std::clamp(settings.restarts, 1, 3)));

  ContinuousRatePlan global_best;
  double global_value = -std::numeric_limits<double>::infinity();
  int iterations_used = 0;

  for (double start_level : start_levels) {
    ContinuousRatePlan rates;
    rates.num_chunks = num_chunks;
    rates.num_tiles = num_tiles;
    rates.rates_mbps.assign(dim, start_level);

    ContinuousRatePlan best = rates;
    double best_value = objective(rates, nullptr);
    if (std::isnan(best_value)) throw std::runtime_error("relaxed solver diverged (NaN objective)");

    std::vector<double> grad(dim);
    // Projected subgradient with geometric step decay; every round restarts
    // from the incumbent so late rounds refine rather than wander.
    const auto decay_phase = [&](double step0) {
      double step = step0;
      const int rounds = std::max(1, settings.decay_rounds);
      const int per_round = std::max(8, settings.max_iterations / rounds);
      for (int round = 0; round < rounds; ++round, step *= settings.round_decay) {
        rates = best;
        int no_improve = 0;
        for (int t = 0; t < per_round; ++t) {
          ++iterations_used;
          const double value = objective(rates, &grad);
          if (std::isnan(value)) {
            throw std::runtime_error("relaxed solver diverged (NaN objective)");
          }
          if (value > best_value + settings.epsilon * std::max(1.0, std::abs(best_value))) {
            no_improve = 0;
          } else {
            ++no_improve;
          }
          if (value > best_value) {
            best_value = value;
            best = rates;
          }
          if (no_improve >= settings.patience) break;

          double norm = 0.0;
          for (double g : grad) norm += g * g;
          norm = std::sqrt(norm);
          if (norm == 0.0) break;
          const double scale = step / norm;
          for (std::size_t i = 0; i < dim; ++i) {
            rates.rates_mbps[i] = box_clip(rates.rates_mbps[i] + scale * grad[i], lo, hi);
          }
        }
      }
    };

    // Polish the incumbent with line searches along structured directions;
    // group moves handle the nonsmooth min terms that single coordinates
    // cannot improve, and the raw subgradient direction covers whatever the
    // structured set misses.
    const auto polish_phase = [&]() {
      double value = best_value;
      for (int pass = 0; pass < settings.polish_passes; ++pass) {
        const double before = value;
        const DirectionSet dirs = directions(best);
        for (const auto& direction : dirs.directions) {
          double improved = value;
          if (line_search(objective, best, direction, config, value, settings.polish_line_iters,
                          &improved)) {
            value = improved;
          }
        }
        if (settings.polish_singles) {
          Direction single(1, {0, 1.0});
          for (std::size_t i = 0; i < dim; ++i) {
            single[0].first = static_cast<int>(i);
            double improved = value;
            if (line_search(objective, best, single, config, value, settings.polish_line_iters,
                            &improved)) {
              value = improved;
            }
          }
        }
        {
          objective(best, &grad);
          double norm = 0.0;
          for (double g : grad) norm = std::max(norm, std::abs(g));
          if (norm > 0.0) {
            Direction dir;
            for (std::size_t i = 0; i < dim; ++i) {
              if (grad[i] != 0.0) dir.emplace_back(static_cast<int>(i), grad[i] / norm);
            }
            double improved = value;
            if (line_search(objective, best, dir, config, value, settings.polish_line_iters,
                            &improved)) {
              value = improved;
            }
          }
        }
        if (!(value > before + 1e-13 * std::max(1.0, std::abs(before)))) break;
      }
      best_value = objective(best, nullptr);
    };

    decay_phase(settings.step_scale * (hi - lo));
    polish_phase();
    if (settings.fine_cycles > 0) {
      for (int cycle = 0; cycle < settings.fine_cycles; ++cycle) {
        decay_phase(settings.step_scale * (hi - lo) * std::pow(1e-3, cycle + 1));
        polish_phase();
      }
    }

    if (best_value > global_value) {
      global_value = best_value;
      global_best = best;
    }
  }

  // Snap rates that polished to within a hair of a box edge or a ladder
  // value; kinks of the discrete problem sit there and the snapped point is
  // kept only when it is at least as good.
  {
    ContinuousRatePlan snapped = global_best;
    bool changed = false;
    for (double& r : snapped.rates_mbps) {
      for (double target : config.rate_levels_mbps) {
        if (r != target && std::abs(r - target) < 1e-7) {
          r = target;
          changed = true;
          break;
        }
      }
    }
    if (changed) {
      const double snapped_value = objective(snapped, nullptr);
      if (snapped_value >= global_value) {
        global_best = std::move(snapped);
        global_value = snapped_value;
      }
    }
  }

  RelaxedSolution solution;
  solution.rates = std::move(global_best);
  solution.objective_value = global_value;
  solution.certificate.iterations = iterations_used;
  solution.certificate.box_residual = 0.0;
  for (double r : solution.rates.rates_mbps) {
    solution.certificate.box_residual =
        std::max({solution.certificate.box_residual, lo - r, r - hi});
  }
  std::vector<double> grad(dim);
  objective(solution.rates, &grad);
  double pnorm = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double r = solution.rates.rates_mbps[i];
    double g = grad[i];
    if ((r >= hi && g > 0.0) || (r <= lo && g < 0.0)) g = 0.0;
    pnorm = std::max(pnorm, std::abs(g));
  }
  solution.certificate.projected_subgradient_norm = pnorm;
  return solution;
}

}  // namespace

SolverSettings SolverSettings::precise() {
  SolverSettings s;
  s.max_iterations = 9000;
  s.patience = 120;
  s.decay_rounds = 30;
  s.round_decay = 0.62;
  s.restarts = 3;
  s.polish_passes = 60;
  s.polish_line_iters = 56;
  s.polish_singles = true;
  s.fine_cycles = 1;
  return s;
}

SolverSettings SolverSettings::fast() {
  SolverSettings s;
  s.max_iterations = 480;
  s.patience = 40;
  s.decay_rounds = 8;
  s.round_decay = 0.45;
  s.restarts = 1;
  s.polish_passes = 3;
  s.polish_line_iters = 22;
  s.polish_singles = false;
  return s;
}

RelaxedSolution solve_relaxed_expected(const FovDistribution& dist,
                                       std::span<const double> capacity_mbps,
                                       const VideoConfig& config, const Utility& utility,
                                       const QoeWeights& weights, const SolverSettings& settings,
                                       const TimelineContext& ctx) {
  if (!utility.concave()) throw std::invalid_argument("relaxed solver requires a concave utility");
  weights.validate();
  const int num_chunks = dist.num_chunks();
  const int num_tiles = config.tiles_per_chunk();
  if (static_cast<int>(capacity_mbps.size()) < num_chunks) {
    throw std::invalid_argument("capacity list shorter than the horizon");
  }
  const double L = config.chunk_duration_s;
  const double gamma = weights.gamma;
  const double lambda = weights.lambda;

  Objective objective = [&, num_chunks, num_tiles](const ContinuousRatePlan& rates,
                                                   std::vector<double>* grad) {
    if (grad != nullptr) std::fill(grad->begin(), grad->end(), 0.0);
    double qoe = 0.0;
    for (int k = 0; k < num_chunks; ++k) {
      for (const auto& entry : dist.chunks[static_cast<std::size_t>(k)]) {
        double min_u = std::numeric_limits<double>::infinity();
        int argmin = -1;
        double sum_u = 0.0;
        for (int t : entry.viewport.tiles) {
          const double u = utility(rates.rate(k, t));
          sum_u += u;
          if (u < min_u) {
            min_u = u;
            argmin = t;
          }
        }
        qoe += entry.probability * (min_u + gamma * sum_u);
        if (grad != nullptr) {
          for (int t : entry.viewport.tiles) {
            (*grad)[static_cast<std::size_t>(k) * num_tiles + t] +=
                entry.probability * gamma * utility.slope(rates.rate(k, t));
          }
          (*grad)[static_cast<std::size_t>(k) * num_tiles + argmin] +=
              entry.probability * utility.slope(rates.rate(k, argmin));
        }
      }
    }
    const auto sizes = chunk_sizes_mbits(rates, config);
    const StallGradient sg = stall_gradient(sizes, capacity_mbps, config, ctx);
    if (grad != nullptr) {
      for (int k = 0; k < num_chunks; ++k) {
        const double coeff = lambda * sg.dstall_dsize[static_cast<std::size_t>(k)] * L;
        if (coeff == 0.0) continue;
        for (int t = 0; t < num_tiles; ++t) {
          (*grad)[static_cast<std::size_t>(k) * num_tiles + t] -= coeff;
        }
      }
    }
    return qoe - lambda * sg.stall;
  };

  const bool pairwise = settings.polish_singles;
  auto directions = [&, pairwise](const ContinuousRatePlan& rates) {
    DirectionSet dirs;
    std::vector<int> all(static_cast<std::size_t>(num_tiles));
    for (int t = 0; t < num_tiles; ++t) all[static_cast<std::size_t>(t)] = t;
    for (int k = 0; k < num_chunks; ++k) {
      dirs.add(k, all, num_tiles);
      std::vector<int> flat_all(static_cast<std::size_t>(num_tiles));
      for (int t = 0; t < num_tiles; ++t) flat_all[static_cast<std::size_t>(t)] = k * num_tiles + t;
      if (pairwise) dirs.add_pairwise_within(flat_all);
      dirs.chunk_groups.push_back(std::move(flat_all));
      dirs.chunk_group_weights.push_back(capacity_mbps[static_cast<std::size_t>(k)] /
                                         static_cast<double>(num_tiles));

      std::vector<char> in_support(static_cast<std::size_t>(num_tiles), 0);
      for (const auto& entry : dist.chunks[static_cast<std::size_t>(k)]) {
        dirs.add(k, entry.viewport.tiles, num_tiles);
        for (int t : entry.viewport.tiles) in_support[static_cast<std::size_t>(t)] = 1;
        // Tiles tied at the viewport minimum move together across the kink.
        double min_r = std::numeric_limits<double>::infinity();
        for (int t : entry.viewport.tiles) min_r = std::min(min_r, rates.rate(k, t));
        std::vector<int> tied;
        for (int t : entry.viewport.tiles) {
          if (rates.rate(k, t) <= min_r + 1e-12) tied.push_back(t);
        }
        dirs.add(k, tied, num_tiles);
      }
      std::vector<int> outside;
      for (int t = 0; t < num_tiles; ++t) {
        if (!in_support[static_cast<std::size_t>(t)]) outside.push_back(t);
      }
      dirs.add(k, outside, num_tiles);
    }
    dirs.add_chunk_transfers();
    return dirs;
  };

  RelaxedSolution solution = solve(objective, config, num_chunks, settings, directions);
  {
    const auto sizes = chunk_sizes_mbits(solution.rates, config);
    const Timeline tl = compute_timeline_from_sizes(sizes, capacity_mbps, config, ctx);
    const StallGradient sg = stall_gradient(sizes, capacity_mbps, config, ctx);
    solution.certificate.stall_residual = std::abs(tl.total_stall_s - sg.stall);
  }
  return solution;
}

RelaxedSolution solve_relaxed_expected(const FovDistribution& dist,
                                       std::span<const double> capacity_mbps,
                                       const VideoConfig& config, const Utility& utility,
                                       const QoeWeights& weights, const SolverSettings& settings) {
  return solve_relaxed_expected(dist, capacity_mbps, config, utility, weights, settings,
                                TimelineContext::cold_start(config));
}

RelaxedSolution solve_relaxed_robust(const std::vector<std::vector<int>>& robust_sets,
                                     std::span<const double> capacity_mbps,
                                     const VideoConfig& config, const Utility& utility,
                                     double lambda, const SolverSettings& settings,
                                     const TimelineContext& ctx) {
  if (!utility.concave()) throw std::invalid_argument("relaxed solver requires a concave utility");
  if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
  const int num_chunks = static_cast<int>(robust_sets.size());
  const int num_tiles = config.tiles_per_chunk();
  if (static_cast<int>(capacity_mbps.size()) < num_chunks) {
    throw std::invalid_argument("capacity list shorter than the horizon");
  }
  for (const auto& set : robust_sets) {
    if (set.empty()) throw std::invalid_argument("robust set is empty");
  }
  const double L = config.chunk_duration_s;

  Objective objective = [&, num_chunks, num_tiles](const ContinuousRatePlan& rates,
                                                   std::vector<double>* grad) {
    if (grad != nullptr) std::fill(grad->begin(), grad->end(), 0.0);
    double qoe = 0.0;
    for (int k = 0; k < num_chunks; ++k) {
      const auto& set = robust_sets[static_cast<std::size_t>(k)];
      double min_r = std::numeric_limits<double>::infinity();
      int argmin = -1;
      for (int t : set) {
        const double r = rates.rate(k, t);
        if (r < min_r) {
          min_r = r;
          argmin = t;
        }
      }
      qoe += utility(min_r);
      if (grad != nullptr) {
        (*grad)[static_cast<std::size_t>(k) * num_tiles + argmin] += utility.slope(min_r);
      }
    }
    const auto sizes = chunk_sizes_mbits(rates, config);
    const StallGradient sg = stall_gradient(sizes, capacity_mbps, config, ctx);
    if (grad != nullptr) {
      for (int k = 0; k < num_chunks; ++k) {
        const double coeff = lambda * sg.dstall_dsize[static_cast<std::size_t>(k)] * L;
        if (coeff == 0.0) continue;
        for (int t = 0; t < num_tiles; ++t) {
          (*grad)[static_cast<std::size_t>(k) * num_tiles + t] -= coeff;
        }
      }
    }
    return qoe - lambda * sg.stall;
  };

  const bool pairwise = settings.polish_singles;
  auto directions = [&, pairwise](const ContinuousRatePlan& rates) {
    DirectionSet dirs;
    std::vector<int> all(static_cast<std::size_t>(num_tiles));
    for (int t = 0; t < num_tiles; ++t) all[static_cast<std::size_t>(t)] = t;
    for (int k = 0; k < num_chunks; ++k) {
      dirs.add(k, all, num_tiles);
      const auto& set = robust_sets[static_cast<std::size_t>(k)];
      dirs.add(k, set, num_tiles);
      std::vector<int> flat_set;
      for (int t : set) flat_set.push_back(k * num_tiles + t);
      if (pairwise) dirs.add_pairwise_within(flat_set);
      dirs.chunk_groups.push_back(std::move(flat_set));
      dirs.chunk_group_weights.push_back(capacity_mbps[static_cast<std::size_t>(k)] /
                                         static_cast<double>(set.size()));

      double min_r = std::numeric_limits<double>::infinity();
      for (int t : set) min_r = std::min(min_r, rates.rate(k, t));
      std::vector<int> tied;
      for (int t : set) {
        if (rates.rate(k, t) <= min_r + 1e-12) tied.push_back(t);
      }
      dirs.add(k, tied, num_tiles);
      std::vector<char> in_set(static_cast<std::size_t>(num_tiles), 0);
      for (int t : set) in_set[static_cast<std::size_t>(t)] = 1;
      std::vector<int> outside;
      for (int t = 0; t < num_tiles; ++t) {
        if (!in_set[static_cast<std::size_t>(t)]) outside.push_back(t);
      }
      dirs.add(k, outside, num_tiles);
    }
    dirs.add_chunk_transfers();
    return dirs;
  };

  RelaxedSolution solution = solve(objective, config, num_chunks, settings, directions);
  solution.gamma.resize(static_cast<std::size_t>(num_chunks));
  for (int k = 0; k < num_chunks; ++k) {
    double min_r = std::numeric_limits<double>::infinity();
    for (int t : robust_sets[static_cast<std::size_t>(k)]) {
      min_r = std::min(min_r, solution.rates.rate(k, t));
    }
    solution.gamma[static_cast<std::size_t>(k)] = min_r;
  }
  // Cross-check the internal stall against the timeline module.
  {
    const auto sizes = chunk_sizes_mbits(solution.rates, config);
    const Timeline tl = compute_timeline_from_sizes(sizes, capacity_mbps, config, ctx);
    const StallGradient sg = stall_gradient(sizes, capacity_mbps, config, ctx);
    solution.certificate.stall_residual = std::abs(tl.total_stall_s - sg.stall);
  }
  return solution;
}

RelaxedSolution solve_relaxed_robust(const std::vector<std::vector<int>>& robust_sets,
                                     std::span<const double> capacity_mbps,
                                     const VideoConfig& config, const Utility& utility,
                                     double lambda, const SolverSettings& settings) {
  return solve_relaxed_robust(robust_sets, capacity_mbps, config, utility, lambda, settings,
                              TimelineContext::cold_start(config));
}

}  // namespace tilestream
