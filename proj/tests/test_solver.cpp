#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "tilestream/planners.hpp"
#include "tilestream/qoe.hpp"
#include "tilestream/relaxed_solver.hpp"
#include "tilestream/rng.hpp"

using namespace tilestream;

namespace {

FovDistribution point_mass_full(const VideoConfig& config) {
  // One viewport covering the whole (1 x N) strip, certain.
  FovDistribution dist;
  dist.chunks.resize(static_cast<std::size_t>(config.num_chunks));
  for (auto& chunk : dist.chunks) chunk.push_back({viewport_at(config, 0), 1.0});
  return dist;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("abundant bandwidth drives every rate to the ladder top") {
  VideoConfig c;
  c.num_chunks = 3;
  c.tile_rows = 1;
  c.tile_cols = 2;
  c.viewport_rows = 1;
  c.viewport_cols = 2;
  c.chunk_duration_s = 2.0;
  c.rate_levels_mbps = {0.25, 0.5, 0.75, 1.0};
  c.startup_delay_s = 1.0;
  c.max_buffer_chunks = 10;

  const FovDistribution dist = point_mass_full(c);
  const std::vector<double> caps(3, 1e6);
  QoeWeights w;
  w.gamma = 0.5;
  w.lambda = 1000.0;
  const auto sol = solve_relaxed_expected(dist, caps, c, Utility::linear(), w,
                                          SolverSettings::precise());
  for (double r : sol.rates.rates_mbps) CHECK(r == 1.0);
  CHECK(sol.certificate.box_residual <= 1e-9);
  CHECK(sol.certificate.stall_residual <= 1e-6);

  const std::vector<std::vector<int>> sets(3, std::vector<int>{0, 1});
  const auto robust = solve_relaxed_robust(sets, caps, c, Utility::linear(), 1000.0,
                                           SolverSettings::precise());
  for (double g : robust.gamma) CHECK(g == doctest::Approx(1.0));
}

TEST_CASE("tight budget splits the min objective evenly") {
  // Two tiles, one chunk, certain FoV over both tiles, linear utility,
  // gamma 0: the optimum puts both tiles at 0.75 where the zero-stall budget
  // binds.
  VideoConfig c;
  c.num_chunks = 1;
  c.tile_rows = 1;
  c.tile_cols = 2;
  c.viewport_rows = 1;
  c.viewport_cols = 2;
  c.chunk_duration_s = 2.0;
  c.rate_levels_mbps = {0.25, 1.0};
  c.startup_delay_s = 3.0;
  c.max_buffer_chunks = 10;

  const FovDistribution dist = point_mass_full(c);
  const std::vector<double> caps = {1.0};
  QoeWeights w;
  w.gamma = 0.0;
  w.lambda = 1000.0;
  const auto sol = solve_relaxed_expected(dist, caps, c, Utility::linear(), w,
                                          SolverSettings::precise());
  CHECK(sol.rates.rate(0, 0) == doctest::Approx(0.75).epsilon(1e-3));
  CHECK(sol.rates.rate(0, 1) == doctest::Approx(0.75).epsilon(1e-3));
  CHECK(sol.objective_value == doctest::Approx(0.75).epsilon(1e-3));

  // Independent two-variable refining grid search.
  const auto objective = [&](const ContinuousRatePlan& rates) {
    return objective_expected(rates, dist, caps, c, Utility::linear(), w);
  };
  const double grid_best = oracle::grid_search_grouped({{0}, {1}}, c, 1, objective, 751, 10);
  CHECK(sol.objective_value >= grid_best - 1e-6);
}

TEST_CASE("relaxed optimum dominates every discrete plan") {
  Rng rng(808);
  int instances = 0;
  while (instances < 40) {
    auto inst = oracle::random_instance(rng, 3, 2, 2, 3);
    const int digits = inst.config.num_chunks * inst.config.tiles_per_chunk();
    if (std::pow(inst.config.num_levels(), digits) > 40000.0) continue;
    ++instances;

    QoeWeights w;
    w.gamma = rng.next_uniform(0.0, 1.0);
    w.lambda = rng.next_int(0, 1) == 0 ? 10.0 : 1000.0;
    const auto sol = solve_relaxed_expected(inst.dist, inst.capacity_mbps, inst.config,
                                            Utility::linear(), w, SolverSettings::precise());
    const auto brute = brute_force_optimal(ObjectiveKind::kExpected, &inst.dist, nullptr,
                                           inst.capacity_mbps, inst.config, Utility::linear(),
                                           w, true);
    CHECK(sol.objective_value >= brute.objective);
  }
}

TEST_CASE("linear-utility solver matches an independent grid search") {
  Rng rng(909);
  for (int trial = 0; trial < 12; ++trial) {
    VideoConfig c;
    c.num_chunks = rng.next_int(1, 2);
    c.tile_rows = 1;
    c.tile_cols = rng.next_int(2, 4);
    c.viewport_rows = 1;
    c.viewport_cols = c.tile_cols;  // certain full-strip viewport
    c.chunk_duration_s = rng.next_int(1, 2);
    c.rate_levels_mbps = {0.25, 1.0};
    c.startup_delay_s = rng.next_int(1, 3);
    c.max_buffer_chunks = 10;

    const FovDistribution dist = point_mass_full(c);
    std::vector<double> caps(static_cast<std::size_t>(c.num_chunks));
    for (auto& cap : caps) {
      cap = c.tile_cols * rng.next_uniform(0.3 * c.base_rate_mbps(), 1.2 * c.top_rate_mbps());
    }
    QoeWeights w;
    w.gamma = 0.0;
    w.lambda = 1000.0;
    const auto sol = solve_relaxed_expected(dist, caps, c, Utility::linear(), w,
                                            SolverSettings::precise());

    // With a certain viewport and gamma = 0 the optimum is uniform per
    // chunk, so a per-chunk grouped grid search is an exact oracle.
    std::vector<std::vector<int>> groups;
    for (int k = 0; k < c.num_chunks; ++k) {
      std::vector<int> group;
      for (int t = 0; t < c.tiles_per_chunk(); ++t) group.push_back(k * c.tiles_per_chunk() + t);
      groups.push_back(std::move(group));
    }
    const auto objective = [&](const ContinuousRatePlan& rates) {
      return objective_expected(rates, dist, caps, c, Utility::linear(), w);
    };
    const double grid_best = oracle::grid_search_grouped(groups, c, c.num_chunks, objective, 751, 10);
    const double scale = std::max(1.0, std::abs(grid_best));
    CHECK(std::abs(sol.objective_value - grid_best) / scale <= 1e-4);
  }
}

TEST_CASE("robust solutions keep tiles outside the set at the base layer") {
  Rng rng(1212);
  for (int trial = 0; trial < 15; ++trial) {
    auto inst = oracle::random_instance(rng, 3, 2, 3, 2);
    std::vector<std::vector<int>> sets;
    for (int k = 0; k < inst.config.num_chunks; ++k) {
      sets.push_back(robust_set(inst.dist, k, 0.9));
    }
    // Binding capacities so pushing useless tiles up would cost stall.
    for (auto& cap : inst.capacity_mbps) cap *= 0.8;
    const auto sol = solve_relaxed_robust(sets, inst.capacity_mbps, inst.config,
                                          Utility::linear(), 1000.0, SolverSettings::precise());
    for (int k = 0; k < inst.config.num_chunks; ++k) {
      std::vector<char> in_set(static_cast<std::size_t>(inst.config.tiles_per_chunk()), 0);
      for (int t : sets[static_cast<std::size_t>(k)]) in_set[static_cast<std::size_t>(t)] = 1;
      double min_in = inst.config.top_rate_mbps();
      for (int t = 0; t < inst.config.tiles_per_chunk(); ++t) {
        if (!in_set[static_cast<std::size_t>(t)]) {
          CHECK(sol.rates.rate(k, t) <= inst.config.base_rate_mbps() + 1e-6);
        } else {
          min_in = std::min(min_in, sol.rates.rate(k, t));
        }
      }
      CHECK(sol.gamma[static_cast<std::size_t>(k)] == doctest::Approx(min_in).epsilon(1e-9));
    }
  }
}

TEST_CASE("identical inputs give bit-identical solutions") {
  Rng rng(33);
  auto inst = oracle::random_instance(rng, 3, 2, 3, 3);
  QoeWeights w;
  w.gamma = 0.3;
  w.lambda = 500.0;
  const auto a = solve_relaxed_expected(inst.dist, inst.capacity_mbps, inst.config,
                                        Utility::linear(), w, SolverSettings::precise());
  const auto b = solve_relaxed_expected(inst.dist, inst.capacity_mbps, inst.config,
                                        Utility::linear(), w, SolverSettings::precise());
  CHECK(a.objective_value == b.objective_value);
  CHECK(a.rates.rates_mbps == b.rates.rates_mbps);
}

TEST_CASE("relaxed robust optimum hits the attainable discrete value exactly") {
  // Two chunks, two tiles, robust set {0}, ladder {1, 2}, ample capacity:
  // the discrete optimum (both set tiles at 2, both others at 1) is also the
  // relaxed optimum, with value 4.
  VideoConfig c;
  c.num_chunks = 2;
  c.tile_rows = 1;
  c.tile_cols = 2;
  c.viewport_rows = 1;
  c.viewport_cols = 1;
  c.chunk_duration_s = 1.0;
  c.rate_levels_mbps = {1.0, 2.0};
  c.startup_delay_s = 1.0;
  c.max_buffer_chunks = 10;
  const std::vector<std::vector<int>> sets = {{0}, {0}};
  const std::vector<double> caps = {4.0, 4.0};
  const double lambda = 5.0;

  const auto sol = solve_relaxed_robust(sets, caps, c, Utility::linear(), lambda,
                                        SolverSettings::precise());
  CHECK(sol.objective_value == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(sol.gamma == std::vector<double>{2.0, 2.0});
  const auto brute = brute_force_optimal(ObjectiveKind::kRobust, nullptr, &sets, caps, c,
                                         Utility::linear(), QoeWeights{0.0, lambda, 1.0}, true);
  CHECK(brute.objective == doctest::Approx(sol.objective_value).epsilon(1e-12));
}

TEST_CASE("non-concave utilities are rejected") {
  VideoConfig c;
  c.num_chunks = 1;
  c.tile_rows = 1;
  c.tile_cols = 2;
  c.viewport_rows = 1;
  c.viewport_cols = 1;
  c.chunk_duration_s = 1.0;
  c.rate_levels_mbps = {0.25, 1.0};
  c.startup_delay_s = 1.0;
  c.max_buffer_chunks = 2;
  const FovDistribution dist = point_mass_full(c);
  QoeWeights w;
  CHECK_THROWS_AS(solve_relaxed_expected(dist, std::vector<double>{1.0}, c, Utility::power(1.5),
                                         w, SolverSettings::fast()),
                  std::invalid_argument);
}

TEST_CASE("concave non-linear utilities solve cleanly") {
  VideoConfig c;
  c.num_chunks = 2;
  c.tile_rows = 1;
  c.tile_cols = 2;
  c.viewport_rows = 1;
  c.viewport_cols = 2;
  c.chunk_duration_s = 2.0;
  c.rate_levels_mbps = {0.25, 0.5, 1.0};
  c.startup_delay_s = 2.0;
  c.max_buffer_chunks = 10;
  const FovDistribution dist = point_mass_full(c);
  const std::vector<double> caps = {1.2, 0.9};
  QoeWeights w;
  w.gamma = 0.4;
  w.lambda = 100.0;
  for (const Utility& u : {Utility::power(0.5), Utility::log()}) {
    const auto sol = solve_relaxed_expected(dist, caps, c, u, w, SolverSettings::precise());
    CHECK(sol.rates.within_box(c));
    CHECK(std::isfinite(sol.objective_value));
    // A feasible discrete plan can never beat the relaxed optimum.
    const auto brute = brute_force_optimal(ObjectiveKind::kExpected, &dist, nullptr, caps, c,
                                           u, w, true);
    CHECK(sol.objective_value >= brute.objective - 1e-9);
  }
}

}  // TEST_SUITE
