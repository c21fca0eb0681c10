#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "tilestream/online.hpp"
#include "tilestream/rng.hpp"

using namespace tilestream;

namespace {

VideoConfig online_config(int chunks) {
  VideoConfig c;
  c.num_chunks = chunks;
  c.tile_rows = 2;
  c.tile_cols = 4;
  c.viewport_rows = 1;
  c.viewport_cols = 2;
  c.chunk_duration_s = 2.0;
  c.rate_levels_mbps = {0.25, 0.5, 0.75, 1.0};
  c.startup_delay_s = 2.0;
  c.max_buffer_chunks = 10;
  return c;
}

ThroughputTrace constant_trace(double mbps) {
  ThroughputTrace trace;
  for (int t = 0; t < 30; ++t) trace.samples.push_back({static_cast<double>(t), mbps});
  return trace;
}

RatePlan random_plan(Rng& rng, const VideoConfig& config) {
  RatePlan plan = RatePlan::uniform(config, 0);
  for (auto& level : plan.levels) level = rng.next_int(0, config.top_level());
  return plan;
}

}  // namespace

TEST_SUITE("online") {

TEST_CASE("event simulation matches the constant-capacity timeline") {
  Rng rng(31337);
  for (int trial = 0; trial < 100; ++trial) {
    auto inst = oracle::random_instance(rng, 5, 2, 3, 3);
    const RatePlan plan = random_plan(rng, inst.config);
    const double mbps = inst.capacity_mbps[0];
    const ThroughputTrace trace = constant_trace(mbps);
    const std::vector<double> caps(static_cast<std::size_t>(inst.config.num_chunks), mbps);
    const Timeline closed = compute_timeline(plan, caps, inst.config);
    const Timeline event = event_simulate(plan, trace, inst.config);
    for (int k = 0; k < inst.config.num_chunks; ++k) {
      CHECK(event.download_finish_s[static_cast<std::size_t>(k)] ==
            doctest::Approx(closed.download_finish_s[static_cast<std::size_t>(k)])
                .epsilon(1e-6));
      CHECK(event.play_time_s[static_cast<std::size_t>(k)] ==
            doctest::Approx(closed.play_time_s[static_cast<std::size_t>(k)]).epsilon(1e-6));
    }
    CHECK(event.total_stall_s == doctest::Approx(closed.total_stall_s).epsilon(1e-6));
  }
}

TEST_CASE("event simulation drains a step trace exactly") {
  VideoConfig c = online_config(1);
  c.tile_rows = 1;
  c.tile_cols = 2;
  c.chunk_duration_s = 2.0;
  c.rate_levels_mbps = {7.5, 8.0};
  RatePlan plan = RatePlan::uniform(c, 0);
  plan.level(0, 1) = kUnfetched;  // single 7.5 Mbps tile -> 15 Mbit chunk

  ThroughputTrace steps;
  steps.samples = {{0.0, 10.0}, {2.0, 5.0}, {3.0, 5.0}};
  const Timeline tl = event_simulate(plan, steps, c);
  CHECK(tl.download_finish_s[0] == doctest::Approx(1.5));
}

TEST_CASE("an empty plan yields an empty realized timeline") {
  VideoConfig c = online_config(1);
  RatePlan plan;
  plan.num_chunks = 0;
  plan.num_tiles = c.tiles_per_chunk();
  const Timeline tl = event_simulate(plan, constant_trace(5.0), c);
  CHECK(tl.total_stall_s == 0.0);
  CHECK(tl.play_time_s.empty());
}

TEST_CASE("full warmup forces the all-base plan") {
  const VideoConfig c = online_config(6);
  const FovDistribution dist =
      synthetic_distribution(std::vector<int>(6, 1), 0.8, c);
  const ThroughputTrace trace = constant_trace(6.0);
  PredictionModel model;
  model.error_half_width = 0.2;
  model.seed = 5;
  OnlineSettings settings;
  settings.planner = "alg3";
  settings.window_chunks = 2;
  settings.warmup_chunks = 6;
  QoeWeights w;
  w.gamma = 0.1;
  w.lambda = 1000.0;
  w.alpha = 0.95;
  const RunResult run = run_online(settings, dist, trace, model, c, Utility::linear(), w, 9);
  for (int level : run.executed.levels) CHECK(level == 0);
  const Timeline direct = event_simulate(run.executed, trace, c);
  CHECK(run.realized.total_stall_s == direct.total_stall_s);
  CHECK(run.decisions.empty());
}

TEST_CASE("full information reduces online to offline") {
  const int K = 5;
  const VideoConfig c = online_config(K);
  const std::vector<int> anchors = {0, 1, 2, 2, 1};
  const FovDistribution dist = synthetic_distribution(anchors, 1.0, c);  // beta = 1
  const double mbps = 7.0;  // binding: the uniform top level would need 16 Mbps
  const ThroughputTrace trace = constant_trace(mbps);
  PredictionModel model;
  model.error_half_width = 0.0;  // p = 0
  QoeWeights w;
  w.gamma = 0.1;
  w.lambda = 1000.0;
  w.alpha = 0.95;
  const std::vector<double> caps(static_cast<std::size_t>(K), mbps);
  const auto sets = robust_sets(dist, w.alpha);

  OnlineSettings settings;
  settings.window_chunks = K;  // W >= K
  settings.warmup_chunks = 0;
  settings.solver = SolverSettings::precise();

  SUBCASE("algorithm 3") {
    settings.planner = "alg3";
    const RunResult run = run_online(settings, dist, trace, model, c, Utility::linear(), w, 3);
    const auto offline = algorithm3(sets, caps, c, w.lambda);
    CHECK(run.executed.levels == offline.plan.levels);
  }
  SUBCASE("uniform baseline") {
    settings.planner = "baseline";
    const RunResult run = run_online(settings, dist, trace, model, c, Utility::linear(), w, 3);
    const auto offline = baseline_uniform(caps, c);
    CHECK(run.executed.levels == offline.plan.levels);
  }
  SUBCASE("greedy baseline") {
    settings.planner = "greedy";
    const RunResult run = run_online(settings, dist, trace, model, c, Utility::linear(), w, 3);
    const auto offline = baseline_greedy_fov(dist, caps, c);
    CHECK(run.executed.levels == offline.plan.levels);
  }
  SUBCASE("algorithm 1 under abundant capacity") {
    const ThroughputTrace rich = constant_trace(1000.0);
    const std::vector<double> rich_caps(static_cast<std::size_t>(K), 1000.0);
    settings.planner = "alg1";
    const RunResult run = run_online(settings, dist, rich, model, c, Utility::linear(), w, 3);
    const auto sol = solve_relaxed_expected(dist, rich_caps, c, Utility::linear(), w,
                                            settings.solver);
    const auto offline = algorithm1(sol.rates, dist, rich_caps, c, Utility::linear(), w);
    CHECK(run.executed.levels == offline.plan.levels);
    // The certain viewport's tiles ride at the ladder top.
    for (int k = 0; k < K; ++k) {
      for (int t : viewport_at(c, anchors[static_cast<std::size_t>(k)]).tiles) {
        CHECK(run.executed.level(k, t) == c.top_level());
      }
    }
  }
  SUBCASE("algorithm 2 under abundant capacity") {
    const ThroughputTrace rich = constant_trace(1000.0);
    const std::vector<double> rich_caps(static_cast<std::size_t>(K), 1000.0);
    settings.planner = "alg2";
    const RunResult run = run_online(settings, dist, rich, model, c, Utility::linear(), w, 3);
    const auto sol = solve_relaxed_robust(sets, rich_caps, c, Utility::linear(), w.lambda,
                                          settings.solver);
    const auto offline = algorithm2(sol.rates, sets, rich_caps, c);
    CHECK(run.executed.levels == offline.plan.levels);
  }
}

TEST_CASE("decisions are causal and committed once") {
  const int K = 8;
  const VideoConfig c = online_config(K);
  const FovDistribution dist =
      synthetic_distribution(std::vector<int>(static_cast<std::size_t>(K), 2), 0.8, c);
  const ThroughputTrace trace = synth_trace({}, 77);
  PredictionModel model;
  model.error_half_width = 0.25;
  OnlineSettings settings;
  settings.planner = "alg3";
  settings.window_chunks = 3;
  settings.warmup_chunks = 1;
  QoeWeights w;
  w.gamma = 0.1;
  w.lambda = 1000.0;
  w.alpha = 0.95;
  const RunResult run = run_online(settings, dist, trace, model, c, Utility::linear(), w, 11);

  REQUIRE(run.decisions.size() == static_cast<std::size_t>(K - 1));
  for (const auto& d : run.decisions) {
    CHECK(d.clock_s <=
          run.realized.download_start_s[static_cast<std::size_t>(d.committed_chunk)] + 1e-12);
    for (int t = 0; t < c.tiles_per_chunk(); ++t) {
      CHECK(run.executed.level(d.committed_chunk, t) ==
            d.committed_levels[static_cast<std::size_t>(t)]);
    }
    CHECK(static_cast<int>(d.predicted_capacity_mbps.size()) ==
          std::min(settings.window_chunks, K - d.committed_chunk));
  }
  const std::string log = decision_log_jsonl(run);
  CHECK(std::count(log.begin(), log.end(), '\n') == K - 1);
}

TEST_CASE("runs are reproducible from the seed") {
  const int K = 6;
  const VideoConfig c = online_config(K);
  const FovDistribution dist =
      synthetic_distribution(std::vector<int>(static_cast<std::size_t>(K), 2), 0.7, c);
  const ThroughputTrace trace = synth_trace({}, 5);
  PredictionModel model;
  model.error_half_width = 0.2;
  OnlineSettings settings;
  settings.planner = "alg1";
  settings.window_chunks = 2;
  QoeWeights w;
  w.gamma = 0.5;
  w.lambda = 1000.0;
  w.alpha = 0.95;
  const RunResult a = run_online(settings, dist, trace, model, c, Utility::linear(), w, 42);
  const RunResult b = run_online(settings, dist, trace, model, c, Utility::linear(), w, 42);
  CHECK(a.executed.levels == b.executed.levels);
  CHECK(a.realized.total_stall_s == b.realized.total_stall_s);
  CHECK(a.report.mean_fov_rate_mbps == b.report.mean_fov_rate_mbps);

  const RunResult other = run_online(settings, dist, trace, model, c, Utility::linear(), w, 43);
  CHECK(a.realized.total_stall_s >= 0.0);
  CHECK(other.realized.total_stall_s >= 0.0);
}

TEST_CASE("frozen predictions and frozen robust sets still run deterministically") {
  const int K = 5;
  const VideoConfig c = online_config(K);
  const FovDistribution dist =
      synthetic_distribution(std::vector<int>(static_cast<std::size_t>(K), 1), 0.8, c);
  const ThroughputTrace trace = synth_trace({}, 3);
  PredictionModel model;
  model.error_half_width = 0.2;
  OnlineSettings settings;
  settings.planner = "alg3";
  settings.window_chunks = 2;
  settings.repredict_bandwidth = false;
  settings.repredict_fov = false;
  QoeWeights w;
  w.gamma = 0.1;
  w.lambda = 1000.0;
  w.alpha = 0.95;
  const RunResult a = run_online(settings, dist, trace, model, c, Utility::linear(), w, 8);
  const RunResult b = run_online(settings, dist, trace, model, c, Utility::linear(), w, 8);
  CHECK(a.executed.levels == b.executed.levels);
  // With p = 0 the frozen and redrawn variants see identical predictions.
  model.error_half_width = 0.0;
  settings.capacity_derate = 1.0;
  const RunResult frozen = run_online(settings, dist, trace, model, c, Utility::linear(), w, 8);
  settings.repredict_bandwidth = true;
  settings.repredict_fov = true;
  const RunResult fresh = run_online(settings, dist, trace, model, c, Utility::linear(), w, 8);
  CHECK(frozen.executed.levels == fresh.executed.levels);
}

TEST_CASE("the exhaustive oracle drives the online loop at desk scale") {
  VideoConfig c;
  c.num_chunks = 3;
  c.tile_rows = 1;
  c.tile_cols = 2;
  c.viewport_rows = 1;
  c.viewport_cols = 1;
  c.chunk_duration_s = 2.0;
  c.rate_levels_mbps = {0.25, 1.0};
  c.startup_delay_s = 2.0;
  c.max_buffer_chunks = 4;
  const FovDistribution dist =
      synthetic_distribution(std::vector<int>{0, 1, 0}, 0.9, c);
  const ThroughputTrace trace = constant_trace(5.0);
  PredictionModel model;
  OnlineSettings settings;
  settings.planner = "oracle";
  settings.window_chunks = 2;
  settings.warmup_chunks = 0;
  QoeWeights w;
  w.gamma = 0.5;
  w.lambda = 1000.0;
  w.alpha = 0.95;
  const RunResult run = run_online(settings, dist, trace, model, c, Utility::linear(), w, 2);
  CHECK(run.executed.feasible(c));
  CHECK(run.realized.total_stall_s >= 0.0);
}

TEST_CASE("online settings validation") {
  const VideoConfig c = online_config(4);
  OnlineSettings settings;
  settings.window_chunks = 0;
  CHECK_THROWS_AS(settings.validate(c), std::invalid_argument);
  settings.window_chunks = 2;
  settings.warmup_chunks = 5;
  CHECK_THROWS_AS(settings.validate(c), std::invalid_argument);
  settings.warmup_chunks = 1;
  settings.planner = "nope";
  CHECK_THROWS_AS(settings.validate(c), std::invalid_argument);
}

}  // TEST_SUITE
