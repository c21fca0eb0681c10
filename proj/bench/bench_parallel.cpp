// Compares the serial reference implementations against the OpenMP paths:
// the exhaustive plan enumeration and the experiment-sweep fan-out.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tilestream/online.hpp"
#include "tilestream/planners.hpp"
#include "tilestream/qoe.hpp"
#include "tilestream/rng.hpp"

using namespace tilestream;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void bench_brute_force() {
  VideoConfig c;
  c.num_chunks = 2;
  c.tile_rows = 1;
  c.tile_cols = 7;
  c.viewport_rows = 1;
  c.viewport_cols = 3;
  c.chunk_duration_s = 2.0;
  c.rate_levels_mbps = {0.25, 0.5, 1.0};
  c.startup_delay_s = 2.0;
  c.max_buffer_chunks = 4;

  const FovDistribution dist = synthetic_distribution(std::vector<int>{1, 3}, 0.7, c);
  const std::vector<double> caps = {4.0, 3.0};
  QoeWeights w;
  w.gamma = 0.3;
  w.lambda = 1000.0;

  const auto t_serial = Clock::now();
  const auto serial = brute_force_optimal(ObjectiveKind::kExpected, &dist, nullptr, caps, c,
                                          Utility::linear(), w, false);
  const double serial_s = seconds_since(t_serial);

  const auto t_parallel = Clock::now();
  const auto parallel = brute_force_optimal(ObjectiveKind::kExpected, &dist, nullptr, caps, c,
                                            Utility::linear(), w, true);
  const double parallel_s = seconds_since(t_parallel);

  const bool identical =
      serial.objective == parallel.objective && serial.plan.levels == parallel.plan.levels;
  std::printf("brute force over %llu plans:\n",
              static_cast<unsigned long long>(serial.plans_evaluated));
  std::printf("  serial   %7.3f s\n", serial_s);
  std::printf("  parallel %7.3f s   speedup %.2fx   results identical: %s\n", parallel_s,
              serial_s / parallel_s, identical ? "yes" : "NO");
}

void bench_sweep() {
  VideoConfig c;
  c.num_chunks = 24;
  c.tile_rows = 4;
  c.tile_cols = 8;
  c.viewport_rows = 2;
  c.viewport_cols = 3;
  c.chunk_duration_s = 2.0;
  c.rate_levels_mbps = {0.25, 0.5, 0.75, 1.0};
  c.startup_delay_s = 2.0;
  c.max_buffer_chunks = 10;

  const int runs = 16;
  std::vector<ThroughputTrace> traces;
  std::vector<FovDistribution> dists;
  std::vector<std::uint64_t> seeds;
  Rng rng(4242);
  SynthTraceParams params;
  params.duration_s = 80.0;
  params.mean_mbps = 14.0;
  for (int i = 0; i < runs; ++i) {
    traces.push_back(synth_trace(params, rng.next_u64()));
    const auto anchors = [&] {
      Rng walk(rng.next_u64());
      std::vector<int> a(static_cast<std::size_t>(c.num_chunks));
      for (auto& v : a) v = walk.next_int(0, 2) * c.tile_cols + walk.next_int(0, c.tile_cols - 1);
      return a;
    }();
    dists.push_back(synthetic_distribution(anchors, 0.8, c));
    seeds.push_back(rng.next_u64());
  }

  const auto run_one = [&](int i) {
    OnlineSettings settings;
    settings.planner = "alg1";
    settings.window_chunks = 2;
    settings.solver = SolverSettings::fast();
    PredictionModel model;
    model.error_half_width = 0.2;
    QoeWeights w;
    w.gamma = 0.1;
    w.lambda = 1000.0;
    w.alpha = 0.95;
    return run_online(settings, dists[static_cast<std::size_t>(i)],
                      traces[static_cast<std::size_t>(i)], model, c, Utility::linear(), w,
                      seeds[static_cast<std::size_t>(i)])
        .realized.total_stall_s;
  };

  std::vector<double> serial_out(runs), parallel_out(runs);
  const auto t_serial = Clock::now();
  for (int i = 0; i < runs; ++i) serial_out[static_cast<std::size_t>(i)] = run_one(i);
  const double serial_s = seconds_since(t_serial);

  const auto t_parallel = Clock::now();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int i = 0; i < runs; ++i) parallel_out[static_cast<std::size_t>(i)] = run_one(i);
  const double parallel_s = seconds_since(t_parallel);

  std::printf("online-run sweep, %d runs:\n", runs);
  std::printf("  serial   %7.3f s\n", serial_s);
  std::printf("  parallel %7.3f s   speedup %.2fx   results identical: %s\n", parallel_s,
              serial_s / parallel_s, serial_out == parallel_out ? "yes" : "NO");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled\n");
#endif
  bench_brute_force();
  bench_sweep();
  return 0;
}
