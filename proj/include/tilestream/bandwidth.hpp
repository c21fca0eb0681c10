#ifndef TILESTREAM_BANDWIDTH_HPP_
#define TILESTREAM_BANDWIDTH_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "tilestream/rng.hpp"
#include "tilestream/types.hpp"

namespace tilestream {

// Measured throughput samples. Sample i covers [t_i, t_{i+1}); the last
// sample inherits the preceding spacing (1 s for a single-sample trace).
// Past its end the trace repeats cyclically.
struct ThroughputTrace {
  struct Sample {
    double t_s = 0.0;
    double mbps = 0.0;
  };
  std::vector<Sample> samples;
  std::string name;

  double start_s() const { return samples.front().t_s; }
  double period_s() const;
  double end_s() const { return start_s() + period_s(); }
  void validate() const;
};

// CSV format: header "t_s,mbps", one sample per row. Every throughput value
// is multiplied by scale_factor on load. A positive min_duration_s rejects
// traces shorter than that many seconds.
ThroughputTrace load_trace(const std::string& path, double scale_factor,
                           double min_duration_s = 0.0);
void save_trace(const std::string& path, const ThroughputTrace& trace);

// Megabits deliverable over [t0, t1) with the trace extended cyclically.
double transfer_mbits(const ThroughputTrace& trace, double t0, double t1);

// Time-weighted average throughput over [t0, t1), cyclic.
double true_capacity(const ThroughputTrace& trace, double t0, double t1);

// Earliest time by which mbits megabits finish downloading when the
// transfer starts at start_s.
double advance_time(const ThroughputTrace& trace, double start_s, double mbits);

// Multiplicative prediction-error model: each predicted capacity is the true
// slot average times (1 + e), e drawn uniformly from [-p, p].
struct PredictionModel {
  double error_half_width = 0.0;  // p in [0, 1)
  double scale_factor = 1.0;      // extra multiplier applied to predictions
  std::uint64_t seed = 0;

  void validate() const;
};

// Predicted capacity for the next horizon_chunks chunks: chunk j is mapped
// to the nominal slot [window_start_s + j*L, window_start_s + (j+1)*L).
// When rng is null a generator seeded from the model is used, so identical
// arguments always yield identical predictions; an online driver passes its
// own generator to redraw errors at every invocation.
std::vector<double> predicted_capacity(const ThroughputTrace& trace,
                                       const PredictionModel& model,
                                       double window_start_s, int horizon_chunks,
                                       const VideoConfig& config, Rng* rng = nullptr);

// Seeded piecewise-constant synthetic trace.
struct SynthTraceParams {
  double duration_s = 300.0;
  double mean_mbps = 12.0;
  double relative_jitter = 0.5;  // each segment's level in mean*(1 +/- jitter)
  double segment_s = 10.0;       // nominal level-change period
};

ThroughputTrace synth_trace(const SynthTraceParams& params, std::uint64_t seed);

}  // namespace tilestream

#endif  // TILESTREAM_BANDWIDTH_HPP_
