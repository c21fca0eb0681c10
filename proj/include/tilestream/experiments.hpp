#ifndef TILESTREAM_EXPERIMENTS_HPP_
#define TILESTREAM_EXPERIMENTS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tilestream/bandwidth.hpp"
#include "tilestream/online.hpp"
#include "tilestream/types.hpp"

namespace tilestream {

struct SynthTraceSpec {
  int count = 20;
  SynthTraceParams params;
  std::uint64_t seed = 1;
};

// Full experiment-suite description, loaded from a single JSON file.
// Sweeps vary one dimension at a time around the defaults; the gamma sweep
// is crossed with every beta in beta_grid.
struct ExperimentConfig {
  VideoConfig video;
  std::string utility = "linear";
  double alpha = 0.95;
  double lambda = 1000.0;

  double default_gamma = 0.1;
  double default_beta = 0.8;
  double default_p = 0.2;
  int default_window = 2;
  int warmup = 1;

  std::vector<double> gamma_grid;
  std::vector<double> beta_grid;
  std::vector<double> p_grid;
  std::vector<int> window_grid;
  std::vector<std::string> planners;

  std::string trace_dir;  // empty when synthetic traces are used
  double trace_scale = 1.0;
  double min_trace_duration_s = 0.0;
  std::optional<SynthTraceSpec> synth;

  int seeds_per_point = 5;
  std::uint64_t base_seed = 1;
  std::string output_dir = "out";
  int jobs = 0;  // 0 = all hardware threads
  int bootstrap_resamples = 1000;
  bool write_decision_logs = true;
  SolverSettings solver = SolverSettings::fast();

  static ExperimentConfig from_json_file(const std::string& path);
  std::string to_json() const;
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

// Schema, trace availability, and grid sanity checks; no side effects.
ValidationReport validate_config(const std::string& path);

struct SuiteOverrides {
  std::optional<int> jobs;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> base_seed;
};

// Runs the full sweep: one online run per (sweep point x planner x trace x
// seed), per-run JSON-lines, per-figure aggregate CSVs, and a summary with
// bootstrap confidence intervals. Returns a nonzero exit status if any run
// failed (failures are reported per run in errors.txt).
int run_suite(const std::string& config_path, const SuiteOverrides& overrides = {});

// Writes `count` synthetic trace CSVs into the directory.
void write_synth_traces(const std::string& dir, const SynthTraceSpec& spec);

// Designated-viewport anchors following a seeded random walk (one of
// stay/up/down/left/right per chunk; columns wrap, rows clamp).
std::vector<int> designated_walk(const VideoConfig& config, std::uint64_t seed);

}  // namespace tilestream

#endif  // TILESTREAM_EXPERIMENTS_HPP_
