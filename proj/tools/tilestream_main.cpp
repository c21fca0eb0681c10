#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "tilestream/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"tilestream: tile-based 360-degree streaming planner and trace-driven simulator"};
  app.require_subcommand(1);

  std::string config_path;
  auto* validate = app.add_subcommand("validate", "Check an experiment config without running it");
  validate->add_option("config", config_path, "experiment config (JSON)")->required();

  std::string run_config;
  int jobs = 0;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  auto* run = app.add_subcommand("run", "Run the full experiment suite");
  run->add_option("config", run_config, "experiment config (JSON)")->required();
  run->add_option("--jobs", jobs, "worker threads (default: all cores)");
  run->add_option("--out", out_dir, "output directory override");
  run->add_option("--seed", seed, "base seed override")->each([&](const std::string&) {
    seed_set = true;
  });

  tilestream::SynthTraceSpec spec;
  std::string synth_dir = "traces";
  auto* synth = app.add_subcommand("synth-traces", "Write synthetic piecewise-constant traces");
  synth->add_option("--out", synth_dir, "output directory");
  synth->add_option("--count", spec.count, "number of traces");
  synth->add_option("--duration", spec.params.duration_s, "trace duration in seconds");
  synth->add_option("--mean", spec.params.mean_mbps, "mean throughput in Mbps");
  synth->add_option("--jitter", spec.params.relative_jitter, "relative level jitter in [0,1)");
  synth->add_option("--segment", spec.params.segment_s, "seconds between level changes");
  synth->add_option("--seed", spec.seed, "generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      const auto report = tilestream::validate_config(config_path);
      for (const auto& w : report.warnings) std::printf("warning: %s\n", w.c_str());
      for (const auto& e : report.errors) std::printf("error: %s\n", e.c_str());
      if (report.ok() && report.warnings.empty()) std::printf("config ok\n");
      return report.ok() ? 0 : 1;
    }
    if (run->parsed()) {
      tilestream::SuiteOverrides overrides;
      if (jobs > 0) overrides.jobs = jobs;
      if (!out_dir.empty()) overrides.output_dir = out_dir;
      if (seed_set) overrides.base_seed = seed;
      return tilestream::run_suite(run_config, overrides);
    }
    if (synth->parsed()) {
      tilestream::write_synth_traces(synth_dir, spec);
      std::printf("wrote %d traces to %s\n", spec.count, synth_dir.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
