#include "tilestream/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "json.hpp"
#include "tilestream/qoe.hpp"
#include "tilestream/rng.hpp"

namespace tilestream {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return buf;
}

json video_to_json(const VideoConfig& v) {
  return json{{"num_chunks", v.num_chunks},
              {"tile_rows", v.tile_rows},
              {"tile_cols", v.tile_cols},
              {"chunk_duration_s", v.chunk_duration_s},
              {"rate_levels_mbps", v.rate_levels_mbps},
              {"viewport_rows", v.viewport_rows},
              {"viewport_cols", v.viewport_cols},
              {"startup_delay_s", v.startup_delay_s},
              {"max_buffer_chunks", v.max_buffer_chunks}};
}

VideoConfig video_from_json(const json& j) {
  VideoConfig v;
  v.num_chunks = j.at("num_chunks").get<int>();
  v.tile_rows = j.at("tile_rows").get<int>();
  v.tile_cols = j.at("tile_cols").get<int>();
  v.chunk_duration_s = j.at("chunk_duration_s").get<double>();
  v.rate_levels_mbps = j.at("rate_levels_mbps").get<std::vector<double>>();
  v.viewport_rows = j.at("viewport_rows").get<int>();
  v.viewport_cols = j.at("viewport_cols").get<int>();
  v.startup_delay_s = j.at("startup_delay_s").get<double>();
  v.max_buffer_chunks = j.at("max_buffer_chunks").get<int>();
  return v;
}

// One sweep point: everything that varies between aggregated x-axis values.
struct SweepPoint {
  std::string figure;  // gamma | window | beta | p
  double gamma, beta, p;
  int window;
  double x;  // the swept value (window cast to double)
};

struct RunTask {
  int index = 0;
  SweepPoint point;
  std::string planner;
  int trace_index = 0;
  int seed_index = 0;
};

struct RunOutcome {
  bool failed = false;
  std::string error;
  double objective_expected = 0.0;
  double objective_robust = 0.0;
  double stall_s = 0.0;
  double mean_fov_rate = 0.0;
  double mean_min_fov_rate = 0.0;
  double guaranteed_rate = 0.0;
  std::vector<long long> histogram;
  std::string decision_log;
};

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  Rng rng(a ^ (b * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL));
  return rng.next_u64();
}

struct Aggregate {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int n = 0;
};

Aggregate bootstrap(const std::vector<double>& values, int resamples, std::uint64_t seed) {
  Aggregate agg;
  agg.n = static_cast<int>(values.size());
  if (values.empty()) return agg;
  double sum = 0.0;
  for (double v : values) sum += v;
  agg.mean = sum / static_cast<double>(values.size());
  if (values.size() == 1 || resamples <= 0) {
    agg.lo = agg.hi = agg.mean;
    return agg;
  }
  Rng rng(seed);
  std::vector<double> means(static_cast<std::size_t>(resamples));
  for (int r = 0; r < resamples; ++r) {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      s += values[rng.next_int(0, static_cast<int>(values.size()) - 1)];
    }
    means[static_cast<std::size_t>(r)] = s / static_cast<double>(values.size());
  }
  std::sort(means.begin(), means.end());
  const auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(resamples - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    if (i + 1 >= means.size()) return means.back();
    return means[i] * (1.0 - frac) + means[i + 1] * frac;
  };
  agg.lo = quantile(0.025);
  agg.hi = quantile(0.975);
  return agg;
}

}  // namespace

std::vector<int> designated_walk(const VideoConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  const int anchor_rows = config.tile_rows - config.viewport_rows + 1;
  const int cols = config.tile_cols;
  int row = rng.next_int(0, anchor_rows - 1);
  int col = rng.next_int(0, cols - 1);
  std::vector<int> anchors(static_cast<std::size_t>(config.num_chunks));
  for (int k = 0; k < config.num_chunks; ++k) {
    anchors[static_cast<std::size_t>(k)] = row * cols + col;
    switch (rng.next_int(0, 4)) {
      case 1:
        row = std::max(0, row - 1);
        break;
      case 2:
        row = std::min(anchor_rows - 1, row + 1);
        break;
      case 3:
        col = (col + cols - 1) % cols;
        break;
      case 4:
        col = (col + 1) % cols;
        break;
      default:
        break;
    }
  }
  return anchors;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  json j;
  in >> j;

  ExperimentConfig c;
  c.video = video_from_json(j.at("video"));
  c.utility = j.value("utility", c.utility);
  c.alpha = j.value("alpha", c.alpha);
  c.lambda = j.value("lambda", c.lambda);
  if (j.contains("defaults")) {
    const auto& d = j["defaults"];
    c.default_gamma = d.value("gamma", c.default_gamma);
    c.default_beta = d.value("beta", c.default_beta);
    c.default_p = d.value("p", c.default_p);
    c.default_window = d.value("window", c.default_window);
    c.warmup = d.value("warmup", c.warmup);
  }
  if (j.contains("sweeps")) {
    const auto& s = j["sweeps"];
    c.gamma_grid = s.value("gamma", c.gamma_grid);
    c.beta_grid = s.value("beta", c.beta_grid);
    c.p_grid = s.value("p", c.p_grid);
    c.window_grid = s.value("window", c.window_grid);
  }
  c.planners = j.at("planners").get<std::vector<std::string>>();
  if (j.contains("traces")) {
    const auto& t = j["traces"];
    c.trace_dir = t.value("dir", std::string());
    c.trace_scale = t.value("scale", 1.0);
    c.min_trace_duration_s = t.value("min_duration_s", 0.0);
    if (t.contains("synthetic")) {
      SynthTraceSpec spec;
      const auto& s = t["synthetic"];
      spec.count = s.value("count", spec.count);
      spec.seed = s.value("seed", spec.seed);
      spec.params.duration_s = s.value("duration_s", spec.params.duration_s);
      spec.params.mean_mbps = s.value("mean_mbps", spec.params.mean_mbps);
      spec.params.relative_jitter = s.value("relative_jitter", spec.params.relative_jitter);
      spec.params.segment_s = s.value("segment_s", spec.params.segment_s);
      c.synth = spec;
    }
  }
  c.seeds_per_point = j.value("seeds_per_point", c.seeds_per_point);
  c.base_seed = j.value("base_seed", c.base_seed);
  c.output_dir = j.value("output_dir", c.output_dir);
  c.jobs = j.value("jobs", c.jobs);
  c.bootstrap_resamples = j.value("bootstrap_resamples", c.bootstrap_resamples);
  c.write_decision_logs = j.value("write_decision_logs", c.write_decision_logs);
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    if (s.value("preset", std::string("fast")) == "precise") c.solver = SolverSettings::precise();
    c.solver.max_iterations = s.value("max_iterations", c.solver.max_iterations);
    c.solver.epsilon = s.value("epsilon", c.solver.epsilon);
    c.solver.patience = s.value("patience", c.solver.patience);
  }
  return c;
}

std::string ExperimentConfig::to_json() const {
  json j{{"video", video_to_json(video)},
         {"utility", utility},
         {"alpha", alpha},
         {"lambda", lambda},
         {"defaults",
          {{"gamma", default_gamma},
           {"beta", default_beta},
           {"p", default_p},
           {"window", default_window},
           {"warmup", warmup}}},
         {"sweeps",
          {{"gamma", gamma_grid}, {"beta", beta_grid}, {"p", p_grid}, {"window", window_grid}}},
         {"planners", planners},
         {"seeds_per_point", seeds_per_point},
         {"base_seed", base_seed},
         {"output_dir", output_dir},
         {"jobs", jobs},
         {"bootstrap_resamples", bootstrap_resamples},
         {"write_decision_logs", write_decision_logs}};
  json traces;
  if (!trace_dir.empty()) {
    traces["dir"] = trace_dir;
    traces["scale"] = trace_scale;
    traces["min_duration_s"] = min_trace_duration_s;
  }
  if (synth.has_value()) {
    traces["synthetic"] = {{"count", synth->count},
                           {"seed", synth->seed},
                           {"duration_s", synth->params.duration_s},
                           {"mean_mbps", synth->params.mean_mbps},
                           {"relative_jitter", synth->params.relative_jitter},
                           {"segment_s", synth->params.segment_s}};
  }
  j["traces"] = traces;
  return j.dump(2);
}

ValidationReport validate_config(const std::string& path) {
  ValidationReport report;
  ExperimentConfig config;
  try {
    config = ExperimentConfig::from_json_file(path);
  } catch (const std::exception& e) {
    report.errors.push_back(e.what());
    return report;
  }
  try {
    config.video.validate();
  } catch (const std::exception& e) {
    report.errors.push_back(std::string("video: ") + e.what());
  }
  try {
    Utility::parse(config.utility);
  } catch (const std::exception& e) {
    report.errors.push_back(e.what());
  }
  if (config.planners.empty()) report.errors.push_back("planner list is empty");
  for (const auto& name : config.planners) {
    static const std::vector<std::string> known = {"alg1", "alg2", "alg3",
                                                   "baseline", "greedy", "oracle"};
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      report.errors.push_back("unknown planner: " + name);
    }
  }
  if (!(config.alpha > 0.0) || config.alpha > 1.0) report.errors.push_back("alpha must lie in (0, 1]");
  if (config.lambda < 0.0) report.errors.push_back("lambda must be nonnegative");
  if (config.gamma_grid.empty() && config.beta_grid.empty() && config.p_grid.empty() &&
      config.window_grid.empty()) {
    report.errors.push_back("all sweep grids are empty");
  }
  for (double b : config.beta_grid) {
    if (b < 0.0 || b > 1.0) {
      report.errors.push_back("beta " + fmt(b) + " outside [0, 1]");
    } else if (b < 0.5) {
      report.warnings.push_back("beta " + fmt(b) +
                                " below 0.5: the designated viewport is no more likely than the rest");
    }
  }
  for (double p : config.p_grid) {
    if (p < 0.0 || p >= 1.0) report.errors.push_back("p " + fmt(p) + " outside [0, 1)");
  }
  for (int w : config.window_grid) {
    if (w < 1) report.errors.push_back("window must be at least 1");
  }
  if (config.seeds_per_point < 1) report.errors.push_back("seeds_per_point must be at least 1");

  if (config.trace_dir.empty() && !config.synth.has_value()) {
    report.errors.push_back("no trace source: set traces.dir or traces.synthetic");
  }
  if (!config.trace_dir.empty()) {
    if (!fs::is_directory(config.trace_dir)) {
      report.errors.push_back("trace directory does not exist: " + config.trace_dir);
    } else {
      int found = 0;
      for (const auto& entry : fs::directory_iterator(config.trace_dir)) {
        if (entry.path().extension() == ".csv") {
          ++found;
          try {
            load_trace(entry.path().string(), config.trace_scale, config.min_trace_duration_s);
          } catch (const std::exception& e) {
            report.errors.push_back(e.what());
          }
        }
      }
      if (found == 0) report.errors.push_back("no .csv traces in " + config.trace_dir);
    }
  }
  return report;
}

void write_synth_traces(const std::string& dir, const SynthTraceSpec& spec) {
  fs::create_directories(dir);
  Rng rng(spec.seed);
  for (int i = 0; i < spec.count; ++i) {
    const ThroughputTrace trace = synth_trace(spec.params, rng.next_u64());
    char name[32];
    std::snprintf(name, sizeof(name), "synth_%03d.csv", i);
    save_trace((fs::path(dir) / name).string(), trace);
  }
}

namespace {

std::vector<ThroughputTrace> gather_traces(const ExperimentConfig& config) {
  std::vector<ThroughputTrace> traces;
  if (!config.trace_dir.empty()) {
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(config.trace_dir)) {
      if (entry.path().extension() == ".csv") paths.push_back(entry.path().string());
    }
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths) {
      traces.push_back(load_trace(p, config.trace_scale, config.min_trace_duration_s));
      traces.back().name = fs::path(p).filename().string();
    }
  }
  if (config.synth.has_value()) {
    Rng rng(config.synth->seed);
    for (int i = 0; i < config.synth->count; ++i) {
      ThroughputTrace trace = synth_trace(config.synth->params, rng.next_u64());
      char name[32];
      std::snprintf(name, sizeof(name), "synth_%03d", i);
      trace.name = name;
      traces.push_back(std::move(trace));
    }
  }
  if (traces.empty()) throw std::runtime_error("no traces available");
  return traces;
}

std::vector<SweepPoint> build_points(const ExperimentConfig& c) {
  std::vector<SweepPoint> points;
  for (double beta : c.beta_grid) {
    for (double gamma : c.gamma_grid) {
      points.push_back({"gamma", gamma, beta, c.default_p, c.default_window, gamma});
    }
  }
  for (int w : c.window_grid) {
    points.push_back({"window", c.default_gamma, c.default_beta, c.default_p, w,
                      static_cast<double>(w)});
  }
  for (double beta : c.beta_grid) {
    points.push_back({"beta", c.default_gamma, beta, c.default_p, c.default_window, beta});
  }
  for (double p : c.p_grid) {
    points.push_back({"p", c.default_gamma, c.default_beta, p, c.default_window, p});
  }
  return points;
}

RunOutcome execute_run(const ExperimentConfig& config, const RunTask& task,
                       const std::vector<ThroughputTrace>& traces, const Utility& utility) {
  RunOutcome outcome;
  try {
    const std::uint64_t scenario_seed =
        mix(config.base_seed, 0x5CE0A910ULL + static_cast<std::uint64_t>(task.seed_index) * 131 +
                                  static_cast<std::uint64_t>(task.trace_index));
    const auto anchors = designated_walk(config.video, scenario_seed);
    const FovDistribution dist = synthetic_distribution(anchors, task.point.beta, config.video);

    QoeWeights weights;
    weights.gamma = task.point.gamma;
    weights.lambda = config.lambda;
    weights.alpha = config.alpha;

    OnlineSettings settings;
    settings.window_chunks = task.point.window;
    settings.warmup_chunks = config.warmup;
    settings.planner = task.planner;
    settings.solver = config.solver;

    PredictionModel model;
    model.error_half_width = task.point.p;
    model.seed = mix(scenario_seed, 0xBADC0FFEULL);

    const RunResult result = run_online(settings, dist, traces[static_cast<std::size_t>(task.trace_index)],
                                        model, config.video, utility, weights,
                                        mix(scenario_seed, 0x0E11A5EDULL));

    const auto sets = robust_sets(dist, config.alpha);
    const ContinuousRatePlan executed = to_continuous(result.executed, config.video);
    outcome.objective_expected = expected_qoe_sum(executed, dist, utility, weights.gamma) -
                                 config.lambda * result.realized.total_stall_s;
    outcome.objective_robust = robust_qoe_sum(executed, sets, utility) -
                               config.lambda * result.realized.total_stall_s;
    outcome.stall_s = result.realized.total_stall_s;
    outcome.mean_fov_rate = result.report.mean_fov_rate_mbps;
    outcome.mean_min_fov_rate = result.report.mean_min_fov_rate_mbps;
    outcome.guaranteed_rate = result.report.guaranteed_rate_mbps;
    outcome.histogram = result.report.histogram;
    if (config.write_decision_logs) outcome.decision_log = decision_log_jsonl(result);
  } catch (const std::exception& e) {
    outcome.failed = true;
    outcome.error = e.what();
  }
  return outcome;
}

}  // namespace

int run_suite(const std::string& config_path, const SuiteOverrides& overrides) {
  ExperimentConfig config = ExperimentConfig::from_json_file(config_path);
  if (overrides.jobs.has_value()) config.jobs = *overrides.jobs;
  if (overrides.output_dir.has_value()) config.output_dir = *overrides.output_dir;
  if (overrides.base_seed.has_value()) config.base_seed = *overrides.base_seed;

  {
    ValidationReport report = validate_config(config_path);
    if (!report.ok()) {
      for (const auto& e : report.errors) std::fprintf(stderr, "error: %s\n", e.c_str());
      return 2;
    }
  }
  config.video.validate();
  const Utility utility = Utility::parse(config.utility);
  const auto traces = gather_traces(config);
  const auto points = build_points(config);

  std::vector<RunTask> tasks;
  for (const auto& point : points) {
    for (const auto& planner : config.planners) {
      for (int trace_index = 0; trace_index < static_cast<int>(traces.size()); ++trace_index) {
        for (int seed_index = 0; seed_index < config.seeds_per_point; ++seed_index) {
          RunTask task;
          task.index = static_cast<int>(tasks.size());
          task.point = point;
          task.planner = planner;
          task.trace_index = trace_index;
          task.seed_index = seed_index;
          tasks.push_back(task);
        }
      }
    }
  }

#ifdef _OPENMP
  if (config.jobs > 0) omp_set_num_threads(config.jobs);
#endif
  std::vector<RunOutcome> outcomes(tasks.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(tasks.size()); ++i) {
    outcomes[static_cast<std::size_t>(i)] =
        execute_run(config, tasks[static_cast<std::size_t>(i)], traces, utility);
  }

  const fs::path out_dir(config.output_dir);
  fs::create_directories(out_dir);
  fs::create_directories(out_dir / "runs");

  // Per-run records, one JSON object per line, in task order.
  int failures = 0;
  {
    std::ofstream runs(out_dir / "runs.jsonl");
    std::ofstream errors_out;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const auto& task = tasks[i];
      const auto& outcome = outcomes[i];
      json record{{"run", task.index},
                  {"figure", task.point.figure},
                  {"x", task.point.x},
                  {"gamma", task.point.gamma},
                  {"beta", task.point.beta},
                  {"p", task.point.p},
                  {"window", task.point.window},
                  {"planner", task.planner},
                  {"trace", traces[static_cast<std::size_t>(task.trace_index)].name},
                  {"seed_index", task.seed_index}};
      if (outcome.failed) {
        record["error"] = outcome.error;
        ++failures;
        if (!errors_out.is_open()) errors_out.open(out_dir / "errors.txt");
        errors_out << "run " << task.index << " (" << task.planner << ", "
                   << traces[static_cast<std::size_t>(task.trace_index)].name << "): "
                   << outcome.error << "\n";
      } else {
        record["objective_expected"] = outcome.objective_expected;
        record["objective_robust"] = outcome.objective_robust;
        record["stall_s"] = outcome.stall_s;
        record["mean_fov_rate_mbps"] = outcome.mean_fov_rate;
        record["mean_min_fov_rate_mbps"] = outcome.mean_min_fov_rate;
        record["guaranteed_rate_mbps"] = outcome.guaranteed_rate;
        record["histogram"] = outcome.histogram;
      }
      runs << record.dump() << "\n";
      if (config.write_decision_logs && !outcome.decision_log.empty()) {
        char name[40];
        std::snprintf(name, sizeof(name), "run_%06d.jsonl", task.index);
        std::ofstream log(out_dir / "runs" / name);
        log << outcome.decision_log;
      }
    }
  }

  // Aggregates per figure. The gamma figure is additionally keyed by beta.
  struct Key {
    std::string figure;
    double beta;
    double x;
    std::string planner;
    std::string metric;
    bool operator<(const Key& o) const {
      return std::tie(figure, beta, x, planner, metric) <
             std::tie(o.figure, o.beta, o.x, o.planner, o.metric);
    }
  };
  std::map<Key, std::vector<double>> samples;
  std::map<Key, std::vector<long long>> histograms;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (outcomes[i].failed) continue;
    const auto& task = tasks[i];
    const auto& o = outcomes[i];
    const double beta_key = task.point.figure == "gamma" ? task.point.beta : 0.0;
    const auto push = [&](const std::string& metric, double value) {
      samples[{task.point.figure, beta_key, task.point.x, task.planner, metric}].push_back(value);
    };
    push("objective_expected", o.objective_expected);
    push("objective_robust", o.objective_robust);
    push("stall_s", o.stall_s);
    push("mean_fov_rate_mbps", o.mean_fov_rate);
    push("mean_min_fov_rate_mbps", o.mean_min_fov_rate);
    push("guaranteed_rate_mbps", o.guaranteed_rate);
    if (task.point.figure == "p" || task.point.figure == "beta") {
      auto& hist = histograms[{task.point.figure, beta_key, task.point.x, task.planner, "hist"}];
      if (hist.empty()) hist.assign(o.histogram.size(), 0);
      for (std::size_t b = 0; b < o.histogram.size(); ++b) hist[b] += o.histogram[b];
    }
  }

  std::map<Key, Aggregate> aggregates;
  for (const auto& [key, values] : samples) {
    aggregates[key] = bootstrap(values, config.bootstrap_resamples,
                                mix(config.base_seed, 0xB0075ULL));
  }

  const auto write_figure_csv = [&](const std::string& figure, const std::string& x_name,
                                    const std::string& metric, const std::string& file,
                                    bool with_beta) {
    std::ofstream out(out_dir / file);
    if (with_beta) {
      out << "beta," << x_name << ",planner,n,mean,ci_lo,ci_hi\n";
    } else {
      out << x_name << ",planner,n,mean,ci_lo,ci_hi\n";
    }
    for (const auto& [key, agg] : aggregates) {
      if (key.figure != figure || key.metric != metric) continue;
      if (with_beta) out << fmt(key.beta) << ",";
      out << fmt(key.x) << "," << key.planner << "," << agg.n << "," << fmt(agg.mean) << ","
          << fmt(agg.lo) << "," << fmt(agg.hi) << "\n";
    }
  };
  write_figure_csv("gamma", "gamma", "objective_expected", "objective_vs_gamma.csv", true);
  write_figure_csv("window", "window", "stall_s", "stall_vs_window.csv", false);
  write_figure_csv("beta", "beta", "mean_fov_rate_mbps", "fov_bitrate_vs_beta.csv", false);
  write_figure_csv("beta", "beta", "guaranteed_rate_mbps", "guaranteed_rate_vs_beta.csv", false);

  const auto write_cdf_csv = [&](const std::string& figure, const std::string& x_name,
                                 const std::string& file) {
    std::ofstream out(out_dir / file);
    out << x_name << ",planner,rate_mbps,count,cum_fraction\n";
    for (const auto& [key, hist] : histograms) {
      if (key.figure != figure) continue;
      long long total = 0;
      for (long long c : hist) total += c;
      long long cum = 0;
      for (std::size_t b = 0; b < hist.size(); ++b) {
        cum += hist[b];
        const double rate = b == 0 ? 0.0 : config.video.rate_levels_mbps[b - 1];
        out << fmt(key.x) << "," << key.planner << "," << fmt(rate) << "," << hist[b] << ","
            << fmt(total > 0 ? static_cast<double>(cum) / static_cast<double>(total) : 0.0)
            << "\n";
      }
    }
  };
  write_cdf_csv("p", "p", "bitrate_cdf_vs_p.csv");
  write_cdf_csv("beta", "beta", "bitrate_cdf_vs_beta.csv");

  {
    json summary = json::array();
    for (const auto& [key, agg] : aggregates) {
      summary.push_back({{"figure", key.figure},
                         {"beta", key.beta},
                         {"x", key.x},
                         {"planner", key.planner},
                         {"metric", key.metric},
                         {"n", agg.n},
                         {"mean", agg.mean},
                         {"ci_lo", agg.lo},
                         {"ci_hi", agg.hi}});
    }
    json config_json = json::parse(config.to_json());
    config_json.erase("output_dir");  // volatile overrides stay out of the record
    config_json.erase("jobs");
    std::ofstream out(out_dir / "summary.json");
    out << json{{"config", std::move(config_json)}, {"aggregates", summary}}.dump(2) << "\n";
  }

  if (failures > 0) {
    std::fprintf(stderr, "%d run(s) failed; see %s\n", failures,
                 (out_dir / "errors.txt").string().c_str());
    return 1;
  }
  return 0;
}

}  // namespace tilestream
