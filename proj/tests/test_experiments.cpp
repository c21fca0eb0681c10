#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "tilestream/experiments.hpp"
#include "tilestream/fov.hpp"

using namespace tilestream;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path write_config(const std::string& name, const std::string& extra) {
  const fs::path path = fs::temp_directory_path() / name;
  std::ofstream out(path);
  out << R"({
  "video": {
    "num_chunks": 8, "tile_rows": 4, "tile_cols": 8,
    "chunk_duration_s": 2.0, "rate_levels_mbps": [0.25, 0.5, 0.75, 1.0],
    "viewport_rows": 2, "viewport_cols": 3,
    "startup_delay_s": 2.0, "max_buffer_chunks": 10
  },
  "utility": "linear", "alpha": 0.95, "lambda": 1000.0,
  "defaults": {"gamma": 0.1, "beta": 0.8, "p": 0.2, "window": 2, "warmup": 1},
  "sweeps": {"gamma": [0.1], "beta": [0.8], "p": [0.2], "window": [1, 2]},
  "planners": ["alg3", "baseline", "greedy"],
  "traces": {"synthetic": {"count": 2, "seed": 9, "duration_s": 60, "mean_mbps": 10,
                            "relative_jitter": 0.4, "segment_s": 8}},
  "seeds_per_point": 2, "base_seed": 7, "bootstrap_resamples": 200
)" << extra << "\n}\n";
  return path;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("designated walk stays on valid anchors and is reproducible") {
  VideoConfig c;
  c.num_chunks = 200;
  c.tile_rows = 4;
  c.tile_cols = 8;
  c.viewport_rows = 2;
  c.viewport_cols = 3;
  c.chunk_duration_s = 2.0;
  c.rate_levels_mbps = {0.25, 1.0};
  c.startup_delay_s = 1.0;
  c.max_buffer_chunks = 10;

  const auto a = designated_walk(c, 5);
  const auto b = designated_walk(c, 5);
  CHECK(a == b);
  int moves = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK_NOTHROW(viewport_at(c, a[k]));
    if (k > 0 && a[k] != a[k - 1]) ++moves;
  }
  CHECK(moves > 0);
}

TEST_CASE("config validation reports errors and warnings") {
  const auto ok = write_config("ts_cfg_ok.json", "");
  auto report = validate_config(ok.string());
  CHECK(report.ok());
  CHECK(report.warnings.empty());
  fs::remove(ok);

  const auto low_beta = write_config("ts_cfg_beta.json", R"(, "sweeps2": 0)");
  {
    // Rewrite with a low beta value in the sweep.
    std::string body = read_file(low_beta);
    body.replace(body.find("\"beta\": [0.8]"), 13, "\"beta\": [0.3]");
    std::ofstream out(low_beta);
    out << body;
  }
  report = validate_config(low_beta.string());
  CHECK(report.ok());
  REQUIRE(report.warnings.size() == 1);
  CHECK(report.warnings[0].find("0.3") != std::string::npos);
  fs::remove(low_beta);

  const auto no_planners = write_config("ts_cfg_nopl.json", "");
  {
    std::string body = read_file(no_planners);
    body.replace(body.find(R"(["alg3", "baseline", "greedy"])"), 30, "[]");
    std::ofstream out(no_planners);
    out << body;
  }
  report = validate_config(no_planners.string());
  CHECK_FALSE(report.ok());
  fs::remove(no_planners);

  const auto bad_dir = write_config("ts_cfg_dir.json", "");
  {
    std::string body = read_file(bad_dir);
    const std::string traces = R"("traces": {"synthetic": {"count": 2, "seed": 9, "duration_s": 60, "mean_mbps": 10,
                            "relative_jitter": 0.4, "segment_s": 8}})";
    body.replace(body.find(traces), traces.size(), R"("traces": {"dir": "/no/such/dir"})");
    std::ofstream out(bad_dir);
    out << body;
  }
  report = validate_config(bad_dir.string());
  CHECK_FALSE(report.ok());
  bool names_path = false;
  for (const auto& e : report.errors) names_path |= e.find("/no/such/dir") != std::string::npos;
  CHECK(names_path);
  fs::remove(bad_dir);
}

TEST_CASE("synthetic trace files round trip through the loader") {
  const fs::path dir = fs::temp_directory_path() / "ts_synth_dir";
  SynthTraceSpec spec;
  spec.count = 3;
  spec.seed = 21;
  spec.params.duration_s = 45.0;
  write_synth_traces(dir.string(), spec);
  int found = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".csv") {
      ++found;
      CHECK_NOTHROW(load_trace(entry.path().string(), 1.0));
    }
  }
  CHECK(found == 3);
  fs::remove_all(dir);
}

TEST_CASE("the suite runs, aggregates, and reruns byte-identically") {
  const auto cfg = write_config("ts_cfg_run.json", "");
  const fs::path out_a = fs::temp_directory_path() / "ts_suite_a";
  const fs::path out_b = fs::temp_directory_path() / "ts_suite_b";
  fs::remove_all(out_a);
  fs::remove_all(out_b);

  SuiteOverrides overrides;
  overrides.output_dir = out_a.string();
  overrides.jobs = 2;
  REQUIRE(run_suite(cfg.string(), overrides) == 0);

  const std::vector<std::string> expected = {
      "runs.jsonl",           "objective_vs_gamma.csv",    "stall_vs_window.csv",
      "fov_bitrate_vs_beta.csv", "guaranteed_rate_vs_beta.csv", "bitrate_cdf_vs_p.csv",
      "bitrate_cdf_vs_beta.csv", "summary.json"};
  for (const auto& name : expected) {
    CHECK_MESSAGE(fs::exists(out_a / name), name);
  }
  // Decision logs, one JSON-lines file per run.
  int logs = 0;
  for (const auto& entry : fs::directory_iterator(out_a / "runs")) {
    if (entry.path().extension() == ".jsonl") ++logs;
  }
  CHECK(logs == 5 * 3 * 2 * 2);  // points x planners x traces x seeds

  overrides.output_dir = out_b.string();
  overrides.jobs = 1;  // different parallelism must not change a single byte
  REQUIRE(run_suite(cfg.string(), overrides) == 0);
  for (const auto& name : expected) {
    CHECK_MESSAGE(read_file(out_a / name) == read_file(out_b / name), name);
  }

  // Aggregates are recomputable from the raw per-run records.
  {
    std::map<std::pair<std::string, double>, std::pair<double, int>> sums;
    std::istringstream runs(read_file(out_a / "runs.jsonl"));
    std::string line;
    while (std::getline(runs, line)) {
      const auto rec = nlohmann::json::parse(line);
      if (rec.at("figure") != "gamma") continue;
      auto& slot = sums[{rec.at("planner"), rec.at("x").get<double>()}];
      slot.first += rec.at("objective_expected").get<double>();
      slot.second += 1;
    }
    REQUIRE_FALSE(sums.empty());
    const auto summary = nlohmann::json::parse(read_file(out_a / "summary.json"));
    int matched = 0;
    for (const auto& agg : summary.at("aggregates")) {
      if (agg.at("figure") != "gamma" || agg.at("metric") != "objective_expected") continue;
      const auto key = std::make_pair(agg.at("planner").get<std::string>(),
                                      agg.at("x").get<double>());
      REQUIRE(sums.count(key) == 1);
      const double mean = sums[key].first / sums[key].second;
      CHECK(agg.at("mean").get<double>() == doctest::Approx(mean).epsilon(1e-12));
      CHECK(agg.at("n").get<int>() == sums[key].second);
      ++matched;
    }
    CHECK(matched == static_cast<int>(sums.size()));
  }
  fs::remove_all(out_a);
  fs::remove_all(out_b);
  fs::remove(cfg);
}

}  // TEST_SUITE
