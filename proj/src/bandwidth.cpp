#include "tilestream/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tilestream {

namespace {

// Duration covered by sample i; the last sample inherits the previous
// spacing so the cyclic period is well defined.
double sample_duration(const ThroughputTrace& trace, std::size_t i) {
  const auto& s = trace.samples;
  if (i + 1 < s.size()) return s[i + 1].t_s - s[i].t_s;
  if (s.size() == 1) return 1.0;
  return s[s.size() - 1].t_s - s[s.size() - 2].t_s;
}

double period_mbits(const ThroughputTrace& trace) {
  double total = 0.0;
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    total += trace.samples[i].mbps * sample_duration(trace, i);
  }
  return total;
}

// Megabits over [start_s(), start_s() + rem) for rem within one period.
double partial_mbits(const ThroughputTrace& trace, double rem) {
  double total = 0.0;
  double local = 0.0;
  for (std::size_t i = 0; i < trace.samples.size() && local < rem; ++i) {
    const double dur = sample_duration(trace, i);
    total += trace.samples[i].mbps * std::min(dur, rem - local);
    local += dur;
  }
  return total;
}

// Integral of the cyclic rate from the trace origin to absolute time t.
double mbits_from_origin(const ThroughputTrace& trace, double t) {
  const double period = trace.period_s();
  const double u = t - trace.start_s();
  const double cycles = std::floor(u / period);
  const double rem = u - cycles * period;
  return cycles * period_mbits(trace) + partial_mbits(trace, rem);
}

}  // namespace

double ThroughputTrace::period_s() const {
  double total = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) total += sample_duration(*this, i);
  return total;
}

void ThroughputTrace::validate() const {
  if (samples.empty()) throw std::invalid_argument("trace has no samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i].mbps > 0.0)) throw std::invalid_argument("trace throughput must be positive");
    if (i > 0 && samples[i].t_s <= samples[i - 1].t_s) {
      throw std::invalid_argument("trace timestamps must be strictly increasing");
    }
  }
}

ThroughputTrace load_trace(const std::string& path, double scale_factor,
                           double min_duration_s) {
  if (!(scale_factor > 0.0)) throw std::invalid_argument("scale_factor must be positive");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);

  ThroughputTrace trace;
  trace.name = path;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    if (line_no == 1) {
      if (line.rfind("t_s,mbps", 0) != 0) {
        throw std::runtime_error(path + ":1: expected header \"t_s,mbps\"");
      }
      continue;
    }
    std::istringstream row(line);
    double t = 0.0, mbps = 0.0;
    char comma = 0;
    if (!(row >> t >> comma >> mbps) || comma != ',') {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed row");
    }
    if (!(mbps > 0.0)) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": non-positive throughput");
    }
    trace.samples.push_back({t, mbps * scale_factor});
  }
  if (trace.samples.empty()) throw std::runtime_error(path + ": trace has no samples");
  trace.validate();
  if (min_duration_s > 0.0 && trace.period_s() < min_duration_s - 1e-9) {
    throw std::runtime_error(path + ": trace shorter than required " +
                             std::to_string(min_duration_s) + " s");
  }
  return trace;
}

void save_trace(const std::string& path, const ThroughputTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file: " + path);
  out << "t_s,mbps\n";
  char buf[64];
  for (const auto& s : trace.samples) {
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g\n", s.t_s, s.mbps);
    out << buf;
  }
}

double transfer_mbits(const ThroughputTrace& trace, double t0, double t1) {
  if (t1 <= t0) return 0.0;
  return mbits_from_origin(trace, t1) - mbits_from_origin(trace, t0);
}

double true_capacity(const ThroughputTrace& trace, double t0, double t1) {
  if (!(t1 > t0)) throw std::invalid_argument("capacity interval must be nonempty");
  return transfer_mbits(trace, t0, t1) / (t1 - t0);
}

double advance_time(const ThroughputTrace& trace, double start_s, double mbits) {
  if (mbits <= 0.0) return start_s;
  const double period = trace.period_s();
  const double per_cycle = period_mbits(trace);

  // Skip whole periods, then walk segments within at most one extra period.
  const double cycles = std::floor(mbits / per_cycle);
  double remaining = mbits - cycles * per_cycle;
  double clock = start_s + cycles * period;
  if (remaining <= 0.0) return clock;

  const double u = clock - trace.start_s();
  const double base_cycles = std::floor(u / period);
  const double phase = u - base_cycles * period;  // in [0, period)

  // Walk segments starting from the one containing `phase`.
  std::size_t idx = 0;
  double local = 0.0;
  while (idx < trace.samples.size() && local + sample_duration(trace, idx) <= phase) {
    local += sample_duration(trace, idx);
    ++idx;
  }
  double offset_in_seg = phase - local;
  for (std::size_t guard = 0; guard <= 2 * trace.samples.size() + 2; ++guard) {
    if (idx == trace.samples.size()) {
      idx = 0;
      offset_in_seg = 0.0;
    }
    const double dur = sample_duration(trace, idx) - offset_in_seg;
    const double capacity = trace.samples[idx].mbps * dur;
    if (remaining <= capacity) return clock + remaining / trace.samples[idx].mbps;
    remaining -= capacity;
    clock += dur;
    offset_in_seg = 0.0;
    ++idx;
  }
  throw std::logic_error("advance_time failed to converge");
}

void PredictionModel::validate() const {
  if (error_half_width < 0.0 || error_half_width >= 1.0) {
    throw std::invalid_argument("error_half_width must lie in [0, 1)");
  }
  if (!(scale_factor > 0.0)) throw std::invalid_argument("scale_factor must be positive");
}

std::vector<double> predicted_capacity(const ThroughputTrace& trace,
                                       const PredictionModel& model,
                                       double window_start_s, int horizon_chunks,
                                       const VideoConfig& config, Rng* rng) {
  model.validate();
  Rng local(model.seed);
  Rng* gen = rng != nullptr ? rng : &local;
  const double L = config.chunk_duration_s;
  const double p = model.error_half_width;

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(horizon_chunks));
  for (int j = 0; j < horizon_chunks; ++j) {
    const double slot_begin = window_start_s + j * L;
    const double truth = true_capacity(trace, slot_begin, slot_begin + L);
    const double error = gen->next_uniform(-p, p);
    out.push_back(truth * model.scale_factor * (1.0 + error));
  }
  return out;
}

ThroughputTrace synth_trace(const SynthTraceParams& params, std::uint64_t seed) {
  if (!(params.duration_s > 0.0) || !(params.mean_mbps > 0.0) ||
      params.relative_jitter < 0.0 || params.relative_jitter >= 1.0 ||
      !(params.segment_s >= 1.0)) {
    throw std::invalid_argument("invalid synthetic trace parameters");
  }
  Rng rng(seed);
  ThroughputTrace trace;
  const int seconds = static_cast<int>(std::ceil(params.duration_s));
  const int segment = static_cast<int>(params.segment_s);
  double level = params.mean_mbps;
  for (int t = 0; t < seconds; ++t) {
    if (t % segment == 0) {
      level = params.mean_mbps * (1.0 + rng.next_uniform(-params.relative_jitter,
                                                         params.relative_jitter));
      level = std::max(level, 0.05 * params.mean_mbps);
    }
    trace.samples.push_back({static_cast<double>(t), level});
  }
  trace.validate();
  return trace;
}

}  // namespace tilestream
