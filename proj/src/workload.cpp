#include "twinstream/workload.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "csv.hpp"
#include "twinstream/error.hpp"
#include "twinstream/rng.hpp"

namespace twinstream {

namespace {

double round6(double x) { return std::round(x * 1e6) / 1e6; }

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

void validate(const TraceSpec& s) {
  for (double m : s.state_mean_mbps)
    if (!(m > 0.0)) fail(ErrorKind::InvalidInput, "trace state means must be positive");
  if (!(s.dwell_mean_s > 0.0)) fail(ErrorKind::InvalidInput, "dwell mean must be positive");
  if (!(s.jitter >= 0.0 && s.jitter < 1.0)) fail(ErrorKind::InvalidInput, "jitter must be in [0,1)");
  if (!(s.min_mbps > 0.0 && s.min_mbps <= s.max_mbps)) fail(ErrorKind::InvalidInput, "need 0 < min_mbps <= max_mbps");
  if (!(s.latency_min_ms >= 0.0 && s.latency_min_ms <= s.latency_max_ms))
    fail(ErrorKind::InvalidInput, "need 0 <= latency_min <= latency_max");
  if (!(s.duration_s > 0.0)) fail(ErrorKind::InvalidInput, "trace duration must be positive");
  if (!(s.sample_period_s > 0.0)) fail(ErrorKind::InvalidInput, "sample period must be positive");
}

void validate(const CohortSpec& spec) {
  double sum = 0.0;
  for (double p : spec.device_mix) {
    if (!(p >= 0.0)) fail(ErrorKind::InvalidInput, "device mix probabilities must be nonnegative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) fail(ErrorKind::InvalidInput, "device mix must sum to 1");
  if (!(spec.alpha > 0.0 && spec.alpha <= 1.0)) fail(ErrorKind::InvalidInput, "alpha must be in (0,1]");
  if (spec.history_capacity == 0) fail(ErrorKind::InvalidInput, "history capacity must be >= 1");
  validate(spec.trace);
}

NetworkTrace gen_trace(const TraceSpec& spec, std::uint64_t seed) {
  validate(spec);
  Rng rng(seed);
  const double latency = round6(rng.uniform(spec.latency_min_ms, spec.latency_max_ms));
  std::size_t state = rng.below(4);

  std::vector<TraceSample> samples;
  double t = 0.0;
  while (t < spec.duration_s) {
    const double dwell_end = std::min(t + rng.exponential(spec.dwell_mean_s), spec.duration_s);
    for (double tick = t; tick < dwell_end; tick += spec.sample_period_s) {
      const double start = round6(tick);
      if (!samples.empty() && !(start > samples.back().t_start_s)) continue;
      const double jitter = rng.uniform(1.0 - spec.jitter, 1.0 + spec.jitter);
      const double bw = round6(std::clamp(spec.state_mean_mbps[state] * jitter, spec.min_mbps, spec.max_mbps));
      samples.push_back({start, bw, latency});
    }
    t = dwell_end;
    state = (state + 1 + rng.below(3)) % 4;  // uniform over the other three states
  }
  return NetworkTrace(std::move(samples));
}

std::string user_id_for(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "user%05zu", index);
  return buf;
}

CohortMember gen_member(const CohortSpec& spec, std::size_t index) {
  Rng rng(mix_seed(spec.seed, index));
  PreferenceVector pref;
  pref.quality_affinity = rng.uniform01();
  pref.rebuffer_tolerance = rng.uniform01();
  pref.data_sensitivity = rng.uniform01();
  pref.switch_tolerance = rng.uniform01();
  pref.startup_tolerance = rng.uniform01();

  const double u = rng.uniform01();
  std::size_t cls = 0;
  double cumulative = spec.device_mix[0];
  while (cls + 1 < spec.device_mix.size() && u >= cumulative) cumulative += spec.device_mix[++cls];
  // Zero-probability tail classes must never be chosen through rounding.
  while (spec.device_mix[cls] == 0.0 && cls > 0) --cls;

  const std::uint64_t trace_seed = rng.next_u64();
  return {TwinProfile(user_id_for(index), pref, spec.alpha, spec.history_capacity),
          default_device(static_cast<DeviceClass>(cls)), gen_trace(spec.trace, trace_seed)};
}

std::vector<CohortMember> gen_cohort(const CohortSpec& spec) {
  validate(spec);
  std::vector<CohortMember> out;
  out.reserve(spec.n_users);
  for (std::size_t i = 0; i < spec.n_users; ++i) out.push_back(gen_member(spec, i));
  return out;
}

NetworkTrace parse_trace(std::string_view text, const std::string& source) {
  const auto rows = csv::parse(text, "t_start_s,bandwidth_mbps,latency_ms", source);
  std::vector<TraceSample> samples;
  for (const auto& row : rows) {
    csv::expect_fields(source, row, 3);
    const TraceSample s{csv::to_double(source, row, 0), csv::to_double(source, row, 1),
                        csv::to_double(source, row, 2)};
    if (samples.empty() && s.t_start_s != 0.0) csv::row_error(source, row, "first sample must start at 0");
    if (!samples.empty() && !(s.t_start_s > samples.back().t_start_s))
      csv::row_error(source, row, "t_start_s is not strictly increasing");
    if (!(s.bandwidth_mbps > 0.0)) csv::row_error(source, row, "bandwidth_mbps must be positive");
    if (!(s.latency_ms >= 0.0)) csv::row_error(source, row, "latency_ms must be nonnegative");
    samples.push_back(s);
  }
  if (samples.empty()) fail(ErrorKind::Format, source + ": trace has no samples");
  return NetworkTrace(std::move(samples));
}

NetworkTrace load_trace(const std::filesystem::path& path) { return parse_trace(csv::read_file(path), path.string()); }

std::string format_trace(const NetworkTrace& trace) {
  std::string out = "t_start_s,bandwidth_mbps,latency_ms\n";
  for (const auto& s : trace.samples())
    out += fixed6(s.t_start_s) + ',' + fixed6(s.bandwidth_mbps) + ',' + fixed6(s.latency_ms) + '\n';
  return out;
}

void write_trace(const NetworkTrace& trace, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  f << format_trace(trace);
  if (!f.flush()) fail(ErrorKind::Io, "failed writing " + path.string());
}

std::vector<CohortRow> parse_cohort(std::string_view text, const std::string& source, std::size_t history_capacity) {
  const auto rows = csv::parse(
      text,
      "user_id,device_class,alpha,quality_affinity,rebuffer_tolerance,data_sensitivity,switch_tolerance,"
      "startup_tolerance",
      source);
  std::vector<CohortRow> out;
  for (const auto& row : rows) {
    csv::expect_fields(source, row, 8);
    const auto cls = parse_device_class(row.fields[1]);
    if (!cls) csv::row_error(source, row, "unknown device class '" + std::string(row.fields[1]) + "'");
    std::array<double, PreferenceVector::kDim> pref{};
    for (std::size_t k = 0; k < pref.size(); ++k) pref[k] = csv::to_double(source, row, 3 + k);
    try {
      out.push_back({TwinProfile(std::string(row.fields[0]), PreferenceVector::from_array(pref),
                                 csv::to_double(source, row, 2), history_capacity),
                     default_device(*cls)});
    } catch (const Error& e) {
      csv::row_error(source, row, e.what());
    }
  }
  return out;
}

std::vector<CohortRow> load_cohort(const std::filesystem::path& path, std::size_t history_capacity) {
  return parse_cohort(csv::read_file(path), path.string(), history_capacity);
}

std::string format_cohort(std::span<const CohortMember> cohort) {
  std::string out =
      "user_id,device_class,alpha,quality_affinity,rebuffer_tolerance,data_sensitivity,switch_tolerance,"
      "startup_tolerance\n";
  for (const auto& m : cohort) {
    out += m.profile.user_id() + ',' + std::string(to_string(m.device.device_class)) + ',' + fixed6(m.profile.alpha());
    for (double c : m.profile.pref().to_array()) out += ',' + fixed6(c);
    out += '\n';
  }
  return out;
}

}  // namespace twinstream
