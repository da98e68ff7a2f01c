#include "twinstream/simnet.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "twinstream/error.hpp"
#include "twinstream/rng.hpp"

namespace twinstream {

std::size_t SessionConfig::segment_count() const noexcept {
  return static_cast<std::size_t>(std::llround(video_duration_s / segment_duration_s));
}

void validate(const SessionConfig& c) {
  if (!(c.segment_duration_s > 0.0)) fail(ErrorKind::InvalidInput, "segment duration must be positive");
  if (!(c.segment_duration_s <= c.startup_threshold_s && c.startup_threshold_s <= c.max_buffer_s))
    fail(ErrorKind::InvalidInput, "need segment duration <= startup threshold <= max buffer");
  if (!(c.video_duration_s > 0.0)) fail(ErrorKind::InvalidInput, "video duration must be positive");
  const double segments = c.video_duration_s / c.segment_duration_s;
  if (std::abs(segments - std::round(segments)) > 1e-9)
    fail(ErrorKind::InvalidInput, "video duration must be a whole number of segments");
  if (!(c.initial_throughput_mbps > 0.0)) fail(ErrorKind::InvalidInput, "initial throughput must be positive");
}

NetworkTrace::NetworkTrace(std::vector<TraceSample> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) fail(ErrorKind::InvalidInput, "network trace is empty");
  if (samples_.front().t_start_s != 0.0) fail(ErrorKind::InvalidInput, "network trace must start at t = 0");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (i > 0 && !(s.t_start_s > samples_[i - 1].t_start_s))
      fail(ErrorKind::InvalidInput, "trace sample " + std::to_string(i) + ": start times must strictly increase");
    if (!(s.bandwidth_mbps > 0.0) || !std::isfinite(s.bandwidth_mbps))
      fail(ErrorKind::InvalidInput, "trace sample " + std::to_string(i) + ": bandwidth must be positive");
    if (!(s.latency_ms >= 0.0) || !std::isfinite(s.latency_ms))
      fail(ErrorKind::InvalidInput, "trace sample " + std::to_string(i) + ": latency must be nonnegative");
  }
}

const TraceSample& NetworkTrace::at(double t_s) const noexcept {
  auto it = std::upper_bound(samples_.begin(), samples_.end(), t_s,
                             [](double t, const TraceSample& s) { return t < s.t_start_s; });
  return it == samples_.begin() ? samples_.front() : *(it - 1);
}

double NetworkTrace::max_bandwidth_mbps() const noexcept {
  double m = 0.0;
  for (const auto& s : samples_) m = std::max(m, s.bandwidth_mbps);
  return m;
}

double download_time(const NetworkTrace& trace, double t0_s, double bits) {
  if (!(t0_s >= 0.0)) fail(ErrorKind::InvalidInput, "download start must be nonnegative");
  if (!(bits > 0.0)) fail(ErrorKind::InvalidInput, "download size must be positive");

  const double latency_s = trace.at(t0_s).latency_ms / 1000.0;
  const auto samples = trace.samples();
  double t = t0_s + latency_s;
  auto it = std::upper_bound(samples.begin(), samples.end(), t,
                             [](double x, const TraceSample& s) { return x < s.t_start_s; });
  std::size_t k = static_cast<std::size_t>(it - samples.begin()) - 1;

  double remaining = bits;
  double transfer_s = 0.0;
  while (true) {
    const double rate = samples[k].bandwidth_mbps * 1e6;
    const double end = k + 1 < samples.size() ? samples[k + 1].t_start_s : std::numeric_limits<double>::infinity();
    const double capacity = rate * (end - t);
    if (remaining <= capacity) {
      transfer_s += remaining / rate;
      break;
    }
    remaining -= capacity;
    transfer_s += end - t;
    t = end;
    ++k;
  }
  return latency_s + transfer_s;
}

int segment_rating(const SegmentRecord& record, const BitrateLadder& ladder) noexcept {
  const double share = static_cast<double>(record.bitrate_kbps) / static_cast<double>(ladder.highest().bitrate_kbps);
  int rating = 1 + static_cast<int>(std::lround(4.0 * std::clamp(share, 0.0, 1.0)));
  if (record.rebuffer_before_s > 0.0) rating -= 2;
  return std::clamp(rating, 1, 5);
}

std::pair<SessionOutcome, TwinProfile> run_session(const TwinProfile& profile, const DeviceCapabilities& device,
                                                   const NetworkTrace& trace, const BitrateLadder& ladder,
                                                   ControllerKind controller, const SessionConfig& config,
                                                   const SessionOptions& options) {
  validate(config);
  validate(device);

  const std::size_t n_segments = config.segment_count();
  const double seg = config.segment_duration_s;
  const double idle_threshold = config.max_buffer_s - seg;

  SessionOutcome out;
  out.records.reserve(n_segments);
  TwinProfile twin = profile;
  NetState net;
  net.predicted_throughput_mbps = config.initial_throughput_mbps;

  double t = 0.0;
  double buffer = 0.0;
  bool playing = false;
  std::optional<std::string> previous;

  for (std::size_t i = 0; i < n_segments; ++i) {
    if (playing && buffer > idle_threshold) {
      const double idle = buffer - idle_threshold;
      t += idle;
      buffer = idle_threshold;
      out.idle_total_s += idle;
    }

    DecisionContext ctx{buffer, previous, net, seg, config.max_buffer_s};
    Rendition choice;
    if (controller == ControllerKind::twin_driven) {
      double q_target;
      if (options.quality_net) {
        q_target = predict_quality(*options.quality_net, device_features(device), pref_features(twin.pref()),
                                   net_features(net));
      } else {
        q_target = transcode_params_for_segment(twin, device, net, ladder.rungs()).bitrate_mbps();
      }
      choice = select_quality(ladder, device, twin, ctx, q_target);
    } else {
      choice = select_baseline(controller, ladder, device, ctx, options.baseline);
    }

    const double bits = static_cast<double>(choice.bitrate_kbps) * 1000.0 * seg;
    const double dl = download_time(trace, t, bits);
    double stall = 0.0;
    if (playing) {
      if (dl > buffer) {
        stall = dl - buffer;
        buffer = 0.0;
      } else {
        buffer -= dl;
      }
    }

    SegmentRecord rec{i, choice.id, choice.bitrate_kbps, t, t + dl, bits, stall};
    const double latency_ms = trace.at(t).latency_ms;
    t += dl;
    buffer += seg;
    out.rebuffer_total_s += stall;
    net = net.observe(bits / dl / 1e6, latency_ms);
    previous = choice.id;

    if (!playing && (buffer >= config.startup_threshold_s || buffer > idle_threshold || i + 1 == n_segments)) {
      playing = true;
      out.startup_delay_s = t;
    }
    if (config.feedback_per_segment) twin = ingest_feedback(twin, segment_rating(rec, ladder));
    out.records.push_back(std::move(rec));
  }

  t += buffer;  // play out what is left
  out.wall_clock_s = t;
  out.metrics = compute_session_metrics(out.records, config, out.startup_delay_s, out.wall_clock_s, options.qoe);

  const Observation obs = derive_observation(out.metrics, ladder, options.mapping, profile.user_id());
  twin = update_profile(twin, obs);
  return {std::move(out), std::move(twin)};
}

QualityNet cohort_quality_net(const CohortSettings& settings) {
  const auto data = synth_quality_dataset(settings.quality_samples, mix_seed(settings.master_seed, 0x5157'0001));
  TrainParams p = settings.quality_training;
  p.seed = mix_seed(settings.master_seed, 0x5157'0002);
  return train_quality_net(data, p);
}

CohortResult run_cohort(std::span<const CohortMember> cohort, std::span<const ControllerKind> arms,
                        const CohortSettings& settings) {
  if (cohort.empty()) fail(ErrorKind::InvalidInput, "cohort is empty");
  if (arms.empty()) fail(ErrorKind::InvalidInput, "no controller arms given");
  for (std::size_t a = 0; a < arms.size(); ++a)
    for (std::size_t b = a + 1; b < arms.size(); ++b)
      if (arms[a] == arms[b]) fail(ErrorKind::InvalidInput, "arm listed twice: " + std::string(to_string(arms[a])));
  validate(settings.session);
  validate(settings.transcode);
  if (settings.catalog.empty()) fail(ErrorKind::InvalidInput, "catalog is empty");

  const bool needs_net = std::find(arms.begin(), arms.end(), ControllerKind::twin_driven) != arms.end();
  const std::optional<QualityNet> net = needs_net ? std::optional(cohort_quality_net(settings)) : std::nullopt;

  SessionOptions options;
  options.qoe = settings.qoe;
  options.baseline = settings.baseline;
  options.mapping = settings.mapping;
  options.quality_net = net ? &*net : nullptr;

  const std::size_t n_users = cohort.size();
  const std::size_t n_jobs = arms.size() * n_users;
  std::vector<std::optional<std::pair<SessionOutcome, TwinProfile>>> results(n_jobs);
  std::vector<std::exception_ptr> errors(n_jobs);

  auto run_job = [&](std::size_t job) {
    const ControllerKind arm = arms[job / n_users];
    const CohortMember& m = cohort[job % n_users];
    try {
      const BitrateLadder ladder =
          arm == ControllerKind::twin_driven
              ? optimize_ladder(settings.catalog, m.profile, settings.transcode, m.device)
              : baseline_ladder(settings.catalog, m.device, settings.transcode.max_ladder_size);
      results[job] = run_session(m.profile, m.device, m.trace, ladder, arm, settings.session, options);
    } catch (...) {
      errors[job] = std::current_exception();
    }
  };

  std::size_t threads = settings.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : settings.threads;
  threads = std::min(threads, n_jobs);
  if (threads <= 1) {
    for (std::size_t j = 0; j < n_jobs; ++j) run_job(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (std::size_t j = next++; j < n_jobs; j = next++) run_job(j);
      });
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  CohortResult result;
  result.report.master_seed = settings.master_seed;
  for (std::size_t a = 0; a < arms.size(); ++a) {
    std::vector<SessionMetrics> metrics;
    std::vector<SessionOutcome> outcomes;
    std::vector<TwinProfile> profiles;
    for (std::size_t u = 0; u < n_users; ++u) {
      auto& [outcome, twin] = *results[a * n_users + u];
      metrics.push_back(outcome.metrics);
      outcomes.push_back(std::move(outcome));
      profiles.push_back(std::move(twin));
    }
    result.report.arms.push_back(summarize_arm(std::string(to_string(arms[a])), std::move(metrics)));
    result.outcomes.push_back(std::move(outcomes));
    result.updated_profiles.push_back(std::move(profiles));
  }
  return result;
}

}  // namespace twinstream
