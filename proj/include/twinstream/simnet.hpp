#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "twinstream/abr.hpp"
#include "twinstream/media.hpp"
#include "twinstream/metrics.hpp"
#include "twinstream/prediction.hpp"
#include "twinstream/session.hpp"
#include "twinstream/transcode.hpp"
#include "twinstream/twin.hpp"

namespace twinstream {

struct TraceSample {
  double t_start_s = 0.0;
  double bandwidth_mbps = 1.0;
  double latency_ms = 0.0;

  friend bool operator==(const TraceSample&, const TraceSample&) = default;
};

/// Piecewise-constant bandwidth/latency timeline. Each sample holds until the
/// next one starts; the last holds forever.
class NetworkTrace {
 public:
  /// Throws InvalidInput unless the first sample starts at 0, start times are
  /// strictly increasing, bandwidth is positive and latency nonnegative.
  explicit NetworkTrace(std::vector<TraceSample> samples);

  std::span<const TraceSample> samples() const noexcept { return samples_; }
  const TraceSample& at(double t_s) const noexcept;
  double max_bandwidth_mbps() const noexcept;

  friend bool operator==(const NetworkTrace&, const NetworkTrace&) = default;

 private:
  std::vector<TraceSample> samples_;
};

/// Seconds to fetch `bits` when the request leaves at t0: the latency in force
/// at t0, then an exact walk over the bandwidth intervals.
double download_time(const NetworkTrace& trace, double t0_s, double bits);

struct SessionOutcome {
  std::vector<SegmentRecord> records;
  double startup_delay_s = 0.0;
  double wall_clock_s = 0.0;
  double rebuffer_total_s = 0.0;
  double idle_total_s = 0.0;
  SessionMetrics metrics;
};

/// Knobs that are not part of the player model proper.
struct SessionOptions {
  QoeParams qoe;
  BaselineParams baseline;
  ObservationMapping mapping;
  // Supplies the twin controller's quality target. Without it the target is the
  // rung transcode_params_for_segment would pick.
  const QualityNet* quality_net = nullptr;
};

/// Rating (1..5) the simulated viewer gives one segment: grows with the
/// rung's share of the top bitrate, minus two for a stall.
int segment_rating(const SegmentRecord& record, const BitrateLadder& ladder) noexcept;

/// Plays one video over the trace with the given controller. Returns the
/// outcome and the twin after its end-of-session update.
std::pair<SessionOutcome, TwinProfile> run_session(const TwinProfile& profile, const DeviceCapabilities& device,
                                                   const NetworkTrace& trace, const BitrateLadder& ladder,
                                                   ControllerKind controller, const SessionConfig& config,
                                                   const SessionOptions& options = {});

struct CohortMember {
  TwinProfile profile;
  DeviceCapabilities device;
  NetworkTrace trace;
};

struct CohortSettings {
  SessionConfig session;
  TranscodeConstraints transcode;
  QoeParams qoe;
  BaselineParams baseline;
  ObservationMapping mapping;
  std::vector<Rendition> catalog = default_catalog();
  // Training set size and schedule for the quality-target network.
  std::size_t quality_samples = 256;
  TrainParams quality_training{0.05, 1500, 0};
  std::uint64_t master_seed = 1;
  // 0 = hardware concurrency; 1 = serial.
  std::size_t threads = 0;
};

struct CohortResult {
  CohortReport report;
  // outcomes[arm][user], in the order arms/cohort were given.
  std::vector<std::vector<SessionOutcome>> outcomes;
  std::vector<std::vector<TwinProfile>> updated_profiles;
};

/// Paired design: every arm plays the identical cohort. The twin arm gets a
/// per-user optimised ladder, the other arms the thinned feasible catalog.
CohortResult run_cohort(std::span<const CohortMember> cohort, std::span<const ControllerKind> arms,
                        const CohortSettings& settings);

/// Quality network trained for a cohort run from a seed derived from master_seed.
QualityNet cohort_quality_net(const CohortSettings& settings);

}  // namespace twinstream
