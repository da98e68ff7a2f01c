#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace twinstream {

/// Player constants for one simulated session. Durations in seconds.
struct SessionConfig {
  double segment_duration_s = 4.0;
  double max_buffer_s = 30.0;
  double startup_threshold_s = 8.0;
  double video_duration_s = 600.0;
  // Throughput assumed before the first segment has been measured.
  double initial_throughput_mbps = 1.0;
  // Apply ingest_feedback after every segment instead of one update at session end.
  bool feedback_per_segment = false;

  std::size_t segment_count() const noexcept;
};

/// Throws InvalidInput unless 0 < segment <= startup <= max buffer and the
/// video is a positive whole number of segments.
void validate(const SessionConfig& config);

struct SegmentRecord {
  std::size_t index = 0;
  std::string rendition_id;
  std::int64_t bitrate_kbps = 0;
  double t_request_s = 0.0;
  double t_complete_s = 0.0;
  double bits_downloaded = 0.0;
  // Stall that ended when this segment arrived; 0 when playback never starved.
  double rebuffer_before_s = 0.0;

  friend bool operator==(const SegmentRecord&, const SegmentRecord&) = default;
};

}  // namespace twinstream
