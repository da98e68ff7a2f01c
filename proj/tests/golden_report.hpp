#pragma once

#include "twinstream/metrics.hpp"

namespace golden {

// One session, one arm: 3 segments at 1, 2 and 2 Mbps, 1.5 s of stall.
inline twinstream::CohortReport single_session_report() {
  using namespace twinstream;
  SessionConfig c;
  c.video_duration_s = 12;
  const std::vector<SegmentRecord> records{
      {0, "r1000", 1000, 0.0, 2.0, 4e6, 0.0},
      {1, "r2000", 2000, 2.0, 6.0, 8e6, 0.0},
      {2, "r2000", 2000, 6.0, 11.5, 8e6, 1.5},
  };
  CohortReport r;
  r.master_seed = 42;
  r.config = {{"seed", "42"}, {"session.video_duration_s", "12"}};
  r.arms.push_back(summarize_arm("twin_driven", {compute_session_metrics(records, c, 2.0, 15.5)}));
  return r;
}

inline const char* const kReportJson = R"({
  "schema_version": "1",
  "master_seed": 42,
  "notes": {
    "quality_unit": "Mbps, mean selected rendition bitrate",
    "rebuffer_rate": "per-session stall episodes per hour of video, aggregated across sessions",
    "bandwidth": "bits downloaded / session wall clock",
    "sd_estimator": "sample (n-1); 0 for a single session",
    "qoe": "proxy: sum(bitrate*segment) - lambda*stall_s - mu*sum|bitrate step|"
  },
  "config": {
    "seed": "42",
    "session.video_duration_s": "12"
  },
  "arms": [
    {
      "arm": "twin_driven",
      "n_sessions": 1,
      "avg_quality_mbps": {
        "mean": 1.6666666666666667,
        "sd": 0.0
      },
      "rebuffer_events_per_hour": {
        "mean": 300.0,
        "sd": 0.0
      },
      "avg_bandwidth_mbps": {
        "mean": 1.2903225806451613,
        "sd": 0.0
      },
      "qoe": {
        "mean": 18.0,
        "sd": 0.0
      }
    }
  ]
}
)";

inline const char* const kTablesCsv = R"(metric,arm,mean,sd
avg_quality_mbps,twin_driven,1.6667,0.0000
rebuffer_events_per_hour,twin_driven,300.0000,0.0000
avg_bandwidth_mbps,twin_driven,1.2903,0.0000
qoe,twin_driven,18.0000,0.0000
)";

}  // namespace golden
