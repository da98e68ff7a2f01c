#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "twinstream/session.hpp"

namespace twinstream {

/// QoE proxy weights: lambda per second of stall, mu per Mbps of switch magnitude.
struct QoeParams {
  double rebuffer_penalty = 1.0;
  double switch_penalty = 0.5;
};

struct SessionMetrics {
  double avg_quality_mbps = 0.0;
  double rebuffer_events_per_hour = 0.0;
  double rebuffer_total_s = 0.0;
  std::size_t rebuffer_count = 0;
  double avg_bandwidth_mbps = 0.0;
  std::size_t switch_count = 0;
  double startup_delay_s = 0.0;
  double qoe = 0.0;

  friend bool operator==(const SessionMetrics&, const SessionMetrics&) = default;
};

SessionMetrics compute_session_metrics(std::span<const SegmentRecord> records, const SessionConfig& config,
                                       double startup_delay_s, double wall_clock_s, const QoeParams& qoe = {});

struct Summary {
  double mean = 0.0;
  double sd = 0.0;

  friend bool operator==(const Summary&, const Summary&) = default;
};

/// Arithmetic mean and sample (n-1) standard deviation; sd is 0 for n = 1.
Summary aggregate(std::span<const double> values);

inline constexpr const char* kReportSchemaVersion = "1";

struct ArmReport {
  std::string arm;
  std::size_t n_sessions = 0;
  Summary avg_quality_mbps;
  Summary rebuffer_events_per_hour;
  Summary avg_bandwidth_mbps;
  Summary qoe;
  // Per-session metrics in cohort-index order; kept in memory, not emitted.
  std::vector<SessionMetrics> sessions;
};

struct CohortReport {
  std::uint64_t master_seed = 0;
  std::map<std::string, std::string> config;
  std::vector<ArmReport> arms;
};

ArmReport summarize_arm(std::string arm, std::vector<SessionMetrics> sessions);

/// Writes report.json and tables.csv into out_dir (created if missing).
void emit_report(const CohortReport& report, const std::filesystem::path& out_dir);

std::string report_json(const CohortReport& report);
std::string report_tables_csv(const CohortReport& report);

}  // namespace twinstream
