#include "twinstream/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "twinstream/error.hpp"

namespace twinstream {

namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

std::string fixed4(double v) {
  // Avoid "-0.0000" for tiny negatives so equal reports print equal text.
  if (std::abs(v) < 0.00005) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

nlohmann::ordered_json summary_json(const Summary& s) {
  nlohmann::ordered_json j;
  j["mean"] = s.mean;
  j["sd"] = s.sd;
  return j;
}

}  // namespace

SessionMetrics compute_session_metrics(std::span<const SegmentRecord> records, const SessionConfig& config,
                                       double startup_delay_s, double wall_clock_s, const QoeParams& qoe) {
  if (records.empty()) fail(ErrorKind::InvalidInput, "session has no segment records");
  if (!(wall_clock_s > 0.0)) fail(ErrorKind::InvalidInput, "wall clock must be positive");

  SessionMetrics m;
  double quality_sum = 0.0;
  double bits_sum = 0.0;
  double switch_magnitude = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const double mbps = static_cast<double>(r.bitrate_kbps) / 1000.0;
    quality_sum += mbps;
    bits_sum += r.bits_downloaded;
    m.rebuffer_total_s += r.rebuffer_before_s;
    if (r.rebuffer_before_s > 0.0) ++m.rebuffer_count;
    if (i > 0) {
      const auto& prev = records[i - 1];
      if (prev.rendition_id != r.rendition_id) ++m.switch_count;
      switch_magnitude += std::abs(mbps - static_cast<double>(prev.bitrate_kbps) / 1000.0);
    }
  }

  const double n = static_cast<double>(records.size());
  m.avg_quality_mbps = quality_sum / n;
  m.rebuffer_events_per_hour = static_cast<double>(m.rebuffer_count) / (config.video_duration_s / 3600.0);
  m.avg_bandwidth_mbps = bits_sum / wall_clock_s / 1e6;
  m.startup_delay_s = startup_delay_s;
  m.qoe = quality_sum * config.segment_duration_s - qoe.rebuffer_penalty * m.rebuffer_total_s -
          qoe.switch_penalty * switch_magnitude;
  return m;
}

Summary aggregate(std::span<const double> values) {
  if (values.empty()) fail(ErrorKind::InvalidInput, "cannot aggregate an empty list");
  const double n = static_cast<double>(values.size());

  CompensatedSum total;
  for (double v : values) total.add(v);
  const double mean = total.value() / n;
  if (values.size() == 1) return {mean, 0.0};

  CompensatedSum squares;
  for (double v : values) squares.add((v - mean) * (v - mean));
  return {mean, std::sqrt(squares.value() / (n - 1.0))};
}

ArmReport summarize_arm(std::string arm, std::vector<SessionMetrics> sessions) {
  if (sessions.empty()) fail(ErrorKind::InvalidInput, "arm '" + arm + "' has no sessions");
  ArmReport out;
  out.arm = std::move(arm);
  out.n_sessions = sessions.size();

  auto column = [&](double SessionMetrics::*field) {
    std::vector<double> v;
    v.reserve(sessions.size());
    for (const auto& s : sessions) v.push_back(s.*field);
    return aggregate(v);
  };
  out.avg_quality_mbps = column(&SessionMetrics::avg_quality_mbps);
  out.rebuffer_events_per_hour = column(&SessionMetrics::rebuffer_events_per_hour);
  out.avg_bandwidth_mbps = column(&SessionMetrics::avg_bandwidth_mbps);
  out.qoe = column(&SessionMetrics::qoe);
  out.sessions = std::move(sessions);
  return out;
}

std::string report_json(const CohortReport& report) {
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["master_seed"] = report.master_seed;
  j["notes"] = {
      {"quality_unit", "Mbps, mean selected rendition bitrate"},
      {"rebuffer_rate", "per-session stall episodes per hour of video, aggregated across sessions"},
      {"bandwidth", "bits downloaded / session wall clock"},
      {"sd_estimator", "sample (n-1); 0 for a single session"},
      {"qoe", "proxy: sum(bitrate*segment) - lambda*stall_s - mu*sum|bitrate step|"},
  };
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.config) cfg[k] = v;
  j["config"] = std::move(cfg);

  nlohmann::ordered_json arms = nlohmann::ordered_json::array();
  for (const auto& a : report.arms) {
    nlohmann::ordered_json arm;
    arm["arm"] = a.arm;
    arm["n_sessions"] = a.n_sessions;
    arm["avg_quality_mbps"] = summary_json(a.avg_quality_mbps);
    arm["rebuffer_events_per_hour"] = summary_json(a.rebuffer_events_per_hour);
    arm["avg_bandwidth_mbps"] = summary_json(a.avg_bandwidth_mbps);
    arm["qoe"] = summary_json(a.qoe);
    arms.push_back(std::move(arm));
  }
  j["arms"] = std::move(arms);
  return j.dump(2) + "\n";
}

std::string report_tables_csv(const CohortReport& report) {
  std::ostringstream out;
  out << "metric,arm,mean,sd\n";
  auto rows = [&](const char* metric, Summary ArmReport::*field) {
    for (const auto& a : report.arms) {
      const Summary& s = a.*field;
      out << metric << ',' << a.arm << ',' << fixed4(s.mean) << ',' << fixed4(s.sd) << '\n';
    }
  };
  rows("avg_quality_mbps", &ArmReport::avg_quality_mbps);
  rows("rebuffer_events_per_hour", &ArmReport::rebuffer_events_per_hour);
  rows("avg_bandwidth_mbps", &ArmReport::avg_bandwidth_mbps);
  rows("qoe", &ArmReport::qoe);
  return out.str();
}

void emit_report(const CohortReport& report, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create output directory " + out_dir.string() + ": " + ec.message());

  auto write = [&](const char* name, const std::string& body) {
    const auto path = out_dir / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    f << body;
    if (!f.flush()) fail(ErrorKind::Io, "failed writing " + path.string());
  };
  write("report.json", report_json(report));
  write("tables.csv", report_tables_csv(report));
}

}  // namespace twinstream
