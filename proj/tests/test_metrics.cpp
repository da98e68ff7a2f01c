#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "golden_report.hpp"
#include "twinstream/error.hpp"
#include "twinstream/metrics.hpp"

using namespace twinstream;

namespace {

SegmentRecord seg(std::size_t i, std::int64_t kbps, double stall = 0.0) {
  return {i, "r" + std::to_string(kbps), kbps, 0.0, 1.0, static_cast<double>(kbps) * 4000.0, stall};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("single segment") {
  SessionConfig c;
  c.video_duration_s = 4;
  const std::vector<SegmentRecord> r{seg(0, 2000)};
  const auto m = compute_session_metrics(r, c, 0.0, 4.0);
  CHECK(m.avg_quality_mbps == 2.0);
  CHECK(m.rebuffer_events_per_hour == 0.0);
  CHECK(m.avg_bandwidth_mbps == 2.0);
  CHECK(m.switch_count == 0);
  CHECK(m.qoe == 8.0);
}

TEST_CASE("fifteen stalled segments") {
  SessionConfig c;
  c.video_duration_s = 60;
  std::vector<SegmentRecord> r;
  for (std::size_t i = 0; i < 15; ++i) r.push_back(seg(i, 1000, 4.0));
  const auto m = compute_session_metrics(r, c, 0.0, 120.0);
  CHECK(m.rebuffer_count == 15);
  CHECK(m.rebuffer_events_per_hour == 900.0);
  CHECK(m.rebuffer_total_s == 60.0);
  CHECK(m.qoe == 0.0);
}

TEST_CASE("switches count id changes and penalise magnitude") {
  SessionConfig c;
  c.video_duration_s = 16;
  const std::vector<SegmentRecord> r{seg(0, 1000), seg(1, 3000), seg(2, 3000), seg(3, 2000)};
  const auto m = compute_session_metrics(r, c, 1.0, 17.0, {1.0, 0.5});
  CHECK(m.switch_count == 2);
  CHECK(m.qoe == doctest::Approx(36.0 - 0.5 * 3.0));
  CHECK(m.startup_delay_s == 1.0);
  CHECK_THROWS_AS(compute_session_metrics(std::vector<SegmentRecord>{}, c, 0, 1), Error);
}

TEST_CASE("aggregate") {
  CHECK(aggregate(std::vector<double>{3, 3, 3}) == Summary{3.0, 0.0});
  const auto two = aggregate(std::vector<double>{2, 4});
  CHECK(two.mean == 3.0);
  CHECK(two.sd == doctest::Approx(1.41421).epsilon(1e-5));
  CHECK(aggregate(std::vector<double>{7.5}) == Summary{7.5, 0.0});
  CHECK_THROWS_AS(aggregate(std::vector<double>{}), Error);
}

TEST_CASE("report files match the frozen bytes") {
  const auto report = golden::single_session_report();
  CHECK(report_json(report) == golden::kReportJson);
  CHECK(report_tables_csv(report) == golden::kTablesCsv);

  const auto dir = std::filesystem::temp_directory_path() / "twinstream_metrics_test";
  std::filesystem::remove_all(dir);
  emit_report(report, dir);
  const auto first = slurp(dir / "report.json");
  CHECK(first == golden::kReportJson);
  emit_report(report, dir);
  CHECK(slurp(dir / "report.json") == first);
  CHECK(slurp(dir / "tables.csv") == golden::kTablesCsv);
  std::filesystem::remove_all(dir);
}

TEST_CASE("tables have four rows per arm") {
  CohortReport r;
  for (const char* arm : {"a", "b", "c"}) r.arms.push_back(summarize_arm(arm, {SessionMetrics{}, SessionMetrics{}}));
  const auto csv = report_tables_csv(r);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4 * 3);
}

TEST_CASE("unwritable output directory") {
  try {
    emit_report(golden::single_session_report(), "/proc/twinstream/out");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}

}
