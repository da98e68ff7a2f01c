#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "twinstream/error.hpp"
#include "twinstream/workload.hpp"

using namespace twinstream;

TEST_SUITE("workload") {

TEST_CASE("empty cohort") {
  CohortSpec spec;
  spec.n_users = 0;
  CHECK(gen_cohort(spec).empty());
}

TEST_CASE("cohorts are deterministic and order-stable") {
  CohortSpec spec;
  spec.n_users = 10;
  spec.seed = 99;
  spec.trace.duration_s = 100;
  const auto a = gen_cohort(spec);
  const auto b = gen_cohort(spec);
  REQUIRE(a.size() == 10);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].profile == b[i].profile);
    CHECK(a[i].device == b[i].device);
    CHECK(a[i].trace == b[i].trace);
  }
  spec.n_users = 25;
  const auto bigger = gen_cohort(spec);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(bigger[i].profile == a[i].profile);
    CHECK(bigger[i].trace == a[i].trace);
  }
  CHECK(a[3].profile.user_id() == "user00003");
}

TEST_CASE("preference means are near one half") {
  CohortSpec spec;
  spec.n_users = 1000;
  spec.trace.duration_s = 10;
  const auto cohort = gen_cohort(spec);
  std::array<double, 5> mean{};
  std::array<std::size_t, 4> classes{};
  for (const auto& m : cohort) {
    const auto a = m.profile.pref().to_array();
    for (std::size_t k = 0; k < 5; ++k) mean[k] += a[k] / 1000.0;
    ++classes[static_cast<std::size_t>(m.device.device_class)];
    CHECK(m.device == default_device(m.device.device_class));
  }
  for (double v : mean) {
    CHECK(v >= 0.45);
    CHECK(v <= 0.55);
  }
  CHECK(classes[0] > classes[1]);
}

TEST_CASE("device table") {
  const auto phone = default_device(DeviceClass::phone);
  CHECK(phone.max_height == 720);
  CHECK(phone.max_decode_bitrate_kbps == 8000);
  CHECK(phone.supports(Codec::h265));
  CHECK(!phone.supports(Codec::av1));
  CHECK(default_device(DeviceClass::tablet).max_decode_bitrate_kbps == 15000);
  CHECK(default_device(DeviceClass::desktop).supports(Codec::av1));
  CHECK(default_device(DeviceClass::tv).max_height == 2160);
  CHECK(default_device(DeviceClass::tv).max_decode_bitrate_kbps == 100000);
}

TEST_CASE("invalid device mix") {
  CohortSpec spec;
  spec.device_mix = {0.5, 0.5, 0.5, 0.0};
  CHECK_THROWS_AS(gen_cohort(spec), Error);
  spec.device_mix = {1.2, -0.2, 0.0, 0.0};
  CHECK_THROWS_AS(gen_cohort(spec), Error);
}

TEST_CASE("generated traces satisfy their invariants") {
  TraceSpec spec;
  spec.duration_s = 600;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto t = gen_trace(spec, seed);
    const auto s = t.samples();
    CHECK(s.front().t_start_s == 0.0);
    const double latency = s.front().latency_ms;
    CHECK(latency >= 20.0);
    CHECK(latency <= 80.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(s[i].bandwidth_mbps >= 0.3);
      CHECK(s[i].bandwidth_mbps <= 15.0);
      CHECK(s[i].latency_ms == latency);
      if (i > 0) CHECK(s[i].t_start_s > s[i - 1].t_start_s);
    }
    CHECK(gen_trace(spec, seed) == t);
  }
}

TEST_CASE("long traces average near the stationary mean") {
  TraceSpec spec;
  spec.duration_s = 10000;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto t = gen_trace(spec, seed);
    const auto s = t.samples();
    double area = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double end = i + 1 < s.size() ? s[i + 1].t_start_s : spec.duration_s;
      area += s[i].bandwidth_mbps * (std::min(end, spec.duration_s) - s[i].t_start_s);
    }
    const double mean = area / spec.duration_s;
    CHECK(mean >= 5.0 * 0.85);
    CHECK(mean <= 5.0 * 1.15);
  }
}

TEST_CASE("trace csv") {
  const auto t = parse_trace("t_start_s,bandwidth_mbps,latency_ms\n0,5.0,40\n10,2.5,40\n");
  REQUIRE(t.samples().size() == 2);
  CHECK(t.samples()[1].t_start_s == 10.0);
  CHECK(t.samples()[1].bandwidth_mbps == 2.5);

  CHECK_THROWS_AS(parse_trace("t_start_s,bandwidth_mbps,latency_ms\n0,5.0,40\n0,2.5,40\n"), Error);
  CHECK_THROWS_AS(parse_trace("t_start_s,bandwidth_mbps,latency_ms\n0,-1,40\n"), Error);
  CHECK_THROWS_AS(parse_trace("0,5.0,40\n"), Error);
  try {
    parse_trace("t_start_s,bandwidth_mbps,latency_ms\n0,5.0,40\n3,1.0,40\n2,2.5,40\n", "x.csv");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Format);
    CHECK(std::string(e.what()).find("x.csv:4:") != std::string::npos);
  }
  try {
    load_trace("/nonexistent/trace.csv");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}

TEST_CASE("trace write and load round trip exactly") {
  const auto dir = std::filesystem::temp_directory_path() / "twinstream_workload_test";
  std::filesystem::create_directories(dir);
  TraceSpec spec;
  spec.duration_s = 500;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto t = gen_trace(spec, seed);
    const auto path = dir / ("t" + std::to_string(seed) + ".csv");
    write_trace(t, path);
    CHECK(load_trace(path) == t);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("cohort csv") {
  CohortSpec spec;
  spec.n_users = 5;
  spec.trace.duration_s = 20;
  const auto cohort = gen_cohort(spec);
  const auto rows = parse_cohort(format_cohort(cohort));
  REQUIRE(rows.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(rows[i].profile.user_id() == cohort[i].profile.user_id());
    CHECK(rows[i].device == cohort[i].device);
    const auto a = rows[i].profile.pref().to_array();
    const auto b = cohort[i].profile.pref().to_array();
    for (std::size_t k = 0; k < 5; ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-6));
  }
  const std::string header =
      "user_id,device_class,alpha,quality_affinity,rebuffer_tolerance,data_sensitivity,switch_tolerance,startup_tolerance\n";
  CHECK_THROWS_AS(parse_cohort(header + "u1,watch,0.2,0.5,0.5,0.5,0.5,0.5\n"), Error);
  CHECK_THROWS_AS(parse_cohort(header + "u1,tv,0.2,1.5,0.5,0.5,0.5,0.5\n"), Error);
  CHECK_THROWS_AS(parse_cohort(header + "u1,tv,0,0.5,0.5,0.5,0.5,0.5\n"), Error);
  CHECK_THROWS_AS(parse_cohort(header + "u1,tv,0.2,0.5\n"), Error);
}

}
