#include "doctest.h"
#include "twinstream/abr.hpp"
#include "twinstream/error.hpp"
#include "twinstream/rng.hpp"

using namespace twinstream;

namespace {

Rendition rung(std::int64_t kbps) { return {"r" + std::to_string(kbps), kbps, 1280, 720, 30, Codec::h264}; }

BitrateLadder ladder(std::initializer_list<std::int64_t> kbps) {
  std::vector<Rendition> v;
  for (auto k : kbps) v.push_back(rung(k));
  return BitrateLadder(std::move(v));
}

DecisionContext ctx(double buffer, double thr_mbps, double latency_ms = 0.0) {
  DecisionContext c;
  c.buffer_level_s = buffer;
  c.net.predicted_throughput_mbps = thr_mbps;
  c.net.latency_ms = latency_ms;
  return c;
}

TwinProfile balanced() { return TwinProfile("u", PreferenceVector{}); }

const DeviceCapabilities kDesktop{};

}  // namespace

TEST_SUITE("abr") {

TEST_CASE("single rung is always chosen") {
  const auto l = ladder({1500});
  for (double buf : {0.0, 10.0, 30.0})
    for (double thr : {0.1, 5.0, 100.0}) CHECK(select_quality(l, kDesktop, balanced(), ctx(buf, thr), 3.0).bitrate_kbps == 1500);
}

TEST_CASE("dominant quality preference picks the top rung") {
  PreferenceVector p;
  p.quality_affinity = 1.0;
  p.data_sensitivity = 0.0;
  const auto l = ladder({1000, 2000, 4000});
  CHECK(select_quality(l, kDesktop, TwinProfile("u", p), ctx(30, 1000), 4.0).bitrate_kbps == 4000);
}

TEST_CASE("three-rung worked example") {
  // Ladder {1, 2, 4} Mbps, 4 s segments, 2.5 Mbps, buffer 4 s, balanced
  // profile, target 2.0. Hand evaluation of the score:
  //   1 Mbps: 0.125 - 0 - 0.125 - 0.125           = -0.125
  //   2 Mbps: 0.25  - 0 - 0.25  - 0               = 0
  //   4 Mbps: 0.5 - 1.0*((6.4-4)/4) - 0.5 - 0.25  = -0.85
  const auto l = ladder({1000, 2000, 4000});
  const auto c = ctx(4, 2.5);
  const auto w = ScoreWeights::from_profile(PreferenceVector{});
  CHECK(rendition_score(l, 0, w, c, 2.0) == doctest::Approx(-0.125));
  CHECK(rendition_score(l, 1, w, c, 2.0) == doctest::Approx(0.0));
  CHECK(rendition_score(l, 2, w, c, 2.0) == doctest::Approx(-0.85));
  CHECK(select_quality(l, kDesktop, balanced(), c, 2.0).bitrate_kbps == 2000);
}

TEST_CASE("weights follow the profile") {
  PreferenceVector p = PreferenceVector::from_array({0.7, 0.25, 0.4, 0.1, 0.9});
  const auto w = ScoreWeights::from_profile(p);
  CHECK(w.quality == 0.7);
  CHECK(w.rebuffer == 1.5);
  CHECK(w.switching == doctest::Approx(0.45));
  CHECK(w.data == 0.4);
  CHECK(w.target == 0.5);
}

TEST_CASE("switch penalty uses tier distance") {
  const auto l = ladder({1000, 2000, 3000});
  auto c = ctx(30, 100);
  c.previous_rendition = "r1000";
  ScoreWeights w{0, 0, 1.0, 0, 0};
  CHECK(rendition_score(l, 0, w, c, 0) == 0.0);
  CHECK(rendition_score(l, 1, w, c, 0) == doctest::Approx(-0.5));
  CHECK(rendition_score(l, 2, w, c, 0) == doctest::Approx(-1.0));
  c.previous_rendition = "not-in-ladder";
  CHECK(rendition_score(l, 2, w, c, 0) == 0.0);
}

TEST_CASE("ties go to the lower bitrate") {
  const auto l = ladder({1000, 2000, 3000});
  const ScoreWeights zero{0, 0, 0, 0, 0};
  CHECK(select_quality_weighted(l, kDesktop, zero, ctx(10, 5), 2.0).bitrate_kbps == 1000);
}

TEST_CASE("device filtering and empty feasible set") {
  std::vector<Rendition> v{rung(1000), rung(3000)};
  v[1].height = 2160;
  v[1].width = 3840;
  const BitrateLadder l(v);
  PreferenceVector p;
  p.quality_affinity = 1.0;
  p.data_sensitivity = 0.0;
  CHECK(select_quality(l, kDesktop, TwinProfile("u", p), ctx(30, 1000), 3.0).bitrate_kbps == 1000);

  DeviceCapabilities none;
  none.supported_codecs = {Codec::av1};
  try {
    select_quality(l, none, balanced(), ctx(1, 1), 1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoFeasibleRendition);
  }
  CHECK_THROWS_AS(select_baseline(ControllerKind::throughput_rule, l, none, ctx(1, 1)), Error);
}

TEST_CASE("baselines") {
  const auto l3 = ladder({1000, 2000, 4000});
  CHECK(select_baseline(ControllerKind::throughput_rule, l3, kDesktop, ctx(0, 3)).bitrate_kbps == 2000);
  CHECK(select_baseline(ControllerKind::throughput_rule, l3, kDesktop, ctx(0, 0.5)).bitrate_kbps == 1000);

  CHECK(select_baseline(ControllerKind::buffer_rule, l3, kDesktop, ctx(0, 3)).bitrate_kbps == 1000);
  CHECK(select_baseline(ControllerKind::buffer_rule, l3, kDesktop, ctx(29, 3)).bitrate_kbps == 4000);
  const auto l5 = ladder({500, 1000, 2000, 3000, 4000});
  CHECK(select_baseline(ControllerKind::buffer_rule, l5, kDesktop, ctx(15, 3)).bitrate_kbps == 2000);

  auto dev = kDesktop;
  for (auto [cls, expect] : {std::pair{DeviceClass::phone, 500}, {DeviceClass::tablet, 1000},
                             {DeviceClass::desktop, 2000}, {DeviceClass::tv, 4000}}) {
    dev.device_class = cls;
    CHECK(select_baseline(ControllerKind::fixed_profile, l5, dev, ctx(15, 3)).bitrate_kbps == expect);
  }
  dev.device_class = DeviceClass::desktop;
  CHECK(select_baseline(ControllerKind::fixed_profile, ladder({700, 900}), dev, ctx(0, 1)).bitrate_kbps == 900);
  CHECK_THROWS_AS(select_baseline(ControllerKind::twin_driven, l3, kDesktop, ctx(0, 1)), Error);
}

TEST_CASE("raising throughput never lowers the tier") {
  const auto l = ladder({300, 750, 1200, 2400, 4300, 6000});
  Rng rng(61);
  for (int trial = 0; trial < 200; ++trial) {
    auto a = PreferenceVector{}.to_array();
    for (auto& v : a) v = rng.uniform01();
    const TwinProfile prof("u", PreferenceVector::from_array(a));
    const double buffer = rng.uniform(0, 30);
    const double target = rng.uniform(0, 6);
    const double latency = rng.uniform(0, 80);
    std::optional<std::string> prev;
    if (rng.below(2)) prev = l[rng.below(l.size())].id;
    std::int64_t last_twin = 0, last_thr = 0;
    for (double thr = 0.1; thr < 20; thr *= 1.05) {
      auto c = ctx(buffer, thr, latency);
      c.previous_rendition = prev;
      const auto twin = select_quality(l, kDesktop, prof, c, target).bitrate_kbps;
      const auto rule = select_baseline(ControllerKind::throughput_rule, l, kDesktop, c).bitrate_kbps;
      CHECK(twin >= last_twin);
      CHECK(rule >= last_thr);
      last_twin = twin;
      last_thr = rule;
    }
  }
}

TEST_CASE("scale invariance of the argmax") {
  const auto l = ladder({300, 750, 1200, 2400, 4300});
  Rng rng(62);
  for (int trial = 0; trial < 200; ++trial) {
    auto a = PreferenceVector{}.to_array();
    for (auto& v : a) v = rng.uniform01();
    const auto w = ScoreWeights::from_profile(PreferenceVector::from_array(a));
    auto c = ctx(rng.uniform(0, 30), rng.uniform(0.2, 10), rng.uniform(0, 100));
    if (rng.below(2)) c.previous_rendition = l[rng.below(l.size())].id;
    const double target = rng.uniform(0, 5);
    const auto base = select_quality_weighted(l, kDesktop, w, c, target);
    for (double k : {0.25, 3.0, 1000.0}) CHECK(select_quality_weighted(l, kDesktop, w.scaled(k), c, target) == base);
  }
}

TEST_CASE("safety: empty buffer and collapsed throughput pick the lowest rung") {
  const auto l = ladder({400, 1000, 2500, 5000});
  for (double qa : {0.0, 0.5, 1.0})
    for (double rt : {0.0, 0.25, 0.5, 0.75})
      for (double ds : {0.0, 0.5, 1.0})
        for (double st : {0.0, 1.0})
          for (double target : {0.0, 2.5, 5.0}) {
            const TwinProfile p("u", PreferenceVector::from_array({qa, rt, ds, st, 0.5}));
            CHECK(select_quality(l, kDesktop, p, ctx(0, 0.3), target).bitrate_kbps == 400);
          }
}

TEST_CASE("controller names") {
  for (auto k : {ControllerKind::twin_driven, ControllerKind::throughput_rule, ControllerKind::buffer_rule,
                 ControllerKind::fixed_profile})
    CHECK(parse_controller(to_string(k)) == k);
  CHECK(!parse_controller("bola"));
}

}
