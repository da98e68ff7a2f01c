#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "twinstream/error.hpp"
#include "twinstream/prediction.hpp"

using namespace twinstream;

TEST_SUITE("prediction") {

TEST_CASE("harmonic mean examples") {
  CHECK(predict_throughput(std::vector<double>{2, 4}) == doctest::Approx(2.6667).epsilon(1e-4));
  CHECK(predict_throughput(std::vector<double>{3, 3, 3}) == doctest::Approx(3.0));
  CHECK(predict_throughput(std::vector<double>{1, 10, 10, 10, 10}) == doctest::Approx(3.5714).epsilon(1e-4));
  // Only the last five count.
  CHECK(predict_throughput(std::vector<double>{0.01, 1, 10, 10, 10, 10}) == doctest::Approx(3.5714).epsilon(1e-4));
}

TEST_CASE("harmonic mean errors") {
  CHECK_THROWS_AS(predict_throughput(std::vector<double>{}), Error);
  CHECK_THROWS_AS(predict_throughput(std::vector<double>{1.0, 0.0}), Error);
  CHECK_THROWS_AS(predict_throughput(std::vector<double>{-2.0}), Error);
  try {
    predict_throughput(std::vector<double>{});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientData);
  }
}

TEST_CASE("harmonic mean never exceeds the arithmetic mean") {
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> s(1 + rng.below(5));
    for (auto& v : s) v = rng.uniform(0.1, 20.0);
    const double hm = predict_throughput(s);
    double am = 0;
    for (double v : s) am += v;
    am /= static_cast<double>(s.size());
    CHECK(hm <= am * (1 + 1e-12));
  }
}

TEST_CASE("net state keeps a bounded window") {
  NetState n;
  for (int i = 1; i <= 8; ++i) n = n.observe(i, 40);
  CHECK(n.recent_samples.size() == 5);
  CHECK(n.recent_samples.front() == 4.0);
  CHECK(n.latency_ms == 40.0);
  CHECK(n.predicted_throughput_mbps == doctest::Approx(predict_throughput(std::vector<double>{4, 5, 6, 7, 8})));
}

TEST_CASE("degenerate and clamped networks") {
  const auto net = QualityNet::constant(1.7);
  const std::array<double, 2> d{1, 2};
  const std::array<double, 3> p{0.1, 0.2, 0.3};
  const std::array<double, 2> n{4, 0.05};
  CHECK(predict_quality(net, d, p, n) == 1.7);
  CHECK(predict_quality(QualityNet::constant(-3.0), d, p, n) == 0.0);

  const std::array<double, 2> bad{std::numeric_limits<double>::quiet_NaN(), 0};
  CHECK_THROWS_AS(predict_quality(net, bad, p, n), Error);
  const std::array<double, 1> short_dev{1};
  CHECK_THROWS_AS(predict_quality(net, short_dev, p, n), Error);
}

TEST_CASE("constant target is fitted") {
  std::vector<QualitySample> data(16);
  Rng rng(8);
  for (auto& s : data) {
    for (auto& v : s.x) v = rng.uniform(0, 1);
    s.target_mbps = 2.0;
  }
  const auto net = train_quality_net(data, {0.05, 2000, 3});
  for (const auto& s : data) CHECK(std::abs(net.forward(s.x) - 2.0) < 1e-3);
}

TEST_CASE("linear throughput target generalises") {
  // q = 0.5 * throughput over [1, 10], every other feature fixed.
  auto sample = [](double thr) {
    QualitySample s;
    s.x = {1.08, 1.5, 0.5, 0.5, 0.5, thr, 0.05};
    s.target_mbps = 0.5 * thr;
    return s;
  };
  std::vector<QualitySample> train;
  for (int i = 0; i <= 18; ++i) train.push_back(sample(1.0 + 0.5 * i));
  std::vector<double> history;
  const auto net = train_quality_net(train, {0.01, 3000, 4}, &history);
  for (double thr : {1.25, 3.3, 5.75, 7.1, 9.9}) {
    const auto s = sample(thr);
    CHECK(std::abs(predict_quality(net, std::span(s.x).subspan(0, 2), std::span(s.x).subspan(2, 3),
                                   std::span(s.x).subspan(5, 2)) -
                   s.target_mbps) <= 0.3);
  }
  // Loss is non-increasing at this learning rate.
  for (std::size_t e = 1; e < history.size(); ++e) CHECK(history[e] <= history[e - 1]);
}

TEST_CASE("training is deterministic") {
  const auto data = synth_quality_dataset(64, 9);
  const auto a = train_quality_net(data, {0.05, 50, 9});
  const auto b = train_quality_net(data, {0.05, 50, 9});
  CHECK(a == b);
  CHECK(a.parameters() == b.parameters());
}

TEST_CASE("initialisation is uniform in [-0.5, 0.5]") {
  const auto p = QualityNet::initialized(77).parameters();
  CHECK(p.size() == QualityNet::kParamCount);
  for (double v : p) {
    CHECK(v >= -0.5);
    CHECK(v <= 0.5);
  }
}

TEST_CASE("training rejects empty data and bad hyperparameters") {
  std::vector<QualitySample> none;
  CHECK_THROWS_AS(train_quality_net(none, {}), Error);
  const auto data = synth_quality_dataset(4, 1);
  CHECK_THROWS_AS(train_quality_net(data, {0.0, 10, 1}), Error);
  CHECK_THROWS_AS(QualityNet::initialized(1).with_parameters(std::vector<double>(3)), Error);
}

TEST_CASE("analytic gradient matches central differences") {
  Rng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const auto batch = oracle::random_batch(rng, 8);
    const auto net = QualityNet::initialized(rng.next_u64());
    CHECK(oracle::gradient_check(net, batch) < 1e-4);
    const auto trained = train_quality_net(batch, {0.05, 100, rng.next_u64()});
    CHECK(oracle::gradient_check(trained, batch) < 1e-4);
  }
}

TEST_CASE("teacher and synthetic data") {
  const auto tv = default_device(DeviceClass::tv);
  PreferenceVector p;
  p.rebuffer_tolerance = 1.0;
  p.data_sensitivity = 0.0;
  NetState n;
  n.predicted_throughput_mbps = 6.0;
  CHECK(quality_teacher(tv, p, n) == doctest::Approx(6.0));
  const auto phone = default_device(DeviceClass::phone);
  n.predicted_throughput_mbps = 50.0;
  CHECK(quality_teacher(phone, p, n) == doctest::Approx(8.0));

  const auto a = synth_quality_dataset(32, 4);
  const auto b = synth_quality_dataset(32, 4);
  REQUIRE(a.size() == 32);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].target_mbps >= 0.0);
  }
}

}
