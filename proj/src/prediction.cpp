#include "twinstream/prediction.hpp"

#include <algorithm>
#include <cmath>

#include "twinstream/error.hpp"
#include "twinstream/rng.hpp"

namespace twinstream {

double predict_throughput(std::span<const double> samples_mbps, std::size_t window) {
  if (samples_mbps.empty()) fail(ErrorKind::InsufficientData, "no throughput samples");
  if (window == 0) fail(ErrorKind::InvalidInput, "throughput window must be >= 1");
  const std::size_t n = std::min(window, samples_mbps.size());
  double inv_sum = 0.0;
  for (double s : samples_mbps.last(n)) {
    if (!(s > 0.0) || !std::isfinite(s)) fail(ErrorKind::InvalidInput, "throughput samples must be positive");
    inv_sum += 1.0 / s;
  }
  return static_cast<double>(n) / inv_sum;
}

NetState NetState::observe(double throughput_mbps, double latency, std::size_t window) const {
  NetState out = *this;
  out.recent_samples.push_back(throughput_mbps);
  if (out.recent_samples.size() > window)
    out.recent_samples.erase(out.recent_samples.begin(),
                             out.recent_samples.end() - static_cast<std::ptrdiff_t>(window));
  out.predicted_throughput_mbps = predict_throughput(out.recent_samples, window);
  out.latency_ms = latency;
  return out;
}

QualityNet QualityNet::initialized(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> p(kParamCount);
  for (double& v : p) v = rng.uniform(-0.5, 0.5);
  return QualityNet{}.with_parameters(p);
}

QualityNet QualityNet::constant(double output_bias) {
  QualityNet net;
  net.b2_ = output_bias;
  return net;
}

double QualityNet::forward(const QualityFeatures& x) const noexcept {
  QualityFeatures z;
  for (std::size_t i = 0; i < kQualityInputs; ++i) z[i] = (x[i] - offset_[i]) / scale_[i];
  double y = b2_;
  for (std::size_t j = 0; j < kQualityHidden; ++j) {
    double a = b1_[j];
    for (std::size_t i = 0; i < kQualityInputs; ++i) a += w1_[j * kQualityInputs + i] * z[i];
    y += w2_[j] * std::tanh(a);
  }
  return y;
}

double QualityNet::loss(std::span<const QualitySample> batch) const {
  if (batch.empty()) fail(ErrorKind::InvalidInput, "empty batch");
  double sum = 0.0;
  for (const auto& s : batch) {
    const double e = forward(s.x) - s.target_mbps;
    sum += e * e;
  }
  return sum / static_cast<double>(batch.size());
}

std::pair<double, std::vector<double>> QualityNet::loss_and_gradient(std::span<const QualitySample> batch) const {
  if (batch.empty()) fail(ErrorKind::InvalidInput, "empty batch");
  constexpr std::size_t kW1 = kQualityHidden * kQualityInputs;
  constexpr std::size_t kB1 = kW1;
  constexpr std::size_t kW2 = kB1 + kQualityHidden;
  constexpr std::size_t kB2 = kW2 + kQualityHidden;

  std::vector<double> grad(kParamCount, 0.0);
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  double sum_sq = 0.0;

  QualityFeatures z;
  std::array<double, kQualityHidden> h;
  for (const auto& s : batch) {
    for (std::size_t i = 0; i < kQualityInputs; ++i) z[i] = (s.x[i] - offset_[i]) / scale_[i];
    double y = b2_;
    for (std::size_t j = 0; j < kQualityHidden; ++j) {
      double a = b1_[j];
      for (std::size_t i = 0; i < kQualityInputs; ++i) a += w1_[j * kQualityInputs + i] * z[i];
      h[j] = std::tanh(a);
      y += w2_[j] * h[j];
    }
    const double err = y - s.target_mbps;
    sum_sq += err * err;

    const double dy = 2.0 * err * inv_n;
    grad[kB2] += dy;
    for (std::size_t j = 0; j < kQualityHidden; ++j) {
      grad[kW2 + j] += dy * h[j];
      const double da = dy * w2_[j] * (1.0 - h[j] * h[j]);
      grad[kB1 + j] += da;
      for (std::size_t i = 0; i < kQualityInputs; ++i) grad[j * kQualityInputs + i] += da * z[i];
    }
  }
  return {sum_sq * inv_n, std::move(grad)};
}

std::vector<double> QualityNet::parameters() const {
  std::vector<double> p;
  p.reserve(kParamCount);
  p.insert(p.end(), w1_.begin(), w1_.end());
  p.insert(p.end(), b1_.begin(), b1_.end());
  p.insert(p.end(), w2_.begin(), w2_.end());
  p.push_back(b2_);
  return p;
}

QualityNet QualityNet::with_parameters(std::span<const double> params) const {
  if (params.size() != kParamCount) fail(ErrorKind::InvalidInput, "wrong parameter count for quality net");
  for (double v : params)
    if (!std::isfinite(v)) fail(ErrorKind::InvalidInput, "non-finite network parameter");
  QualityNet out = *this;
  auto it = params.begin();
  std::copy_n(it, out.w1_.size(), out.w1_.begin());
  it += static_cast<std::ptrdiff_t>(out.w1_.size());
  std::copy_n(it, out.b1_.size(), out.b1_.begin());
  it += static_cast<std::ptrdiff_t>(out.b1_.size());
  std::copy_n(it, out.w2_.size(), out.w2_.begin());
  it += static_cast<std::ptrdiff_t>(out.w2_.size());
  out.b2_ = *it;
  return out;
}

QualityNet QualityNet::with_input_scaling(const QualityFeatures& offset, const QualityFeatures& scale) const {
  for (std::size_t i = 0; i < kQualityInputs; ++i)
    if (!std::isfinite(offset[i]) || !(scale[i] > 0.0) || !std::isfinite(scale[i]))
      fail(ErrorKind::InvalidInput, "input scaling must be finite with positive scale");
  QualityNet out = *this;
  out.offset_ = offset;
  out.scale_ = scale;
  return out;
}

QualityNet train_quality_net(std::span<const QualitySample> dataset, const TrainParams& params,
                             std::vector<double>* loss_history) {
  if (dataset.empty()) fail(ErrorKind::InvalidInput, "cannot train on an empty dataset");
  if (!(params.learning_rate > 0.0)) fail(ErrorKind::InvalidInput, "learning rate must be positive");
  for (const auto& s : dataset) {
    for (double v : s.x)
      if (!std::isfinite(v)) fail(ErrorKind::InvalidInput, "non-finite training feature");
    if (!std::isfinite(s.target_mbps)) fail(ErrorKind::InvalidInput, "non-finite training target");
  }

  // Standardise each input; constant inputs keep unit scale.
  const double n = static_cast<double>(dataset.size());
  QualityFeatures mean{}, scale{};
  for (const auto& s : dataset)
    for (std::size_t i = 0; i < kQualityInputs; ++i) mean[i] += s.x[i];
  for (double& m : mean) m /= n;
  for (std::size_t i = 0; i < kQualityInputs; ++i) {
    double var = 0.0;
    for (const auto& s : dataset) var += (s.x[i] - mean[i]) * (s.x[i] - mean[i]);
    const double sd = std::sqrt(var / n);
    scale[i] = sd > 1e-12 ? sd : 1.0;
  }

  QualityNet net = QualityNet::initialized(params.seed).with_input_scaling(mean, scale);
  std::vector<double> theta = net.parameters();
  if (loss_history) loss_history->clear();
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    const auto [loss, grad] = net.loss_and_gradient(dataset);
    if (loss_history) loss_history->push_back(loss);
    for (std::size_t k = 0; k < theta.size(); ++k) theta[k] -= params.learning_rate * grad[k];
    net = net.with_parameters(theta);
  }
  return net;
}

double predict_quality(const QualityNet& net, std::span<const double> device, std::span<const double> pref,
                       std::span<const double> network) {
  if (device.size() != kDeviceFeatures || pref.size() != kPrefFeatures || network.size() != kNetFeatures)
    fail(ErrorKind::InvalidInput, "quality features have the wrong dimension");
  QualityFeatures x;
  auto out = std::copy(device.begin(), device.end(), x.begin());
  out = std::copy(pref.begin(), pref.end(), out);
  std::copy(network.begin(), network.end(), out);
  for (double v : x)
    if (!std::isfinite(v)) fail(ErrorKind::InvalidInput, "non-finite quality feature");
  return std::max(0.0, net.forward(x));
}

std::array<double, kDeviceFeatures> device_features(const DeviceCapabilities& device) {
  return {static_cast<double>(device.max_height) / 1000.0,
          static_cast<double>(device.max_decode_bitrate_kbps) / 10'000.0};
}

std::array<double, kPrefFeatures> pref_features(const PreferenceVector& pref) {
  return {pref.quality_affinity, pref.rebuffer_tolerance, pref.data_sensitivity};
}

std::array<double, kNetFeatures> net_features(const NetState& net) {
  return {net.predicted_throughput_mbps, net.latency_ms / 1000.0};
}

QualityFeatures quality_features(const DeviceCapabilities& device, const PreferenceVector& pref,
                                 const NetState& net) {
  const auto d = device_features(device);
  const auto p = pref_features(pref);
  const auto n = net_features(net);
  return {d[0], d[1], p[0], p[1], p[2], n[0], n[1]};
}

double quality_teacher(const DeviceCapabilities& device, const PreferenceVector& pref, const NetState& net) {
  const double sustainable =
      std::min(static_cast<double>(device.max_decode_bitrate_kbps) / 1000.0, net.predicted_throughput_mbps);
  const double margin =
      0.3 * (1.0 - pref.rebuffer_tolerance) + 0.2 * pref.data_sensitivity * (1.0 - pref.quality_affinity);
  return sustainable * (1.0 - margin);
}

std::vector<QualitySample> synth_quality_dataset(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<QualitySample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto device = default_device(static_cast<DeviceClass>(rng.below(4)));
    PreferenceVector pref;
    pref.quality_affinity = rng.uniform01();
    pref.rebuffer_tolerance = rng.uniform01();
    pref.data_sensitivity = rng.uniform01();
    NetState net;
    net.predicted_throughput_mbps = rng.uniform(0.3, 15.0);
    net.latency_ms = rng.uniform(20.0, 80.0);
    out.push_back({quality_features(device, pref, net), quality_teacher(device, pref, net)});
  }
  return out;
}

}  // namespace twinstream
