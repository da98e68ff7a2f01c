#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "twinstream/media.hpp"
#include "twinstream/twin.hpp"

namespace twinstream {

inline constexpr std::size_t kThroughputWindow = 5;

/// Harmonic mean of the most recent min(window, n) samples, in Mbps.
double predict_throughput(std::span<const double> samples_mbps, std::size_t window = kThroughputWindow);

/// Network conditions as seen by the client.
struct NetState {
  double predicted_throughput_mbps = 1.0;
  double latency_ms = 0.0;
  std::vector<double> recent_samples;  // Mbps, oldest first, at most `window` kept

  /// Appends a measured throughput sample and re-estimates.
  NetState observe(double throughput_mbps, double latency_ms, std::size_t window = kThroughputWindow) const;
};

// ---------------------------------------------------------------------------
// Quality-prediction network: 7 inputs -> 16 tanh -> 1 linear.

inline constexpr std::size_t kDeviceFeatures = 2;
inline constexpr std::size_t kPrefFeatures = 3;
inline constexpr std::size_t kNetFeatures = 2;
inline constexpr std::size_t kQualityInputs = kDeviceFeatures + kPrefFeatures + kNetFeatures;
inline constexpr std::size_t kQualityHidden = 16;

using QualityFeatures = std::array<double, kQualityInputs>;

struct QualitySample {
  QualityFeatures x{};
  double target_mbps = 0.0;
};

struct TrainParams {
  double learning_rate = 0.05;
  std::size_t epochs = 2000;
  std::uint64_t seed = 1;
};

class QualityNet {
 public:
  static constexpr std::size_t kParamCount = kQualityHidden * kQualityInputs + kQualityHidden + kQualityHidden + 1;

  /// Weights uniform in [-0.5, 0.5] from the seeded generator; identity input scaling.
  static QualityNet initialized(std::uint64_t seed);
  /// Zero weights with the given output bias.
  static QualityNet constant(double output_bias);

  /// Raw (unclamped) network output.
  double forward(const QualityFeatures& x) const noexcept;

  /// Mean squared error over the batch and its gradient w.r.t. parameters(),
  /// in the same flattened order.
  std::pair<double, std::vector<double>> loss_and_gradient(std::span<const QualitySample> batch) const;
  double loss(std::span<const QualitySample> batch) const;

  /// Flattened trainable parameters: W1 (row-major, hidden x input), b1, W2, b2.
  std::vector<double> parameters() const;
  QualityNet with_parameters(std::span<const double> params) const;

  /// Per-input standardisation applied before the first layer. Fitted from the
  /// training set; not trainable.
  const QualityFeatures& input_offset() const noexcept { return offset_; }
  const QualityFeatures& input_scale() const noexcept { return scale_; }
  QualityNet with_input_scaling(const QualityFeatures& offset, const QualityFeatures& scale) const;

  friend bool operator==(const QualityNet&, const QualityNet&) = default;

 private:
  QualityNet() = default;

  std::array<double, kQualityHidden * kQualityInputs> w1_{};
  std::array<double, kQualityHidden> b1_{};
  std::array<double, kQualityHidden> w2_{};
  double b2_ = 0.0;
  QualityFeatures offset_{};
  QualityFeatures scale_{1, 1, 1, 1, 1, 1, 1};
};

/// Full-batch gradient descent on MSE. Deterministic in (dataset order, params).
/// When loss_history is non-null it receives the loss before each epoch.
QualityNet train_quality_net(std::span<const QualitySample> dataset, const TrainParams& params,
                             std::vector<double>* loss_history = nullptr);

/// Forward pass clamped at 0. Throws InvalidInput on non-finite features.
double predict_quality(const QualityNet& net, std::span<const double> device_features,
                       std::span<const double> pref_features, std::span<const double> net_features);

/// Feature layout shared by training and inference:
/// device (max height / 1000, decode cap in Mbps / 10), preference
/// (quality_affinity, rebuffer_tolerance, data_sensitivity), network
/// (predicted throughput Mbps, latency in seconds).
std::array<double, kDeviceFeatures> device_features(const DeviceCapabilities& device);
std::array<double, kPrefFeatures> pref_features(const PreferenceVector& pref);
std::array<double, kNetFeatures> net_features(const NetState& net);
QualityFeatures quality_features(const DeviceCapabilities& device, const PreferenceVector& pref, const NetState& net);

/// Labelling policy for the network's training set: the sustainable bitrate
/// min(decode cap, throughput) shrunk by a preference-dependent safety margin.
double quality_teacher(const DeviceCapabilities& device, const PreferenceVector& pref, const NetState& net);

/// Seeded synthetic training set over device classes, preferences and network
/// states, labelled by quality_teacher.
std::vector<QualitySample> synth_quality_dataset(std::size_t n, std::uint64_t seed);

}  // namespace twinstream
