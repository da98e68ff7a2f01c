#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "twinstream/media.hpp"
#include "twinstream/prediction.hpp"
#include "twinstream/twin.hpp"

namespace twinstream {

enum class ControllerKind { twin_driven, throughput_rule, buffer_rule, fixed_profile };

std::string_view to_string(ControllerKind kind) noexcept;
std::optional<ControllerKind> parse_controller(std::string_view name) noexcept;

struct DecisionContext {
  double buffer_level_s = 0.0;
  std::optional<std::string> previous_rendition;
  NetState net;
  double segment_duration_s = 4.0;
  double max_buffer_s = 30.0;
};

/// Weights of the twin-driven score. from_profile() is the standard mapping.
struct ScoreWeights {
  double quality = 0.5;
  double rebuffer = 1.0;
  double switching = 0.25;
  double data = 0.5;
  double target = 0.5;

  static ScoreWeights from_profile(const PreferenceVector& pref) noexcept;
  ScoreWeights scaled(double factor) const noexcept;
};

/// score(r) = wq*u(r) - wrb*risk(r) - wsw*sw(r) - wd*d(r) - wt*|bitrate(r) - q_target|/bmax
/// for rung r of the device-feasible ladder.
double rendition_score(const BitrateLadder& ladder, std::size_t tier, const ScoreWeights& w,
                       const DecisionContext& ctx, double q_target_mbps);

/// Scored argmax over the device-feasible rungs; ties go to the lower bitrate.
Rendition select_quality(const BitrateLadder& ladder, const DeviceCapabilities& device, const TwinProfile& profile,
                         const DecisionContext& ctx, double q_target_mbps);

Rendition select_quality_weighted(const BitrateLadder& ladder, const DeviceCapabilities& device,
                                  const ScoreWeights& weights, const DecisionContext& ctx, double q_target_mbps);

struct BaselineParams {
  double throughput_safety = 0.9;
  double buffer_low_fraction = 0.25;
  double buffer_high_fraction = 0.75;
};

/// The traditional controllers: throughput_rule, buffer_rule and fixed_profile.
Rendition select_baseline(ControllerKind kind, const BitrateLadder& ladder, const DeviceCapabilities& device,
                          const DecisionContext& ctx, const BaselineParams& params = {});

}  // namespace twinstream
