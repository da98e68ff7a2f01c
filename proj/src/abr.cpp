#include "twinstream/abr.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "twinstream/error.hpp"
#include "twinstream/transcode.hpp"

namespace twinstream {

namespace {

constexpr std::array<std::pair<ControllerKind, std::string_view>, 4> kControllerNames{{
    {ControllerKind::twin_driven, "twin_driven"},
    {ControllerKind::throughput_rule, "throughput_rule"},
    {ControllerKind::buffer_rule, "buffer_rule"},
    {ControllerKind::fixed_profile, "fixed_profile"},
}};

BitrateLadder device_ladder(const BitrateLadder& ladder, const DeviceCapabilities& device) {
  auto feasible = feasible_renditions(ladder.rungs(), device);
  if (feasible.empty()) fail(ErrorKind::NoFeasibleRendition, "no ladder rung is feasible for the device");
  return BitrateLadder(std::move(feasible));
}

void check_context(const DecisionContext& ctx) {
  if (!(ctx.segment_duration_s > 0.0)) fail(ErrorKind::InvalidInput, "segment duration must be positive");
  if (!(ctx.buffer_level_s >= 0.0)) fail(ErrorKind::InvalidInput, "buffer level must be nonnegative");
  if (!(ctx.net.predicted_throughput_mbps > 0.0)) fail(ErrorKind::InvalidInput, "predicted throughput must be positive");
  if (!(ctx.net.latency_ms >= 0.0)) fail(ErrorKind::InvalidInput, "latency must be nonnegative");
}

}  // namespace

std::string_view to_string(ControllerKind kind) noexcept {
  for (const auto& [k, name] : kControllerNames)
    if (k == kind) return name;
  return "?";
}

std::optional<ControllerKind> parse_controller(std::string_view name) noexcept {
  for (const auto& [k, n] : kControllerNames)
    if (n == name) return k;
  return std::nullopt;
}

ScoreWeights ScoreWeights::from_profile(const PreferenceVector& pref) noexcept {
  return {pref.quality_affinity, 2.0 * (1.0 - pref.rebuffer_tolerance), 0.5 * (1.0 - pref.switch_tolerance),
          pref.data_sensitivity, 0.5};
}

ScoreWeights ScoreWeights::scaled(double factor) const noexcept {
  return {quality * factor, rebuffer * factor, switching * factor, data * factor, target * factor};
}

double rendition_score(const BitrateLadder& ladder, std::size_t tier, const ScoreWeights& w,
                       const DecisionContext& ctx, double q_target_mbps) {
  const Rendition& r = ladder[tier];
  const double b_max = ladder.highest().bitrate_mbps();
  const double mbps = r.bitrate_mbps();

  const double utility = mbps / b_max;
  const double est_download_s =
      mbps * ctx.segment_duration_s / ctx.net.predicted_throughput_mbps + ctx.net.latency_ms / 1000.0;
  const double risk = std::max(0.0, est_download_s - ctx.buffer_level_s) / ctx.segment_duration_s;

  double switching = 0.0;
  if (ctx.previous_rendition && ladder.size() > 1) {
    if (const auto prev = ladder.tier_of(*ctx.previous_rendition)) {
      const double steps = std::abs(static_cast<double>(tier) - static_cast<double>(*prev));
      switching = steps / static_cast<double>(ladder.size() - 1);
    }
  }
  const double data = mbps / b_max;
  const double target_gap = std::abs(mbps - q_target_mbps) / b_max;

  return w.quality * utility - w.rebuffer * risk - w.switching * switching - w.data * data - w.target * target_gap;
}

Rendition select_quality_weighted(const BitrateLadder& ladder, const DeviceCapabilities& device,
                                  const ScoreWeights& weights, const DecisionContext& ctx, double q_target_mbps) {
  check_context(ctx);
  const BitrateLadder feasible = device_ladder(ladder, device);
  std::size_t best = 0;
  double best_score = rendition_score(feasible, 0, weights, ctx, q_target_mbps);
  for (std::size_t tier = 1; tier < feasible.size(); ++tier) {
    const double s = rendition_score(feasible, tier, weights, ctx, q_target_mbps);
    if (s > best_score) {  // ascending walk, so ties stay on the lower bitrate
      best = tier;
      best_score = s;
    }
  }
  return feasible[best];
}

Rendition select_quality(const BitrateLadder& ladder, const DeviceCapabilities& device, const TwinProfile& profile,
                         const DecisionContext& ctx, double q_target_mbps) {
  return select_quality_weighted(ladder, device, ScoreWeights::from_profile(profile.pref()), ctx, q_target_mbps);
}

Rendition select_baseline(ControllerKind kind, const BitrateLadder& ladder, const DeviceCapabilities& device,
                          const DecisionContext& ctx, const BaselineParams& params) {
  check_context(ctx);
  const BitrateLadder feasible = device_ladder(ladder, device);
  const std::size_t top = feasible.size() - 1;

  switch (kind) {
    case ControllerKind::throughput_rule: {
      const double cap_mbps = params.throughput_safety * ctx.net.predicted_throughput_mbps;
      std::size_t pick = 0;
      for (std::size_t t = 0; t <= top; ++t)
        if (feasible[t].bitrate_mbps() <= cap_mbps) pick = t;
      return feasible[pick];
    }
    case ControllerKind::buffer_rule: {
      if (!(ctx.max_buffer_s > 0.0)) fail(ErrorKind::InvalidInput, "max buffer must be positive");
      const double frac = ctx.buffer_level_s / ctx.max_buffer_s;
      if (frac < params.buffer_low_fraction) return feasible.lowest();
      if (frac > params.buffer_high_fraction) return feasible.highest();
      const double pos = (frac - params.buffer_low_fraction) /
                         (params.buffer_high_fraction - params.buffer_low_fraction) * static_cast<double>(top);
      return feasible[std::min(top, static_cast<std::size_t>(std::floor(pos)))];
    }
    case ControllerKind::fixed_profile: {
      std::size_t tier = 0;
      switch (device.device_class) {
        case DeviceClass::phone: tier = 0; break;
        case DeviceClass::tablet: tier = 1; break;
        case DeviceClass::desktop: tier = 2; break;
        case DeviceClass::tv: tier = top; break;
      }
      return feasible[std::min(tier, top)];
    }
    case ControllerKind::twin_driven:
      break;
  }
  fail(ErrorKind::InvalidInput, "select_baseline does not handle the twin_driven controller");
}

}  // namespace twinstream
