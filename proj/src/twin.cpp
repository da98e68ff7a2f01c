#include "twinstream/twin.hpp"

#include <algorithm>
#include <cmath>

#include "twinstream/error.hpp"

namespace twinstream {

namespace {

double clamp_unit(double x) noexcept { return std::clamp(x, 0.0, 1.0); }

}  // namespace

std::array<double, PreferenceVector::kDim> PreferenceVector::to_array() const noexcept {
  return {quality_affinity, rebuffer_tolerance, data_sensitivity, switch_tolerance, startup_tolerance};
}

PreferenceVector PreferenceVector::from_array(const std::array<double, kDim>& a) noexcept {
  return {a[0], a[1], a[2], a[3], a[4]};
}

bool is_valid(const PreferenceVector& pref) noexcept {
  for (double c : pref.to_array())
    if (!(c >= 0.0 && c <= 1.0)) return false;
  return true;
}

PreferenceVector clamp01(const PreferenceVector& pref) noexcept {
  auto a = pref.to_array();
  for (double& c : a) c = clamp_unit(c);
  return PreferenceVector::from_array(a);
}

TwinProfile::TwinProfile(std::string user_id, PreferenceVector pref, double alpha, std::size_t history_capacity)
    : user_id_(std::move(user_id)), pref_(pref), alpha_(alpha), history_capacity_(history_capacity) {
  if (!is_valid(pref_)) fail(ErrorKind::InvalidInput, "twin '" + user_id_ + "': preference outside [0,1]");
  if (!(alpha_ > 0.0 && alpha_ <= 1.0)) fail(ErrorKind::InvalidInput, "twin '" + user_id_ + "': alpha must be in (0,1]");
  if (history_capacity_ == 0) fail(ErrorKind::InvalidInput, "twin '" + user_id_ + "': history capacity must be >= 1");
}

TwinProfile TwinProfile::with_pref(PreferenceVector pref) const {
  TwinProfile out = *this;
  if (!is_valid(pref)) fail(ErrorKind::InvalidInput, "twin '" + user_id_ + "': preference outside [0,1]");
  out.pref_ = pref;
  return out;
}

PreferenceVector ema_update(const PreferenceVector& old_pref, const PreferenceVector& observed, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail(ErrorKind::InvalidInput, "learning rate must be in [0,1]");
  const auto u_old = old_pref.to_array();
  const auto u_obs = observed.to_array();
  std::array<double, PreferenceVector::kDim> u_new{};
  for (std::size_t i = 0; i < u_new.size(); ++i) u_new[i] = clamp_unit(u_old[i] + alpha * (u_obs[i] - u_old[i]));
  return PreferenceVector::from_array(u_new);
}

TwinProfile update_profile(const TwinProfile& profile, const Observation& obs) {
  if (!is_valid(obs.u_obs)) fail(ErrorKind::InvalidInput, "observation preference outside [0,1]");
  TwinProfile out = profile;
  out.pref_ = ema_update(profile.pref_, obs.u_obs, profile.alpha_);
  out.history_.push_back(obs);
  while (out.history_.size() > out.history_capacity_) out.history_.pop_front();
  return out;
}

Observation derive_observation(const SessionMetrics& metrics, const BitrateLadder& ladder,
                               const ObservationMapping& mapping, std::string session_id) {
  // BitrateLadder cannot be empty by construction, so only the mapping needs checking.
  if (!(mapping.rebuffers_to_zero > 0.0 && mapping.switches_to_zero > 0.0 && mapping.startup_s_to_zero > 0.0))
    fail(ErrorKind::InvalidInput, "observation mapping constants must be positive");

  const double top_mbps = ladder.highest().bitrate_mbps();
  Observation obs;
  obs.u_obs.quality_affinity = clamp_unit(metrics.avg_quality_mbps / top_mbps);
  obs.u_obs.rebuffer_tolerance =
      std::max(0.0, 1.0 - static_cast<double>(metrics.rebuffer_count) / mapping.rebuffers_to_zero);
  obs.u_obs.data_sensitivity = clamp_unit(1.0 - metrics.avg_bandwidth_mbps / top_mbps);
  obs.u_obs.switch_tolerance =
      std::max(0.0, 1.0 - static_cast<double>(metrics.switch_count) / mapping.switches_to_zero);
  obs.u_obs.startup_tolerance = std::max(0.0, 1.0 - metrics.startup_delay_s / mapping.startup_s_to_zero);
  obs.watch_fraction = 1.0;
  obs.abandoned = false;
  obs.rebuffer_count = metrics.rebuffer_count;
  obs.session_id = std::move(session_id);
  return obs;
}

TwinProfile ingest_feedback(const TwinProfile& profile, int rating) {
  if (rating < 1 || rating > 5) fail(ErrorKind::InvalidInput, "rating must be in 1..5, got " + std::to_string(rating));
  const double satisfaction = static_cast<double>(rating - 1) / 4.0;

  Observation obs;
  obs.u_obs = profile.pref();
  obs.u_obs.quality_affinity = satisfaction;
  obs.u_obs.rebuffer_tolerance = satisfaction;
  obs.session_id = "feedback";
  return update_profile(profile, obs);
}

}  // namespace twinstream
