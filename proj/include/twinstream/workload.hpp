#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "twinstream/media.hpp"
#include "twinstream/simnet.hpp"
#include "twinstream/twin.hpp"

namespace twinstream {

/// Four-state Markov bandwidth model.
struct TraceSpec {
  std::array<double, 4> state_mean_mbps{1.0, 3.0, 6.0, 10.0};  // poor, fair, good, excellent
  double dwell_mean_s = 10.0;
  double jitter = 0.2;  // multiplicative, uniform in [1 - jitter, 1 + jitter]
  double min_mbps = 0.3;
  double max_mbps = 15.0;
  double latency_min_ms = 20.0;
  double latency_max_ms = 80.0;
  double duration_s = 1200.0;
  // A fresh jitter draw is taken at least this often within a dwell.
  double sample_period_s = 1.0;
};

void validate(const TraceSpec& spec);

/// Probability of each device class, indexed by DeviceClass.
using DeviceMix = std::array<double, 4>;
inline constexpr DeviceMix kDefaultDeviceMix{0.4, 0.2, 0.2, 0.2};

struct CohortSpec {
  std::size_t n_users = 0;
  std::uint64_t seed = 1;
  DeviceMix device_mix = kDefaultDeviceMix;
  TraceSpec trace;
  double alpha = kDefaultLearningRate;
  std::size_t history_capacity = kDefaultHistoryCapacity;
};

void validate(const CohortSpec& spec);

/// Deterministic in (spec, seed). Times and bandwidths are rounded to 1e-6 so
/// that format_trace/parse_trace round-trips exactly.
NetworkTrace gen_trace(const TraceSpec& spec, std::uint64_t seed);

/// User i depends only on (spec.seed, i), never on n_users.
std::vector<CohortMember> gen_cohort(const CohortSpec& spec);
CohortMember gen_member(const CohortSpec& spec, std::size_t index);

std::string user_id_for(std::size_t index);

/// Trace CSV: header `t_start_s,bandwidth_mbps,latency_ms`, values with six decimals.
NetworkTrace load_trace(const std::filesystem::path& path);
NetworkTrace parse_trace(std::string_view text, const std::string& source = "<trace>");
std::string format_trace(const NetworkTrace& trace);
void write_trace(const NetworkTrace& trace, const std::filesystem::path& path);

/// Cohort CSV: `user_id,device_class,alpha,quality_affinity,rebuffer_tolerance,
/// data_sensitivity,switch_tolerance,startup_tolerance`. Devices get the
/// default capabilities for their class.
struct CohortRow {
  TwinProfile profile;
  DeviceCapabilities device;
};
std::vector<CohortRow> parse_cohort(std::string_view text, const std::string& source = "<cohort>",
                                    std::size_t history_capacity = kDefaultHistoryCapacity);
std::vector<CohortRow> load_cohort(const std::filesystem::path& path,
                                   std::size_t history_capacity = kDefaultHistoryCapacity);
std::string format_cohort(std::span<const CohortMember> cohort);

}  // namespace twinstream
