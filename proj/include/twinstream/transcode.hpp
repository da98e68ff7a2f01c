#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "twinstream/media.hpp"
#include "twinstream/prediction.hpp"
#include "twinstream/twin.hpp"

namespace twinstream {

struct TranscodeConstraints {
  std::int64_t total_bitrate_budget_kbps = 20'000;
  std::size_t max_ladder_size = 6;
  // Every ladder must carry at least one rung at or below this bitrate.
  std::int64_t floor_bitrate_kbps = 800;
};

void validate(const TranscodeConstraints& c);

/// Catalog entries the device can decode and display, in catalog order.
std::vector<Rendition> feasible_renditions(std::span<const Rendition> catalog, const DeviceCapabilities& device);

/// Per-rung utility under the twin's preferences:
/// quality_affinity * ln(1 + mbps) - data_sensitivity * mbps / top_mbps.
double rendition_utility(const Rendition& r, const PreferenceVector& pref, double top_mbps) noexcept;

/// Candidate count up to which optimize_ladder enumerates every subset.
inline constexpr std::size_t kExhaustiveLadderLimit = 12;

/// Budget-constrained, utility-maximising ladder built from the feasible part
/// of the catalog. Exact for small candidate sets, greedy plus one swap pass
/// otherwise.
BitrateLadder optimize_ladder(std::span<const Rendition> catalog, const TwinProfile& profile,
                              const TranscodeConstraints& constraints, const DeviceCapabilities& device);

/// Sum of rendition_utility over a ladder, accumulated in ascending bitrate
/// order, using the feasible catalog's top bitrate as normaliser.
double ladder_utility(std::span<const Rendition> ladder, const PreferenceVector& pref, double top_mbps) noexcept;

/// Highest rung not above min(decode cap, safety * predicted throughput);
/// the lowest rung when nothing qualifies.
Rendition transcode_params_for_segment(const TwinProfile& profile, const DeviceCapabilities& device,
                                       const NetState& net, std::span<const Rendition> ladder,
                                       double safety = 0.9);

/// The ladder served to non-twin controllers: the feasible catalog, thinned to
/// at most max_size rungs spread evenly over the bitrate order (always keeping
/// the lowest and highest).
BitrateLadder baseline_ladder(std::span<const Rendition> catalog, const DeviceCapabilities& device,
                              std::size_t max_size);

/// Catalog CSV: header `id,bitrate_kbps,width,height,framerate_fps,codec`.
std::vector<Rendition> load_catalog(const std::filesystem::path& path);
std::vector<Rendition> parse_catalog(std::string_view text, const std::string& source = "<catalog>");
std::string format_catalog(std::span<const Rendition> catalog);

/// Twelve-rung h264/h265/av1 catalog from 235 kbps to 16 Mbps.
std::vector<Rendition> default_catalog();

}  // namespace twinstream
