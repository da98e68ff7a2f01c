#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace twinstream {

enum class Codec { h264, h265, vp9, av1 };
enum class DeviceClass { phone, tablet, desktop, tv };

std::string_view to_string(Codec codec) noexcept;
std::string_view to_string(DeviceClass device_class) noexcept;
std::optional<Codec> parse_codec(std::string_view name) noexcept;
std::optional<DeviceClass> parse_device_class(std::string_view name) noexcept;

/// One encoded variant of a title: the transcoding parameter tuple.
struct Rendition {
  std::string id;
  std::int64_t bitrate_kbps = 0;
  int width = 0;
  int height = 0;
  double framerate_fps = 30.0;
  Codec codec = Codec::h264;

  double bitrate_mbps() const noexcept { return static_cast<double>(bitrate_kbps) / 1000.0; }

  friend bool operator==(const Rendition&, const Rendition&) = default;
};

/// Throws InvalidInput when a rendition breaks its invariants.
void validate(const Rendition& rendition);

inline constexpr std::size_t kMaxLadderSize = 32;

/// Renditions offered to one session, strictly ascending by bitrate.
class BitrateLadder {
 public:
  /// Sorts by bitrate; rejects empty input, duplicate bitrates and more than
  /// kMaxLadderSize rungs.
  explicit BitrateLadder(std::vector<Rendition> renditions);

  std::span<const Rendition> rungs() const noexcept { return rungs_; }
  std::size_t size() const noexcept { return rungs_.size(); }
  const Rendition& operator[](std::size_t i) const { return rungs_[i]; }
  const Rendition& lowest() const noexcept { return rungs_.front(); }
  const Rendition& highest() const noexcept { return rungs_.back(); }

  /// Tier index of the rung with this id, if present.
  std::optional<std::size_t> tier_of(std::string_view id) const noexcept;

  friend bool operator==(const BitrateLadder&, const BitrateLadder&) = default;

 private:
  std::vector<Rendition> rungs_;
};

struct DeviceCapabilities {
  int max_width = 1920;
  int max_height = 1080;
  std::vector<Codec> supported_codecs{Codec::h264};
  std::int64_t max_decode_bitrate_kbps = 50'000;
  DeviceClass device_class = DeviceClass::desktop;

  bool supports(Codec codec) const noexcept;

  friend bool operator==(const DeviceCapabilities&, const DeviceCapabilities&) = default;
};

void validate(const DeviceCapabilities& device);

/// Capability table used for synthetic cohorts.
DeviceCapabilities default_device(DeviceClass device_class);

}  // namespace twinstream
