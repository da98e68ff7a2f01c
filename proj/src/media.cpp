#include "twinstream/media.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "twinstream/error.hpp"

namespace twinstream {

namespace {

constexpr std::array<std::pair<Codec, std::string_view>, 4> kCodecNames{{
    {Codec::h264, "h264"},
    {Codec::h265, "h265"},
    {Codec::vp9, "vp9"},
    {Codec::av1, "av1"},
}};

constexpr std::array<std::pair<DeviceClass, std::string_view>, 4> kDeviceNames{{
    {DeviceClass::phone, "phone"},
    {DeviceClass::tablet, "tablet"},
    {DeviceClass::desktop, "desktop"},
    {DeviceClass::tv, "tv"},
}};

}  // namespace

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::InsufficientData: return "insufficient data";
    case ErrorKind::NoFeasibleRendition: return "no feasible rendition";
    case ErrorKind::InfeasibleConstraints: return "infeasible constraints";
    case ErrorKind::Format: return "format error";
    case ErrorKind::Io: return "io error";
  }
  return "unknown";
}

std::string_view to_string(Codec codec) noexcept {
  for (const auto& [c, name] : kCodecNames)
    if (c == codec) return name;
  return "?";
}

std::string_view to_string(DeviceClass device_class) noexcept {
  for (const auto& [d, name] : kDeviceNames)
    if (d == device_class) return name;
  return "?";
}

std::optional<Codec> parse_codec(std::string_view name) noexcept {
  for (const auto& [c, n] : kCodecNames)
    if (n == name) return c;
  return std::nullopt;
}

std::optional<DeviceClass> parse_device_class(std::string_view name) noexcept {
  for (const auto& [d, n] : kDeviceNames)
    if (n == name) return d;
  return std::nullopt;
}

void validate(const Rendition& r) {
  if (r.bitrate_kbps <= 0) fail(ErrorKind::InvalidInput, "rendition '" + r.id + "': bitrate must be positive");
  if (r.width <= 0 || r.height <= 0)
    fail(ErrorKind::InvalidInput, "rendition '" + r.id + "': dimensions must be positive");
  if (!(r.framerate_fps > 0.0))
    fail(ErrorKind::InvalidInput, "rendition '" + r.id + "': framerate must be positive");
}

BitrateLadder::BitrateLadder(std::vector<Rendition> renditions) : rungs_(std::move(renditions)) {
  if (rungs_.empty()) fail(ErrorKind::InvalidInput, "bitrate ladder is empty");
  if (rungs_.size() > kMaxLadderSize) fail(ErrorKind::InvalidInput, "bitrate ladder exceeds maximum size");
  for (const auto& r : rungs_) validate(r);
  std::stable_sort(rungs_.begin(), rungs_.end(),
                   [](const Rendition& a, const Rendition& b) { return a.bitrate_kbps < b.bitrate_kbps; });
  for (std::size_t i = 1; i < rungs_.size(); ++i)
    if (rungs_[i].bitrate_kbps == rungs_[i - 1].bitrate_kbps)
      fail(ErrorKind::InvalidInput, "bitrate ladder has duplicate bitrate " + std::to_string(rungs_[i].bitrate_kbps));
}

std::optional<std::size_t> BitrateLadder::tier_of(std::string_view id) const noexcept {
  for (std::size_t i = 0; i < rungs_.size(); ++i)
    if (rungs_[i].id == id) return i;
  return std::nullopt;
}

bool DeviceCapabilities::supports(Codec codec) const noexcept {
  return std::find(supported_codecs.begin(), supported_codecs.end(), codec) != supported_codecs.end();
}

void validate(const DeviceCapabilities& d) {
  if (d.max_width <= 0 || d.max_height <= 0) fail(ErrorKind::InvalidInput, "device dimensions must be positive");
  if (d.supported_codecs.empty()) fail(ErrorKind::InvalidInput, "device supports no codecs");
  if (d.max_decode_bitrate_kbps <= 0) fail(ErrorKind::InvalidInput, "device decode cap must be positive");
}

DeviceCapabilities default_device(DeviceClass device_class) {
  const std::vector<Codec> all{Codec::h264, Codec::h265, Codec::vp9, Codec::av1};
  switch (device_class) {
    case DeviceClass::phone: return {1280, 720, {Codec::h264, Codec::h265}, 8'000, device_class};
    case DeviceClass::tablet: return {1920, 1080, {Codec::h264, Codec::h265, Codec::vp9}, 15'000, device_class};
    case DeviceClass::desktop: return {1920, 1080, all, 50'000, device_class};
    case DeviceClass::tv: return {3840, 2160, all, 100'000, device_class};
  }
  return {};
}

}  // namespace twinstream
