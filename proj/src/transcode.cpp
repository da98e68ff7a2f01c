#include "twinstream/transcode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <sstream>

#include "csv.hpp"
#include "twinstream/error.hpp"

namespace twinstream {

namespace {

std::vector<Rendition> sorted_by_bitrate(std::vector<Rendition> v) {
  std::stable_sort(v.begin(), v.end(),
                   [](const Rendition& a, const Rendition& b) { return a.bitrate_kbps < b.bitrate_kbps; });
  return v;
}

double top_mbps_of(std::span<const Rendition> v) {
  std::int64_t top = 0;
  for (const auto& r : v) top = std::max(top, r.bitrate_kbps);
  return static_cast<double>(top) / 1000.0;
}

// Candidate sets are kept as index lists into the ascending candidate array.
struct Selection {
  std::vector<std::size_t> members;  // ascending
  double utility = 0.0;
};

class LadderSearch {
 public:
  LadderSearch(std::vector<Rendition> candidates, const PreferenceVector& pref, const TranscodeConstraints& c)
      : cand_(std::move(candidates)), pref_(pref), c_(c), top_mbps_(top_mbps_of(cand_)) {
    for (const auto& r : cand_) utility_.push_back(rendition_utility(r, pref_, top_mbps_));
  }

  bool feasible(const std::vector<std::size_t>& members) const {
    if (members.empty() || members.size() > c_.max_ladder_size) return false;
    std::int64_t total = 0;
    bool has_floor = false;
    for (std::size_t k = 0; k < members.size(); ++k) {
      const auto& r = cand_[members[k]];
      total += r.bitrate_kbps;
      has_floor = has_floor || r.bitrate_kbps <= c_.floor_bitrate_kbps;
      if (k > 0 && cand_[members[k - 1]].bitrate_kbps == r.bitrate_kbps) return false;
    }
    return has_floor && total <= c_.total_bitrate_budget_kbps;
  }

  double utility(const std::vector<std::size_t>& members) const {
    double u = 0.0;
    for (std::size_t i : members) u += utility_[i];
    return u;
  }

  // Strictly higher utility wins; equal utility goes to the lexicographically
  // smaller bitrate sequence.
  bool better(const Selection& a, const Selection& b) const {
    if (a.utility != b.utility) return a.utility > b.utility;
    std::vector<std::int64_t> ka, kb;
    for (std::size_t i : a.members) ka.push_back(cand_[i].bitrate_kbps);
    for (std::size_t i : b.members) kb.push_back(cand_[i].bitrate_kbps);
    return ka < kb;
  }

  Selection exhaustive() const {
    std::optional<Selection> best;
    const std::size_t n = cand_.size();
    std::vector<std::size_t> members;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      members.clear();
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (1u << i)) members.push_back(i);
      if (!feasible(members)) continue;
      Selection s{members, utility(members)};
      if (!best || better(s, *best)) best = std::move(s);
    }
    if (!best) fail(ErrorKind::InfeasibleConstraints, "no ladder satisfies the budget and floor constraints");
    return *best;
  }

  Selection greedy() const {
    const std::size_t n = cand_.size();
    // Seed with the best floor-eligible rung.
    std::optional<std::size_t> seed;
    for (std::size_t i = 0; i < n; ++i) {
      if (cand_[i].bitrate_kbps > c_.floor_bitrate_kbps || cand_[i].bitrate_kbps > c_.total_bitrate_budget_kbps)
        continue;
      if (!seed || utility_[i] > utility_[*seed]) seed = i;
    }
    if (!seed) fail(ErrorKind::InfeasibleConstraints, "no floor rung fits the budget");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return utility_[a] / cand_[a].bitrate_mbps() > utility_[b] / cand_[b].bitrate_mbps();
    });

    std::vector<std::size_t> set{*seed};
    for (std::size_t i : order) {
      if (i == *seed || !(utility_[i] > 0.0)) continue;
      auto trial = with_member(set, i);
      if (feasible(trial)) set = std::move(trial);
    }

    // One pass of pairwise swaps, first improvement per slot.
    for (std::size_t slot = 0; slot < set.size(); ++slot) {
      const double current = utility(set);
      for (std::size_t o = 0; o < n; ++o) {
        if (std::find(set.begin(), set.end(), o) != set.end()) continue;
        auto trial = set;
        trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(slot));
        trial = with_member(trial, o);
        if (feasible(trial) && utility(trial) > current) {
          set = std::move(trial);
          break;
        }
      }
    }
    return {set, utility(set)};
  }

  BitrateLadder to_ladder(const Selection& s) const {
    std::vector<Rendition> rungs;
    for (std::size_t i : s.members) rungs.push_back(cand_[i]);
    return BitrateLadder(std::move(rungs));
  }

  std::size_t size() const noexcept { return cand_.size(); }

 private:
  static std::vector<std::size_t> with_member(std::vector<std::size_t> set, std::size_t i) {
    set.insert(std::upper_bound(set.begin(), set.end(), i), i);
    return set;
  }

  std::vector<Rendition> cand_;
  PreferenceVector pref_;
  TranscodeConstraints c_;
  double top_mbps_;
  std::vector<double> utility_;
};

}  // namespace

void validate(const TranscodeConstraints& c) {
  if (c.total_bitrate_budget_kbps <= 0) fail(ErrorKind::InvalidInput, "bitrate budget must be positive");
  if (c.max_ladder_size < 1) fail(ErrorKind::InvalidInput, "max ladder size must be >= 1");
  if (c.max_ladder_size > kMaxLadderSize) fail(ErrorKind::InvalidInput, "max ladder size exceeds the ladder limit");
  if (c.floor_bitrate_kbps <= 0 || c.floor_bitrate_kbps > c.total_bitrate_budget_kbps)
    fail(ErrorKind::InvalidInput, "floor bitrate must be in (0, budget]");
}

std::vector<Rendition> feasible_renditions(std::span<const Rendition> catalog, const DeviceCapabilities& device) {
  std::vector<Rendition> out;
  for (const auto& r : catalog) {
    if (device.supports(r.codec) && r.width <= device.max_width && r.height <= device.max_height &&
        r.bitrate_kbps <= device.max_decode_bitrate_kbps)
      out.push_back(r);
  }
  return out;
}

double rendition_utility(const Rendition& r, const PreferenceVector& pref, double top_mbps) noexcept {
  const double mbps = r.bitrate_mbps();
  return pref.quality_affinity * std::log1p(mbps) - pref.data_sensitivity * mbps / top_mbps;
}

double ladder_utility(std::span<const Rendition> ladder, const PreferenceVector& pref, double top_mbps) noexcept {
  const auto sorted = sorted_by_bitrate({ladder.begin(), ladder.end()});
  double u = 0.0;
  for (const auto& r : sorted) u += rendition_utility(r, pref, top_mbps);
  return u;
}

BitrateLadder optimize_ladder(std::span<const Rendition> catalog, const TwinProfile& profile,
                              const TranscodeConstraints& constraints, const DeviceCapabilities& device) {
  validate(constraints);
  auto feasible = feasible_renditions(catalog, device);
  if (feasible.empty()) fail(ErrorKind::NoFeasibleRendition, "no catalog rendition is feasible for the device");
  for (const auto& r : feasible) validate(r);
  if (std::none_of(feasible.begin(), feasible.end(),
                   [&](const Rendition& r) { return r.bitrate_kbps <= constraints.floor_bitrate_kbps; }))
    fail(ErrorKind::InfeasibleConstraints, "no feasible rendition at or below the floor bitrate");

  const LadderSearch search(sorted_by_bitrate(std::move(feasible)), profile.pref(), constraints);
  const Selection best = search.size() <= kExhaustiveLadderLimit ? search.exhaustive() : search.greedy();
  return search.to_ladder(best);
}

Rendition transcode_params_for_segment(const TwinProfile& /*profile*/, const DeviceCapabilities& device,
                                       const NetState& net, std::span<const Rendition> ladder, double safety) {
  if (ladder.empty()) fail(ErrorKind::InvalidInput, "ladder is empty");
  const double cap_kbps =
      std::min(static_cast<double>(device.max_decode_bitrate_kbps), safety * net.predicted_throughput_mbps * 1000.0);
  const Rendition* best = nullptr;
  const Rendition* lowest = &ladder.front();
  for (const auto& r : ladder) {
    if (r.bitrate_kbps < lowest->bitrate_kbps) lowest = &r;
    if (static_cast<double>(r.bitrate_kbps) <= cap_kbps && (!best || r.bitrate_kbps > best->bitrate_kbps)) best = &r;
  }
  return best ? *best : *lowest;
}

BitrateLadder baseline_ladder(std::span<const Rendition> catalog, const DeviceCapabilities& device,
                              std::size_t max_size) {
  if (max_size == 0) fail(ErrorKind::InvalidInput, "max ladder size must be >= 1");
  auto feasible = sorted_by_bitrate(feasible_renditions(catalog, device));
  if (feasible.empty()) fail(ErrorKind::NoFeasibleRendition, "no catalog rendition is feasible for the device");
  feasible.erase(std::unique(feasible.begin(), feasible.end(),
                             [](const Rendition& a, const Rendition& b) { return a.bitrate_kbps == b.bitrate_kbps; }),
                 feasible.end());
  const std::size_t n = feasible.size();
  if (n <= max_size) return BitrateLadder(std::move(feasible));
  if (max_size == 1) return BitrateLadder({feasible.front()});

  std::vector<Rendition> picked;
  for (std::size_t k = 0; k < max_size; ++k) {
    // Integer rounding of k * (n-1) / (m-1); strictly increasing since n > m.
    const std::size_t idx = (2 * k * (n - 1) + (max_size - 1)) / (2 * (max_size - 1));
    picked.push_back(feasible[idx]);
  }
  return BitrateLadder(std::move(picked));
}

std::vector<Rendition> parse_catalog(std::string_view text, const std::string& source) {
  const auto rows = csv::parse(text, "id,bitrate_kbps,width,height,framerate_fps,codec", source);
  std::vector<Rendition> out;
  for (const auto& row : rows) {
    csv::expect_fields(source, row, 6);
    Rendition r;
    r.id = std::string(row.fields[0]);
    if (r.id.empty()) csv::row_error(source, row, "empty rendition id");
    r.bitrate_kbps = csv::to_int(source, row, 1);
    r.width = static_cast<int>(csv::to_int(source, row, 2));
    r.height = static_cast<int>(csv::to_int(source, row, 3));
    r.framerate_fps = csv::to_double(source, row, 4);
    const auto codec = parse_codec(row.fields[5]);
    if (!codec) csv::row_error(source, row, "unknown codec '" + std::string(row.fields[5]) + "'");
    r.codec = *codec;
    try {
      validate(r);
    } catch (const Error& e) {
      csv::row_error(source, row, e.what());
    }
    out.push_back(std::move(r));
  }
  if (out.empty()) fail(ErrorKind::Format, source + ": catalog has no renditions");
  return out;
}

std::vector<Rendition> load_catalog(const std::filesystem::path& path) {
  return parse_catalog(csv::read_file(path), path.string());
}

std::string format_catalog(std::span<const Rendition> catalog) {
  std::ostringstream out;
  out << "id,bitrate_kbps,width,height,framerate_fps,codec\n";
  for (const auto& r : catalog) {
    char fps[32];
    std::snprintf(fps, sizeof fps, "%g", r.framerate_fps);
    out << r.id << ',' << r.bitrate_kbps << ',' << r.width << ',' << r.height << ',' << fps << ','
        << to_string(r.codec) << '\n';
  }
  return out.str();
}

std::vector<Rendition> default_catalog() {
  return {
      {"r235", 235, 320, 180, 30, Codec::h264},      {"r375", 375, 384, 216, 30, Codec::h264},
      {"r560", 560, 512, 288, 30, Codec::h264},      {"r750", 750, 640, 360, 30, Codec::h264},
      {"r1050", 1050, 768, 432, 30, Codec::h264},    {"r1750", 1750, 960, 540, 30, Codec::h264},
      {"r2350", 2350, 1280, 720, 30, Codec::h264},   {"r3000", 3000, 1280, 720, 60, Codec::h264},
      {"r4300", 4300, 1920, 1080, 30, Codec::h264},  {"r5800", 5800, 1920, 1080, 60, Codec::h264},
      {"r8000", 8000, 2560, 1440, 60, Codec::vp9},   {"r16000", 16000, 3840, 2160, 60, Codec::av1},
  };
}

}  // namespace twinstream
