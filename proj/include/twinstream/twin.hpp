#pragma once

#include <array>
#include <cstddef>
#include <deque>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "twinstream/media.hpp"
#include "twinstream/metrics.hpp"

namespace twinstream {

/// The user digital twin's preference state. Every component lies in [0, 1]
/// and weights exactly one term of the quality-selection score.
struct PreferenceVector {
  static constexpr std::size_t kDim = 5;

  double quality_affinity = 0.5;
  double rebuffer_tolerance = 0.5;
  double data_sensitivity = 0.5;
  double switch_tolerance = 0.5;
  double startup_tolerance = 0.5;

  std::array<double, kDim> to_array() const noexcept;
  static PreferenceVector from_array(const std::array<double, kDim>& a) noexcept;

  friend bool operator==(const PreferenceVector&, const PreferenceVector&) = default;
};

bool is_valid(const PreferenceVector& pref) noexcept;
PreferenceVector clamp01(const PreferenceVector& pref) noexcept;

struct Observation {
  PreferenceVector u_obs;
  double watch_fraction = 1.0;
  bool abandoned = false;
  std::size_t rebuffer_count = 0;
  std::string session_id;

  friend bool operator==(const Observation&, const Observation&) = default;
};

inline constexpr double kDefaultLearningRate = 0.2;
inline constexpr std::size_t kDefaultHistoryCapacity = 64;

/// A user's twin. Immutable once built; updates return a new profile.
class TwinProfile {
 public:
  TwinProfile(std::string user_id, PreferenceVector pref, double alpha = kDefaultLearningRate,
              std::size_t history_capacity = kDefaultHistoryCapacity);

  const std::string& user_id() const noexcept { return user_id_; }
  const PreferenceVector& pref() const noexcept { return pref_; }
  double alpha() const noexcept { return alpha_; }
  std::size_t history_capacity() const noexcept { return history_capacity_; }
  const std::deque<Observation>& history() const noexcept { return history_; }

  TwinProfile with_pref(PreferenceVector pref) const;

  friend bool operator==(const TwinProfile&, const TwinProfile&) = default;

 private:
  friend TwinProfile update_profile(const TwinProfile&, const Observation&);

  std::string user_id_;
  PreferenceVector pref_;
  double alpha_;
  std::size_t history_capacity_;
  std::deque<Observation> history_;
};

/// Componentwise U_old + alpha * (U_obs - U_old), clamped to [0, 1].
/// alpha may be 0 here (identity); profiles themselves require alpha > 0.
PreferenceVector ema_update(const PreferenceVector& old_pref, const PreferenceVector& observed, double alpha);

/// Moves the twin toward obs.u_obs at the profile's learning rate and records
/// obs in the bounded history (oldest evicted first).
TwinProfile update_profile(const TwinProfile& profile, const Observation& obs);

/// Normalisers turning session outcomes into observed preferences.
struct ObservationMapping {
  double rebuffers_to_zero = 3.0;
  double switches_to_zero = 10.0;
  double startup_s_to_zero = 10.0;
};

Observation derive_observation(const SessionMetrics& metrics, const BitrateLadder& ladder,
                               const ObservationMapping& mapping = {}, std::string session_id = {});

/// Folds a 1..5 rating into quality_affinity and rebuffer_tolerance.
TwinProfile ingest_feedback(const TwinProfile& profile, int rating);

// ---------------------------------------------------------------------------
// Preference-pattern classifier (CART, Gini impurity).

enum class PreferenceClass { balanced = 0, data_saver = 1, quality_first = 2 };
inline constexpr std::size_t kPreferenceClassCount = 3;

std::string_view to_string(PreferenceClass label) noexcept;

using ClassCounts = std::array<std::size_t, kPreferenceClassCount>;

/// Gini impurity 1 - sum p_k^2 of a count vector (0 for an empty node).
double gini(const ClassCounts& counts) noexcept;

/// Argmax of counts; ties go to the lexicographically smallest label, which is
/// the lowest enumerator.
PreferenceClass majority(const ClassCounts& counts) noexcept;

struct TreeParams {
  std::size_t max_depth = 4;
  std::size_t min_leaf = 1;
};

class PreferenceTree {
 public:
  struct Node {
    bool is_leaf = true;
    std::size_t feature = 0;
    double threshold = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
    PreferenceClass label = PreferenceClass::balanced;
    ClassCounts counts{};
  };

  static PreferenceTree leaf(PreferenceClass label, ClassCounts counts = {});
  /// Split on feature <= threshold (left) vs > threshold (right).
  static PreferenceTree split(std::size_t feature, double threshold, PreferenceTree left, PreferenceTree right);

  PreferenceClass classify(std::span<const double> features) const;
  std::size_t depth() const noexcept;
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::span<const Node> nodes() const noexcept { return nodes_; }

 private:
  PreferenceTree() = default;

  std::size_t append(const PreferenceTree& subtree);

  std::vector<Node> nodes_;  // nodes_[0] is the root
};

/// Generic-feature training entry point; each row of `features` is one sample.
PreferenceTree train_tree(std::span<const std::vector<double>> features, std::span<const PreferenceClass> labels,
                          const TreeParams& params = {});

PreferenceTree train_preference_tree(std::span<const std::pair<PreferenceVector, PreferenceClass>> dataset,
                                     const TreeParams& params = {});

PreferenceClass classify_preference(const PreferenceTree& tree, const PreferenceVector& pref);

}  // namespace twinstream
