#include <algorithm>
#include <numeric>
#include <optional>

#include "twinstream/error.hpp"
#include "twinstream/twin.hpp"

namespace twinstream {

std::string_view to_string(PreferenceClass label) noexcept {
  switch (label) {
    case PreferenceClass::balanced: return "balanced";
    case PreferenceClass::data_saver: return "data_saver";
    case PreferenceClass::quality_first: return "quality_first";
  }
  return "?";
}

double gini(const ClassCounts& counts) noexcept {
  const std::size_t n = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  if (n == 0) return 0.0;
  double sum_sq = 0.0;
  for (std::size_t c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(n);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

PreferenceClass majority(const ClassCounts& counts) noexcept {
  std::size_t best = 0;
  for (std::size_t k = 1; k < counts.size(); ++k)
    if (counts[k] > counts[best]) best = k;
  return static_cast<PreferenceClass>(best);
}

PreferenceTree PreferenceTree::leaf(PreferenceClass label, ClassCounts counts) {
  PreferenceTree t;
  Node n;
  n.is_leaf = true;
  n.label = label;
  n.counts = counts;
  t.nodes_.push_back(n);
  return t;
}

PreferenceTree PreferenceTree::split(std::size_t feature, double threshold, PreferenceTree left,
                                     PreferenceTree right) {
  PreferenceTree t;
  Node root;
  root.is_leaf = false;
  root.feature = feature;
  root.threshold = threshold;
  for (std::size_t k = 0; k < kPreferenceClassCount; ++k)
    root.counts[k] = left.nodes_[0].counts[k] + right.nodes_[0].counts[k];
  root.label = majority(root.counts);
  t.nodes_.push_back(root);
  const std::size_t l = t.append(left);
  const std::size_t r = t.append(right);
  t.nodes_[0].left = l;
  t.nodes_[0].right = r;
  return t;
}

std::size_t PreferenceTree::append(const PreferenceTree& subtree) {
  const std::size_t offset = nodes_.size();
  for (Node n : subtree.nodes_) {
    if (!n.is_leaf) {
      n.left += offset;
      n.right += offset;
    }
    nodes_.push_back(n);
  }
  return offset;
}

PreferenceClass PreferenceTree::classify(std::span<const double> features) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf) {
    const Node& n = nodes_[i];
    if (n.feature >= features.size()) fail(ErrorKind::InvalidInput, "feature vector too short for tree");
    i = features[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes_[i].label;
}

std::size_t PreferenceTree::depth() const noexcept {
  // Iterative walk; node indices always point forward so no cycle is possible.
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  std::size_t deepest = 0;
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!nodes_[i].is_leaf) {
      stack.emplace_back(nodes_[i].left, d + 1);
      stack.emplace_back(nodes_[i].right, d + 1);
    }
  }
  return deepest;
}

namespace {

__extension__ typedef unsigned __int128 u128;

// Weighted Gini of a split is 1 - (SL/nl + SR/nr) / n with SL, SR the sums of
// squared class counts. Minimising it means maximising SL/nl + SR/nr, held
// here as an exact fraction so equal splits compare equal.
struct SplitScore {
  u128 num = 0;
  u128 den = 1;

  bool better_than(const SplitScore& o) const noexcept { return num * o.den > o.num * den; }
};

SplitScore split_score(const ClassCounts& left, const ClassCounts& right) noexcept {
  u128 sl = 0, sr = 0, nl = 0, nr = 0;
  for (std::size_t k = 0; k < kPreferenceClassCount; ++k) {
    sl += u128{left[k]} * left[k];
    sr += u128{right[k]} * right[k];
    nl += left[k];
    nr += right[k];
  }
  return {sl * nr + sr * nl, nl * nr};
}

struct Candidate {
  std::size_t feature;
  double threshold;
  SplitScore score;
};

}  // namespace

class TreeBuilder {
 public:
  TreeBuilder(std::span<const std::vector<double>> x, std::span<const PreferenceClass> y, const TreeParams& p)
      : x_(x), y_(y), params_(p) {}

  PreferenceTree build(std::vector<std::size_t> idx, std::size_t depth) const {
    ClassCounts counts{};
    for (std::size_t i : idx) ++counts[static_cast<std::size_t>(y_[i])];
    const bool pure = std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) <= 1;
    if (pure || depth >= params_.max_depth) return PreferenceTree::leaf(majority(counts), counts);

    const auto best = best_split(idx, counts);
    if (!best) return PreferenceTree::leaf(majority(counts), counts);

    std::vector<std::size_t> left, right;
    for (std::size_t i : idx) (x_[i][best->feature] <= best->threshold ? left : right).push_back(i);
    return PreferenceTree::split(best->feature, best->threshold, build(std::move(left), depth + 1),
                                 build(std::move(right), depth + 1));
  }

 private:
  std::optional<Candidate> best_split(const std::vector<std::size_t>& idx, const ClassCounts& total) const {
    std::optional<Candidate> best;
    const std::size_t dims = x_[idx.front()].size();
    std::vector<std::size_t> order = idx;
    for (std::size_t f = 0; f < dims; ++f) {
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x_[a][f] < x_[b][f]; });
      ClassCounts left{};
      for (std::size_t j = 0; j + 1 < order.size(); ++j) {
        ++left[static_cast<std::size_t>(y_[order[j]])];
        const double lo = x_[order[j]][f];
        const double hi = x_[order[j + 1]][f];
        if (!(lo < hi)) continue;
        const std::size_t n_left = j + 1;
        const std::size_t n_right = order.size() - n_left;
        if (n_left < params_.min_leaf || n_right < params_.min_leaf) continue;

        ClassCounts right{};
        for (std::size_t k = 0; k < kPreferenceClassCount; ++k) right[k] = total[k] - left[k];
        const Candidate c{f, 0.5 * (lo + hi), split_score(left, right)};
        // Strict improvement only: earlier features and lower thresholds win ties.
        if (!best || c.score.better_than(best->score)) best = c;
      }
    }
    return best;
  }

  std::span<const std::vector<double>> x_;
  std::span<const PreferenceClass> y_;
  TreeParams params_;
};

PreferenceTree train_tree(std::span<const std::vector<double>> features, std::span<const PreferenceClass> labels,
                          const TreeParams& params) {
  if (features.empty()) fail(ErrorKind::InvalidInput, "cannot train a tree on an empty dataset");
  if (features.size() != labels.size()) fail(ErrorKind::InvalidInput, "feature and label counts differ");
  if (params.min_leaf == 0) fail(ErrorKind::InvalidInput, "min_leaf must be >= 1");
  const std::size_t dims = features.front().size();
  for (const auto& row : features)
    if (row.size() != dims) fail(ErrorKind::InvalidInput, "ragged feature matrix");
  for (PreferenceClass y : labels)
    if (static_cast<std::size_t>(y) >= kPreferenceClassCount) fail(ErrorKind::InvalidInput, "unknown class label");

  std::vector<std::size_t> idx(features.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return TreeBuilder(features, labels, params).build(std::move(idx), 0);
}

PreferenceTree train_preference_tree(std::span<const std::pair<PreferenceVector, PreferenceClass>> dataset,
                                     const TreeParams& params) {
  std::vector<std::vector<double>> x;
  std::vector<PreferenceClass> y;
  x.reserve(dataset.size());
  y.reserve(dataset.size());
  for (const auto& [pref, label] : dataset) {
    const auto a = pref.to_array();
    x.emplace_back(a.begin(), a.end());
    y.push_back(label);
  }
  return train_tree(x, y, params);
}

PreferenceClass classify_preference(const PreferenceTree& tree, const PreferenceVector& pref) {
  const auto a = pref.to_array();
  return tree.classify(a);
}

}  // namespace twinstream
