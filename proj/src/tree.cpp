#include "csrpe/learners.hpp"

#include "csrpe/data.hpp"
#include "csrpe/rng.hpp"

#include <algorithm>
#include <numeric>

namespace csrpe {

namespace {

/// Weighted Gini impurity scaled by node weight: W * (1 - p^2 - q^2).
inline double gini(double w, double pos) {
  return w > 0.0 ? 2.0 * pos * (w - pos) / w : 0.0;
}

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::Ref<const Eigen::MatrixXd>& X,
              const Eigen::Ref<const Eigen::VectorXd>& labels,
              const Eigen::Ref<const Eigen::VectorXd>& weights, const TreeParams& params,
              std::vector<int> active, double min_child, std::uint64_t seed)
      : X_(X), y_(labels), w_(weights), params_(params), min_child_(min_child), rng_(seed) {
    const auto d = static_cast<std::size_t>(X.cols());
    order_.assign(d, active);
    for (std::size_t f = 0; f < d; ++f) {
      const auto col = X_.col(static_cast<Index>(f));
      std::stable_sort(order_[f].begin(), order_[f].end(),
                       [&col](int a, int b) { return col[a] < col[b]; });
    }
    goes_left_.assign(static_cast<std::size_t>(X.rows()), 0);
    scratch_.resize(active.size());
    features_.resize(d);
    std::iota(features_.begin(), features_.end(), 0);
  }

  TreeModel build() {
    grow(0, order_.empty() ? 0 : order_[0].size(), 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
  };

  int grow(std::size_t begin, std::size_t end, int depth) {
    double W = 0.0;
    double P = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const int r = order_[0][i];
      W += w_[r];
      P += w_[r] * y_[r];
    }
    const int id = static_cast<int>(tree_.nodes.size());
    TreeNode node;
    node.score = W > 0.0 ? std::clamp(P / W, 0.0, 1.0) : 0.5;
    tree_.nodes.push_back(node);

    const double eps = 1e-12 * W;
    const bool pure = P <= eps || P >= W - eps;
    if (depth >= params_.max_depth || pure || end - begin < 2) return id;

    const Split split = best_split(begin, end, W, P, eps);
    if (split.feature < 0) return id;

    const auto col = X_.col(split.feature);
    std::size_t n_left = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const int r = order_[0][i];
      goes_left_[static_cast<std::size_t>(r)] = col[r] <= split.threshold;
      n_left += goes_left_[static_cast<std::size_t>(r)];
    }
    for (auto& ord : order_) stable_partition(ord, begin, end);

    tree_.nodes[static_cast<std::size_t>(id)].feature = split.feature;
    tree_.nodes[static_cast<std::size_t>(id)].threshold = split.threshold;
    const int left = grow(begin, begin + n_left, depth + 1);
    const int right = grow(begin + n_left, end, depth + 1);
    tree_.nodes[static_cast<std::size_t>(id)].left = left;
    tree_.nodes[static_cast<std::size_t>(id)].right = right;
    return id;
  }

  Split best_split(std::size_t begin, std::size_t end, double W, double P, double eps) {
    const double parent = gini(W, P);
    const double slack = 1e-12 * W;
    Split best;
    best.gain = eps;

    std::span<const int> candidates(features_);
    std::vector<int> chosen;
    if (params_.max_features > 0 && static_cast<std::size_t>(params_.max_features) < features_.size()) {
      chosen = features_;
      for (std::size_t i = 0; i < static_cast<std::size_t>(params_.max_features); ++i) {
        std::swap(chosen[i], chosen[i + rng_.below(chosen.size() - i)]);
      }
      chosen.resize(static_cast<std::size_t>(params_.max_features));
      std::sort(chosen.begin(), chosen.end());
      candidates = chosen;
    }

    for (int f : candidates) {
      const auto& ord = order_[static_cast<std::size_t>(f)];
      const auto col = X_.col(f);
      double wl = 0.0;
      double pl = 0.0;
      for (std::size_t i = begin; i + 1 < end; ++i) {
        const int r = ord[i];
        wl += w_[r];
        pl += w_[r] * y_[r];
        const double v = col[r];
        const double next = col[ord[i + 1]];
        if (!(next > v)) continue;
        const double wr = W - wl;
        if (wl + slack < min_child_ || wr + slack < min_child_) continue;
        const double gain = parent - gini(wl, pl) - gini(wr, P - pl);
        if (gain > best.gain + eps) {
          best.feature = f;
          best.gain = gain;
          double thr = v + (next - v) / 2.0;
          if (!(thr < next)) thr = v;
          best.threshold = thr;
        }
      }
    }
    return best;
  }

  void stable_partition(std::vector<int>& ord, std::size_t begin, std::size_t end) {
    std::size_t l = begin;
    std::size_t s = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const int r = ord[i];
      if (goes_left_[static_cast<std::size_t>(r)]) {
        ord[l++] = r;
      } else {
        scratch_[s++] = r;
      }
    }
    std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(s),
              ord.begin() + static_cast<std::ptrdiff_t>(l));
  }

  const Eigen::Ref<const Eigen::MatrixXd>& X_;
  const Eigen::Ref<const Eigen::VectorXd>& y_;
  const Eigen::Ref<const Eigen::VectorXd>& w_;
  TreeParams params_;
  double min_child_;
  Rng rng_;
  std::vector<std::vector<int>> order_;
  std::vector<char> goes_left_;
  std::vector<int> scratch_;
  std::vector<int> features_;
  TreeModel tree_;
};

}  // namespace

BinaryClassifier train_tree(const Eigen::Ref<const Eigen::MatrixXd>& X,
                            const Eigen::Ref<const Eigen::VectorXd>& labels,
                            const Eigen::Ref<const Eigen::VectorXd>& weights,
                            const TreeParams& params, std::uint64_t seed) {
  require_same_length(X.rows(), labels.size(), "train_tree labels");
  require_same_length(X.rows(), weights.size(), "train_tree weights");
  if (params.max_depth < 0) throw Error("tree depth must be nonnegative");
  if (params.min_leaf_weight < 0.0) throw Error("min_leaf_weight must be nonnegative");

  std::vector<int> active;
  double total = 0.0;
  double positive = 0.0;
  for (Index r = 0; r < X.rows(); ++r) {
    if (weights[r] < 0.0) throw Error("negative example weight");
    if (weights[r] > 0.0) {
      active.push_back(static_cast<int>(r));
      total += weights[r];
      positive += weights[r] * labels[r];
    }
  }
  if (active.empty()) throw UntrainableError("all example weights are zero");
  if (positive <= 0.0) return constant_classifier(0.0);
  if (positive >= total) return constant_classifier(1.0);

  const double min_child = params.min_leaf_weight * total / static_cast<double>(active.size());
  TreeBuilder builder(X, labels, weights, params, std::move(active), min_child, seed);
  return BinaryClassifier(builder.build());
}

BinaryClassifier train_tree(std::span<const WeightedExample> data, const TreeParams& params,
                            std::uint64_t seed) {
  if (data.empty()) throw UntrainableError("empty training set");
  const Index d = data.front().x.size();
  Eigen::MatrixXd X(static_cast<Index>(data.size()), d);
  Eigen::VectorXd y(static_cast<Index>(data.size()));
  Eigen::VectorXd w(static_cast<Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    require_same_length(data[i].x.size(), d, "train_tree features");
    X.row(static_cast<Index>(i)) = densify(data[i].x).transpose();
    y[static_cast<Index>(i)] = data[i].label ? 1.0 : 0.0;
    w[static_cast<Index>(i)] = data[i].weight;
  }
  return train_tree(X, y, w, params, seed);
}

}  // namespace csrpe
