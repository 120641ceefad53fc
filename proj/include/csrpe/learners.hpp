#pragma once

#include "csrpe/types.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace csrpe {

/// One row of a weighted binary training set. Weight 0 rows are ignored.
struct WeightedExample {
  FeatureVector x;
  int label = 0;
  double weight = 1.0;
};

enum class LearnerKind { tree, logistic };

std::string to_string(LearnerKind kind);
LearnerKind learner_kind_from_string(const std::string& s);

struct TreeParams {
  int max_depth = 10;
  /// Minimum child weight, in units of the mean example weight of the
  /// training set, so rescaling all weights does not change the tree.
  double min_leaf_weight = 1.0;
  /// Features examined per node; 0 means all of them.
  int max_features = 0;
};

struct LogisticParams {
  /// Coefficient of (l2/2)|w|^2 added to the weight-normalised log loss.
  double l2 = 1e-2;
  double tol = 1e-6;
  int max_iter = 100;
};

struct LearnerConfig {
  LearnerKind kind = LearnerKind::tree;
  TreeParams tree;
  LogisticParams logistic;
};

/// Thrown when no example carries positive weight.
class UntrainableError : public Error {
 public:
  using Error::Error;
};

struct ConstantModel {
  double score = 0.5;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double score = 0.0;  // weighted positive fraction
};

struct TreeModel {
  std::vector<TreeNode> nodes;  // preorder, root at 0
};

struct LogisticModel {
  double intercept = 0.0;
  Eigen::VectorXd coef;
  int iterations = 0;
};

/// A trained binary scorer. score() lies in [0,1]; the hard label is
/// [score >= 0.5].
class BinaryClassifier {
 public:
  using Model = std::variant<ConstantModel, TreeModel, LogisticModel>;

  BinaryClassifier() = default;
  explicit BinaryClassifier(Model model) : model_(std::move(model)) {}

  double score(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  int hard(const Eigen::Ref<const Eigen::VectorXd>& x) const { return score(x) >= 0.5 ? 1 : 0; }

  bool is_constant() const { return std::holds_alternative<ConstantModel>(model_); }
  const Model& model() const { return model_; }
  std::string kind_name() const;

  void write(std::ostream& out) const;
  static BinaryClassifier read(std::istream& in);

  friend bool operator==(const BinaryClassifier& a, const BinaryClassifier& b);

 private:
  Model model_ = ConstantModel{};
};

BinaryClassifier constant_classifier(double score);

/// Weighted CART on Gini impurity. Rows of X are examples. Single-class data
/// yields a constant classifier. Split ties go to the lower feature index,
/// then the lower threshold.
BinaryClassifier train_tree(const Eigen::Ref<const Eigen::MatrixXd>& X,
                            const Eigen::Ref<const Eigen::VectorXd>& labels,
                            const Eigen::Ref<const Eigen::VectorXd>& weights,
                            const TreeParams& params, std::uint64_t seed);
BinaryClassifier train_tree(std::span<const WeightedExample> data, const TreeParams& params,
                            std::uint64_t seed);

/// Newton's method with backtracking on the weighted logistic objective.
/// Zero-initialised, intercept unpenalised. Single-class data yields a
/// constant classifier.
BinaryClassifier train_logistic(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                const Eigen::Ref<const Eigen::VectorXd>& labels,
                                const Eigen::Ref<const Eigen::VectorXd>& weights,
                                const LogisticParams& params);
BinaryClassifier train_logistic(std::span<const WeightedExample> data,
                                const LogisticParams& params);

/// Objective and gradient of the logistic fit at theta = (intercept, coef).
/// The loss term is normalised by the total weight.
double logistic_objective(const Eigen::Ref<const Eigen::MatrixXd>& X,
                          const Eigen::Ref<const Eigen::VectorXd>& labels,
                          const Eigen::Ref<const Eigen::VectorXd>& weights, double l2,
                          const Eigen::Ref<const Eigen::VectorXd>& theta);
Eigen::VectorXd logistic_gradient(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                  const Eigen::Ref<const Eigen::VectorXd>& labels,
                                  const Eigen::Ref<const Eigen::VectorXd>& weights, double l2,
                                  const Eigen::Ref<const Eigen::VectorXd>& theta);

/// Dispatches on config.kind.
BinaryClassifier train_binary(const Eigen::Ref<const Eigen::MatrixXd>& X,
                              const Eigen::Ref<const Eigen::VectorXd>& labels,
                              const Eigen::Ref<const Eigen::VectorXd>& weights,
                              const LearnerConfig& config, std::uint64_t seed);

}  // namespace csrpe
