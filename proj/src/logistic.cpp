#include "csrpe/learners.hpp"

#include "csrpe/data.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace csrpe {

namespace {

/// log(1 + exp(z)) without overflow.
inline double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Eigen::VectorXd margins(const Eigen::Ref<const Eigen::MatrixXd>& X,
                        const Eigen::Ref<const Eigen::VectorXd>& theta) {
  return (X * theta.tail(X.cols())).array() + theta[0];
}

}  // namespace

double logistic_objective(const Eigen::Ref<const Eigen::MatrixXd>& X,
                          const Eigen::Ref<const Eigen::VectorXd>& labels,
                          const Eigen::Ref<const Eigen::VectorXd>& weights, double l2,
                          const Eigen::Ref<const Eigen::VectorXd>& theta) {
  require_same_length(theta.size(), X.cols() + 1, "logistic parameters");
  const Eigen::VectorXd z = margins(X, theta);
  double loss = 0.0;
  for (Index i = 0; i < z.size(); ++i) {
    if (weights[i] > 0.0) loss += weights[i] * (softplus(z[i]) - labels[i] * z[i]);
  }
  return loss / weights.sum() + 0.5 * l2 * theta.tail(X.cols()).squaredNorm();
}

Eigen::VectorXd logistic_gradient(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                  const Eigen::Ref<const Eigen::VectorXd>& labels,
                                  const Eigen::Ref<const Eigen::VectorXd>& weights, double l2,
                                  const Eigen::Ref<const Eigen::VectorXd>& theta) {
  require_same_length(theta.size(), X.cols() + 1, "logistic parameters");
  const Eigen::VectorXd z = margins(X, theta);
  const double total = weights.sum();
  Eigen::VectorXd r(z.size());
  for (Index i = 0; i < z.size(); ++i) r[i] = weights[i] * (sigmoid(z[i]) - labels[i]) / total;

  Eigen::VectorXd g(theta.size());
  g[0] = r.sum();
  g.tail(X.cols()) = X.transpose() * r + l2 * theta.tail(X.cols());
  return g;
}

BinaryClassifier train_logistic(const Eigen::Ref<const Eigen::MatrixXd>& X_all,
                                const Eigen::Ref<const Eigen::VectorXd>& labels_all,
                                const Eigen::Ref<const Eigen::VectorXd>& weights_all,
                                const LogisticParams& params) {
  require_same_length(X_all.rows(), labels_all.size(), "train_logistic labels");
  require_same_length(X_all.rows(), weights_all.size(), "train_logistic weights");
  if (params.l2 < 0.0) throw Error("l2 must be nonnegative");

  std::vector<Index> active;
  double total = 0.0;
  double positive = 0.0;
  for (Index r = 0; r < X_all.rows(); ++r) {
    if (weights_all[r] < 0.0) throw Error("negative example weight");
    if (weights_all[r] > 0.0) {
      active.push_back(r);
      total += weights_all[r];
      positive += weights_all[r] * labels_all[r];
    }
  }
  if (active.empty()) throw UntrainableError("all example weights are zero");
  if (positive <= 0.0) return constant_classifier(0.0);
  if (positive >= total) return constant_classifier(1.0);

  const auto n = static_cast<Index>(active.size());
  const Index d = X_all.cols();
  Eigen::MatrixXd X(n, d);
  Eigen::VectorXd y(n);
  Eigen::VectorXd w(n);
  for (Index i = 0; i < n; ++i) {
    X.row(i) = X_all.row(active[static_cast<std::size_t>(i)]);
    y[i] = labels_all[active[static_cast<std::size_t>(i)]];
    w[i] = weights_all[active[static_cast<std::size_t>(i)]] / total;
  }

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
  double objective = logistic_objective(X, y, w, params.l2, theta);
  int iter = 0;
  for (; iter < params.max_iter; ++iter) {
    const Eigen::VectorXd grad = logistic_gradient(X, y, w, params.l2, theta);
    if (grad.lpNorm<Eigen::Infinity>() <= params.tol) break;

    const Eigen::VectorXd z = margins(X, theta);
    Eigen::VectorXd curvature(n);
    for (Index i = 0; i < n; ++i) {
      const double p = sigmoid(z[i]);
      curvature[i] = w[i] * p * (1.0 - p);
    }
    Eigen::MatrixXd H(d + 1, d + 1);
    H(0, 0) = curvature.sum();
    H.block(1, 0, d, 1) = X.transpose() * curvature;
    H.block(0, 1, 1, d) = H.block(1, 0, d, 1).transpose();
    H.block(1, 1, d, d) = X.transpose() * curvature.asDiagonal() * X;
    H.diagonal().tail(d).array() += params.l2;
    H.diagonal().array() += 1e-10;

    const Eigen::VectorXd step = H.ldlt().solve(-grad);
    const double slope = grad.dot(step);
    if (!(slope < 0.0)) break;

    // Armijo backtracking.
    double t = 1.0;
    bool accepted = false;
    for (int k = 0; k < 40; ++k) {
      const Eigen::VectorXd candidate = theta + t * step;
      const double value = logistic_objective(X, y, w, params.l2, candidate);
      if (value <= objective + 1e-4 * t * slope) {
        theta = candidate;
        objective = value;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }

  LogisticModel model;
  model.intercept = theta[0];
  model.coef = theta.tail(d);
  model.iterations = iter;
  return BinaryClassifier(std::move(model));
}

BinaryClassifier train_logistic(std::span<const WeightedExample> data,
                                const LogisticParams& params) {
  if (data.empty()) throw UntrainableError("empty training set");
  const Index d = data.front().x.size();
  Eigen::MatrixXd X(static_cast<Index>(data.size()), d);
  Eigen::VectorXd y(static_cast<Index>(data.size()));
  Eigen::VectorXd w(static_cast<Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    require_same_length(data[i].x.size(), d, "train_logistic features");
    X.row(static_cast<Index>(i)) = densify(data[i].x).transpose();
    y[static_cast<Index>(i)] = data[i].label ? 1.0 : 0.0;
    w[static_cast<Index>(i)] = data[i].weight;
  }
  return train_logistic(X, y, w, params);
}

}  // namespace csrpe
