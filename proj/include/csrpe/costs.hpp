#pragma once

#include "csrpe/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace csrpe {

/// F1 = 2|y & yh| / (|y| + |yh|); both empty counts as a perfect 1.
double f1_score(const LabelVector& y, const LabelVector& yh);
/// Accuracy = |y & yh| / |y | yh|; empty union counts as 1.
double accuracy_score(const LabelVector& y, const LabelVector& yh);
double hamming_loss(const LabelVector& y, const LabelVector& yh);
/// Unnormalised pairwise rank loss: every pair with y[i] > y[j] costs 1 if
/// yh ranks it backwards and 1/2 if yh ties it.
double rank_loss(const LabelVector& y, const LabelVector& yh);
double zero_one_loss(const LabelVector& y, const LabelVector& yh);

enum class Direction { loss, score };

/// A named evaluation criterion C(y, yh). `eval(truth, prediction)`.
struct CostFunction {
  std::string name;
  Direction direction = Direction::loss;
  std::function<double(const LabelVector&, const LabelVector&)> eval;

  double operator()(const LabelVector& y, const LabelVector& yh) const { return eval(y, yh); }
  bool higher_is_better() const { return direction == Direction::score; }
};

/// Registered criterion names: f1, accuracy, hamming, rank, zero_one.
const std::vector<std::string>& criterion_names();

/// The raw criterion (scores stay scores). Throws Error on unknown names.
CostFunction criterion(const std::string& name);

/// Loss view of a criterion: scores become 1 - score, losses pass through.
CostFunction as_cost(const CostFunction& f);

/// Shorthand for as_cost(criterion(name)).
CostFunction cost_by_name(const std::string& name);

}  // namespace csrpe
