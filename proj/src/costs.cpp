#include "csrpe/costs.hpp"

namespace csrpe {

namespace {

struct Overlap {
  int both = 0;
  int either = 0;
  int truth = 0;
  int pred = 0;
};

Overlap overlap(const LabelVector& y, const LabelVector& yh, const char* what) {
  require_same_length(y.size(), yh.size(), what);
  Overlap o;
  for (Index k = 0; k < y.size(); ++k) {
    const bool a = y[k] != 0;
    const bool b = yh[k] != 0;
    o.both += a && b;
    o.either += a || b;
    o.truth += a;
    o.pred += b;
  }
  return o;
}

}  // namespace

double f1_score(const LabelVector& y, const LabelVector& yh) {
  const auto o = overlap(y, yh, "f1_score");
  if (o.truth + o.pred == 0) return 1.0;
  return 2.0 * o.both / static_cast<double>(o.truth + o.pred);
}

double accuracy_score(const LabelVector& y, const LabelVector& yh) {
  const auto o = overlap(y, yh, "accuracy_score");
  if (o.either == 0) return 1.0;
  return o.both / static_cast<double>(o.either);
}

double hamming_loss(const LabelVector& y, const LabelVector& yh) {
  require_same_length(y.size(), yh.size(), "hamming_loss");
  if (y.size() == 0) return 0.0;
  return static_cast<double>((y.array() != yh.array()).count()) / static_cast<double>(y.size());
}

double rank_loss(const LabelVector& y, const LabelVector& yh) {
  require_same_length(y.size(), yh.size(), "rank_loss");
  // On binary vectors every (relevant i, irrelevant j) pair contributes
  // 1 when yh = (0,1), 1/2 when yh ties, 0 otherwise.
  double loss = 0.0;
  for (Index i = 0; i < y.size(); ++i) {
    if (!y[i]) continue;
    for (Index j = 0; j < y.size(); ++j) {
      if (y[j]) continue;
      if (yh[i] < yh[j]) {
        loss += 1.0;
      } else if (yh[i] == yh[j]) {
        loss += 0.5;
      }
    }
  }
  return loss;
}

double zero_one_loss(const LabelVector& y, const LabelVector& yh) {
  require_same_length(y.size(), yh.size(), "zero_one_loss");
  return (y.array() == yh.array()).all() ? 0.0 : 1.0;
}

const std::vector<std::string>& criterion_names() {
  static const std::vector<std::string> names{"f1", "accuracy", "hamming", "rank", "zero_one"};
  return names;
}

CostFunction criterion(const std::string& name) {
  if (name == "f1") return {name, Direction::score, f1_score};
  if (name == "accuracy") return {name, Direction::score, accuracy_score};
  if (name == "hamming") return {name, Direction::loss, hamming_loss};
  if (name == "rank") return {name, Direction::loss, rank_loss};
  if (name == "zero_one") return {name, Direction::loss, zero_one_loss};
  throw Error("unknown criterion '" + name + "'");
}

CostFunction as_cost(const CostFunction& f) {
  if (f.direction == Direction::loss) return f;
  auto score = f.eval;
  return {f.name, Direction::loss,
          [score](const LabelVector& y, const LabelVector& yh) { return 1.0 - score(y, yh); }};
}

CostFunction cost_by_name(const std::string& name) { return as_cost(criterion(name)); }

}  // namespace csrpe
