#pragma once

#include "csrpe/baselines.hpp"
#include "csrpe/data.hpp"
#include "csrpe/model.hpp"

#include <map>
#include <string>
#include <vector>

namespace csrpe {

enum class QueryStrategy { csrpe, random };

std::string to_string(QueryStrategy s);
QueryStrategy query_strategy_from_string(const std::string& s);

/// Pool-based simulation state. Instance indices refer to rows of the pool
/// dataset the state was built from.
struct ALState {
  Dataset labeled;
  std::vector<std::size_t> labeled_index;
  std::vector<std::pair<std::size_t, FeatureVector>> unlabeled;  // sorted by index
  std::map<std::size_t, LabelVector> hidden_labels;
  std::size_t t = 0;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
};

/// Seeded uniform draw of `init_labeled` pool rows into the labeled set. The
/// draw must contain at least two distinct label vectors.
ALState init_al_state(const Dataset& pool, std::size_t init_labeled, std::size_t budget,
                      std::uint64_t seed);

/// Moves `index` from the unlabeled pool to the labeled set using its hidden
/// label, and advances t.
void reveal(ALState& state, std::size_t index);

struct UncertaintyParts {
  double estimation = 0.0;  // distance from predicted code to its nearest relevant code
  double utility = 0.0;     // distance from predicted code to the code of f_t's prediction
  double total() const { return estimation + utility; }
};

UncertaintyParts csrpe_uncertainty_parts(const CsrpeModel& h, const BrModel& f_t,
                                         const FeatureVector& x);
double csrpe_uncertainty(const CsrpeModel& h, const BrModel& f_t, const FeatureVector& x);

/// csrpe: argmax uncertainty over the unlabeled pool, smallest index on ties.
/// random: uniform draw seeded by (state.seed, state.t).
std::size_t select_query(const ALState& state, QueryStrategy strategy, const CsrpeModel& h,
                         const BrModel& f_t, int threads = 1);

/// Model whose test-set criterion is recorded on the learning curve.
enum class CurveModel { aux, csrpe };

std::string to_string(CurveModel m);
CurveModel curve_model_from_string(const std::string& s);

struct ALConfig {
  std::size_t init_labeled = 20;
  std::size_t budget = 100;
  QueryStrategy strategy = QueryStrategy::csrpe;
  /// Criterion name; CSRPE is trained on its cost view and the curve reports
  /// the raw criterion averaged over the test set.
  std::string criterion = "f1";
  ModelConfig model = default_model();
  /// Learner for the auxiliary binary-relevance classifier f_t.
  LearnerConfig aux_learner = logistic_learner();
  std::size_t retrain_every = 1;
  /// Default: the auxiliary classifier f_t, the learner the queries serve.
  CurveModel evaluate = CurveModel::aux;
  std::uint64_t seed = 0;

  static ModelConfig default_model() {
    ModelConfig m;
    m.code_length = 300;
    m.learner.kind = LearnerKind::logistic;
    return m;
  }
  static LearnerConfig logistic_learner() {
    LearnerConfig l;
    l.kind = LearnerKind::logistic;
    return l;
  }
};

struct CurvePoint {
  std::size_t t = 0;
  long long queried = -1;  // pool index queried at step t; -1 for t = 0
  double value = 0.0;
};

/// Full simulation; returns budget + 1 points starting at t = 0.
std::vector<CurvePoint> run_al(const Dataset& pool, const Dataset& test, const ALConfig& config);

}  // namespace csrpe
