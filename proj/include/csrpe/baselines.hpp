#pragma once

#include "csrpe/code.hpp"
#include "csrpe/costs.hpp"
#include "csrpe/data.hpp"
#include "csrpe/learners.hpp"

#include <vector>

namespace csrpe {

/// Binary relevance: one independent classifier per label.
struct BrModel {
  std::vector<BinaryClassifier> per_label;
  Index num_features = 0;
};

BrModel train_br(const Dataset& train, const LearnerConfig& learner, std::uint64_t seed = 0,
                 int threads = 1);
LabelVector predict_br(const BrModel& m, const Eigen::Ref<const Eigen::VectorXd>& x);
LabelVector predict_br(const BrModel& m, const FeatureVector& x);

/// Classifier chain. chain[p] predicts label order[p] from x followed by the
/// labels order[0..p).
struct CcModel {
  std::vector<BinaryClassifier> chain;
  std::vector<Index> order;
  Index num_features = 0;
};

/// Empty `order` means the natural order 0..K-1.
CcModel train_cc(const Dataset& train, const LearnerConfig& learner, std::vector<Index> order = {},
                 std::uint64_t seed = 0);
LabelVector predict_cc(const CcModel& m, const FeatureVector& x);

/// Brute-force one-versus-one tally over every unordered pair of `relevant`.
/// Each bit votes for the side of its pair it predicts: label vectors closer
/// (under `cost`) to the predicted reference get a full vote, those on the
/// cost boundary half a vote, and a 0.5 bit splits its vote. Returns the vote
/// winner, lexicographically smallest on ties. `cb` must be the exhaustive
/// codebook of `relevant` (|relevant| <= 64).
LabelVector exhaustive_ovo_vote(const std::vector<LabelVector>& relevant, const CodeVector& b,
                                const Codebook& cb, const CostFunction& cost = criterion("zero_one"));

}  // namespace csrpe
