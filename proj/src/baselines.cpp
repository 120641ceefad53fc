#include "csrpe/baselines.hpp"

#include "csrpe/parallel.hpp"
#include "csrpe/rng.hpp"

#include <algorithm>
#include <set>

namespace csrpe {

BrModel train_br(const Dataset& train, const LearnerConfig& learner, std::uint64_t seed,
                 int threads) {
  if (train.empty()) throw Error("cannot train on an empty dataset");
  train.validate();
  const Eigen::MatrixXd X = dense_features(train);
  const auto N = static_cast<Index>(train.size());
  const Eigen::VectorXd w = Eigen::VectorXd::Ones(N);

  BrModel m;
  m.num_features = train.num_features;
  m.per_label.resize(static_cast<std::size_t>(train.num_labels));
  parallel_for(m.per_label.size(), threads, [&](std::size_t k) {
    Eigen::VectorXd y(N);
    for (Index n = 0; n < N; ++n) y[n] = train.instances[static_cast<std::size_t>(n)].y[static_cast<Index>(k)];
    m.per_label[k] = train_binary(X, y, w, learner, mix_seed(seed, k + 1));
  });
  return m;
}

LabelVector predict_br(const BrModel& m, const Eigen::Ref<const Eigen::VectorXd>& x) {
  require_same_length(x.size(), m.num_features, "predict_br features");
  LabelVector y(static_cast<Index>(m.per_label.size()));
  for (std::size_t k = 0; k < m.per_label.size(); ++k) {
    y[static_cast<Index>(k)] = static_cast<std::uint8_t>(m.per_label[k].hard(x));
  }
  return y;
}

LabelVector predict_br(const BrModel& m, const FeatureVector& x) {
  require_same_length(x.size(), m.num_features, "predict_br features");
  return predict_br(m, densify(x));
}

CcModel train_cc(const Dataset& train, const LearnerConfig& learner, std::vector<Index> order,
                 std::uint64_t seed) {
  if (train.empty()) throw Error("cannot train on an empty dataset");
  train.validate();
  const Index K = train.num_labels;
  const Index d = train.num_features;
  if (order.empty()) {
    order.resize(static_cast<std::size_t>(K));
    for (Index k = 0; k < K; ++k) order[static_cast<std::size_t>(k)] = k;
  }
  {
    auto sorted = order;
    std::sort(sorted.begin(), sorted.end());
    bool ok = sorted.size() == static_cast<std::size_t>(K);
    for (std::size_t p = 0; ok && p < sorted.size(); ++p) ok = sorted[p] == static_cast<Index>(p);
    if (!ok) throw Error("classifier chain order is not a permutation of 0..K-1");
  }

  const auto N = static_cast<Index>(train.size());
  Eigen::MatrixXd Z(N, d + K);
  Z.leftCols(d) = dense_features(train);
  for (Index n = 0; n < N; ++n) {
    const auto& y = train.instances[static_cast<std::size_t>(n)].y;
    for (Index p = 0; p < K; ++p) Z(n, d + p) = y[order[static_cast<std::size_t>(p)]];
  }
  const Eigen::VectorXd w = Eigen::VectorXd::Ones(N);

  CcModel m;
  m.order = order;
  m.num_features = d;
  m.chain.reserve(static_cast<std::size_t>(K));
  for (Index p = 0; p < K; ++p) {
    const Eigen::VectorXd target = Z.col(d + p);
    m.chain.push_back(train_binary(Z.leftCols(d + p), target, w, learner,
                                   mix_seed(seed, static_cast<std::uint64_t>(p) + 1)));
  }
  return m;
}

LabelVector predict_cc(const CcModel& m, const FeatureVector& x) {
  require_same_length(x.size(), m.num_features, "predict_cc features");
  const auto K = static_cast<Index>(m.chain.size());
  const Index d = m.num_features;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(d + K);
  z.head(d) = densify(x);
  LabelVector y = LabelVector::Zero(K);
  for (Index p = 0; p < K; ++p) {
    const int bit = m.chain[static_cast<std::size_t>(p)].hard(z.head(d + p));
    z[d + p] = bit;
    y[m.order[static_cast<std::size_t>(p)]] = static_cast<std::uint8_t>(bit);
  }
  return y;
}

LabelVector exhaustive_ovo_vote(const std::vector<LabelVector>& relevant, const CodeVector& b,
                                const Codebook& cb, const CostFunction& cost) {
  if (relevant.empty()) throw Error("exhaustive_ovo_vote: empty relevant set");
  if (relevant.size() > 64) throw Error("exhaustive_ovo_vote: at most 64 relevant vectors");
  require_same_length(b.size(), static_cast<Index>(cb.size()), "exhaustive_ovo_vote code");

  std::set<LabelVector, LabelLess> uniq(relevant.begin(), relevant.end());
  const std::vector<LabelVector> cands(uniq.begin(), uniq.end());

  // The codebook must hold each unordered pair of candidates exactly once.
  std::set<std::pair<std::size_t, std::size_t>> covered;
  auto position = [&](const LabelVector& y) -> std::size_t {
    const auto it = std::lower_bound(cands.begin(), cands.end(), y, LabelLess{});
    if (it == cands.end() || !label_equal(*it, y)) {
      throw Error("exhaustive_ovo_vote: codebook references a vector outside the relevant set");
    }
    return static_cast<std::size_t>(it - cands.begin());
  };
  for (const auto& p : cb.pairs) {
    auto i = position(p.alpha);
    auto j = position(p.beta);
    if (i > j) std::swap(i, j);
    if (!covered.emplace(i, j).second) throw Error("exhaustive_ovo_vote: duplicated pair");
  }
  if (covered.size() != cands.size() * (cands.size() - 1) / 2) {
    throw Error("exhaustive_ovo_vote: codebook is not exhaustive");
  }

  std::vector<double> votes(cands.size(), 0.0);
  for (std::size_t i = 0; i < cb.size(); ++i) {
    const auto& pair = cb.pairs[i];
    const double bit = b[static_cast<Index>(i)];
    for (std::size_t c = 0; c < cands.size(); ++c) {
      const double to_alpha = cost(cands[c], pair.alpha);
      const double to_beta = cost(cands[c], pair.beta);
      double vote;
      if (to_alpha < to_beta) {
        vote = bit;  // alpha side of the boundary
      } else if (to_alpha > to_beta) {
        vote = 1.0 - bit;
      } else {
        vote = 0.5 + std::min(bit, 1.0 - bit);
      }
      votes[c] += vote;
    }
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < cands.size(); ++c) {
    if (votes[c] > votes[best]) best = c;
  }
  return cands[best];
}

}  // namespace csrpe
