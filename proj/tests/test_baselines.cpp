#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "csrpe/baselines.hpp"
#include "test_support.hpp"

using namespace csrpe;
using namespace csrpe::testing;

namespace {

Dataset from_rows(Index K, const std::vector<std::pair<Eigen::VectorXd, LabelVector>>& rows) {
  Dataset ds;
  ds.num_labels = K;
  ds.num_features = rows.front().first.size();
  for (const auto& [x, y] : rows) ds.instances.push_back({x.sparseView(), y});
  return ds;
}

double training_accuracy(const Dataset& ds, const std::function<LabelVector(const FeatureVector&)>& f) {
  std::size_t hit = 0;
  for (const auto& inst : ds.instances) hit += label_equal(f(inst.x), inst.y) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(ds.size());
}

}  // namespace

TEST_CASE("BR: constant label and separable data") {
  Rng rng(73);
  std::vector<std::pair<Eigen::VectorXd, LabelVector>> rows;
  for (int i = 0; i < 40; ++i) {
    Eigen::VectorXd x(2);
    x << rng.normal(), rng.normal();
    rows.push_back({x, make_label({1, x[0] > 0 ? 1 : 0, x[1] > 0.3 ? 1 : 0})});
  }
  const auto ds = from_rows(3, rows);
  const auto br = train_br(ds, {});
  CHECK(br.per_label.size() == 3);
  CHECK(br.per_label[0].is_constant());
  double loss = 0;
  for (const auto& inst : ds.instances) {
    const auto yh = predict_br(br, inst.x);
    CHECK(yh[0] == 1);
    loss += hamming_oracle(inst.y, yh);
  }
  CHECK(loss == 0.0);
  CHECK(train_br(ds, {}, 0, 1).per_label == train_br(ds, {}, 0, 4).per_label);
  Dataset empty;
  CHECK_THROWS_AS(train_br(empty, {}), Error);
}

TEST_CASE("K=1: BR, CC and the base learner agree") {
  Rng rng(79);
  std::vector<std::pair<Eigen::VectorXd, LabelVector>> rows;
  Eigen::MatrixXd X(50, 2);
  Eigen::VectorXd y(50);
  for (Index i = 0; i < 50; ++i) {
    X.row(i) << rng.normal(), rng.normal();
    y[i] = X(i, 0) + 0.5 * rng.normal() > 0 ? 1 : 0;
    rows.push_back({X.row(i).transpose(), make_label({static_cast<int>(y[i])})});
  }
  const auto ds = from_rows(1, rows);
  for (auto kind : {LearnerKind::tree, LearnerKind::logistic}) {
    LearnerConfig cfg;
    cfg.kind = kind;
    const auto alone = train_binary(X, y, Eigen::VectorXd::Ones(50), cfg, 0);
    const auto br = train_br(ds, cfg);
    const auto cc = train_cc(ds, cfg);
    for (Index i = 0; i < 50; ++i) {
      const FeatureVector x = X.row(i).transpose().sparseView();
      CHECK(predict_br(br, x)[0] == alone.hard(X.row(i).transpose()));
      CHECK(label_equal(predict_cc(cc, x), predict_br(br, x)));
    }
  }
}

TEST_CASE("CC: close to BR on independent labels") {
  const auto ds = synth_generate(4, 8, 300, 11, 0.0);
  LearnerConfig cfg;
  cfg.kind = LearnerKind::logistic;
  const auto br = train_br(ds, cfg);
  const auto cc = train_cc(ds, cfg);
  const double a = training_accuracy(ds, [&](const FeatureVector& x) { return predict_br(br, x); });
  const double c = training_accuracy(ds, [&](const FeatureVector& x) { return predict_cc(cc, x); });
  CHECK(std::fabs(a - c) <= 0.05);
}

TEST_CASE("CC: a copied label is recovered through the chain") {
  Rng rng(83);
  std::vector<std::pair<Eigen::VectorXd, LabelVector>> rows;
  for (int i = 0; i < 60; ++i) {
    Eigen::VectorXd x(2);
    x << rng.normal(), rng.normal();
    const int l1 = rng.below(2) == 1 ? 1 : 0;  // not predictable from x
    rows.push_back({x, make_label({x[0] > 0 ? 1 : 0, l1, l1})});
  }
  const auto ds = from_rows(3, rows);
  LearnerConfig cfg;
  cfg.tree.max_depth = 1;
  const auto cc = train_cc(ds, cfg, {1, 2, 0});
  for (const auto& inst : ds.instances) {
    const auto yh = predict_cc(cc, inst.x);
    CHECK(yh[2] == yh[1]);
  }
  const auto& last = std::get<TreeModel>(cc.chain[1].model());
  CHECK(last.nodes[0].feature == 2);  // x has 2 columns; column 2 is label 1

  CHECK_THROWS_AS(train_cc(ds, cfg, {0, 0, 1}), Error);
  CHECK_THROWS_AS(train_cc(ds, cfg, {0, 1}), Error);
}

TEST_CASE("exhaustive_ovo_vote: small cases") {
  std::vector<LabelVector> two{make_label({0, 1}), make_label({1, 0})};
  const auto cb = exhaustive_codebook(two);
  CodeVector one(1);
  one << 1.0;
  CHECK(label_equal(exhaustive_ovo_vote(two, one, cb), cb.pairs[0].alpha));
  one << 0.0;
  CHECK(label_equal(exhaustive_ovo_vote(two, one, cb), cb.pairs[0].beta));

  std::vector<LabelVector> four{make_label({1, 1}), make_label({0, 1}), make_label({1, 0}),
                                make_label({0, 0})};
  const auto full = exhaustive_codebook(four);
  CHECK(to_bit_string(exhaustive_ovo_vote(four, CodeVector::Constant(6, 0.5), full)) == "00");

  // Votes tallied by hand: every bit names its winner directly.
  Rng rng(89);
  for (int trial = 0; trial < 100; ++trial) {
    CodeVector b(6);
    for (Index i = 0; i < 6; ++i) b[i] = static_cast<double>(rng.below(2));
    std::map<std::string, int> votes;
    for (std::size_t i = 0; i < full.size(); ++i) {
      const auto& p = full.pairs[i];
      votes[to_bit_string(b[static_cast<Index>(i)] == 1.0 ? p.alpha : p.beta)] += 1;
    }
    std::string best;
    int most = -1;
    for (const auto& [k, v] : votes) {
      if (v > most) {
        most = v;
        best = k;
      }
    }
    CHECK(to_bit_string(exhaustive_ovo_vote(four, b, full)) == best);
  }
}

TEST_CASE("exhaustive_ovo_vote: rejects codebooks that are not exhaustive") {
  std::vector<LabelVector> three{make_label({0, 0}), make_label({0, 1}), make_label({1, 1})};
  auto cb = exhaustive_codebook(three);
  cb.pairs.pop_back();
  CHECK_THROWS_AS(exhaustive_ovo_vote(three, CodeVector::Zero(2), cb), Error);
  auto dup = exhaustive_codebook(three);
  dup.pairs[2] = dup.pairs[0];
  CHECK_THROWS_AS(exhaustive_ovo_vote(three, CodeVector::Zero(3), dup), Error);
}
