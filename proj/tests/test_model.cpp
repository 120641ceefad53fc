#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "csrpe/baselines.hpp"
#include "csrpe/model.hpp"
#include "test_support.hpp"

#include <sstream>

using namespace csrpe;
using namespace csrpe::testing;

namespace {

CsrpeModel assembled(const Codebook& cb, std::vector<double> constants,
                     std::vector<LabelVector> relevant, const CostFunction& cost) {
  std::vector<BinaryClassifier> bits;
  for (double c : constants) bits.push_back(constant_classifier(c));
  return CsrpeModel(cb, std::move(bits), std::move(relevant), cost, 1, "tree");
}

Codebook worked_codebook() {
  Codebook cb;
  cb.num_labels = 2;
  cb.requested = 2;
  cb.pairs = {{make_label({0, 1}), make_label({1, 1})}, {make_label({0, 0}), make_label({1, 1})}};
  return cb;
}

CodeVector code(std::initializer_list<double> v) {
  CodeVector b(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) b[i++] = x;
  return b;
}

/// Features are the label bits plus a small index-dependent jitter column, so
/// every label vector is a deterministic function of x.
Dataset separable(Rng& rng, Index K, std::size_t copies) {
  Dataset ds;
  ds.name = "separable";
  ds.num_labels = K;
  ds.num_features = K + 1;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << K); ++m) {
    LabelVector y(K);
    for (Index k = 0; k < K; ++k) y[k] = static_cast<std::uint8_t>((m >> k) & 1U);
    for (std::size_t c = 0; c < copies; ++c) {
      Eigen::VectorXd x(K + 1);
      for (Index k = 0; k < K; ++k) x[k] = 2.0 * y[k] - 1.0 + 0.1 * rng.normal();
      x[K] = rng.normal();
      ds.instances.push_back({x.sparseView(), y});
    }
  }
  return ds;
}

}  // namespace

TEST_CASE("decode: worked example") {
  const auto ham = cost_by_name("hamming");
  const auto m = assembled(worked_codebook(), {1, 1},
                           {make_label({1, 1}), make_label({0, 1}), make_label({0, 0})}, ham);
  // relevant is stored sorted
  CHECK(to_bit_string(m.relevant()[0]) == "00");
  CHECK(m.relevant_codes().row(0) == code({1, 1}).transpose());
  CHECK(m.relevant_codes().row(1) == code({1, 0.5}).transpose());
  CHECK(m.relevant_codes().row(2) == code({0, 0}).transpose());

  const auto b = code({1, 0});
  std::vector<double> dists;
  for (Index j = 0; j < 3; ++j) dists.push_back(ham_dist(b, m.relevant_codes().row(j).transpose()));
  CHECK(dists == std::vector<double>{1.0, 0.5, 1.0});
  CHECK(to_bit_string(decode(m, b)) == "01");

  const auto tie = code({1, 0.75});
  CHECK(ham_dist(tie, code({1, 1})) == ham_dist(tie, code({1, 0.5})));
  CHECK(to_bit_string(decode(m, tie)) == "00");

  for (Index j = 0; j < 3; ++j) {
    CHECK(label_equal(decode(m, m.relevant_codes().row(j).transpose()), m.relevant()[j]));
  }
  CHECK_THROWS_AS(decode(m, code({1, 0, 1})), DimensionError);
}

TEST_CASE("constant-bit model") {
  Codebook cb;
  cb.num_labels = 2;
  cb.requested = 3;
  cb.pairs = {{make_label({0, 1}), make_label({1, 1})},
              {make_label({0, 0}), make_label({1, 1})},
              {make_label({0, 0}), make_label({1, 0})}};
  const auto m = assembled(cb, {1, 0, 0.5}, {make_label({1, 0})}, cost_by_name("hamming"));
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 3.0);
  CHECK(predict_code(m, x) == code({1, 0, 0.5}));
  CHECK(predict_code(m, x, CodeMode::soft) == code({1, 0, 0.5}));
  // singleton relevant set
  CHECK(to_bit_string(predict(m, x.sparseView())) == "10");
  CHECK_THROWS_AS(predict_code(m, Eigen::VectorXd::Zero(2)), DimensionError);
}

TEST_CASE("single-class collapse under 0/1 loss") {
  Dataset ds;
  ds.num_labels = 3;
  ds.num_features = 2;
  Rng rng(53);
  for (int i = 0; i < 20; ++i) {
    Eigen::VectorXd x(2);
    x << rng.normal(), rng.normal();
    ds.instances.push_back({x.sparseView(), make_label({1, 0, 1})});
  }
  ModelConfig config;
  config.code_length = 28;
  const auto m = train_csrpe(ds, cost_by_name("zero_one"), config);
  for (std::size_t i = 0; i < m.code_length(); ++i) CHECK(m.bits()[i].is_constant());
  for (int i = 0; i < 10; ++i) {
    Eigen::VectorXd x(2);
    x << 10 * rng.normal(), 10 * rng.normal();
    CHECK(to_bit_string(predict(m, x.sparseView())) == "101");
  }
}

TEST_CASE("separable K=3 data with the full codebook is fit exactly") {
  Rng rng(59);
  const auto ds = separable(rng, 3, 6);
  const auto ham = cost_by_name("hamming");
  ModelConfig config;
  config.code_length = 28;
  const auto m = train_csrpe(ds, ham, config);
  CHECK(m.code_length() == 28);
  CHECK(m.relevant().size() == 8);

  std::vector<CodeVector> codes;
  for (const auto& y : m.relevant()) codes.push_back(encode(y, m.codebook(), ham));
  std::size_t correct = 0;
  for (const auto& inst : ds.instances) {
    const auto b = predict_code(m, inst.x);
    const auto yh = predict(m, inst.x);
    CHECK(label_equal(yh, nearest_label_oracle(m.relevant(), codes, b)));
    correct += label_equal(yh, inst.y) ? 1 : 0;
    for (Index i = 0; i < b.size(); ++i) {
      CHECK((b[i] == 0.0 || b[i] == 0.5 || b[i] == 1.0));
    }
    const auto soft = predict_code(m, inst.x, CodeMode::soft);
    CHECK(soft.minCoeff() >= 0.0);
    CHECK(soft.maxCoeff() <= 1.0);
  }
  CHECK(correct == ds.size());
}

TEST_CASE("training is independent of parallelism and round-trips through text") {
  Rng rng(61);
  const auto ds = synth_generate(4, 6, 120, 3, 0.3);
  for (auto kind : {LearnerKind::tree, LearnerKind::logistic}) {
    ModelConfig config;
    config.code_length = 60;
    config.learner.kind = kind;
    config.seed = 17;
    config.threads = 1;
    const auto a = train_csrpe(ds, cost_by_name("f1"), config);
    config.threads = 8;
    const auto b = train_csrpe(ds, cost_by_name("f1"), config);
    REQUIRE(a.code_length() == b.code_length());
    for (std::size_t i = 0; i < a.code_length(); ++i) CHECK(a.bits()[i] == b.bits()[i]);

    std::stringstream ss;
    write_model(ss, a);
    const auto back = read_model(ss);
    CHECK(back.cost().name == a.cost().name);
    CHECK(back.num_features() == a.num_features());
    CHECK(back.relevant_codes() == a.relevant_codes());
    for (const auto& inst : ds.instances) {
      CHECK(predict_code(back, inst.x, CodeMode::soft) == predict_code(a, inst.x, CodeMode::soft));
      CHECK(label_equal(predict(back, inst.x), predict(a, inst.x)));
    }
    std::stringstream again;
    write_model(again, back);
    std::stringstream first;
    write_model(first, a);
    CHECK(again.str() == first.str());
  }
  std::stringstream bad("CSRPE0\n");
  CHECK_THROWS_AS(read_model(bad), Error);
  CHECK_THROWS_AS(load_model(temp_dir("model") / "missing.model"), Error);
}

TEST_CASE("property: oracle bits decode to the true label") {
  Rng rng(67);
  for (int trial = 0; trial < 100; ++trial) {
    const Index K = 2 + static_cast<Index>(rng.below(4));
    const auto relevant = random_distinct_labels(rng, K, 2 + rng.below(3));
    const auto cb = random_codebook(rng, K, 5 + rng.below(40));
    for (const auto& cost : all_costs()) {
      const auto m = assembled(cb, std::vector<double>(cb.size(), 0.5), relevant, cost);
      for (std::size_t j = 0; j < relevant.size(); ++j) {
        const CodeVector b = m.relevant_codes().row(static_cast<Index>(j)).transpose();
        bool unique = true;
        for (std::size_t k = 0; k < relevant.size(); ++k) {
          if (k != j && m.relevant_codes().row(static_cast<Index>(k)).transpose() == b) unique = false;
        }
        if (unique) CHECK(label_equal(decode(m, encode(m.relevant()[j], cb, cost)), m.relevant()[j]));
      }
    }
  }
}

TEST_CASE("property: nearest-neighbour decoding equals exhaustive voting") {
  Rng rng(71);
  for (int trial = 0; trial < 300; ++trial) {
    const Index K = 2 + static_cast<Index>(rng.below(2));
    const auto relevant = random_distinct_labels(rng, K, 2 + rng.below((std::size_t{1} << K) - 1));
    const auto cb = exhaustive_codebook(relevant);
    const auto zo = cost_by_name("zero_one");
    const auto m = assembled(cb, std::vector<double>(cb.size(), 0.5), relevant, zo);
    const auto b = random_ternary_code(rng, cb.size());
    CHECK(label_equal(decode(m, b), exhaustive_ovo_vote(relevant, b, cb)));
    CodeVector soft(b.size());
    for (Index i = 0; i < soft.size(); ++i) soft[i] = rng.uniform();
    CHECK(label_equal(decode(m, soft), exhaustive_ovo_vote(relevant, soft, cb)));
  }
}

TEST_CASE("property: a monotone cost transform keeps decoded predictions") {
  const auto ds = synth_generate(3, 5, 80, 8, 0.4);
  const auto ham = cost_by_name("hamming");
  CostFunction doubled{"double_hamming", Direction::loss,
                       [ham](const LabelVector& y, const LabelVector& yh) { return 2.0 * ham(y, yh); }};
  ModelConfig config;
  config.code_length = 20;
  config.seed = 5;
  const auto a = train_csrpe(ds, ham, config);
  const auto b = train_csrpe(ds, doubled, config);
  for (const auto& inst : ds.instances) {
    CHECK(encode(inst.y, a.codebook(), ham) == encode(inst.y, b.codebook(), doubled));
    CHECK(label_equal(predict(a, inst.x), predict(b, inst.x)));
  }
}

TEST_CASE("train_csrpe argument errors") {
  Dataset empty;
  empty.num_labels = 2;
  empty.num_features = 1;
  CHECK_THROWS_AS(train_csrpe(empty, cost_by_name("hamming"), {}), Error);
  ModelConfig zero;
  zero.code_length = 0;
  CHECK_THROWS_AS(train_csrpe(synth_generate(2, 2, 10, 1, 0.0), cost_by_name("hamming"), zero), Error);
}
