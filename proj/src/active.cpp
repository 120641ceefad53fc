#include "csrpe/active.hpp"

#include "csrpe/parallel.hpp"
#include "csrpe/rng.hpp"

#include <algorithm>
#include <set>

namespace csrpe {

std::string to_string(QueryStrategy s) { return s == QueryStrategy::csrpe ? "csrpe" : "random"; }

QueryStrategy query_strategy_from_string(const std::string& s) {
  if (s == "csrpe") return QueryStrategy::csrpe;
  if (s == "random") return QueryStrategy::random;
  throw Error("unknown query strategy '" + s + "'");
}

std::string to_string(CurveModel m) { return m == CurveModel::aux ? "aux" : "csrpe"; }

CurveModel curve_model_from_string(const std::string& s) {
  if (s == "aux") return CurveModel::aux;
  if (s == "csrpe") return CurveModel::csrpe;
  throw Error("unknown curve model '" + s + "'");
}

ALState init_al_state(const Dataset& pool, std::size_t init_labeled, std::size_t budget,
                      std::uint64_t seed) {
  pool.validate();
  if (init_labeled < 2) throw Error("active learning needs at least 2 initial labeled instances");
  if (init_labeled >= pool.size()) throw Error("initial labeled set exhausts the pool");
  if (budget > pool.size() - init_labeled) {
    throw Error("budget " + std::to_string(budget) + " exceeds the " +
                std::to_string(pool.size() - init_labeled) + " unlabeled instances");
  }

  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(mix_seed(seed, 0x1ab));
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::size_t> init(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(init_labeled));
  std::sort(init.begin(), init.end());

  ALState s;
  s.budget = budget;
  s.seed = seed;
  s.labeled = subset(pool, init);
  s.labeled_index = init;
  if (distinct_labels(s.labeled).size() < 2) {
    throw Error("initial labeled set has a single distinct label vector");
  }
  std::set<std::size_t> chosen(init.begin(), init.end());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (chosen.count(i)) continue;
    s.unlabeled.emplace_back(i, pool.instances[i].x);
    s.hidden_labels.emplace(i, pool.instances[i].y);
  }
  return s;
}

void reveal(ALState& state, std::size_t index) {
  if (state.t >= state.budget) throw Error("query budget exhausted");
  const auto it = std::find_if(state.unlabeled.begin(), state.unlabeled.end(),
                               [index](const auto& e) { return e.first == index; });
  if (it == state.unlabeled.end()) {
    throw Error("instance " + std::to_string(index) + " is not in the unlabeled pool");
  }
  auto label = state.hidden_labels.at(index);
  state.labeled.instances.push_back({std::move(it->second), std::move(label)});
  state.labeled_index.push_back(index);
  state.hidden_labels.erase(index);
  state.unlabeled.erase(it);
  ++state.t;
}

UncertaintyParts csrpe_uncertainty_parts(const CsrpeModel& h, const BrModel& f_t,
                                         const FeatureVector& x) {
  const Eigen::VectorXd dense = densify(x);
  const CodeVector predicted = predict_code(h, dense);
  const std::size_t nearest = decode_index(h, predicted);
  const CodeVector aux = encode(predict_br(f_t, dense), h.codebook(), h.cost());
  UncertaintyParts parts;
  parts.estimation = ham_dist(predicted, h.relevant_codes().row(static_cast<Index>(nearest)).transpose());
  parts.utility = ham_dist(predicted, aux);
  return parts;
}

double csrpe_uncertainty(const CsrpeModel& h, const BrModel& f_t, const FeatureVector& x) {
  return csrpe_uncertainty_parts(h, f_t, x).total();
}

std::size_t select_query(const ALState& state, QueryStrategy strategy, const CsrpeModel& h,
                         const BrModel& f_t, int threads) {
  if (state.unlabeled.empty()) throw Error("unlabeled pool is empty");
  if (strategy == QueryStrategy::random) {
    Rng rng(mix_seed(state.seed, state.t));
    return state.unlabeled[rng.below(state.unlabeled.size())].first;
  }
  std::vector<double> score(state.unlabeled.size());
  parallel_for(score.size(), threads, [&](std::size_t i) {
    score[i] = csrpe_uncertainty(h, f_t, state.unlabeled[i].second);
  });
  // The pool is kept sorted by index, so the first maximum is the smallest index.
  std::size_t best = 0;
  for (std::size_t i = 1; i < score.size(); ++i) {
    if (score[i] > score[best]) best = i;
  }
  return state.unlabeled[best].first;
}

namespace {

double mean_metric(CurveModel which, const CsrpeModel& h, const BrModel& f_t,
                   const Eigen::MatrixXd& X, const Dataset& test, const CostFunction& metric) {
  double total = 0.0;
  for (Index n = 0; n < X.rows(); ++n) {
    const LabelVector yh = which == CurveModel::aux ? predict_br(f_t, X.row(n).transpose())
                                                    : decode(h, predict_code(h, X.row(n).transpose()));
    total += metric(test.instances[static_cast<std::size_t>(n)].y, yh);
  }
  return total / static_cast<double>(X.rows());
}

}  // namespace

std::vector<CurvePoint> run_al(const Dataset& pool, const Dataset& test, const ALConfig& config) {
  test.validate();
  require_same_length(test.num_labels, pool.num_labels, "test label count");
  require_same_length(test.num_features, pool.num_features, "test feature dim");
  if (config.retrain_every < 1) throw Error("retrain_every must be at least 1");

  ALState state = init_al_state(pool, config.init_labeled, config.budget, config.seed);
  const CostFunction cost = cost_by_name(config.criterion);
  const CostFunction metric = criterion(config.criterion);
  const Eigen::MatrixXd X_test = dense_features(test);

  ModelConfig model_cfg = config.model;
  model_cfg.seed = config.seed;
  auto fit = [&] {
    return std::pair{train_csrpe(state.labeled, cost, model_cfg),
                     train_br(state.labeled, config.aux_learner, config.seed, model_cfg.threads)};
  };

  auto [h, f_t] = fit();
  std::vector<CurvePoint> curve;
  curve.reserve(config.budget + 1);
  curve.push_back({0, -1, mean_metric(config.evaluate, h, f_t, X_test, test, metric)});

  for (std::size_t t = 1; t <= config.budget; ++t) {
    const std::size_t q = select_query(state, config.strategy, h, f_t, model_cfg.threads);
    reveal(state, q);
    if (t % config.retrain_every == 0 || t == config.budget) {
      std::tie(h, f_t) = fit();
    }
    curve.push_back({t, static_cast<long long>(q), mean_metric(config.evaluate, h, f_t, X_test, test, metric)});
  }
  return curve;
}

}  // namespace csrpe
