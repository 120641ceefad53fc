#include "csrpe/model.hpp"

#include "csrpe/format.hpp"
#include "csrpe/parallel.hpp"
#include "csrpe/rng.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace csrpe {

CsrpeModel::CsrpeModel(Codebook codebook, std::vector<BinaryClassifier> bits,
                       std::vector<LabelVector> relevant, CostFunction cost, Index num_features,
                       std::string learner_name)
    : codebook_(std::move(codebook)),
      bits_(std::move(bits)),
      cost_(std::move(cost)),
      num_features_(num_features),
      learner_name_(std::move(learner_name)) {
  if (bits_.size() != codebook_.size()) {
    throw DimensionError("model has " + std::to_string(bits_.size()) + " bit classifiers for " +
                         std::to_string(codebook_.size()) + " code bits");
  }
  std::set<LabelVector, LabelLess> sorted;
  for (auto& y : relevant) {
    require_same_length(y.size(), codebook_.num_labels, "relevant label");
    sorted.insert(std::move(y));
  }
  relevant_.assign(sorted.begin(), sorted.end());
  relevant_codes_.resize(static_cast<Index>(relevant_.size()), static_cast<Index>(codebook_.size()));
  for (std::size_t j = 0; j < relevant_.size(); ++j) {
    relevant_codes_.row(static_cast<Index>(j)) = encode(relevant_[j], codebook_, cost_).transpose();
  }
}

CsrpeModel train_csrpe(const Dataset& train, const CostFunction& cost, const ModelConfig& config) {
  if (train.empty()) throw Error("cannot train on an empty dataset");
  train.validate();
  if (config.code_length < 1) throw Error("code length must be at least 1");

  const auto labels = distinct_labels(train);
  const Codebook codebook = sample_codebook(config.code_length, train.num_labels, config.source,
                                            labels, config.seed);
  const auto M = static_cast<Index>(codebook.size());

  // Targets depend on y only, so encode each distinct training label once.
  std::map<LabelVector, std::size_t, LabelLess> slot;
  for (std::size_t u = 0; u < labels.size(); ++u) slot.emplace(labels[u], u);
  Eigen::MatrixXd codes(static_cast<Index>(labels.size()), M);
  Eigen::MatrixXd weights(static_cast<Index>(labels.size()), M);
  for (std::size_t u = 0; u < labels.size(); ++u) {
    auto t = encode_targets(labels[u], codebook, cost);
    codes.row(static_cast<Index>(u)) = t.code.transpose();
    weights.row(static_cast<Index>(u)) = t.weights.transpose();
  }
  std::vector<Index> row_slot(train.size());
  for (std::size_t n = 0; n < train.size(); ++n) {
    row_slot[n] = static_cast<Index>(slot.at(train.instances[n].y));
  }

  const Eigen::MatrixXd X = dense_features(train);
  const auto N = static_cast<Index>(train.size());
  std::vector<BinaryClassifier> bits(codebook.size());

  parallel_for(codebook.size(), config.threads, [&](std::size_t i) {
    const auto bit = static_cast<Index>(i);
    Eigen::VectorXd y(N);
    Eigen::VectorXd w(N);
    double total = 0.0;
    for (Index n = 0; n < N; ++n) {
      const Index u = row_slot[static_cast<std::size_t>(n)];
      const double c = codes(u, bit);
      // Ties (c = 0.5) carry zero weight and drop out.
      w[n] = c == 0.5 ? 0.0 : weights(u, bit);
      y[n] = c == 1.0 ? 1.0 : 0.0;
      total += w[n];
    }
    if (total <= 0.0) {
      bits[i] = constant_classifier(0.5);
      return;
    }
    bits[i] = train_binary(X, y, w, config.learner, mix_seed(config.seed, i + 1));
  });

  std::vector<LabelVector> relevant = labels;
  relevant.insert(relevant.end(), config.extra_relevant.begin(), config.extra_relevant.end());
  return CsrpeModel(codebook, std::move(bits), std::move(relevant), cost, train.num_features,
                    to_string(config.learner.kind));
}

CodeVector predict_code(const CsrpeModel& m, const Eigen::Ref<const Eigen::VectorXd>& x,
                        CodeMode mode) {
  require_same_length(x.size(), m.num_features(), "predict_code features");
  const auto& bits = m.bits();
  CodeVector b(static_cast<Index>(bits.size()));
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const double s = bits[i].score(x);
    if (mode == CodeMode::soft) {
      b[static_cast<Index>(i)] = s;
    } else if (bits[i].is_constant() && s == 0.5) {
      b[static_cast<Index>(i)] = 0.5;
    } else {
      b[static_cast<Index>(i)] = s >= 0.5 ? 1.0 : 0.0;
    }
  }
  return b;
}

CodeVector predict_code(const CsrpeModel& m, const FeatureVector& x, CodeMode mode) {
  require_same_length(x.size(), m.num_features(), "predict_code features");
  return predict_code(m, densify(x), mode);
}

std::size_t decode_index(const CsrpeModel& m, const CodeVector& b) {
  const auto& R = m.relevant_codes();
  if (R.rows() == 0) throw Error("decode: empty relevant set");
  require_same_length(b.size(), R.cols(), "decode code");
  const Eigen::VectorXd dist = (R.rowwise() - b.transpose()).cwiseAbs().rowwise().sum();
  std::size_t best = 0;
  for (Index j = 1; j < dist.size(); ++j) {
    if (dist[j] < dist[static_cast<Index>(best)]) best = static_cast<std::size_t>(j);
  }
  return best;
}

LabelVector decode(const CsrpeModel& m, const CodeVector& b) {
  return m.relevant()[decode_index(m, b)];
}

LabelVector predict(const CsrpeModel& m, const FeatureVector& x, CodeMode mode) {
  return decode(m, predict_code(m, x, mode));
}

std::vector<LabelVector> predict_all(const CsrpeModel& m, const Dataset& ds, CodeMode mode) {
  std::vector<LabelVector> out;
  out.reserve(ds.size());
  for (const auto& inst : ds.instances) out.push_back(predict(m, inst.x, mode));
  return out;
}

void write_model(std::ostream& out, const CsrpeModel& m) {
  out << "CSRPE1\n";
  out << "K=" << m.num_labels() << " d=" << m.num_features() << " M=" << m.code_length()
      << " cost=" << m.cost().name << " learner=" << m.learner_name() << '\n';
  write_codebook(out, m.codebook());
  out << "bits\n";
  for (const auto& bit : m.bits()) bit.write(out);
  out << "relevant=" << m.relevant().size() << '\n';
  for (const auto& y : m.relevant()) out << to_bit_string(y) << '\n';
  out << "end\n";
}

namespace {

std::string expect_field(std::istream& in, const std::string& key) {
  std::string tok;
  if (!(in >> tok) || tok.rfind(key + "=", 0) != 0) {
    throw Error("model file: expected field '" + key + "'");
  }
  return tok.substr(key.size() + 1);
}

}  // namespace

CsrpeModel read_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "CSRPE1") throw Error("model file: bad magic (want CSRPE1)");
  if (!std::getline(in, line)) throw Error("model file: missing header");
  std::istringstream hs(line);
  Index K = 0;
  Index d = 0;
  std::size_t M = 0;
  if (!parse_int(expect_field(hs, "K"), K) || !parse_int(expect_field(hs, "d"), d) ||
      !parse_int(expect_field(hs, "M"), M)) {
    throw Error("model file: malformed header '" + line + "'");
  }
  const std::string cost_name = expect_field(hs, "cost");
  const std::string learner = expect_field(hs, "learner");

  Codebook cb = read_codebook(in);
  if (cb.num_labels != K || cb.size() != M) throw Error("model file: codebook disagrees with header");
  std::string tag;
  if (!(in >> tag) || tag != "bits") throw Error("model file: expected 'bits'");
  std::vector<BinaryClassifier> bits;
  bits.reserve(M);
  for (std::size_t i = 0; i < M; ++i) bits.push_back(BinaryClassifier::read(in));

  std::size_t count = 0;
  if (!parse_int(expect_field(in, "relevant"), count)) throw Error("model file: bad relevant count");
  std::vector<LabelVector> relevant;
  relevant.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    std::string bits_str;
    if (!(in >> bits_str)) throw Error("model file: truncated relevant set");
    relevant.push_back(from_bit_string(bits_str));
  }
  if (!(in >> tag) || tag != "end") throw Error("model file: missing 'end'");
  return CsrpeModel(std::move(cb), std::move(bits), std::move(relevant), cost_by_name(cost_name), d,
                    learner);
}

void save_model(const CsrpeModel& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file " + path.string());
  write_model(out, m);
  if (!out) throw Error("write failed for " + path.string());
}

CsrpeModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file " + path.string());
  return read_model(in);
}

}  // namespace csrpe
