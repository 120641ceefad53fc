#include "csrpe/learners.hpp"

#include "csrpe/format.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace csrpe {

std::string to_string(LearnerKind kind) {
  return kind == LearnerKind::tree ? "tree" : "logistic";
}

LearnerKind learner_kind_from_string(const std::string& s) {
  if (s == "tree") return LearnerKind::tree;
  if (s == "logistic") return LearnerKind::logistic;
  throw Error("unknown learner '" + s + "'");
}

BinaryClassifier constant_classifier(double score) {
  if (!(score >= 0.0 && score <= 1.0)) throw Error("constant score must lie in [0, 1]");
  return BinaryClassifier(ConstantModel{score});
}

namespace {

struct Scorer {
  const Eigen::Ref<const Eigen::VectorXd>& x;

  double operator()(const ConstantModel& m) const { return m.score; }

  double operator()(const TreeModel& m) const {
    int id = 0;
    for (;;) {
      const auto& node = m.nodes[static_cast<std::size_t>(id)];
      if (node.feature < 0) return node.score;
      id = x[node.feature] <= node.threshold ? node.left : node.right;
    }
  }

  double operator()(const LogisticModel& m) const {
    require_same_length(x.size(), m.coef.size(), "logistic input");
    const double z = m.intercept + m.coef.dot(x);
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
  }
};

}  // namespace

double BinaryClassifier::score(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return std::visit(Scorer{x}, model_);
}

std::string BinaryClassifier::kind_name() const {
  switch (model_.index()) {
    case 0:
      return "constant";
    case 1:
      return "tree";
    default:
      return "logistic";
  }
}

void BinaryClassifier::write(std::ostream& out) const {
  if (const auto* c = std::get_if<ConstantModel>(&model_)) {
    out << "constant " << format_double(c->score) << '\n';
  } else if (const auto* t = std::get_if<TreeModel>(&model_)) {
    out << "tree " << t->nodes.size() << '\n';
    for (const auto& n : t->nodes) {
      if (n.feature < 0) {
        out << "L " << format_double(n.score) << '\n';
      } else {
        out << "N " << n.feature << ' ' << format_double(n.threshold) << ' ' << n.left << ' '
            << n.right << ' ' << format_double(n.score) << '\n';
      }
    }
  } else {
    const auto& l = std::get<LogisticModel>(model_);
    out << "logistic " << l.coef.size() << ' ' << format_double(l.intercept);
    for (Index j = 0; j < l.coef.size(); ++j) out << ' ' << format_double(l.coef[j]);
    out << '\n';
  }
}

namespace {

double read_double(std::istream& in) {
  std::string tok;
  double v = 0.0;
  if (!(in >> tok) || !parse_double(tok, v)) {
    throw Error("malformed number '" + tok + "' in classifier block");
  }
  return v;
}

}  // namespace

BinaryClassifier BinaryClassifier::read(std::istream& in) {
  std::string kind;
  if (!(in >> kind)) throw Error("unexpected end of classifier block");
  if (kind == "constant") return constant_classifier(read_double(in));
  if (kind == "tree") {
    std::size_t count = 0;
    if (!(in >> count) || count == 0) throw Error("bad tree node count");
    TreeModel t;
    t.nodes.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      auto& n = t.nodes[i];
      std::string tag;
      in >> tag;
      if (tag == "L") {
        n.score = read_double(in);
      } else if (tag == "N") {
        in >> n.feature;
        n.threshold = read_double(in);
        in >> n.left >> n.right;
        n.score = read_double(in);
        // Children always follow their parent in preorder.
        const auto self = static_cast<int>(i);
        const auto bound = static_cast<int>(count);
        if (!in || n.feature < 0 || n.left <= self || n.right <= self || n.left >= bound ||
            n.right >= bound) {
          throw Error("bad tree node");
        }
      } else {
        throw Error("bad tree node tag '" + tag + "'");
      }
    }
    return BinaryClassifier(std::move(t));
  }
  if (kind == "logistic") {
    Index dim = 0;
    if (!(in >> dim) || dim < 0) throw Error("bad logistic dimension");
    LogisticModel l;
    l.intercept = read_double(in);
    l.coef.resize(dim);
    for (Index j = 0; j < dim; ++j) l.coef[j] = read_double(in);
    return BinaryClassifier(std::move(l));
  }
  throw Error("unknown classifier kind '" + kind + "'");
}

bool operator==(const BinaryClassifier& a, const BinaryClassifier& b) {
  std::ostringstream sa;
  std::ostringstream sb;
  a.write(sa);
  b.write(sb);
  return sa.str() == sb.str();
}

BinaryClassifier train_binary(const Eigen::Ref<const Eigen::MatrixXd>& X,
                              const Eigen::Ref<const Eigen::VectorXd>& labels,
                              const Eigen::Ref<const Eigen::VectorXd>& weights,
                              const LearnerConfig& config, std::uint64_t seed) {
  if (config.kind == LearnerKind::tree) return train_tree(X, labels, weights, config.tree, seed);
  return train_logistic(X, labels, weights, config.logistic);
}

}  // namespace csrpe
