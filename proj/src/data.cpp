#include "csrpe/data.hpp"

#include "csrpe/format.hpp"
#include "csrpe/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace csrpe {

void Dataset::validate() const {
  if (instances.empty()) throw Error("dataset '" + name + "' has no instances");
  for (const auto& inst : instances) {
    require_same_length(inst.y.size(), num_labels, "label vector");
    require_same_length(inst.x.size(), num_features, "feature vector");
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

Instance parse_line(std::string_view line, Index num_labels, Index num_features,
                    std::size_t lineno) {
  Instance inst;
  inst.y = LabelVector::Zero(num_labels);
  inst.x.resize(num_features);

  // The label field is whatever precedes the first whitespace; a line that
  // starts with whitespace has an empty label field.
  std::string_view label_field;
  std::string_view rest = line;
  if (!line.empty() && line.front() != ' ' && line.front() != '\t') {
    const auto sp = line.find_first_of(" \t");
    label_field = line.substr(0, sp);
    rest = sp == std::string_view::npos ? std::string_view{} : line.substr(sp);
    if (label_field.find(':') != std::string_view::npos) {
      // "1:0.5 ..." with no label field at all.
      label_field = {};
      rest = line;
    }
  }

  if (!label_field.empty()) {
    std::size_t start = 0;
    while (start <= label_field.size()) {
      const auto comma = label_field.find(',', start);
      const auto tok = label_field.substr(start, comma == std::string_view::npos
                                                     ? std::string_view::npos
                                                     : comma - start);
      long k = -1;
      if (!parse_int(tok, k)) {
        throw ParseError(lineno, "bad label index '" + std::string(tok) + "'");
      }
      if (k < 0 || k >= num_labels) {
        throw ParseError(lineno, "label index " + std::to_string(k) + " outside [0, " +
                                     std::to_string(num_labels - 1) + "]");
      }
      inst.y[k] = 1;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }

  std::vector<std::pair<Index, double>> entries;
  for (auto tok : split_ws(rest)) {
    const auto colon = tok.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(lineno, "expected <index>:<value>, got '" + std::string(tok) + "'");
    }
    long idx = 0;
    double val = 0.0;
    if (!parse_int(tok.substr(0, colon), idx) || !parse_double(tok.substr(colon + 1), val)) {
      throw ParseError(lineno, "malformed feature '" + std::string(tok) + "'");
    }
    if (idx < 1 || idx > num_features) {
      throw ParseError(lineno, "feature index " + std::to_string(idx) + " outside [1, " +
                                   std::to_string(num_features) + "]");
    }
    entries.emplace_back(idx - 1, val);
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].first == entries[i - 1].first) {
      throw ParseError(lineno, "duplicate feature index " + std::to_string(entries[i].first + 1));
    }
  }
  inst.x.reserve(static_cast<Index>(entries.size()));
  for (const auto& [idx, val] : entries) inst.x.insertBack(idx) = val;
  return inst;
}

}  // namespace

Dataset parse_dataset(std::istream& in, Index num_labels, Index num_features, std::string name) {
  if (num_labels < 1 || num_features < 1) {
    throw Error("label count and feature dimension must be positive");
  }
  Dataset ds;
  ds.name = std::move(name);
  ds.num_labels = num_labels;
  ds.num_features = num_features;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line).front() == '#') continue;
    ds.instances.push_back(parse_line(line, num_labels, num_features, lineno));
  }
  if (ds.instances.empty()) throw Error("dataset '" + ds.name + "' is empty");
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path, Index num_labels, Index num_features) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset file " + path.string());
  try {
    return parse_dataset(in, num_labels, num_features, path.stem().string());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.what());
  }
}

std::string format_label_indices(const LabelVector& y) {
  std::string out;
  for (Index k = 0; k < y.size(); ++k) {
    if (!y[k]) continue;
    if (!out.empty()) out += ',';
    out += std::to_string(k);
  }
  return out;
}

void write_dataset(std::ostream& out, const Dataset& ds) {
  for (const auto& inst : ds.instances) {
    out << format_label_indices(inst.y);
    for (FeatureVector::InnerIterator it(inst.x); it; ++it) {
      out << ' ' << (it.index() + 1) << ':' << format_double(it.value());
    }
    out << '\n';
  }
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write dataset file " + path.string());
  write_dataset(out, ds);
  if (!out) throw Error("write failed for " + path.string());
}

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& rows) {
  Dataset out;
  out.name = ds.name;
  out.num_labels = ds.num_labels;
  out.num_features = ds.num_features;
  out.instances.reserve(rows.size());
  for (auto r : rows) out.instances.push_back(ds.instances.at(r));
  return out;
}

std::pair<Dataset, Dataset> random_split(const Dataset& ds, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error("split ratio must lie in (0, 1)");
  if (ds.empty()) throw Error("cannot split an empty dataset");
  const std::size_t n = ds.size();
  const auto first = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 0.5));
  if (first == 0 || first == n) {
    throw Error("split of " + std::to_string(n) + " instances leaves an empty part");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  std::vector<std::size_t> a(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(first));
  std::vector<std::size_t> b(order.begin() + static_cast<std::ptrdiff_t>(first), order.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return {subset(ds, a), subset(ds, b)};
}

std::vector<LabelVector> distinct_labels(const Dataset& ds) {
  std::set<LabelVector, LabelLess> seen;
  for (const auto& inst : ds.instances) seen.insert(inst.y);
  return {seen.begin(), seen.end()};
}

double label_density(const Dataset& ds) {
  if (ds.empty() || ds.num_labels == 0) return 0.0;
  double total = 0.0;
  for (const auto& inst : ds.instances) total += popcount(inst.y);
  return total / (static_cast<double>(ds.size()) * static_cast<double>(ds.num_labels));
}

Dataset synth_generate(Index num_labels, Index num_features, std::size_t n, std::uint64_t seed,
                       double correlation, double noise, bool require_label) {
  if (num_labels < 2 || num_features < 1 || n < 2) {
    throw Error("synth_generate needs K >= 2, d >= 1, n >= 2");
  }
  if (!(correlation >= 0.0 && correlation <= 1.0)) {
    throw Error("correlation must lie in [0, 1]");
  }
  if (noise < 0.0) throw Error("noise must be nonnegative");
  Rng rng(seed);
  const Index K = num_labels;
  const Index d = num_features;
  const auto N = static_cast<Index>(n);

  // Separators are orthonormal within blocks of d labels, so with isotropic
  // features and no coupling the raw label scores are independent.
  Eigen::MatrixXd W(d, K);
  for (Index k = 0; k < K; ++k) {
    for (Index j = 0; j < d; ++j) W(j, k) = rng.normal();
    const Index block_start = (k / d) * d;
    for (Index p = block_start; p < k; ++p) {
      W.col(k) -= W.col(p).dot(W.col(k)) * W.col(p);
    }
    const double norm = W.col(k).norm();
    if (norm < 1e-12) {
      W.col(k).setZero();
      W(k % d, k) = 1.0;
    } else {
      W.col(k) /= norm;
    }
  }

  Eigen::MatrixXd X(N, d);
  for (Index i = 0; i < N; ++i) {
    for (Index j = 0; j < d; ++j) X(i, j) = rng.normal();
  }
  Eigen::MatrixXd S = X * W;
  if (noise > 0.0) {
    for (Index i = 0; i < N; ++i) {
      for (Index k = 0; k < K; ++k) S(i, k) += noise * rng.normal();
    }
  }

  // Chain coupling: z_k = (1 - c) s_k + c z_{k-1}; c = 1 copies label 0 everywhere.
  Eigen::MatrixXd Z = S;
  for (Index k = 1; k < K; ++k) {
    Z.col(k) = (1.0 - correlation) * S.col(k) + correlation * Z.col(k - 1);
  }

  // Standardise each score column and threshold half a deviation above the
  // mean, giving a label density near 0.31.
  constexpr double kThreshold = 0.5;
  Eigen::MatrixXd Zs = Z;
  for (Index k = 0; k < K; ++k) {
    const double mean = Z.col(k).mean();
    const double sd = std::sqrt((Z.col(k).array() - mean).square().sum() / static_cast<double>(N));
    Zs.col(k) = (Z.col(k).array() - mean) / (sd > 0.0 ? sd : 1.0);
  }
  // Exact copies must stay exact after floating-point standardisation.
  for (Index k = 1; k < K; ++k) {
    if (Z.col(k) == Z.col(k - 1)) Zs.col(k) = Zs.col(k - 1);
  }

  Dataset ds;
  ds.name = "synth";
  ds.num_labels = K;
  ds.num_features = d;
  ds.instances.resize(n);
  for (Index i = 0; i < N; ++i) {
    auto& inst = ds.instances[static_cast<std::size_t>(i)];
    inst.x.resize(d);
    inst.x.reserve(d);
    for (Index j = 0; j < d; ++j) inst.x.insertBack(j) = X(i, j);
    inst.y.resize(K);
    for (Index k = 0; k < K; ++k) inst.y[k] = Zs(i, k) > kThreshold ? 1 : 0;
    if (require_label && popcount(inst.y) == 0) {
      Index top = 0;
      Zs.row(i).maxCoeff(&top);
      inst.y[top] = 1;
    }
  }
  return ds;
}

Eigen::VectorXd densify(const FeatureVector& x) { return Eigen::VectorXd(x); }

Eigen::MatrixXd dense_features(const Dataset& ds) {
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<Index>(ds.size()), ds.num_features);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (FeatureVector::InnerIterator it(ds.instances[i].x); it; ++it) {
      X(static_cast<Index>(i), it.index()) = it.value();
    }
  }
  return X;
}

}  // namespace csrpe
