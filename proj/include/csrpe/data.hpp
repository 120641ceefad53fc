#pragma once

#include "csrpe/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace csrpe {

struct Instance {
  FeatureVector x;
  LabelVector y;
};

/// Multi-label dataset D = {(x_n, y_n)} with fixed label count K and feature dim d.
struct Dataset {
  std::string name;
  Index num_labels = 0;    // K
  Index num_features = 0;  // d
  std::vector<Instance> instances;

  std::size_t size() const { return instances.size(); }
  bool empty() const { return instances.empty(); }

  /// Throws DimensionError unless every instance matches K and d and N >= 1.
  void validate() const;
};

/// Raised by the text loader; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Sparse multi-label text format:
///   <label,indices> <feat>:<val> <feat>:<val> ...
/// Labels are 0-based and comma separated (possibly empty), features 1-based.
/// Lines starting with '#' and blank lines are skipped.
Dataset parse_dataset(std::istream& in, Index num_labels, Index num_features,
                      std::string name = "dataset");
Dataset load_dataset(const std::filesystem::path& path, Index num_labels,
                     Index num_features);

void write_dataset(std::ostream& out, const Dataset& ds);
void save_dataset(const Dataset& ds, const std::filesystem::path& path);

/// Renders the label field of one line, e.g. "0,2".
std::string format_label_indices(const LabelVector& y);

/// Seeded, unstratified split. The first part gets round-half-up(ratio * N)
/// instances.
std::pair<Dataset, Dataset> random_split(const Dataset& ds, double ratio,
                                         std::uint64_t seed);

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& rows);

/// Deduplicated label vectors in lexicographic order; the default relevant set.
std::vector<LabelVector> distinct_labels(const Dataset& ds);

/// Mean fraction of relevant labels per instance.
double label_density(const Dataset& ds);

/// Synthetic generator: Gaussian features, orthogonalised per-label linear
/// separators, and a chain coupling of strength `correlation` in [0,1]
/// between adjacent labels. `noise` adds Gaussian jitter to each label score.
/// With `require_label`, a row with no score above the threshold gets its
/// highest-scoring label, so no instance has an empty label vector.
Dataset synth_generate(Index num_labels, Index num_features, std::size_t n,
                       std::uint64_t seed, double correlation, double noise = 0.0,
                       bool require_label = false);

/// Row-major dense copy of all feature vectors (N x d).
Eigen::MatrixXd dense_features(const Dataset& ds);
Eigen::VectorXd densify(const FeatureVector& x);

}  // namespace csrpe
