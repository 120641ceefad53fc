#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace csrpe {

using Index = Eigen::Index;

/// Dense relevance vector y in {0,1}^K. Entries are 0 or 1.
using LabelVector = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>;

/// Sparse feature vector x in R^d. Storage is 0-based; files use 1-based indices.
using FeatureVector = Eigen::SparseVector<double>;

/// Code over a codebook of length M. Encoder output lives in {0, 0.5, 1};
/// classifier output may be anywhere in [0,1].
template <typename Scalar>
using CodeVectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using CodeVector = CodeVectorT<double>;

/// Base for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes disagree (label lengths, code lengths, feature dims).
class DimensionError : public Error {
 public:
  using Error::Error;
};

inline void require_same_length(Index a, Index b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": length mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

/// Number of relevant labels, |y|_1.
inline int popcount(const LabelVector& y) { return y.cast<int>().sum(); }

inline bool label_equal(const LabelVector& a, const LabelVector& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

/// Lexicographic order with bit 0 most significant; shorter vectors first.
struct LabelLess {
  bool operator()(const LabelVector& a, const LabelVector& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    for (Index k = 0; k < a.size(); ++k) {
      if (a[k] != b[k]) return a[k] < b[k];
    }
    return false;
  }
};

/// "0101" style rendering.
std::string to_bit_string(const LabelVector& y);
LabelVector from_bit_string(const std::string& s);

/// Builds a label vector from a braced list, e.g. make_label({1, 0, 1}).
LabelVector make_label(std::initializer_list<int> bits);

}  // namespace csrpe
