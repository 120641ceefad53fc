#pragma once

#include "csrpe/costs.hpp"
#include "csrpe/types.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace csrpe {

/// The two reference label vectors a code bit discriminates between.
struct ReferencePair {
  LabelVector alpha;
  LabelVector beta;
};

enum class PairSource { uniform, empirical };

std::string to_string(PairSource s);
PairSource pair_source_from_string(const std::string& s);

struct Codebook {
  std::vector<ReferencePair> pairs;
  Index num_labels = 0;
  PairSource source = PairSource::uniform;
  std::uint64_t seed = 0;
  /// Length asked for; larger than size() when the pair universe ran out.
  std::size_t requested = 0;

  std::size_t size() const { return pairs.size(); }
  bool shrunk() const { return requested > pairs.size(); }
};

/// Samples distinct unordered reference pairs without replacement. `uniform`
/// draws each reference from {0,1}^K, `empirical` draws from the distinct
/// members of `pool`. When M reaches the number of available pairs, every
/// pair is returned in lexicographic order.
Codebook sample_codebook(std::size_t M, Index K, PairSource source,
                         std::span<const LabelVector> pool, std::uint64_t seed);

/// Codebook holding every unordered pair of `labels` (deduplicated, sorted),
/// alpha lexicographically before beta.
Codebook exhaustive_codebook(std::span<const LabelVector> labels);

/// Cost-sensitive code: bit i is 1 when alpha_i is strictly cheaper for y,
/// 0 when beta_i is, 0.5 on a tie. `cost` must be a loss.
CodeVector encode(const LabelVector& y, const Codebook& cb, const CostFunction& cost);

/// Plain one-versus-one code: 1 if y is alpha_i, 0 if y is beta_i, else 0.5.
CodeVector encode_ovo(const LabelVector& y, const Codebook& cb);

/// weight_i = |C(y, alpha_i) - C(y, beta_i)|.
Eigen::VectorXd bit_weights(const LabelVector& y, const Codebook& cb, const CostFunction& cost);

/// encode() and bit_weights() from a single pass of cost evaluations.
struct BitTargets {
  CodeVector code;
  Eigen::VectorXd weights;
};
BitTargets encode_targets(const LabelVector& y, const Codebook& cb, const CostFunction& cost);

/// Generalised Hamming distance: L1 distance between codes, so a 0.5 entry
/// is half a disagreement against either hard bit.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar ham_dist(const Eigen::MatrixBase<DerivedA>& a,
                                   const Eigen::MatrixBase<DerivedB>& b) {
  require_same_length(a.size(), b.size(), "ham_dist");
  return (a.derived() - b.derived()).cwiseAbs().sum();
}

/// Header "K=<K> M=<M> seed=<seed> source=<source>" then one
/// "<alpha bits>|<beta bits>" line per pair.
void write_codebook(std::ostream& out, const Codebook& cb);
Codebook read_codebook(std::istream& in);

}  // namespace csrpe
