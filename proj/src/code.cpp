#include "csrpe/code.hpp"

#include "csrpe/format.hpp"
#include "csrpe/rng.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace csrpe {

std::string to_string(PairSource s) { return s == PairSource::uniform ? "uniform" : "empirical"; }

PairSource pair_source_from_string(const std::string& s) {
  if (s == "uniform") return PairSource::uniform;
  if (s == "empirical") return PairSource::empirical;
  throw Error("unknown pair source '" + s + "'");
}

namespace {

using PairKey = std::pair<std::string, std::string>;

PairKey unordered_key(const LabelVector& a, const LabelVector& b) {
  auto sa = to_bit_string(a);
  auto sb = to_bit_string(b);
  if (sb < sa) std::swap(sa, sb);
  return {std::move(sa), std::move(sb)};
}

LabelVector random_label(Rng& rng, Index K) {
  LabelVector y(K);
  std::uint64_t word = 0;
  for (Index k = 0; k < K; ++k) {
    if (k % 64 == 0) word = rng.bits();
    y[k] = static_cast<std::uint8_t>(word & 1U);
    word >>= 1;
  }
  return y;
}

/// Label whose bits spell `value` with bit 0 most significant, so integer
/// order equals lexicographic order.
LabelVector label_from_int(std::uint64_t value, Index K) {
  LabelVector y(K);
  for (Index k = 0; k < K; ++k) y[K - 1 - k] = static_cast<std::uint8_t>((value >> k) & 1U);
  return y;
}

std::vector<LabelVector> dedup_sorted(std::span<const LabelVector> labels) {
  std::set<LabelVector, LabelLess> s(labels.begin(), labels.end());
  return {s.begin(), s.end()};
}

std::vector<ReferencePair> all_pairs(const std::vector<LabelVector>& sorted) {
  std::vector<ReferencePair> pairs;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = i + 1; j < sorted.size(); ++j) pairs.push_back({sorted[i], sorted[j]});
  }
  return pairs;
}

}  // namespace

Codebook exhaustive_codebook(std::span<const LabelVector> labels) {
  const auto sorted = dedup_sorted(labels);
  if (sorted.size() < 2) throw Error("exhaustive codebook needs at least 2 distinct labels");
  Codebook cb;
  cb.num_labels = sorted.front().size();
  cb.source = PairSource::empirical;
  cb.pairs = all_pairs(sorted);
  cb.requested = cb.pairs.size();
  return cb;
}

Codebook sample_codebook(std::size_t M, Index K, PairSource source,
                         std::span<const LabelVector> pool, std::uint64_t seed) {
  if (M < 1) throw Error("code length must be at least 1");
  if (K < 1) throw Error("label count must be positive");

  Codebook cb;
  cb.num_labels = K;
  cb.source = source;
  cb.seed = seed;
  cb.requested = M;
  Rng rng(seed);

  std::vector<LabelVector> distinct;
  std::uint64_t universe = std::numeric_limits<std::uint64_t>::max();
  if (source == PairSource::empirical) {
    for (const auto& y : pool) require_same_length(y.size(), K, "pool label");
    distinct = dedup_sorted(pool);
    if (distinct.size() < 2) throw Error("empirical codebook needs at least 2 distinct labels");
    universe = distinct.size() * (distinct.size() - 1) / 2;
  } else if (K <= 31) {
    const std::uint64_t n = std::uint64_t{1} << K;
    universe = n * (n - 1) / 2;
  }

  if (M >= universe) {
    if (source == PairSource::uniform) {
      const std::uint64_t n = std::uint64_t{1} << K;
      distinct.reserve(n);
      for (std::uint64_t v = 0; v < n; ++v) distinct.push_back(label_from_int(v, K));
    }
    cb.pairs = all_pairs(distinct);
    return cb;
  }

  std::set<PairKey> seen;
  cb.pairs.reserve(M);
  while (cb.pairs.size() < M) {
    LabelVector a;
    LabelVector b;
    if (source == PairSource::uniform) {
      a = random_label(rng, K);
      do {
        b = random_label(rng, K);
      } while (label_equal(a, b));
    } else {
      const auto i = rng.below(distinct.size());
      std::uint64_t j;
      do {
        j = rng.below(distinct.size());
      } while (j == i);
      a = distinct[i];
      b = distinct[j];
    }
    if (seen.insert(unordered_key(a, b)).second) cb.pairs.push_back({std::move(a), std::move(b)});
  }
  return cb;
}

BitTargets encode_targets(const LabelVector& y, const Codebook& cb, const CostFunction& cost) {
  require_same_length(y.size(), cb.num_labels, "encode");
  const auto M = static_cast<Index>(cb.size());
  BitTargets t{CodeVector(M), Eigen::VectorXd(M)};
  for (Index i = 0; i < M; ++i) {
    const auto& p = cb.pairs[static_cast<std::size_t>(i)];
    const double ca = cost(y, p.alpha);
    const double cb_ = cost(y, p.beta);
    t.code[i] = ca < cb_ ? 1.0 : (ca > cb_ ? 0.0 : 0.5);
    t.weights[i] = std::abs(ca - cb_);
  }
  return t;
}

CodeVector encode(const LabelVector& y, const Codebook& cb, const CostFunction& cost) {
  return encode_targets(y, cb, cost).code;
}

Eigen::VectorXd bit_weights(const LabelVector& y, const Codebook& cb, const CostFunction& cost) {
  return encode_targets(y, cb, cost).weights;
}

CodeVector encode_ovo(const LabelVector& y, const Codebook& cb) {
  require_same_length(y.size(), cb.num_labels, "encode_ovo");
  CodeVector b(static_cast<Index>(cb.size()));
  for (std::size_t i = 0; i < cb.size(); ++i) {
    const auto& p = cb.pairs[i];
    b[static_cast<Index>(i)] = label_equal(y, p.alpha) ? 1.0 : (label_equal(y, p.beta) ? 0.0 : 0.5);
  }
  return b;
}

void write_codebook(std::ostream& out, const Codebook& cb) {
  out << "K=" << cb.num_labels << " M=" << cb.size() << " seed=" << cb.seed
      << " source=" << to_string(cb.source) << '\n';
  for (const auto& p : cb.pairs) out << to_bit_string(p.alpha) << '|' << to_bit_string(p.beta) << '\n';
}

namespace {

std::string header_value(const std::string& token, const std::string& key) {
  if (token.rfind(key + "=", 0) != 0) throw Error("codebook header: expected " + key + "=");
  return token.substr(key.size() + 1);
}

}  // namespace

Codebook read_codebook(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("codebook: missing header");
  std::istringstream hs(line);
  std::string tk, tm, ts, tsrc;
  hs >> tk >> tm >> ts >> tsrc;
  Codebook cb;
  std::size_t M = 0;
  if (!parse_int(header_value(tk, "K"), cb.num_labels) || !parse_int(header_value(tm, "M"), M) ||
      !parse_int(header_value(ts, "seed"), cb.seed) || cb.num_labels < 1 || M < 1) {
    throw Error("codebook: malformed header '" + line + "'");
  }
  cb.source = pair_source_from_string(header_value(tsrc, "source"));
  cb.requested = M;
  cb.pairs.reserve(M);
  for (std::size_t i = 0; i < M; ++i) {
    if (!std::getline(in, line)) throw Error("codebook: truncated pair list");
    const auto bar = line.find('|');
    if (bar == std::string::npos) throw Error("codebook: malformed pair '" + line + "'");
    ReferencePair p{from_bit_string(line.substr(0, bar)), from_bit_string(line.substr(bar + 1))};
    require_same_length(p.alpha.size(), cb.num_labels, "codebook pair");
    require_same_length(p.beta.size(), cb.num_labels, "codebook pair");
    if (label_equal(p.alpha, p.beta)) throw Error("codebook: pair with identical references");
    cb.pairs.push_back(std::move(p));
  }
  return cb;
}

}  // namespace csrpe
