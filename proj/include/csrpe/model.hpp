#pragma once

#include "csrpe/code.hpp"
#include "csrpe/costs.hpp"
#include "csrpe/data.hpp"
#include "csrpe/learners.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace csrpe {

inline constexpr std::size_t kDefaultCodeLength = 3000;

struct ModelConfig {
  std::size_t code_length = kDefaultCodeLength;
  PairSource source = PairSource::uniform;
  LearnerConfig learner;
  std::uint64_t seed = 0;
  int threads = 1;
  /// Added to the distinct training labels to form the relevant set.
  std::vector<LabelVector> extra_relevant;
};

enum class CodeMode { hard, soft };

/// Codebook, one binary classifier per code bit, and the relevant set with
/// its precomputed codes. Immutable once built.
class CsrpeModel {
 public:
  CsrpeModel(Codebook codebook, std::vector<BinaryClassifier> bits,
             std::vector<LabelVector> relevant, CostFunction cost, Index num_features,
             std::string learner_name);

  const Codebook& codebook() const { return codebook_; }
  const std::vector<BinaryClassifier>& bits() const { return bits_; }
  const std::vector<LabelVector>& relevant() const { return relevant_; }
  /// Row j is encode(relevant()[j]).
  const Eigen::MatrixXd& relevant_codes() const { return relevant_codes_; }
  const CostFunction& cost() const { return cost_; }
  Index num_labels() const { return codebook_.num_labels; }
  Index num_features() const { return num_features_; }
  std::size_t code_length() const { return bits_.size(); }
  const std::string& learner_name() const { return learner_name_; }

 private:
  Codebook codebook_;
  std::vector<BinaryClassifier> bits_;
  std::vector<LabelVector> relevant_;
  Eigen::MatrixXd relevant_codes_;
  CostFunction cost_;
  Index num_features_;
  std::string learner_name_;
};

/// Samples a codebook, trains every bit on its weighted view of the data
/// (cost ties dropped) and stores the relevant set. `cost` must be a loss.
CsrpeModel train_csrpe(const Dataset& train, const CostFunction& cost, const ModelConfig& config);

CodeVector predict_code(const CsrpeModel& m, const Eigen::Ref<const Eigen::VectorXd>& x,
                        CodeMode mode = CodeMode::hard);
CodeVector predict_code(const CsrpeModel& m, const FeatureVector& x, CodeMode mode = CodeMode::hard);

/// Index into relevant() of the nearest code; ties go to the lower index.
std::size_t decode_index(const CsrpeModel& m, const CodeVector& b);
LabelVector decode(const CsrpeModel& m, const CodeVector& b);

LabelVector predict(const CsrpeModel& m, const FeatureVector& x, CodeMode mode = CodeMode::hard);
std::vector<LabelVector> predict_all(const CsrpeModel& m, const Dataset& ds,
                                     CodeMode mode = CodeMode::hard);

/// Text format, magic line "CSRPE1".
void write_model(std::ostream& out, const CsrpeModel& m);
CsrpeModel read_model(std::istream& in);
void save_model(const CsrpeModel& m, const std::filesystem::path& path);
CsrpeModel load_model(const std::filesystem::path& path);

}  // namespace csrpe
