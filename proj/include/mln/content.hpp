#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "mln/graph.hpp"

namespace mln {

// ---- personality traits ---------------------------------------------------

enum class Trait : std::size_t { opn, con, ext, agr, neu };
inline constexpr std::array<std::string_view, 5> kTraitNames = {"opn", "con", "ext", "agr", "neu"};

struct TraitScores {
  NodeId user = 0;
  std::array<std::optional<double>, 5> scores;  // indexed by Trait
};

struct TraitThresholds {
  std::array<double, 5> means = {3.8, 3.5, 3.6, 3.55, 2.8};
};

/// Yes iff score >= mean; nullopt where the score is missing.
std::array<std::optional<bool>, 5> threshold_traits(const TraitScores& s,
                                                    const TraitThresholds& t = {});

/// One Yes/No layer per trait, named after the trait.
std::vector<PartitionLayer> build_trait_layers(std::span<const TraitScores> scores,
                                               NodeId node_count,
                                               const TraitThresholds& t = {});

// ---- text features --------------------------------------------------------

struct Lexicons {
  std::set<std::string> positive;
  std::set<std::string> negative;
  std::set<std::string> negations;
};

/// One lowercase word per non-blank line.
std::set<std::string> load_word_list(std::istream& in);

/// Lowercases ASCII and splits on anything that is not alphanumeric, an
/// apostrophe or a non-ASCII byte; apostrophes at token edges are dropped so
/// "don't" survives intact.
std::vector<std::string> tokenize(std::string_view doc);

struct PolarityFeatures {
  std::size_t positive = 0;
  std::size_t negative = 0;
  bool negation = false;

  friend bool operator==(const PolarityFeatures&, const PolarityFeatures&) = default;
};

PolarityFeatures polarity_features(std::string_view doc, const Lexicons& lex);

enum class NgramLevel { word, character };

/// Word n-grams are space-joined tokens; character n-grams run over the
/// lowercased text with whitespace runs collapsed to one space.
std::vector<std::string> extract_ngrams(std::string_view doc, NgramLevel level, unsigned n);

struct NgramTerm {
  std::string text;
  unsigned n = 0;
  double idf = 0.0;
  double score = 0.0;  // summed tf-idf over the fitting corpus
};

struct NgramVocabulary {
  NgramLevel level = NgramLevel::word;
  unsigned n_min = 1;
  unsigned n_max = 5;
  std::size_t top_k = 1000;
  std::vector<NgramTerm> terms;  // ordered by n, then rank

  std::size_t size() const { return terms.size(); }
  /// Column of a term, or nullopt when out of vocabulary.
  std::optional<std::size_t> column(const std::string& text) const;
  void rebuild_index();

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

/// For each n in [n_min, n_max], keeps the top_k n-grams by summed tf-idf
/// with tf-idf(t, d) = count(t, d) * ln(N / df(t)); ties break
/// lexicographically.
NgramVocabulary fit_ngram_vocab(std::span<const std::string> corpus, NgramLevel level,
                                unsigned n_min = 1, unsigned n_max = 5, std::size_t top_k = 1000);

struct FeaturePipeline {
  NgramVocabulary words;
  NgramVocabulary chars;
  Lexicons lexicons;
  // Width of caller-supplied features appended after the text blocks.
  std::size_t extra_width = 0;

  static constexpr std::size_t kPolarityWidth = 3;
  std::size_t dimension() const {
    return kPolarityWidth + words.size() + chars.size() + extra_width;
  }
};

/// Layout: [positive, negative, negation | word tf-idf | char tf-idf | extra].
Eigen::VectorXd vectorize(std::string_view doc, const FeaturePipeline& pipeline,
                          std::span<const double> extra = {});

// ---- privacy-concern classifier ---------------------------------------------

enum class PrivacyLabel : int { LoPC = 0, MePC = 1, HiPC = 2 };
inline constexpr int kPrivacyClasses = 3;

std::string_view to_string(PrivacyLabel label);
std::optional<PrivacyLabel> parse_privacy_label(std::string_view text);

/// input -> ReLU(h1) -> ReLU(h2) -> softmax(3).
struct MlpModel {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;
  Eigen::MatrixXd w3;
  Eigen::VectorXd b3;

  static MlpModel zeros(Eigen::Index input, Eigen::Index h1, Eigen::Index h2);
  /// He-normal weights, zero biases.
  static MlpModel random(Eigen::Index input, Eigen::Index h1, Eigen::Index h2, std::uint64_t seed);

  Eigen::Index input_size() const { return w1.cols(); }
  void validate() const;
  std::size_t parameter_count() const;
  /// Visits every parameter (weights then bias, layer by layer).
  void for_each_parameter(const std::function<void(double&)>& fn);
};

Eigen::Vector3d mlp_forward(const MlpModel& m, const Eigen::VectorXd& x);
PrivacyLabel mlp_predict(const MlpModel& m, const Eigen::VectorXd& x);

struct Example {
  Eigen::VectorXd x;
  PrivacyLabel y = PrivacyLabel::MePC;
};

struct MlpGradients {
  Eigen::MatrixXd w1, w2, w3;
  Eigen::VectorXd b1, b2, b3;
  void for_each(const std::function<void(double&)>& fn);
};

/// Mean cross-entropy over the batch; fills gradients when asked.
double mlp_loss(const MlpModel& m, std::span<const Example> batch, MlpGradients* grads = nullptr);

struct TrainOptions {
  Eigen::Index hidden1 = 64;
  Eigen::Index hidden2 = 32;
  double learning_rate = 0.05;
  std::size_t epochs = 100;
  std::size_t batch_size = 16;
  std::uint64_t seed = 1;
};

struct TrainResult {
  MlpModel model;
  std::vector<double> epoch_loss;  // full-set loss after each epoch
};

/// Mini-batch gradient descent on cross-entropy. The initial weights equal
/// MlpModel::random(input, h1, h2, seed).
TrainResult mlp_train(std::span<const Example> data, const TrainOptions& options = {});

/// Max over parameters of |analytic - central difference| /
/// max(|analytic|, |numeric|, 1e-8) with step 1e-5. `tamper` may alter the
/// analytic gradients first.
double gradient_check(const MlpModel& m, std::span<const Example> batch,
                      const std::function<void(MlpGradients&)>& tamper = {});

/// Three-group layer keyed by label name.
PartitionLayer build_privacy_layer(const std::map<NodeId, PrivacyLabel>& predictions,
                                   NodeId node_count, std::string name = "privacy");

}  // namespace mln
