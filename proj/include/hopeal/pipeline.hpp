#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hopeal/active_learning.hpp"
#include "hopeal/classifier.hpp"
#include "hopeal/corpus.hpp"
#include "hopeal/evaluation.hpp"
#include "hopeal/features.hpp"

namespace hopeal {

/// TF-IDF vectorizer plus the logistic model trained on its features.
struct LogisticPipeline {
  Vectorizer vectorizer;
  LinearModel model;
};

LogisticPipeline train_logistic(std::span<const LabeledDocument> docs, const TrainConfig& cfg,
                                std::size_t max_tokens = kDefaultMaxTokens);

/// Throws InputError when the model was not trained on this vectorizer.
void check_compatible(const Vectorizer& vectorizer, const LinearModel& model);

/// Scorer factory for the active-learning loop: trains a logistic model on
/// the labeled set using a vectorizer fitted beforehand.
ScorerFactory logistic_factory(std::shared_ptr<const Vectorizer> vectorizer, TrainConfig cfg);

/// Same, over an arbitrary featurizer producing dim-dimensional vectors.
ScorerFactory logistic_factory(Featurizer featurizer, TrainConfig cfg, std::string fingerprint = {});

struct Evaluation {
  ConfusionMatrix confusion;
  MetricsReport report;
};

/// Throws InputError on an empty document list.
Evaluation evaluate(Scorer& scorer, std::span<const LabeledDocument> docs);

struct CvResult {
  FoldSplit split;
  std::vector<Evaluation> folds;
  MetricsReport mean;
};

/// Stratified k-fold: for each fold, fits a vectorizer and model on the other
/// folds and evaluates on the held-out one.
CvResult cross_validate(const Corpus& corpus, std::size_t k, std::uint64_t rng_seed, const TrainConfig& cfg,
                        std::size_t max_tokens = kDefaultMaxTokens);

/// Header "id,label" then one row per document in input order, labels
/// rendered "Hope" / "Not Hope", LF line endings.
std::string predictions_csv(std::span<const Document> docs, std::span<const Label> labels);

}  // namespace hopeal
