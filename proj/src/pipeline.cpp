#include "hopeal/pipeline.hpp"

#include <unordered_map>
#include <unordered_set>

#include "hopeal/csv.hpp"
#include "hopeal/error.hpp"

namespace hopeal {
namespace {

std::vector<Label> labels_of(std::span<const LabeledDocument> docs) {
  std::vector<Label> ys;
  ys.reserve(docs.size());
  for (const auto& d : docs) ys.push_back(d.label);
  return ys;
}

}  // namespace

LogisticPipeline train_logistic(std::span<const LabeledDocument> docs, const TrainConfig& cfg,
                                std::size_t max_tokens) {
  std::vector<Document> plain;
  plain.reserve(docs.size());
  for (const auto& d : docs) plain.push_back(d.doc);
  LogisticPipeline p{Vectorizer::fit(std::span<const Document>(plain), max_tokens), {}};
  const auto xs = p.vectorizer.transform(plain);
  const auto ys = labels_of(docs);
  p.model = train(xs, ys, cfg);
  p.model.vectorizer_fingerprint = p.vectorizer.fingerprint();
  return p;
}

void check_compatible(const Vectorizer& vectorizer, const LinearModel& model) {
  if (model.vectorizer_fingerprint != vectorizer.fingerprint()) {
    throw InputError("model was trained with vectorizer " + model.vectorizer_fingerprint + ", not " +
                     vectorizer.fingerprint());
  }
  if (model.dimension() != vectorizer.dimension()) {
    throw InputError("model dimension " + std::to_string(model.dimension()) + " does not match vocabulary size " +
                     std::to_string(vectorizer.dimension()));
  }
}

ScorerFactory logistic_factory(std::shared_ptr<const Vectorizer> vectorizer, TrainConfig cfg) {
  const std::string fp = vectorizer->fingerprint();
  Featurizer featurizer = [vectorizer](const Document& d) { return vectorizer->transform(d); };
  return logistic_factory(std::move(featurizer), cfg, fp);
}

ScorerFactory logistic_factory(Featurizer featurizer, TrainConfig cfg, std::string fingerprint) {
  return [featurizer = std::move(featurizer), cfg,
          fingerprint = std::move(fingerprint)](std::span<const LabeledDocument> labeled) -> std::shared_ptr<Scorer> {
    std::vector<SparseVector> xs;
    xs.reserve(labeled.size());
    for (const auto& d : labeled) xs.push_back(featurizer(d.doc));
    LinearModel model = train(xs, labels_of(labeled), cfg);
    model.vectorizer_fingerprint = fingerprint;
    return std::make_shared<LogisticScorer>(featurizer, std::move(model));
  };
}

Evaluation evaluate(Scorer& scorer, std::span<const LabeledDocument> docs) {
  if (docs.empty()) throw InputError("nothing to evaluate");
  std::vector<Document> plain;
  plain.reserve(docs.size());
  for (const auto& d : docs) plain.push_back(d.doc);
  const auto probs = scorer.score_batch(plain);
  if (probs.size() != docs.size()) throw InputError("scorer returned a wrong number of distributions");
  std::vector<Label> pred;
  pred.reserve(probs.size());
  for (const auto& p : probs) pred.push_back(decide(p));
  const auto gold = labels_of(docs);
  Evaluation e;
  e.confusion = confusion(gold, pred);
  e.report = metrics(e.confusion);
  return e;
}

CvResult cross_validate(const Corpus& corpus, std::size_t k, std::uint64_t rng_seed, const TrainConfig& cfg,
                        std::size_t max_tokens) {
  CvResult result;
  result.split = stratified_kfold(corpus, k, rng_seed);
  const auto docs = corpus.labeled_documents();

  std::unordered_map<std::string, std::size_t> fold_of;
  for (std::size_t f = 0; f < result.split.folds.size(); ++f) {
    for (const auto& id : result.split.folds[f]) fold_of[id] = f;
  }

  std::vector<MetricsReport> reports;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<LabeledDocument> train_docs, held_out;
    for (const auto& d : docs) (fold_of.at(d.doc.id) == f ? held_out : train_docs).push_back(d);
    auto pipeline = train_logistic(train_docs, cfg, max_tokens);
    auto vec = std::make_shared<const Vectorizer>(std::move(pipeline.vectorizer));
    LogisticScorer scorer([vec](const Document& d) { return vec->transform(d); }, std::move(pipeline.model));
    result.folds.push_back(evaluate(scorer, held_out));
    reports.push_back(result.folds.back().report);
  }
  result.mean = mean_report(reports);
  return result;
}

std::string predictions_csv(std::span<const Document> docs, std::span<const Label> labels) {
  if (docs.size() != labels.size()) throw InputError("document and label counts differ");
  std::string out = "id,label\n";
  for (std::size_t i = 0; i < docs.size(); ++i) {
    out += csv::format_row({docs[i].id, std::string(label_name(labels[i]))});
  }
  return out;
}

}  // namespace hopeal
