#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "hopeal/classifier.hpp"
#include "hopeal/corpus.hpp"
#include "hopeal/random.hpp"

namespace hopeal {

enum class Strategy { Entropy, Random, Margin };

Strategy parse_strategy(std::string_view s);
std::string_view strategy_name(Strategy s);

struct ALConfig {
  std::size_t batch_k = 20;
  std::size_t max_rounds = 5;
  std::size_t min_rounds = 3;
  double plateau_delta = 0.002;
  double seed_fraction = 0.10;
  Strategy strategy = Strategy::Entropy;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// Shannon entropy in nats, with 0 ln 0 = 0.
double entropy(const ProbDist& p);

/// Strict weak order on document ids: two all-digit ids compare by numeric
/// value (then by length, so "007" sorts after "7"); otherwise bytewise.
bool id_less(std::string_view a, std::string_view b);

/// Picks min(k, |pool|) documents from already-computed scores.
///   Entropy: highest entropy first.
///   Margin:  smallest |p(Hope) - p(NotHope)| first.
///   Random:  uniform sample without replacement drawn from rng.
/// Entropy and Margin break ties by ascending id (id_less). Returns ids in
/// selection order. Throws InputError on an empty pool or size mismatch.
std::vector<std::string> select_from_scores(std::span<const Document> pool, std::span<const ProbDist> scores,
                                            Strategy strategy, std::size_t k, Rng& rng);

/// Scores the pool and selects a batch; Random draws from Rng(cfg.rng_seed).
std::vector<std::string> select_batch(Scorer& scorer, std::span<const Document> pool, const ALConfig& cfg);

/// Ground-truth lookup standing in for a human annotator.
class Oracle {
 public:
  explicit Oracle(std::unordered_map<std::string, Label> labels) : labels_(std::move(labels)) {}
  static Oracle from(std::span<const LabeledDocument> docs);

  bool knows(const std::string& id) const { return labels_.contains(id); }
  /// Throws InputError for an unknown id.
  Label reveal(const std::string& id) const;

 private:
  std::unordered_map<std::string, Label> labels_;
};

struct RoundRecord {
  std::size_t round = 0;
  std::size_t labeled_size = 0;
  /// Accuracy of the retrained model on the remaining pool; absent once the
  /// pool is exhausted.
  std::optional<double> pool_accuracy;
  std::vector<std::string> selected_ids;
};

enum class StopReason { MaxRounds, PoolExhausted, Plateau };

std::string_view stop_reason_name(StopReason r);

struct ALState {
  std::vector<LabeledDocument> labeled;
  std::vector<Document> pool;  // labels withheld; only the oracle knows them
  std::size_t round = 0;
  std::vector<RoundRecord> history;
  /// Pool accuracy of the seed-trained model.
  std::optional<double> initial_pool_accuracy;
  StopReason stop_reason = StopReason::MaxRounds;
};

/// Trains a fresh scorer on a labeled set.
using ScorerFactory = std::function<std::shared_ptr<Scorer>(std::span<const LabeledDocument>)>;

struct ALResult {
  std::shared_ptr<Scorer> model;
  ALState state;
};

/// Stratified seed split of the training set: per class,
/// floor(count * seed_fraction) documents drawn by a seeded shuffle, kept in
/// training-set order. Throws InputError if any class would get no seed
/// document.
std::pair<std::vector<LabeledDocument>, std::vector<Document>> stratified_seed_split(
    std::span<const LabeledDocument> train_set, double seed_fraction, Rng& rng);

/// Pool-based active learning with a simulated oracle.
///
/// The seed model is trained on a stratified seed split. Each round scores
/// the pool with the current model, moves the selected batch (labels taken
/// from the oracle) to the end of the labeled set, retrains from scratch and
/// records the new model's accuracy on what is left of the pool. The loop
/// ends after max_rounds, when the pool runs out, or once at least
/// min_rounds have run and the pool accuracy improved by less than
/// plateau_delta over the previous round.
///
/// Throws InputError when the seed split fails, ids repeat or the oracle
/// does not cover the training set.
ALResult run_loop(std::span<const LabeledDocument> train_set, const ScorerFactory& factory, const Oracle& oracle,
                  const ALConfig& cfg);

/// {round, labeled_size, pool_accuracy, selected_ids}
nlohmann::ordered_json round_to_json(const RoundRecord& r);
/// One compact JSON object per line, LF-terminated.
std::string history_to_jsonl(std::span<const RoundRecord> history);

}  // namespace hopeal
