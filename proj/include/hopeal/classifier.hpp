#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "hopeal/corpus.hpp"
#include "hopeal/features.hpp"

namespace hopeal {

/// Two-class probability distribution in fixed order [NotHope, Hope].
class ProbDist {
 public:
  static constexpr std::size_t kClasses = 2;
  /// Tolerance on the sum of externally supplied pairs.
  static constexpr double kSumTolerance = 1e-6;

  ProbDist() = default;

  /// {1 - p, p}. Throws InputError unless p is finite and in [0, 1].
  static ProbDist from_hope(double p_hope);

  /// Validates a raw pair: both finite and in [0, 1], sum within
  /// kSumTolerance of 1. A pair that does not sum to exactly 1 is divided by
  /// its sum. Throws InputError otherwise.
  static ProbDist from_pair(double p_not_hope, double p_hope);

  double not_hope() const { return probs_[0]; }
  double hope() const { return probs_[1]; }
  double operator[](std::size_t i) const { return probs_.at(i); }
  const std::array<double, kClasses>& probs() const { return probs_; }

  friend bool operator==(const ProbDist&, const ProbDist&) = default;

 private:
  std::array<double, kClasses> probs_{0.5, 0.5};
};

/// Numerically safe logistic function.
double sigmoid(double z);

/// Hope iff p(Hope) > 0.5; an exact tie resolves to NotHope.
Label decide(const ProbDist& p);

struct TrainConfig {
  double lambda = 1.0;
  int max_iters = 500;
  double grad_tol = 1e-6;
  std::uint64_t seed = 0;  // optimizer is deterministic; recorded for provenance

  void validate() const;
};

struct LinearModel {
  static constexpr int kFormatVersion = 1;

  std::vector<double> weights;
  double bias = 0.0;
  double lambda = 0.0;
  std::string vectorizer_fingerprint;

  std::size_t dimension() const { return weights.size(); }

  /// {format_version, weights, bias, lambda, vectorizer_fingerprint}
  nlohmann::ordered_json to_json() const;
  static LinearModel from_json(const nlohmann::json& j);

  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

/// J(w, b) = (1/n) sum_i log(1 + exp(-s_i (w.x_i + b))) + (lambda/2) |w|^2
/// with s_i = +1 for Hope and -1 for NotHope. The bias is not penalized.
///
/// Parameters are packed as [w_0 .. w_{d-1}, b].
class LogisticObjective {
 public:
  /// Throws InputError on empty input, size or dimension mismatch, or
  /// non-finite feature values.
  LogisticObjective(std::span<const SparseVector> xs, std::span<const Label> ys, double lambda);

  std::size_t dimension() const { return dim_; }
  std::size_t n() const { return xs_.size(); }

  double value(std::span<const double> params) const;
  /// Writes the gradient into grad (size dimension() + 1) and returns J.
  double value_and_gradient(std::span<const double> params, std::span<double> grad) const;

 private:
  std::span<const SparseVector> xs_;
  std::vector<double> signs_;
  double lambda_;
  std::size_t dim_;
};

struct TrainResult {
  LinearModel model;
  /// Objective after every accepted iteration, starting with J(0, 0).
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
  double grad_inf_norm = 0.0;
};

/// Limited-memory BFGS from the zero point with Armijo backtracking; every
/// accepted step strictly lowers J. Stops once the infinity norm of the
/// gradient is at most cfg.grad_tol or after cfg.max_iters iterations.
///
/// Throws InputError if xs is empty, only one class is present, dimensions
/// disagree or a feature is non-finite.
TrainResult train_detailed(std::span<const SparseVector> xs, std::span<const Label> ys,
                           const TrainConfig& cfg);
LinearModel train(std::span<const SparseVector> xs, std::span<const Label> ys, const TrainConfig& cfg);

/// p(Hope) = sigmoid(w.x + b). Throws InputError on dimension mismatch.
ProbDist predict_proba(const LinearModel& m, const SparseVector& x);
Label predict(const LinearModel& m, const SparseVector& x);

/// Anything that maps documents to class probabilities. score_batch must
/// return one distribution per input, in input order, and be deterministic
/// for a fixed scorer state.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::vector<ProbDist> score_batch(std::span<const Document> docs) = 0;
};

using Featurizer = std::function<SparseVector(const Document&)>;

/// Logistic model paired with the featurizer it was trained on.
class LogisticScorer : public Scorer {
 public:
  LogisticScorer(Featurizer featurizer, LinearModel model)
      : featurizer_(std::move(featurizer)), model_(std::move(model)) {}

  std::vector<ProbDist> score_batch(std::span<const Document> docs) override;
  const LinearModel& model() const { return model_; }

 private:
  Featurizer featurizer_;
  LinearModel model_;
};

/// Fixed probabilities looked up by raw text; the in-process twin of a
/// table-driven external scorer.
class TableScorer : public Scorer {
 public:
  explicit TableScorer(std::unordered_map<std::string, ProbDist> table) : table_(std::move(table)) {}

  /// Throws InputError for a text missing from the table.
  std::vector<ProbDist> score_batch(std::span<const Document> docs) override;

 private:
  std::unordered_map<std::string, ProbDist> table_;
};

}  // namespace hopeal
