#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hopeal/corpus.hpp"

namespace hopeal {

/// 2x2 counts indexed [gold][predicted], class order [NotHope, Hope].
struct ConfusionMatrix {
  std::array<std::array<std::size_t, 2>, 2> counts{};

  std::size_t at(Label gold, Label pred) const { return counts[to_numeric(gold)][to_numeric(pred)]; }
  std::size_t total() const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Throws InputError on empty input or length mismatch.
ConfusionMatrix confusion(std::span<const Label> gold, std::span<const Label> pred);

/// Aligned plain-text grid with gold classes as rows.
std::string render_confusion(const ConfusionMatrix& cm);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct MetricsReport {
  double accuracy = 0.0;
  std::array<ClassMetrics, 2> per_class{};  // [NotHope, Hope]
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;

  const ClassMetrics& of(Label l) const { return per_class[to_numeric(l)]; }
};

/// Zero denominators give 0 for precision, recall and F1. Weighted averages
/// use gold support. Throws InputError on an empty matrix.
MetricsReport metrics(const ConfusionMatrix& cm);

/// Unweighted mean of every score over the reports; supports are summed.
MetricsReport mean_report(std::span<const MetricsReport> reports);

/// Full-precision JSON.
nlohmann::ordered_json report_to_json(const MetricsReport& r);

struct ReportTag {
  std::string model;
  std::string language;
  std::string split;
};

/// Header matching report_csv_row.
std::string report_csv_header();
/// Scores rounded to 3 decimals; LF-terminated.
std::string report_csv_row(const ReportTag& tag, const MetricsReport& r);

struct FoldSplit {
  std::size_t k = 0;
  std::vector<std::vector<std::string>> folds;  // ids, in corpus order
};

/// Per-class seeded shuffle followed by round-robin assignment; each class
/// continues where the previous one stopped so fold sizes also stay within
/// one of each other. Throws InputError when k < 2, a document is unlabeled
/// or a present class has fewer than k members.
FoldSplit stratified_kfold(const Corpus& corpus, std::size_t k, std::uint64_t rng_seed);

}  // namespace hopeal
