#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "hopeal/corpus.hpp"

namespace hopeal {

inline constexpr std::size_t kDefaultMaxTokens = 128;

/// Whitespace tokens of already-normalized text, truncated to max_tokens.
std::vector<std::string> tokenize(std::string_view text, std::size_t max_tokens = kDefaultMaxTokens);

/// Sparse vector with strictly increasing indices below dim() and no stored
/// zeros.
class SparseVector {
 public:
  struct Entry {
    std::uint32_t index;
    double weight;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  SparseVector() = default;
  explicit SparseVector(std::size_t dim) : dim_(dim) {}

  /// Sorts by index, drops zero weights. Throws InputError on a duplicate or
  /// out-of-range index.
  static SparseVector from_entries(std::size_t dim, std::vector<Entry> entries);
  /// Keeps the nonzero components of a dense vector.
  static SparseVector from_dense(std::span<const double> dense);

  std::size_t dim() const { return dim_; }
  std::size_t nnz() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  double dot(std::span<const double> dense) const;
  double norm() const;
  bool all_finite() const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Entry> entries_;
};

/// Term to column mapping in first-appearance order, with document
/// frequencies.
class Vocabulary {
 public:
  std::size_t size() const { return terms_.size(); }
  std::optional<std::uint32_t> index_of(std::string_view term) const;
  const std::string& term(std::uint32_t index) const { return terms_.at(index); }
  std::size_t df(std::uint32_t index) const { return df_.at(index); }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::size_t>& dfs() const { return df_; }

  /// Adds the term if new; returns its index.
  std::uint32_t intern(const std::string& term);
  void add_document_occurrence(std::uint32_t index) { ++df_.at(index); }
  void set_df(std::uint32_t index, std::size_t df) { df_.at(index) = df; }

 private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// Unigram TF-IDF embedding. Immutable after fit, so transform() may be
/// called concurrently.
///
///   idf(t)    = ln((1 + n_docs) / (1 + df(t))) + 1
///   weight(t) = count of t in the truncated token list * idf(t)
///
/// and the result is L2-normalized unless it is the zero vector.
class Vectorizer {
 public:
  /// Throws InputError if texts is empty or every text tokenizes to nothing.
  static Vectorizer fit(std::span<const std::string> normalized_texts,
                        std::size_t max_tokens = kDefaultMaxTokens);
  static Vectorizer fit(std::span<const Document> docs, std::size_t max_tokens = kDefaultMaxTokens);
  static Vectorizer fit(const Corpus& corpus, std::size_t max_tokens = kDefaultMaxTokens);

  SparseVector transform_text(std::string_view normalized_text) const;
  SparseVector transform(const Document& doc) const { return transform_text(doc.text); }
  std::vector<SparseVector> transform(std::span<const Document> docs) const;

  const Vocabulary& vocabulary() const { return vocab_; }
  std::size_t dimension() const { return vocab_.size(); }
  std::size_t n_docs() const { return n_docs_; }
  std::size_t max_tokens() const { return max_tokens_; }
  double idf(std::uint32_t index) const { return idf_.at(index); }
  const std::vector<double>& idf() const { return idf_; }

  /// Stable 64-bit FNV-1a digest of terms, idf bit patterns, n_docs and
  /// max_tokens, rendered as "fnv1a64:<16 hex digits>".
  std::string fingerprint() const;

  /// {terms, df, idf, n_docs, max_tokens}
  nlohmann::ordered_json to_json() const;
  static Vectorizer from_json(const nlohmann::json& j);

 private:
  Vocabulary vocab_;
  std::vector<double> idf_;
  std::size_t n_docs_ = 0;
  std::size_t max_tokens_ = kDefaultMaxTokens;
};

double smoothed_idf(std::size_t n_docs, std::size_t df);

}  // namespace hopeal
