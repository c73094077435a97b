#include "hopeal/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <map>

#include "hopeal/error.hpp"
#include "hopeal/text.hpp"

namespace hopeal {

std::vector<std::string> tokenize(std::string_view text, std::size_t max_tokens) {
  std::vector<std::string> tokens = split_whitespace(text);
  if (tokens.size() > max_tokens) tokens.resize(max_tokens);
  return tokens;
}

SparseVector SparseVector::from_entries(std::size_t dim, std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.index < b.index; });
  SparseVector v(dim);
  v.entries_.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].index >= dim) throw InputError("sparse index " + std::to_string(entries[i].index) + " out of range");
    if (i > 0 && entries[i].index == entries[i - 1].index) {
      throw InputError("duplicate sparse index " + std::to_string(entries[i].index));
    }
    if (entries[i].weight != 0.0) v.entries_.push_back(entries[i]);
  }
  return v;
}

SparseVector SparseVector::from_dense(std::span<const double> dense) {
  SparseVector v(dense.size());
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) v.entries_.push_back({static_cast<std::uint32_t>(i), dense[i]});
  }
  return v;
}

double SparseVector::dot(std::span<const double> dense) const {
  double s = 0.0;
  for (const auto& e : entries_) s += e.weight * dense[e.index];
  return s;
}

double SparseVector::norm() const {
  double s = 0.0;
  for (const auto& e : entries_) s += e.weight * e.weight;
  return std::sqrt(s);
}

bool SparseVector::all_finite() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const Entry& e) { return std::isfinite(e.weight); });
}

std::optional<std::uint32_t> Vocabulary::index_of(std::string_view term) const {
  const auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t Vocabulary::intern(const std::string& term) {
  const auto [it, inserted] = index_.try_emplace(term, static_cast<std::uint32_t>(terms_.size()));
  if (inserted) {
    terms_.push_back(term);
    df_.push_back(0);
  }
  return it->second;
}

double smoothed_idf(std::size_t n_docs, std::size_t df) {
  return std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + static_cast<double>(df))) + 1.0;
}

Vectorizer Vectorizer::fit(std::span<const std::string> normalized_texts, std::size_t max_tokens) {
  if (normalized_texts.empty()) throw InputError("cannot fit a vectorizer on an empty corpus");
  if (max_tokens == 0) throw InputError("max_tokens must be at least 1");

  Vectorizer v;
  v.max_tokens_ = max_tokens;
  v.n_docs_ = normalized_texts.size();
  std::vector<std::uint32_t> seen;
  for (const auto& text : normalized_texts) {
    seen.clear();
    for (const auto& tok : tokenize(text, max_tokens)) seen.push_back(v.vocab_.intern(tok));
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (auto idx : seen) v.vocab_.add_document_occurrence(idx);
  }
  if (v.vocab_.size() == 0) throw InputError("every document tokenizes to nothing; vocabulary would be empty");

  v.idf_.resize(v.vocab_.size());
  for (std::uint32_t i = 0; i < v.vocab_.size(); ++i) v.idf_[i] = smoothed_idf(v.n_docs_, v.vocab_.df(i));
  return v;
}

Vectorizer Vectorizer::fit(std::span<const Document> docs, std::size_t max_tokens) {
  std::vector<std::string> texts;
  texts.reserve(docs.size());
  for (const auto& d : docs) texts.push_back(d.text);
  return fit(std::span<const std::string>(texts), max_tokens);
}

Vectorizer Vectorizer::fit(const Corpus& corpus, std::size_t max_tokens) {
  const auto docs = corpus.documents();
  return fit(std::span<const Document>(docs), max_tokens);
}

SparseVector Vectorizer::transform_text(std::string_view normalized_text) const {
  std::map<std::uint32_t, double> counts;
  for (const auto& tok : tokenize(normalized_text, max_tokens_)) {
    if (auto idx = vocab_.index_of(tok)) counts[*idx] += 1.0;
  }
  std::vector<SparseVector::Entry> entries;
  entries.reserve(counts.size());
  double sq = 0.0;
  for (const auto& [idx, count] : counts) {
    const double w = count * idf_[idx];
    entries.push_back({idx, w});
    sq += w * w;
  }
  if (sq > 0.0) {
    const double norm = std::sqrt(sq);
    for (auto& e : entries) e.weight /= norm;
  }
  return SparseVector::from_entries(dimension(), std::move(entries));
}

std::vector<SparseVector> Vectorizer::transform(std::span<const Document> docs) const {
  std::vector<SparseVector> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(transform(d));
  return out;
}

std::string Vectorizer::fingerprint() const {
  std::uint64_t h = 14695981039346656037ULL;
  auto mix_byte = [&h](unsigned char b) {
    h ^= b;
    h *= 1099511628211ULL;
  };
  auto mix_u64 = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) mix_byte(static_cast<unsigned char>(v >> (8 * i)));
  };
  mix_u64(n_docs_);
  mix_u64(max_tokens_);
  mix_u64(vocab_.size());
  for (std::uint32_t i = 0; i < vocab_.size(); ++i) {
    const auto& t = vocab_.term(i);
    mix_u64(t.size());
    for (char c : t) mix_byte(static_cast<unsigned char>(c));
    mix_u64(std::bit_cast<std::uint64_t>(idf_[i]));
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::ordered_json Vectorizer::to_json() const {
  nlohmann::ordered_json j;
  j["terms"] = vocab_.terms();
  j["df"] = vocab_.dfs();
  j["idf"] = idf_;
  j["n_docs"] = n_docs_;
  j["max_tokens"] = max_tokens_;
  return j;
}

Vectorizer Vectorizer::from_json(const nlohmann::json& j) {
  try {
    Vectorizer v;
    v.n_docs_ = j.at("n_docs").get<std::size_t>();
    v.max_tokens_ = j.at("max_tokens").get<std::size_t>();
    const auto terms = j.at("terms").get<std::vector<std::string>>();
    v.idf_ = j.at("idf").get<std::vector<double>>();
    if (terms.size() != v.idf_.size()) throw InputError("vectorizer: terms and idf differ in length");
    std::vector<std::size_t> df;
    if (j.contains("df")) {
      df = j.at("df").get<std::vector<std::size_t>>();
      if (df.size() != terms.size()) throw InputError("vectorizer: terms and df differ in length");
    } else {
      // Invert the idf formula.
      for (double idf : v.idf_) {
        df.push_back(static_cast<std::size_t>(std::llround((1.0 + v.n_docs_) / std::exp(idf - 1.0) - 1.0)));
      }
    }
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (v.vocab_.intern(terms[i]) != i) throw InputError("vectorizer: duplicate term '" + terms[i] + "'");
      v.vocab_.set_df(static_cast<std::uint32_t>(i), df[i]);
    }
    if (v.max_tokens_ == 0) throw InputError("vectorizer: max_tokens must be at least 1");
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("vectorizer: malformed JSON: ") + e.what());
  }
}

}  // namespace hopeal
