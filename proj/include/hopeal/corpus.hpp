#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace hopeal {

enum class Label { NotHope = 0, Hope = 1 };

inline constexpr int to_numeric(Label l) { return l == Label::Hope ? 1 : 0; }
inline constexpr Label label_from_numeric(int v) { return v == 1 ? Label::Hope : Label::NotHope; }

/// "Hope" / "Not Hope".
std::string_view label_name(Label l);

/// Trims surrounding whitespace and matches "hope" / "not hope" ignoring
/// ASCII case. Returns nullopt for anything else.
std::optional<Label> parse_label(std::string_view s);

struct Document {
  std::string id;
  std::string text;      // normalize(raw_text)
  std::string raw_text;

  static Document from_raw(std::string id, std::string raw);
};

struct LabeledDocument {
  Document doc;
  Label label;
};

struct Language {
  enum class Kind { English, German, Spanish, Urdu, Other };
  Kind kind = Kind::Other;
  std::string tag;  // only meaningful for Other

  /// Accepts English names or ISO 639-1 codes ("en", "German", "ur", ...);
  /// anything else becomes Other(s).
  static Language parse(std::string_view s);
  std::string name() const;
};

enum class Split { Train, Dev, Test };

Split parse_split(std::string_view s);
std::string_view split_name(Split s);

struct CorpusEntry {
  Document doc;
  std::optional<Label> label;
};

class Corpus {
 public:
  Corpus() = default;
  /// Throws InputError on duplicate ids or an unlabeled entry in a Train/Dev
  /// corpus.
  Corpus(std::string name, Language language, Split split, std::vector<CorpusEntry> entries);

  const std::string& name() const { return name_; }
  const Language& language() const { return language_; }
  Split split() const { return split_; }
  const std::vector<CorpusEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  bool fully_labeled() const;
  std::vector<Document> documents() const;
  /// Throws InputError if any entry lacks a label.
  std::vector<LabeledDocument> labeled_documents() const;

 private:
  std::string name_;
  Language language_;
  Split split_ = Split::Train;
  std::vector<CorpusEntry> entries_;
};

/// Column configuration for CSV ingestion. Without a header row, column
/// names are zero-based decimal indices.
struct CsvSchema {
  std::optional<std::string> id_column;  // absent: ids are zero-based row indices
  std::string text_column = "text";
  std::optional<std::string> label_column = "label";
  bool has_header = true;
};

struct LoadOptions {
  CsvSchema schema;
  Split split = Split::Train;
  std::optional<bool> require_labels;  // default: true for Train/Dev
  Language language;
  std::string name;
};

/// Reads a corpus from a UTF-8 CSV file. Rows are numbered from 1 (first
/// data row) in error messages. A file with no content at all yields an
/// empty corpus.
Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& options);
Corpus parse_corpus(std::string_view content, const LoadOptions& options);

/// Writes id,text,label (raw text, label column empty when unlabeled).
std::string corpus_to_csv(const Corpus& corpus);

struct CorpusStats {
  std::size_t total = 0;
  std::map<Label, std::size_t> per_class;
  std::map<Label, std::size_t> word_totals;

  /// Mean whitespace-token count of normalized text, absent for an empty class.
  std::optional<double> mean_words(Label l) const;
};

/// Throws InputError if the corpus has unlabeled entries.
CorpusStats corpus_stats(const Corpus& corpus);

/// {"total", "per_class", "mean_words_per_class"}; classes without documents
/// are omitted from mean_words_per_class.
nlohmann::ordered_json stats_to_json(const CorpusStats& stats);

}  // namespace hopeal
