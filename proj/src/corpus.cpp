#include "hopeal/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "hopeal/csv.hpp"
#include "hopeal/error.hpp"
#include "hopeal/text.hpp"

namespace hopeal {
namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\v\f";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c); });
  return out;
}

std::size_t column_index(const csv::Row& header, bool has_header, const std::string& name) {
  if (has_header) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InputError("missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  }
  std::size_t idx = 0;
  if (name.empty() || !std::all_of(name.begin(), name.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw InputError("without a header row, column '" + name + "' must be a zero-based index");
  }
  idx = std::stoul(name);
  if (!header.empty() && idx >= header.size()) throw InputError("missing column '" + name + "'");
  return idx;
}

}  // namespace

std::string_view label_name(Label l) { return l == Label::Hope ? "Hope" : "Not Hope"; }

std::optional<Label> parse_label(std::string_view s) {
  const std::string v = ascii_lower(trim(s));
  if (v == "hope") return Label::Hope;
  if (v == "not hope") return Label::NotHope;
  return std::nullopt;
}

Document Document::from_raw(std::string id, std::string raw) {
  Document d;
  d.id = std::move(id);
  d.text = normalize(raw);
  d.raw_text = std::move(raw);
  return d;
}

Language Language::parse(std::string_view s) {
  const std::string v = ascii_lower(trim(s));
  Language lang;
  if (v == "en" || v == "english") {
    lang.kind = Kind::English;
  } else if (v == "de" || v == "german") {
    lang.kind = Kind::German;
  } else if (v == "es" || v == "spanish") {
    lang.kind = Kind::Spanish;
  } else if (v == "ur" || v == "urdu") {
    lang.kind = Kind::Urdu;
  } else {
    lang.tag = std::string(trim(s));
  }
  return lang;
}

std::string Language::name() const {
  switch (kind) {
    case Kind::English: return "English";
    case Kind::German: return "German";
    case Kind::Spanish: return "Spanish";
    case Kind::Urdu: return "Urdu";
    case Kind::Other: return tag;
  }
  return tag;
}

Split parse_split(std::string_view s) {
  const std::string v = ascii_lower(trim(s));
  if (v == "train") return Split::Train;
  if (v == "dev" || v == "development") return Split::Dev;
  if (v == "test") return Split::Test;
  throw InputError("unknown split '" + std::string(s) + "' (expected train, dev or test)");
}

std::string_view split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    case Split::Test: return "test";
  }
  return "train";
}

Corpus::Corpus(std::string name, Language language, Split split, std::vector<CorpusEntry> entries)
    : name_(std::move(name)), language_(std::move(language)), split_(split), entries_(std::move(entries)) {
  std::unordered_set<std::string> seen;
  seen.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (!seen.insert(e.doc.id).second) {
      throw InputError("row " + std::to_string(i + 1) + ": duplicate id '" + e.doc.id + "'");
    }
    if (split_ != Split::Test && !e.label) {
      throw InputError("row " + std::to_string(i + 1) + ": missing label in " + std::string(split_name(split_)) +
                       " split");
    }
  }
}

bool Corpus::fully_labeled() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const CorpusEntry& e) { return e.label.has_value(); });
}

std::vector<Document> Corpus::documents() const {
  std::vector<Document> docs;
  docs.reserve(entries_.size());
  for (const auto& e : entries_) docs.push_back(e.doc);
  return docs;
}

std::vector<LabeledDocument> Corpus::labeled_documents() const {
  std::vector<LabeledDocument> docs;
  docs.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (!e.label) throw InputError("row " + std::to_string(i + 1) + ": document '" + e.doc.id + "' is unlabeled");
    docs.push_back({e.doc, *e.label});
  }
  return docs;
}

Corpus parse_corpus(std::string_view content, const LoadOptions& options) {
  const bool labeled = options.require_labels.value_or(options.split != Split::Test);
  const CsvSchema& schema = options.schema;
  if (labeled && !schema.label_column) throw InputError("labeled split requires a label column");

  std::vector<csv::Row> rows = csv::parse(content);
  if (rows.empty()) return Corpus(options.name, options.language, options.split, {});

  csv::Row header;
  std::size_t first_data = 0;
  if (schema.has_header) {
    header = rows.front();
    first_data = 1;
  } else {
    header.assign(rows.front().size(), std::string());
  }

  const std::size_t text_col = column_index(header, schema.has_header, schema.text_column);
  std::optional<std::size_t> id_col;
  if (schema.id_column) id_col = column_index(header, schema.has_header, *schema.id_column);
  std::optional<std::size_t> label_col;
  if (schema.label_column) {
    if (labeled) {
      label_col = column_index(header, schema.has_header, *schema.label_column);
    } else if (!schema.has_header || std::find(header.begin(), header.end(), *schema.label_column) != header.end()) {
      label_col = column_index(header, schema.has_header, *schema.label_column);
    }
  }

  std::vector<CorpusEntry> entries;
  entries.reserve(rows.size() - first_data);
  for (std::size_t r = first_data; r < rows.size(); ++r) {
    const std::size_t row_no = r - first_data + 1;
    const csv::Row& row = rows[r];
    if (row.size() != header.size()) {
      throw InputError("row " + std::to_string(row_no) + ": expected " + std::to_string(header.size()) +
                       " fields, found " + std::to_string(row.size()));
    }
    std::string id = id_col ? row[*id_col] : std::to_string(row_no - 1);
    CorpusEntry entry{Document::from_raw(std::move(id), row[text_col]), std::nullopt};
    if (label_col) {
      const std::string& cell = row[*label_col];
      if (trim(cell).empty()) {
        if (labeled) throw InputError("row " + std::to_string(row_no) + ": missing label");
      } else {
        entry.label = parse_label(cell);
        if (!entry.label) {
          throw InputError("row " + std::to_string(row_no) + ": unrecognized label '" + cell + "'");
        }
      }
    }
    entries.push_back(std::move(entry));
  }
  return Corpus(options.name, options.language, options.split, std::move(entries));
}

Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream content;
  content << in.rdbuf();
  LoadOptions opts = options;
  if (opts.name.empty()) opts.name = path.stem().string();
  try {
    return parse_corpus(content.str(), opts);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string corpus_to_csv(const Corpus& corpus) {
  std::string out = csv::format_row({"id", "text", "label"});
  for (const auto& e : corpus.entries()) {
    out += csv::format_row({e.doc.id, e.doc.raw_text, e.label ? std::string(label_name(*e.label)) : std::string()});
  }
  return out;
}

std::optional<double> CorpusStats::mean_words(Label l) const {
  const auto count = per_class.find(l);
  if (count == per_class.end() || count->second == 0) return std::nullopt;
  return static_cast<double>(word_totals.at(l)) / static_cast<double>(count->second);
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  stats.per_class = {{Label::NotHope, 0}, {Label::Hope, 0}};
  stats.word_totals = {{Label::NotHope, 0}, {Label::Hope, 0}};
  for (const auto& d : corpus.labeled_documents()) {
    ++stats.total;
    ++stats.per_class[d.label];
    stats.word_totals[d.label] += split_whitespace(d.doc.text).size();
  }
  return stats;
}

nlohmann::ordered_json stats_to_json(const CorpusStats& stats) {
  nlohmann::ordered_json j;
  j["total"] = stats.total;
  nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
  nlohmann::ordered_json means = nlohmann::ordered_json::object();
  for (Label l : {Label::Hope, Label::NotHope}) {
    const auto it = stats.per_class.find(l);
    per_class[std::string(label_name(l))] = it == stats.per_class.end() ? 0 : it->second;
    if (auto m = stats.mean_words(l)) means[std::string(label_name(l))] = *m;
  }
  j["per_class"] = std::move(per_class);
  j["mean_words_per_class"] = std::move(means);
  return j;
}

}  // namespace hopeal
