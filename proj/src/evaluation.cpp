#include "hopeal/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "hopeal/error.hpp"
#include "hopeal/random.hpp"

namespace hopeal {
namespace {

constexpr std::array<Label, 2> kClasses{Label::NotHope, Label::Hope};

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::size_t ConfusionMatrix::total() const {
  std::size_t t = 0;
  for (const auto& row : counts) {
    for (auto c : row) t += c;
  }
  return t;
}

ConfusionMatrix confusion(std::span<const Label> gold, std::span<const Label> pred) {
  if (gold.size() != pred.size()) {
    throw InputError("gold has " + std::to_string(gold.size()) + " labels, predictions " +
                     std::to_string(pred.size()));
  }
  if (gold.empty()) throw InputError("cannot build a confusion matrix from no labels");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < gold.size(); ++i) ++cm.counts[to_numeric(gold[i])][to_numeric(pred[i])];
  return cm;
}

std::string render_confusion(const ConfusionMatrix& cm) {
  std::size_t width = std::string("Not Hope").size();
  for (const auto& row : cm.counts) {
    for (auto c : row) width = std::max(width, std::to_string(c).size());
  }
  const std::size_t label_width = std::string("gold \\ pred").size();
  std::ostringstream os;
  auto pad = [&os](const std::string& s, std::size_t w) { os << std::string(w - s.size(), ' ') << s; };
  pad("gold \\ pred", label_width);
  for (Label p : kClasses) {
    os << "  ";
    pad(std::string(label_name(p)), width);
  }
  os << '\n';
  for (Label g : kClasses) {
    pad(std::string(label_name(g)), label_width);
    for (Label p : kClasses) {
      os << "  ";
      pad(std::to_string(cm.at(g, p)), width);
    }
    os << '\n';
  }
  return os.str();
}

MetricsReport metrics(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  if (total == 0) throw InputError("cannot compute metrics of an empty confusion matrix");

  MetricsReport r;
  std::size_t trace = 0;
  for (Label c : kClasses) {
    const std::size_t tp = cm.at(c, c);
    std::size_t predicted = 0, actual = 0;
    for (Label o : kClasses) {
      predicted += cm.at(o, c);
      actual += cm.at(c, o);
    }
    ClassMetrics& m = r.per_class[to_numeric(c)];
    m.precision = ratio(tp, predicted);
    m.recall = ratio(tp, actual);
    m.f1 = m.precision + m.recall == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    m.support = actual;
    trace += tp;
  }
  r.accuracy = ratio(trace, total);

  const double n_classes = static_cast<double>(kClasses.size());
  for (const auto& m : r.per_class) {
    r.macro_precision += m.precision / n_classes;
    r.macro_recall += m.recall / n_classes;
    r.macro_f1 += m.f1 / n_classes;
    const double w = static_cast<double>(m.support) / static_cast<double>(total);
    r.weighted_precision += w * m.precision;
    r.weighted_recall += w * m.recall;
    r.weighted_f1 += w * m.f1;
  }
  return r;
}

MetricsReport mean_report(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw InputError("cannot average zero reports");
  MetricsReport mean;
  for (const auto& r : reports) {
    mean.accuracy += r.accuracy;
    mean.macro_precision += r.macro_precision;
    mean.macro_recall += r.macro_recall;
    mean.macro_f1 += r.macro_f1;
    mean.weighted_precision += r.weighted_precision;
    mean.weighted_recall += r.weighted_recall;
    mean.weighted_f1 += r.weighted_f1;
    for (std::size_t c = 0; c < 2; ++c) {
      mean.per_class[c].precision += r.per_class[c].precision;
      mean.per_class[c].recall += r.per_class[c].recall;
      mean.per_class[c].f1 += r.per_class[c].f1;
      mean.per_class[c].support += r.per_class[c].support;
    }
  }
  const double n = static_cast<double>(reports.size());
  for (double* v : {&mean.accuracy, &mean.macro_precision, &mean.macro_recall, &mean.macro_f1,
                    &mean.weighted_precision, &mean.weighted_recall, &mean.weighted_f1}) {
    *v /= n;
  }
  for (auto& m : mean.per_class) {
    m.precision /= n;
    m.recall /= n;
    m.f1 /= n;
  }
  return mean;
}

nlohmann::ordered_json report_to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["accuracy"] = r.accuracy;
  nlohmann::ordered_json per_class;
  for (Label c : {Label::Hope, Label::NotHope}) {
    const auto& m = r.of(c);
    per_class[std::string(label_name(c))] = {
        {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
  }
  j["per_class"] = std::move(per_class);
  j["macro_precision"] = r.macro_precision;
  j["macro_recall"] = r.macro_recall;
  j["macro_f1"] = r.macro_f1;
  j["weighted_precision"] = r.weighted_precision;
  j["weighted_recall"] = r.weighted_recall;
  j["weighted_f1"] = r.weighted_f1;
  return j;
}

std::string report_csv_header() {
  return "model,language,split,accuracy,macro_f1,weighted_f1,macro_precision,macro_recall,weighted_precision,"
         "weighted_recall,precision_hope,recall_hope,f1_hope,support_hope,precision_not_hope,recall_not_hope,"
         "f1_not_hope,support_not_hope\n";
}

std::string report_csv_row(const ReportTag& tag, const MetricsReport& r) {
  std::ostringstream os;
  auto field = [](const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q.push_back('"');
      q.push_back(c);
    }
    return q + "\"";
  };
  const auto& h = r.of(Label::Hope);
  const auto& n = r.of(Label::NotHope);
  os << field(tag.model) << ',' << field(tag.language) << ',' << field(tag.split) << ',' << fixed3(r.accuracy) << ','
     << fixed3(r.macro_f1) << ',' << fixed3(r.weighted_f1) << ',' << fixed3(r.macro_precision) << ','
     << fixed3(r.macro_recall) << ',' << fixed3(r.weighted_precision) << ',' << fixed3(r.weighted_recall) << ','
     << fixed3(h.precision) << ',' << fixed3(h.recall) << ',' << fixed3(h.f1) << ',' << h.support << ','
     << fixed3(n.precision) << ',' << fixed3(n.recall) << ',' << fixed3(n.f1) << ',' << n.support << '\n';
  return os.str();
}

FoldSplit stratified_kfold(const Corpus& corpus, std::size_t k, std::uint64_t rng_seed) {
  if (k < 2) throw InputError("k must be at least 2");
  const auto docs = corpus.labeled_documents();

  std::map<Label, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < docs.size(); ++i) by_class[docs[i].label].push_back(i);
  for (const auto& [label, members] : by_class) {
    if (members.size() < k) {
      throw InputError("class '" + std::string(label_name(label)) + "' has " + std::to_string(members.size()) +
                       " documents, fewer than k = " + std::to_string(k));
    }
  }

  Rng rng(rng_seed);
  std::vector<std::size_t> fold_of(docs.size());
  std::size_t next = 0;
  for (auto& [label, members] : by_class) {
    rng.shuffle(members);
    for (auto idx : members) {
      fold_of[idx] = next;
      next = (next + 1) % k;
    }
  }

  FoldSplit split;
  split.k = k;
  split.folds.resize(k);
  for (std::size_t i = 0; i < docs.size(); ++i) split.folds[fold_of[i]].push_back(docs[i].doc.id);
  return split;
}

}  // namespace hopeal
