#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "hopeal/error.hpp"
#include "hopeal/evaluation.hpp"

using namespace hopeal;

namespace {

std::vector<Label> labels_from(std::initializer_list<int> v) {
  std::vector<Label> out;
  for (int x : v) out.push_back(label_from_numeric(x));
  return out;
}

Corpus labeled_corpus(const std::vector<Label>& labels) {
  std::vector<CorpusEntry> entries;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    entries.push_back({Document::from_raw(std::to_string(i), "doc " + std::to_string(i)), labels[i]});
  }
  return Corpus("c", {}, Split::Train, std::move(entries));
}

}  // namespace

TEST_CASE("confusion matrix examples") {
  const auto cm = confusion(labels_from({1, 1, 0, 0}), labels_from({1, 0, 0, 1}));
  CHECK(cm.at(Label::Hope, Label::Hope) == 1);
  CHECK(cm.at(Label::Hope, Label::NotHope) == 1);
  CHECK(cm.at(Label::NotHope, Label::NotHope) == 1);
  CHECK(cm.at(Label::NotHope, Label::Hope) == 1);
  CHECK(cm.total() == 4);
  CHECK_THROWS_AS(confusion(std::vector<Label>{}, std::vector<Label>{}), InputError);
  CHECK_THROWS_AS(confusion(labels_from({1}), labels_from({1, 0})), InputError);
}

TEST_CASE("metrics from TP=2 FP=1 FN=1 TN=6") {
  ConfusionMatrix cm;
  cm.counts = {{{6, 1}, {1, 2}}};
  const auto r = metrics(cm);
  CHECK(r.accuracy == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(r.of(Label::Hope).precision == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(r.of(Label::Hope).recall == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(r.of(Label::Hope).f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(r.of(Label::NotHope).f1 == doctest::Approx(6.0 / 7.0).epsilon(1e-12));
  CHECK(r.of(Label::Hope).support == 3);
  CHECK(r.macro_f1 == doctest::Approx((2.0 / 3.0 + 6.0 / 7.0) / 2).epsilon(1e-12));
  CHECK(r.weighted_f1 == doctest::Approx(0.3 * 2.0 / 3.0 + 0.7 * 6.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("perfect predictions and zero denominators") {
  ConfusionMatrix perfect;
  perfect.counts = {{{3, 0}, {0, 4}}};
  const auto r = metrics(perfect);
  CHECK(r.accuracy == 1.0);
  CHECK(r.macro_f1 == 1.0);
  CHECK(r.weighted_f1 == 1.0);
  CHECK(r.macro_precision == 1.0);
  CHECK(r.weighted_recall == 1.0);

  ConfusionMatrix one_class;
  one_class.counts = {{{5, 0}, {0, 0}}};
  const auto z = metrics(one_class);
  CHECK(z.of(Label::Hope).precision == 0.0);
  CHECK(z.of(Label::Hope).recall == 0.0);
  CHECK(z.of(Label::Hope).f1 == 0.0);
  CHECK(z.macro_f1 == 0.5);
  CHECK(z.weighted_f1 == 1.0);

  CHECK_THROWS_AS(metrics(ConfusionMatrix{}), InputError);
}

TEST_CASE("macro equals weighted on balanced supports") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 100; ++t) {
    const std::size_t per = 1 + rng() % 50;
    ConfusionMatrix cm;
    const std::size_t a = rng() % (per + 1), b = rng() % (per + 1);
    cm.counts = {{{a, per - a}, {per - b, b}}};
    const auto r = metrics(cm);
    CHECK(r.macro_f1 == doctest::Approx(r.weighted_f1).epsilon(1e-12));
    CHECK(r.macro_precision == doctest::Approx(r.weighted_precision).epsilon(1e-12));
    CHECK(r.macro_recall == doctest::Approx(r.weighted_recall).epsilon(1e-12));
  }
}

TEST_CASE("metric properties over random label pairs") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng() % 60;
    std::vector<Label> gold, pred;
    for (std::size_t i = 0; i < n; ++i) {
      gold.push_back(label_from_numeric(static_cast<int>(rng() % 2)));
      pred.push_back(label_from_numeric(static_cast<int>(rng() % 2)));
    }
    const auto r = metrics(confusion(gold, pred));
    std::size_t agree = 0;
    for (std::size_t i = 0; i < n; ++i) agree += gold[i] == pred[i];
    CHECK(r.accuracy == static_cast<double>(agree) / static_cast<double>(n));
    const auto [lo, hi] = std::minmax(r.per_class[0].f1, r.per_class[1].f1);
    CHECK(r.macro_f1 >= lo - 1e-15);
    CHECK(r.macro_f1 <= hi + 1e-15);

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Label> g2, p2;
    for (auto i : perm) {
      g2.push_back(gold[i]);
      p2.push_back(pred[i]);
    }
    const auto s = metrics(confusion(g2, p2));
    CHECK(s.macro_f1 == r.macro_f1);
    CHECK(s.weighted_f1 == r.weighted_f1);
    CHECK(s.accuracy == r.accuracy);
  }
}

TEST_CASE("mean report") {
  ConfusionMatrix a, b;
  a.counts = {{{1, 0}, {0, 1}}};
  b.counts = {{{1, 1}, {1, 1}}};
  const std::vector<MetricsReport> rs = {metrics(a), metrics(b)};
  const auto m = mean_report(rs);
  CHECK(m.accuracy == 0.75);
  CHECK(m.of(Label::Hope).support == 3);
}

TEST_CASE("stratified k-fold examples") {
  const auto ten = labeled_corpus(labels_from({1, 1, 1, 1, 1, 0, 0, 0, 0, 0}));
  const auto split = stratified_kfold(ten, 5, 0);
  REQUIRE(split.folds.size() == 5);
  for (const auto& fold : split.folds) {
    REQUIRE(fold.size() == 2);
    const int a = std::stoi(fold[0]), b = std::stoi(fold[1]);
    CHECK((a < 5) != (b < 5));
    CHECK(a < b);
  }

  const auto four = labeled_corpus(labels_from({1, 0, 1, 0}));
  const auto two = stratified_kfold(four, 2, 3);
  for (const auto& fold : two.folds) {
    REQUIRE(fold.size() == 2);
    CHECK((std::stoi(fold[0]) % 2) != (std::stoi(fold[1]) % 2));
  }

  CHECK_THROWS_AS(stratified_kfold(labeled_corpus(labels_from({1, 1, 1, 0, 0, 0, 0, 0})), 5, 0), InputError);
  CHECK_THROWS_AS(stratified_kfold(ten, 1, 0), InputError);
}

TEST_CASE("folds partition the corpus and stay stratified") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const std::size_t k = 2 + rng() % 5;
    const std::size_t n = 2 * k + rng() % 80;
    std::vector<Label> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back(i < k ? Label::Hope : i < 2 * k ? Label::NotHope
                                                                                         : label_from_numeric(rng() % 2));
    std::shuffle(labels.begin(), labels.end(), rng);
    const auto corpus = labeled_corpus(labels);
    const auto split = stratified_kfold(corpus, k, rng());
    REQUIRE(split.folds.size() == k);
    std::set<std::string> all;
    std::size_t total = 0;
    std::map<int, std::vector<std::size_t>> per_class;
    for (const auto& fold : split.folds) {
      std::size_t hope = 0;
      for (const auto& id : fold) {
        all.insert(id);
        hope += labels[std::stoul(id)] == Label::Hope;
      }
      total += fold.size();
      per_class[1].push_back(hope);
      per_class[0].push_back(fold.size() - hope);
    }
    CHECK(total == n);
    CHECK(all.size() == n);
    for (auto& [c, counts] : per_class) {
      const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
      CHECK(*hi - *lo <= 1);
    }
  }
}

TEST_CASE("rendering and CSV rows") {
  ConfusionMatrix cm;
  cm.counts = {{{6, 1}, {1, 2}}};
  const auto text = render_confusion(cm);
  CHECK(text.find("Not Hope") != std::string::npos);
  CHECK(text.find("Hope") != std::string::npos);
  CHECK(text.find('6') != std::string::npos);

  const auto header = report_csv_header();
  CHECK(header.rfind("model,language,split,accuracy,macro_f1,weighted_f1", 0) == 0);
  const auto row = report_csv_row({"lr", "english", "dev"}, metrics(cm));
  CHECK(row.rfind("lr,english,dev,0.800,0.762,0.800", 0) == 0);
  CHECK(row.back() == '\n');

  const auto j = report_to_json(metrics(cm));
  CHECK(j["accuracy"].get<double>() == doctest::Approx(0.8));
}
