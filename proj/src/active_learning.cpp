#include "hopeal/active_learning.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_set>

#include "hopeal/error.hpp"

namespace hopeal {
namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

double pool_accuracy(Scorer& scorer, std::span<const Document> pool, const Oracle& oracle,
                     std::vector<ProbDist>& scores) {
  scores = scorer.score_batch(pool);
  if (scores.size() != pool.size()) throw InputError("scorer returned a wrong number of distributions");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (decide(scores[i]) == oracle.reveal(pool[i].id)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(pool.size());
}

}  // namespace

Strategy parse_strategy(std::string_view s) {
  if (s == "entropy") return Strategy::Entropy;
  if (s == "random") return Strategy::Random;
  if (s == "margin") return Strategy::Margin;
  throw InputError("unknown strategy '" + std::string(s) + "' (expected entropy, random or margin)");
}

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Entropy: return "entropy";
    case Strategy::Random: return "random";
    case Strategy::Margin: return "margin";
  }
  return "entropy";
}

std::string_view stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::MaxRounds: return "max_rounds";
    case StopReason::PoolExhausted: return "pool_exhausted";
    case StopReason::Plateau: return "plateau";
  }
  return "max_rounds";
}

void ALConfig::validate() const {
  if (batch_k < 1) throw InputError("batch_k must be >= 1");
  if (min_rounds > max_rounds) throw InputError("min_rounds must not exceed max_rounds");
  if (!(plateau_delta >= 0.0)) throw InputError("plateau_delta must be >= 0");
  if (!(seed_fraction > 0.0 && seed_fraction <= 1.0)) throw InputError("seed_fraction must be in (0, 1]");
}

double entropy(const ProbDist& p) {
  double h = 0.0;
  for (double pi : p.probs()) {
    if (pi > 0.0) h -= pi * std::log(pi);
  }
  return h;
}

bool id_less(std::string_view a, std::string_view b) {
  if (all_digits(a) && all_digits(b)) {
    const auto strip = [](std::string_view s) {
      const auto nz = s.find_first_not_of('0');
      return nz == std::string_view::npos ? std::string_view{} : s.substr(nz);
    };
    const auto sa = strip(a), sb = strip(b);
    if (sa.size() != sb.size()) return sa.size() < sb.size();
    if (sa != sb) return sa < sb;
    return a.size() < b.size();
  }
  return a < b;
}

std::vector<std::string> select_from_scores(std::span<const Document> pool, std::span<const ProbDist> scores,
                                            Strategy strategy, std::size_t k, Rng& rng) {
  if (pool.empty()) throw InputError("cannot select from an empty pool");
  if (pool.size() != scores.size()) throw InputError("pool and score counts differ");
  const std::size_t take = std::min(k, pool.size());

  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  if (strategy == Strategy::Random) {
    // Partial Fisher-Yates: the first `take` slots are a uniform sample.
    for (std::size_t i = 0; i < take; ++i) std::swap(order[i], order[i + rng.below(pool.size() - i)]);
  } else {
    // Smaller key = more informative.
    std::vector<double> key(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      key[i] = strategy == Strategy::Entropy ? -entropy(scores[i]) : std::abs(scores[i].hope() - scores[i].not_hope());
    }
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        if (key[a] != key[b]) return key[a] < key[b];
                        return id_less(pool[a].id, pool[b].id);
                      });
  }

  std::vector<std::string> ids;
  ids.reserve(take);
  for (std::size_t i = 0; i < take; ++i) ids.push_back(pool[order[i]].id);
  return ids;
}

std::vector<std::string> select_batch(Scorer& scorer, std::span<const Document> pool, const ALConfig& cfg) {
  if (pool.empty()) throw InputError("cannot select from an empty pool");
  const auto scores = scorer.score_batch(pool);
  Rng rng(cfg.rng_seed);
  return select_from_scores(pool, scores, cfg.strategy, cfg.batch_k, rng);
}

Oracle Oracle::from(std::span<const LabeledDocument> docs) {
  std::unordered_map<std::string, Label> labels;
  labels.reserve(docs.size());
  for (const auto& d : docs) labels.emplace(d.doc.id, d.label);
  return Oracle(std::move(labels));
}

Label Oracle::reveal(const std::string& id) const {
  const auto it = labels_.find(id);
  if (it == labels_.end()) throw InputError("oracle has no label for id '" + id + "'");
  return it->second;
}

std::pair<std::vector<LabeledDocument>, std::vector<Document>> stratified_seed_split(
    std::span<const LabeledDocument> train_set, double seed_fraction, Rng& rng) {
  std::map<Label, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < train_set.size(); ++i) by_class[train_set[i].label].push_back(i);

  std::vector<bool> in_seed(train_set.size(), false);
  for (Label l : {Label::NotHope, Label::Hope}) {
    auto& members = by_class[l];
    // Tolerance keeps e.g. 0.1 * 30 from flooring to 2.
    const auto n_seed = static_cast<std::size_t>(std::floor(static_cast<double>(members.size()) * seed_fraction + 1e-9));
    if (n_seed < 1) {
      throw InputError("seed fraction " + std::to_string(seed_fraction) + " leaves class '" +
                       std::string(label_name(l)) + "' (" + std::to_string(members.size()) +
                       " documents) without a seed example");
    }
    rng.shuffle(members);
    for (std::size_t j = 0; j < n_seed; ++j) in_seed[members[j]] = true;
  }

  std::vector<LabeledDocument> labeled;
  std::vector<Document> pool;
  for (std::size_t i = 0; i < train_set.size(); ++i) {
    if (in_seed[i]) {
      labeled.push_back(train_set[i]);
    } else {
      pool.push_back(train_set[i].doc);
    }
  }
  return {std::move(labeled), std::move(pool)};
}

ALResult run_loop(std::span<const LabeledDocument> train_set, const ScorerFactory& factory, const Oracle& oracle,
                  const ALConfig& cfg) {
  cfg.validate();
  std::unordered_set<std::string> ids;
  for (const auto& d : train_set) {
    if (!ids.insert(d.doc.id).second) throw InputError("duplicate id '" + d.doc.id + "' in training set");
    if (!oracle.knows(d.doc.id)) throw InputError("oracle has no label for id '" + d.doc.id + "'");
  }

  Rng rng(cfg.rng_seed);
  ALResult result;
  ALState& state = result.state;
  std::tie(state.labeled, state.pool) = stratified_seed_split(train_set, cfg.seed_fraction, rng);

  result.model = factory(state.labeled);
  std::vector<ProbDist> scores;
  if (!state.pool.empty()) state.initial_pool_accuracy = pool_accuracy(*result.model, state.pool, oracle, scores);

  if (state.pool.empty()) {
    state.stop_reason = StopReason::PoolExhausted;
    return result;
  }
  if (cfg.max_rounds == 0) {
    state.stop_reason = StopReason::MaxRounds;
    return result;
  }

  std::optional<double> previous = state.initial_pool_accuracy;
  while (true) {
    ++state.round;
    RoundRecord record;
    record.round = state.round;
    record.selected_ids = select_from_scores(state.pool, scores, cfg.strategy, cfg.batch_k, rng);

    std::unordered_set<std::string> chosen(record.selected_ids.begin(), record.selected_ids.end());
    std::unordered_map<std::string, Document> moved;
    std::vector<Document> remaining;
    remaining.reserve(state.pool.size() - chosen.size());
    for (auto& d : state.pool) {
      if (chosen.contains(d.id)) {
        moved.emplace(d.id, std::move(d));
      } else {
        remaining.push_back(std::move(d));
      }
    }
    state.pool = std::move(remaining);
    for (const auto& id : record.selected_ids) {
      state.labeled.push_back({std::move(moved.at(id)), oracle.reveal(id)});
    }

    result.model = factory(state.labeled);
    record.labeled_size = state.labeled.size();
    if (!state.pool.empty()) record.pool_accuracy = pool_accuracy(*result.model, state.pool, oracle, scores);
    state.history.push_back(record);

    if (state.pool.empty()) {
      state.stop_reason = StopReason::PoolExhausted;
      break;
    }
    if (state.round >= cfg.max_rounds) {
      state.stop_reason = StopReason::MaxRounds;
      break;
    }
    if (state.round >= cfg.min_rounds && previous && *record.pool_accuracy - *previous < cfg.plateau_delta) {
      state.stop_reason = StopReason::Plateau;
      break;
    }
    previous = record.pool_accuracy;
  }
  return result;
}

nlohmann::ordered_json round_to_json(const RoundRecord& r) {
  nlohmann::ordered_json j;
  j["round"] = r.round;
  j["labeled_size"] = r.labeled_size;
  j["pool_accuracy"] = r.pool_accuracy ? nlohmann::ordered_json(*r.pool_accuracy) : nlohmann::ordered_json(nullptr);
  j["selected_ids"] = r.selected_ids;
  return j;
}

std::string history_to_jsonl(std::span<const RoundRecord> history) {
  std::string out;
  for (const auto& r : history) {
    out += round_to_json(r).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    out.push_back('\n');
  }
  return out;
}

}  // namespace hopeal
