// hopeal: corpus statistics, TF-IDF logistic regression, active learning,
// cross-validation and prediction export.
//
// Exit codes: 0 success, 2 input/config error, 3 external scorer error,
// 1 anything unexpected.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hopeal/active_learning.hpp"
#include "hopeal/classifier.hpp"
#include "hopeal/corpus.hpp"
#include "hopeal/error.hpp"
#include "hopeal/evaluation.hpp"
#include "hopeal/features.hpp"
#include "hopeal/pipeline.hpp"
#include "hopeal/scorer_protocol.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitScorer = 3;

struct SchemaArgs {
  std::string id_col;
  std::string text_col = "text";
  std::string label_col = "label";
  bool no_header = false;
  std::string language;

  hopeal::CsvSchema schema() const {
    hopeal::CsvSchema s;
    if (!id_col.empty()) s.id_column = id_col;
    s.text_column = text_col;
    if (!label_col.empty()) s.label_column = label_col;
    else s.label_column.reset();
    s.has_header = !no_header;
    return s;
  }
};

void add_schema_options(CLI::App* sub, SchemaArgs& a) {
  sub->add_option("--id-col", a.id_col, "id column (default: zero-based row index)");
  sub->add_option("--text-col", a.text_col, "text column")->capture_default_str();
  sub->add_option("--label-col", a.label_col, "label column")->capture_default_str();
  sub->add_flag("--no-header", a.no_header, "CSV has no header row; columns are zero-based indices");
  sub->add_option("--language", a.language, "corpus language (en, de, es, ur or any tag)");
}

void add_train_options(CLI::App* sub, hopeal::TrainConfig& cfg, std::size_t& max_tokens) {
  sub->add_option("--lambda", cfg.lambda, "L2 regularization strength")->capture_default_str();
  sub->add_option("--max-iters", cfg.max_iters, "optimizer iteration limit")->capture_default_str();
  sub->add_option("--grad-tol", cfg.grad_tol, "gradient infinity-norm tolerance")->capture_default_str();
  sub->add_option("--max-tokens", max_tokens, "tokens kept per document")->capture_default_str();
}

hopeal::Corpus load(const fs::path& path, const SchemaArgs& a, hopeal::Split split,
                    std::optional<bool> require_labels = std::nullopt) {
  hopeal::LoadOptions opts;
  opts.schema = a.schema();
  opts.split = split;
  opts.require_labels = require_labels;
  opts.language = hopeal::Language::parse(a.language);
  return hopeal::load_corpus(path, opts);
}

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw hopeal::InputError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw hopeal::InputError("failed writing '" + path.string() + "'");
}

void write_or_stdout(const std::string& target, std::string_view content) {
  if (target.empty() || target == "-") {
    std::cout << content << std::flush;
  } else {
    write_file(target, content);
  }
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw hopeal::InputError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw hopeal::InputError(path.string() + ": " + e.what());
  }
}

std::string dump(const ordered_json& j, int indent = 2) {
  return j.dump(indent, ' ', false, json::error_handler_t::replace) + "\n";
}

void write_evaluation(const fs::path& dir, const hopeal::Evaluation& e, const hopeal::ReportTag& tag) {
  write_file(dir / "metrics.json", dump(hopeal::report_to_json(e.report)));
  write_file(dir / "metrics.csv", hopeal::report_csv_header() + hopeal::report_csv_row(tag, e.report));
  write_file(dir / "confusion.txt", hopeal::render_confusion(e.confusion));
}

// ---------------------------------------------------------------- stats

struct StatsArgs {
  std::string input;
  std::string split = "train";
  bool labeled = false;
  SchemaArgs schema;
};

int run_stats(const StatsArgs& a) {
  const auto split = hopeal::parse_split(a.split);
  const auto corpus = load(a.input, a.schema, split, a.labeled ? std::optional<bool>(true) : std::nullopt);
  std::cout << dump(hopeal::stats_to_json(hopeal::corpus_stats(corpus)));
  return kExitOk;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string train;
  std::string dev;
  std::string out_dir = ".";
  hopeal::TrainConfig cfg;
  std::size_t max_tokens = hopeal::kDefaultMaxTokens;
  SchemaArgs schema;
};

int run_train(const TrainArgs& a) {
  const auto corpus = load(a.train, a.schema, hopeal::Split::Train);
  const auto docs = corpus.labeled_documents();
  auto pipeline = hopeal::train_logistic(docs, a.cfg, a.max_tokens);
  const fs::path dir(a.out_dir);
  write_file(dir / "model.json", dump(pipeline.model.to_json(), -1));
  write_file(dir / "vectorizer.json", dump(pipeline.vectorizer.to_json(), -1));

  if (!a.dev.empty()) {
    const auto dev = load(a.dev, a.schema, hopeal::Split::Dev).labeled_documents();
    auto vec = std::make_shared<const hopeal::Vectorizer>(std::move(pipeline.vectorizer));
    hopeal::LogisticScorer scorer([vec](const hopeal::Document& d) { return vec->transform(d); },
                                  std::move(pipeline.model));
    const auto e = hopeal::evaluate(scorer, dev);
    write_evaluation(dir, e, {"lr", corpus.language().name(), "dev"});
    std::cout << hopeal::render_confusion(e.confusion) << "accuracy " << e.report.accuracy << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- al-run

struct AlArgs {
  std::string train;
  std::string dev;
  std::string out_dir = ".";
  std::string model = "lr";
  std::string strategy = "entropy";
  double scorer_timeout = 60.0;
  hopeal::ALConfig al;
  hopeal::TrainConfig cfg;
  std::size_t max_tokens = hopeal::kDefaultMaxTokens;
  SchemaArgs schema;
};

int run_al(AlArgs a, bool min_rounds_given) {
  a.al.strategy = hopeal::parse_strategy(a.strategy);
  if (!min_rounds_given && a.al.min_rounds > a.al.max_rounds) a.al.min_rounds = a.al.max_rounds;
  a.al.validate();
  a.cfg.validate();

  const auto corpus = load(a.train, a.schema, hopeal::Split::Train);
  const auto train_docs = corpus.labeled_documents();
  std::vector<hopeal::LabeledDocument> dev_docs;
  if (!a.dev.empty()) dev_docs = load(a.dev, a.schema, hopeal::Split::Dev).labeled_documents();

  hopeal::ScorerFactory factory;
  std::shared_ptr<const hopeal::Vectorizer> vectorizer;
  std::string model_tag = "lr";
  if (a.model == "lr") {
    vectorizer = std::make_shared<const hopeal::Vectorizer>(hopeal::Vectorizer::fit(corpus, a.max_tokens));
    factory = hopeal::logistic_factory(vectorizer, a.cfg);
  } else if (a.model.starts_with("external:")) {
    const auto argv = hopeal::split_command(a.model.substr(std::string("external:").size()));
    if (argv.empty()) throw hopeal::InputError("--model external: needs a command");
    hopeal::SessionOptions opts;
    opts.handshake_timeout = std::chrono::milliseconds(static_cast<long long>(a.scorer_timeout * 1000.0));
    std::shared_ptr<hopeal::ScorerSession> session = hopeal::spawn_scorer(argv, opts);
    auto scorer = std::make_shared<hopeal::RemoteScorer>(session);
    // The protocol carries no training messages: the external model is
    // queried as-is every round.
    factory = [scorer](std::span<const hopeal::LabeledDocument>) { return scorer; };
    model_tag = "external";
  } else {
    throw hopeal::InputError("--model must be 'lr' or 'external:<command>'");
  }

  const auto oracle = hopeal::Oracle::from(train_docs);
  auto result = hopeal::run_loop(train_docs, factory, oracle, a.al);

  const fs::path dir(a.out_dir);
  write_file(dir / "history.jsonl", hopeal::history_to_jsonl(result.state.history));
  if (auto* lr = dynamic_cast<hopeal::LogisticScorer*>(result.model.get())) {
    write_file(dir / "model.json", dump(lr->model().to_json(), -1));
    write_file(dir / "vectorizer.json", dump(vectorizer->to_json(), -1));
  }

  ordered_json summary;
  summary["model"] = model_tag;
  summary["strategy"] = hopeal::strategy_name(a.al.strategy);
  summary["rounds"] = result.state.round;
  summary["labeled_size"] = result.state.labeled.size();
  summary["pool_size"] = result.state.pool.size();
  summary["initial_pool_accuracy"] = result.state.initial_pool_accuracy
                                         ? ordered_json(*result.state.initial_pool_accuracy)
                                         : ordered_json(nullptr);
  summary["stop_reason"] = hopeal::stop_reason_name(result.state.stop_reason);

  if (!dev_docs.empty()) {
    const auto e = hopeal::evaluate(*result.model, dev_docs);
    write_evaluation(dir, e, {model_tag, corpus.language().name(), "dev"});
    summary["dev"] = hopeal::report_to_json(e.report);
  }
  write_file(dir / "summary.json", dump(summary));
  std::cout << dump(summary);
  return kExitOk;
}

// ---------------------------------------------------------------- predict

struct PredictArgs {
  std::string model;
  std::string vectorizer;
  std::string input;
  std::string output = "-";
  SchemaArgs schema;
};

int run_predict(const PredictArgs& a) {
  const auto model = hopeal::LinearModel::from_json(read_json(a.model));
  const auto vectorizer = hopeal::Vectorizer::from_json(read_json(a.vectorizer));
  hopeal::check_compatible(vectorizer, model);

  const auto corpus = load(a.input, a.schema, hopeal::Split::Test);
  const auto docs = corpus.documents();
  std::vector<hopeal::Label> labels;
  labels.reserve(docs.size());
  for (const auto& d : docs) labels.push_back(hopeal::predict(model, vectorizer.transform(d)));
  write_or_stdout(a.output, hopeal::predictions_csv(docs, labels));
  return kExitOk;
}

// ---------------------------------------------------------------- cv

struct CvArgs {
  std::string input;
  std::size_t k = 5;
  std::uint64_t rng_seed = 0;
  std::string output = "-";
  std::string json_out;
  hopeal::TrainConfig cfg;
  std::size_t max_tokens = hopeal::kDefaultMaxTokens;
  SchemaArgs schema;
};

int run_cv(const CvArgs& a) {
  const auto corpus = load(a.input, a.schema, hopeal::Split::Train);
  const auto cv = hopeal::cross_validate(corpus, a.k, a.rng_seed, a.cfg, a.max_tokens);
  const std::string language = corpus.language().name();

  std::string csv_text = hopeal::report_csv_header();
  ordered_json j;
  j["k"] = a.k;
  j["folds"] = ordered_json::array();
  for (std::size_t f = 0; f < cv.folds.size(); ++f) {
    csv_text += hopeal::report_csv_row({"lr", language, "fold" + std::to_string(f + 1)}, cv.folds[f].report);
    j["folds"].push_back(hopeal::report_to_json(cv.folds[f].report));
  }
  csv_text += hopeal::report_csv_row({"lr", language, "mean"}, cv.mean);
  j["mean"] = hopeal::report_to_json(cv.mean);

  write_or_stdout(a.output, csv_text);
  if (!a.json_out.empty()) write_file(a.json_out, dump(j));
  return kExitOk;
}

// ---------------------------------------------------------------- config

// Turns {"batch-k": 10, "labeled": true} into "--batch-k 10 --labeled".
std::vector<std::string> config_tokens(const fs::path& path) {
  const json cfg = read_json(path);
  if (!cfg.is_object()) throw hopeal::InputError(path.string() + ": config must be a JSON object");
  std::vector<std::string> tokens;
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) tokens.push_back(flag);
    } else if (value.is_string()) {
      tokens.push_back(flag);
      tokens.push_back(value.get<std::string>());
    } else if (value.is_number()) {
      tokens.push_back(flag);
      tokens.push_back(value.dump());
    } else {
      throw hopeal::InputError(path.string() + ": unsupported value for '" + key + "'");
    }
  }
  return tokens;
}

// Inserts config-file options directly after the subcommand name so that
// explicit flags, which come later, take precedence.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::optional<std::string> config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].starts_with("--config=")) {
      config = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (config && !args.empty()) {
    const auto tokens = config_tokens(*config);
    args.insert(args.begin() + 1, tokens.begin(), tokens.end());
  }
  std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hope-speech text classification with active learning"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file of default flag values (flags given on the command line win)");

  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "print label counts and mean word counts as JSON");
  stats_cmd->add_option("--input", stats.input, "CSV file")->required();
  stats_cmd->add_option("--split", stats.split, "train, dev or test")->capture_default_str();
  stats_cmd->add_flag("--labeled", stats.labeled, "require a label on every row");
  add_schema_options(stats_cmd, stats.schema);

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "fit TF-IDF + logistic regression on a full training set");
  train_cmd->add_option("--train", tr.train, "training CSV")->required();
  train_cmd->add_option("--dev", tr.dev, "development CSV to evaluate on");
  train_cmd->add_option("--out-dir", tr.out_dir, "output directory")->capture_default_str();
  add_train_options(train_cmd, tr.cfg, tr.max_tokens);
  add_schema_options(train_cmd, tr.schema);

  AlArgs al;
  auto* al_cmd = app.add_subcommand("al-run", "run the active-learning loop with a simulated oracle");
  al_cmd->add_option("--train", al.train, "training CSV (pool and seed)")->required();
  al_cmd->add_option("--dev", al.dev, "development CSV for the final report");
  al_cmd->add_option("--out-dir", al.out_dir, "output directory")->capture_default_str();
  al_cmd->add_option("--model", al.model, "lr or external:<command>")->capture_default_str();
  al_cmd->add_option("--scorer-timeout", al.scorer_timeout, "seconds to wait for the external handshake")
      ->capture_default_str();
  al_cmd->add_option("--batch-k", al.al.batch_k, "documents labeled per round")->capture_default_str();
  al_cmd->add_option("--max-rounds", al.al.max_rounds, "round limit")->capture_default_str();
  al_cmd->add_option("--min-rounds", al.al.min_rounds, "rounds before plateau stopping applies")
      ->capture_default_str();
  al_cmd->add_option("--plateau-delta", al.al.plateau_delta, "minimum pool-accuracy gain to continue")
      ->capture_default_str();
  al_cmd->add_option("--seed-frac", al.al.seed_fraction, "stratified seed fraction")->capture_default_str();
  al_cmd->add_option("--strategy", al.strategy, "entropy, random or margin")->capture_default_str();
  al_cmd->add_option("--rng-seed", al.al.rng_seed, "seed for every random choice")->capture_default_str();
  add_train_options(al_cmd, al.cfg, al.max_tokens);
  add_schema_options(al_cmd, al.schema);

  PredictArgs pr;
  auto* predict_cmd = app.add_subcommand("predict", "write id,label predictions for a CSV");
  predict_cmd->add_option("--model", pr.model, "model JSON")->required();
  predict_cmd->add_option("--vectorizer", pr.vectorizer, "vectorizer JSON")->required();
  predict_cmd->add_option("--input", pr.input, "CSV to label")->required();
  predict_cmd->add_option("--output", pr.output, "output CSV, '-' for stdout")->capture_default_str();
  add_schema_options(predict_cmd, pr.schema);

  CvArgs cv;
  auto* cv_cmd = app.add_subcommand("cv", "stratified k-fold cross-validation");
  cv_cmd->add_option("--input", cv.input, "labeled CSV")->required();
  cv_cmd->add_option("--k", cv.k, "number of folds")->capture_default_str();
  cv_cmd->add_option("--rng-seed", cv.rng_seed, "fold assignment seed")->capture_default_str();
  cv_cmd->add_option("--output", cv.output, "per-fold CSV, '-' for stdout")->capture_default_str();
  cv_cmd->add_option("--json-out", cv.json_out, "full-precision JSON report");
  add_train_options(cv_cmd, cv.cfg, cv.max_tokens);
  add_schema_options(cv_cmd, cv.schema);

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  } catch (const hopeal::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (*stats_cmd) return run_stats(stats);
    if (*train_cmd) return run_train(tr);
    if (*al_cmd) return run_al(al, al_cmd->count("--min-rounds") > 0);
    if (*predict_cmd) return run_predict(pr);
    if (*cv_cmd) return run_cv(cv);
  } catch (const hopeal::ProtocolError& e) {
    std::cerr << "scorer error: " << e.what() << '\n';
    return kExitScorer;
  } catch (const hopeal::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInput;
}
