#include <doctest.h>

#include <sstream>

#include "hopeal/active_learning.hpp"
#include "hopeal/pipeline.hpp"
#include "test_support.hpp"

namespace {

const std::string kCli = HOPEAL_CLI_PATH;
const std::string kMock = MOCK_SCORER_PATH;

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

int cli(const std::string& args, const std::filesystem::path& out, const std::filesystem::path& err) {
  return testing::run(kCli + " " + args + " > " + q(out) + " 2> " + q(err));
}

std::vector<nlohmann::json> jsonl(const std::string& text) {
  std::vector<nlohmann::json> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(nlohmann::json::parse(line));
  return out;
}

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("stats command") {
  testing::TempDir dir("cli_stats");
  testing::write_text(dir / "in.csv", "text,label\n\"Hello, world\",Hope\nbad day,Not Hope\nwe rise again,hope\n");
  CHECK(cli("stats --input " + q(dir / "in.csv"), dir / "out", dir / "err") == 0);
  const auto j = nlohmann::json::parse(testing::read_text(dir / "out"));
  CHECK(j["total"] == 3);
  CHECK(j["per_class"]["Hope"] == 2);
  CHECK(j["per_class"]["Not Hope"] == 1);
  CHECK(j["mean_words_per_class"]["Hope"].get<double>() == 2.5);

  CHECK(cli("stats --input " + q(dir / "missing.csv"), dir / "out", dir / "err") == 2);
  CHECK(testing::read_text(dir / "err").find("missing.csv") != std::string::npos);

  testing::write_text(dir / "test.csv", "text\nno label here\n");
  CHECK(cli("stats --split test --input " + q(dir / "test.csv"), dir / "out", dir / "err") == 2);
  CHECK(cli("stats --labeled --split test --input " + q(dir / "test.csv"), dir / "out", dir / "err") == 2);
  CHECK(cli("frobnicate", dir / "out", dir / "err") == 2);
}

TEST_CASE("al-run with defaults") {
  testing::TempDir dir("cli_al");
  const auto docs = testing::synthetic_docs(400, 11);
  testing::write_text(dir / "train.csv", testing::docs_to_csv(docs));
  testing::write_text(dir / "dev.csv", testing::docs_to_csv(testing::synthetic_docs(60, 12)));
  REQUIRE(cli("al-run --train " + q(dir / "train.csv") + " --dev " + q(dir / "dev.csv") + " --out-dir " +
                  q(dir / "run"),
              dir / "out", dir / "err") == 0);
  const auto history = jsonl(testing::read_text(dir / "run" / "history.jsonl"));
  REQUIRE(!history.empty());
  CHECK(history.size() <= 5);
  std::size_t prev = 40;
  for (const auto& r : history) {
    CHECK(r["labeled_size"].get<std::size_t>() == prev + 20);
    prev = r["labeled_size"];
  }
  CHECK(std::filesystem::exists(dir / "run" / "model.json"));
  CHECK(std::filesystem::exists(dir / "run" / "metrics.json"));
  const auto summary = nlohmann::json::parse(testing::read_text(dir / "run" / "summary.json"));
  CHECK(summary.contains("stop_reason"));
}

TEST_CASE("random strategy is reproducible") {
  testing::TempDir dir("cli_random");
  testing::write_text(dir / "train.csv", testing::docs_to_csv(testing::synthetic_docs(300, 13)));
  const std::string base = "al-run --strategy random --rng-seed 7 --train " + q(dir / "train.csv");
  REQUIRE(cli(base + " --out-dir " + q(dir / "a"), dir / "out", dir / "err") == 0);
  REQUIRE(cli(base + " --out-dir " + q(dir / "b"), dir / "out", dir / "err") == 0);
  CHECK(testing::read_text(dir / "a" / "history.jsonl") == testing::read_text(dir / "b" / "history.jsonl"));
}

TEST_CASE("external scorer gives the same selections as the in-process table") {
  testing::TempDir dir("cli_external");
  const auto docs = testing::synthetic_docs(200, 14);
  testing::write_text(dir / "train.csv", testing::docs_to_csv(docs));
  nlohmann::json table = nlohmann::json::object();
  std::unordered_map<std::string, hopeal::ProbDist> local;
  std::mt19937_64 rng(1);
  for (const auto& d : docs) {
    const double p = (rng() % 1000) / 999.0;
    table[d.doc.raw_text] = {1.0 - p, p};
    local.emplace(d.doc.raw_text, hopeal::ProbDist::from_pair(1.0 - p, p));
  }
  testing::write_text(dir / "table.json", table.dump());
  REQUIRE(cli("al-run --min-rounds 5 --train " + q(dir / "train.csv") + " --out-dir " + q(dir / "ext") +
                  " --model \"external:" + kMock + " --table " + (dir / "table.json").string() + "\"",
              dir / "out", dir / "err") == 0);

  hopeal::ScorerFactory factory = [local](std::span<const hopeal::LabeledDocument>) {
    return std::make_shared<hopeal::TableScorer>(local);
  };
  hopeal::ALConfig cfg;
  cfg.min_rounds = 5;
  const auto in_process = hopeal::run_loop(docs, factory, hopeal::Oracle::from(docs), cfg);
  CHECK(testing::read_text(dir / "ext" / "history.jsonl") == hopeal::history_to_jsonl(in_process.state.history));

  CHECK(cli("al-run --train " + q(dir / "train.csv") + " --out-dir " + q(dir / "bad") + " --model \"external:" +
                kMock + " --fault bad-prob\"",
            dir / "out", dir / "err") == 3);
  CHECK(cli("al-run --train " + q(dir / "train.csv") + " --out-dir " + q(dir / "bad") +
                " --model external:/nonexistent/scorer",
            dir / "out", dir / "err") == 3);
}

TEST_CASE("train, predict and compatibility checks") {
  testing::TempDir dir("cli_predict");
  testing::write_text(dir / "train.csv", "id,text,label\n1,good great,Hope\n2,bad awful,Not Hope\n");
  REQUIRE(cli("train --lambda 0.01 --train " + q(dir / "train.csv") + " --out-dir " + q(dir / "m"), dir / "out",
              dir / "err") == 0);
  testing::write_text(dir / "test.csv", "id,text\n10,great\n11,awful\n12,unknown words\n");
  REQUIRE(cli("predict --id-col id --model " + q(dir / "m" / "model.json") + " --vectorizer " + q(dir / "m" / "vectorizer.json") +
                  " --input " + q(dir / "test.csv"),
              dir / "out", dir / "err") == 0);
  CHECK(testing::read_text(dir / "out") == "id,label\n10,Hope\n11,Not Hope\n12,Not Hope\n");

  testing::write_text(dir / "empty.csv", "id,text\n");
  REQUIRE(cli("predict --model " + q(dir / "m" / "model.json") + " --vectorizer " + q(dir / "m" / "vectorizer.json") +
                  " --input " + q(dir / "empty.csv"),
              dir / "out", dir / "err") == 0);
  CHECK(testing::read_text(dir / "out") == "id,label\n");

  testing::write_text(dir / "other.csv", "text,label\nsomething else entirely,Hope\nmore words,Not Hope\n");
  REQUIRE(cli("train --train " + q(dir / "other.csv") + " --out-dir " + q(dir / "m2"), dir / "out", dir / "err") == 0);
  CHECK(cli("predict --model " + q(dir / "m" / "model.json") + " --vectorizer " + q(dir / "m2" / "vectorizer.json") +
                " --input " + q(dir / "test.csv"),
            dir / "out", dir / "err") == 2);
}

TEST_CASE("cv command") {
  testing::TempDir dir("cli_cv");
  testing::write_text(dir / "train.csv", testing::docs_to_csv(testing::synthetic_docs(50, 15)));
  REQUIRE(cli("cv --input " + q(dir / "train.csv") + " --json-out " + q(dir / "cv.json"), dir / "out", dir / "err") ==
          0);
  const auto csv = testing::read_text(dir / "out");
  CHECK(line_count(csv) == 7);
  CHECK(csv.find(",mean,") != std::string::npos);
  const auto j = nlohmann::json::parse(testing::read_text(dir / "cv.json"));
  REQUIRE(j["folds"].size() == 5);
  double sum = 0.0;
  for (const auto& f : j["folds"]) sum += f["accuracy"].get<double>();
  CHECK(std::abs(j["mean"]["accuracy"].get<double>() - sum / 5.0) <= 1e-12);

  testing::write_text(dir / "small.csv", "text,label\na,Hope\nb,Hope\nc,Hope\nd,Not Hope\ne,Not Hope\nf,Not Hope\n"
                                         "g,Not Hope\nh,Not Hope\n");
  CHECK(cli("cv --input " + q(dir / "small.csv"), dir / "out", dir / "err") == 2);
}

TEST_CASE("config file values yield to command-line flags") {
  testing::TempDir dir("cli_config");
  testing::write_text(dir / "train.csv", testing::docs_to_csv(testing::synthetic_docs(300, 16)));
  testing::write_text(dir / "cfg.json", R"({"batch-k": 7, "max-rounds": 2, "min-rounds": 2})");
  REQUIRE(cli("al-run --config " + q(dir / "cfg.json") + " --train " + q(dir / "train.csv") + " --out-dir " +
                  q(dir / "a"),
              dir / "out", dir / "err") == 0);
  auto h = jsonl(testing::read_text(dir / "a" / "history.jsonl"));
  REQUIRE(h.size() == 2);
  CHECK(h[0]["selected_ids"].size() == 7);

  REQUIRE(cli("al-run --config " + q(dir / "cfg.json") + " --batch-k 3 --train " + q(dir / "train.csv") +
                  " --out-dir " + q(dir / "b"),
              dir / "out", dir / "err") == 0);
  h = jsonl(testing::read_text(dir / "b" / "history.jsonl"));
  REQUIRE(h.size() == 2);
  CHECK(h[0]["selected_ids"].size() == 3);
}
