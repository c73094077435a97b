// Stand-in external scorer speaking the al-scorer protocol on stdin/stdout.
// Probabilities come from a JSON table keyed by raw text ({"text": [p0, p1]}),
// a fixed pair, or a hash of the text. --fault makes it misbehave on purpose.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <unordered_map>

#include <CLI11.hpp>
#include <json.hpp>

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::pair<double, double> hashed_probs(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  const double p = (static_cast<double>(h % 1000) + 0.5) / 1000.0;
  return {1.0 - p, p};
}

void emit(const ordered_json& j) {
  std::cout << j.dump(-1, ' ', false, json::error_handler_t::replace) << '\n' << std::flush;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"al-scorer protocol mock"};
  std::string table_path;
  std::vector<double> fixed;
  int version = 1;
  std::string fault = "none";
  std::string log_path;
  app.add_option("--table", table_path, "JSON object mapping raw text to [p_not_hope, p_hope]");
  app.add_option("--fixed", fixed, "pair returned for every text not in the table")->expected(2)->delimiter(',');
  app.add_option("--version", version, "protocol version announced in the handshake");
  app.add_option("--fault", fault, "none|extra-row|bad-prob|bad-json|wrong-id|no-handshake|crash|error|silent");
  app.add_option("--log", log_path, "append every request line to this file");
  CLI11_PARSE(app, argc, argv);

  std::unordered_map<std::string, std::pair<double, double>> table;
  if (!table_path.empty()) {
    std::ifstream in(table_path);
    if (!in) {
      std::cerr << "mock_scorer: cannot open " << table_path << '\n';
      return 1;
    }
    const json t = json::parse(in);
    for (const auto& [text, row] : t.items()) table[text] = {row.at(0).get<double>(), row.at(1).get<double>()};
  }

  if (fault == "no-handshake") {
    std::string ignored;
    while (std::getline(std::cin, ignored)) {
    }
    return 0;
  }
  emit(ordered_json{{"protocol", "al-scorer"}, {"version", version}});
  if (fault == "crash") return 0;

  std::ofstream log;
  if (!log_path.empty()) log.open(log_path, std::ios::app);

  std::string line;
  while (std::getline(std::cin, line)) {
    if (log.is_open()) log << line << '\n' << std::flush;
    json req;
    try {
      req = json::parse(line);
    } catch (const json::parse_error& e) {
      emit(ordered_json{{"error", std::string("malformed request: ") + e.what()}});
      continue;
    }
    if (fault == "silent") continue;
    if (fault == "error") {
      emit(ordered_json{{"error", "scoring failed"}});
      continue;
    }
    if (fault == "bad-json") {
      std::cout << "{\"request_id\":" << req.at("request_id").get<std::int64_t>() << ",\"probs\":[\n" << std::flush;
      continue;
    }

    ordered_json resp;
    const auto id = req.at("request_id").get<std::int64_t>();
    resp["request_id"] = fault == "wrong-id" ? id + 1 : id;
    resp["probs"] = ordered_json::array();
    for (const auto& t : req.at("texts")) {
      const auto text = t.get<std::string>();
      std::pair<double, double> p;
      if (auto it = table.find(text); it != table.end()) {
        p = it->second;
      } else if (fixed.size() == 2) {
        p = {fixed[0], fixed[1]};
      } else {
        p = hashed_probs(text);
      }
      if (fault == "bad-prob") p = {0.6, 0.6};
      resp["probs"].push_back({p.first, p.second});
    }
    if (fault == "extra-row") resp["probs"].push_back({0.5, 0.5});
    emit(resp);
  }
  return 0;
}
