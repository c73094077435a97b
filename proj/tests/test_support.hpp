#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "hopeal/corpus.hpp"

namespace testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("hopeal_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Two-topic synthetic corpus: Hope documents draw mostly from one word list,
/// NotHope from another, with a shared noise vocabulary.
inline std::vector<hopeal::LabeledDocument> synthetic_docs(std::size_t n, std::uint64_t seed,
                                                           double signal = 0.6) {
  static const std::vector<std::string> hope_words = {"hope", "bright", "together", "future", "believe",
                                                      "strong", "smile", "grateful", "heal", "rise"};
  static const std::vector<std::string> dark_words = {"never", "awful", "lost", "broken", "tired",
                                                      "alone", "fail", "worse", "pointless", "angry"};
  static const std::vector<std::string> noise = {"the", "day", "people", "time", "city", "phone", "work",
                                                 "news", "game", "road", "rain", "food", "music", "school"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<hopeal::LabeledDocument> docs;
  for (std::size_t i = 0; i < n; ++i) {
    const auto label = i % 2 == 0 ? hopeal::Label::Hope : hopeal::Label::NotHope;
    const auto& own = label == hopeal::Label::Hope ? hope_words : dark_words;
    const auto& other = label == hopeal::Label::Hope ? dark_words : hope_words;
    const std::size_t len = 4 + rng() % 8;
    std::string text;
    for (std::size_t t = 0; t < len; ++t) {
      const double r = u(rng);
      const auto& list = r < signal ? own : (r < signal + 0.15 ? other : noise);
      if (!text.empty()) text += ' ';
      text += list[rng() % list.size()];
    }
    text += " #" + std::to_string(i);  // keeps raw texts unique
    docs.push_back({hopeal::Document::from_raw(std::to_string(i), text), label});
  }
  return docs;
}

inline std::string docs_to_csv(const std::vector<hopeal::LabeledDocument>& docs) {
  std::vector<hopeal::CorpusEntry> entries;
  for (const auto& d : docs) entries.push_back({d.doc, d.label});
  return hopeal::corpus_to_csv(hopeal::Corpus("synthetic", {}, hopeal::Split::Train, std::move(entries)));
}

/// Runs a shell command, returns its exit status.
inline int run(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : 128;
}

}  // namespace testing
