#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hopeal/classifier.hpp"

namespace hopeal {

// Wire format: newline-delimited JSON over the child's stdin/stdout.
//   scorer -> client, once:  {"protocol":"al-scorer","version":1}
//   client -> scorer:        {"request_id":N,"texts":[...]}
//   scorer -> client:        {"request_id":N,"probs":[[p_not_hope,p_hope],...]}
inline constexpr std::string_view kProtocolName = "al-scorer";
inline constexpr int kProtocolVersion = 1;

struct ScoreRequest {
  std::int64_t request_id = 0;
  std::vector<std::string> texts;
};

struct ScoreResponse {
  std::int64_t request_id = 0;
  std::vector<std::array<double, 2>> probs;
};

std::string handshake_line();
std::string encode_request(const ScoreRequest& req);
std::string encode_response(const ScoreResponse& resp);
/// Throws ProtocolError on malformed JSON or shape.
ScoreResponse decode_response(std::string_view line);
ScoreRequest decode_request(std::string_view line);

/// Checks id and row count against the request and converts each row with
/// ProbDist::from_pair. Throws ProtocolError on any violation.
std::vector<ProbDist> validate_response(const ScoreRequest& req, const ScoreResponse& resp);

/// Splits a command line on whitespace, honouring single and double quotes
/// and backslash escapes.
std::vector<std::string> split_command(std::string_view command);

struct SessionOptions {
  std::chrono::milliseconds handshake_timeout{std::chrono::seconds(60)};
  std::chrono::milliseconds response_timeout{std::chrono::minutes(10)};
};

/// A running external scorer. Single owner; one request in flight at a time.
/// Destruction closes the child's stdin, waits briefly, then kills it.
class ScorerSession {
 public:
  /// Starts argv[0] (searched on PATH) and waits for the handshake. Throws
  /// ProtocolError on spawn failure, handshake timeout, malformed handshake
  /// or version mismatch.
  static std::unique_ptr<ScorerSession> spawn(std::span<const std::string> argv, SessionOptions options = {});

  ScorerSession(const ScorerSession&) = delete;
  ScorerSession& operator=(const ScorerSession&) = delete;
  ~ScorerSession();

  /// Sends raw texts and returns one distribution per text. An empty batch
  /// returns immediately without a request. Throws ProtocolError on broken
  /// pipe, timeout, malformed JSON, id or count mismatch, or an invalid
  /// probability row.
  std::vector<ProbDist> score(std::span<const std::string> texts);

  std::int64_t last_request_id() const { return next_request_id_ - 1; }
  int pid() const { return pid_; }

 private:
  ScorerSession(int pid, int to_child, int from_child, SessionOptions options)
      : pid_(pid), to_child_(to_child), from_child_(from_child), options_(options) {}

  std::string read_line(std::chrono::milliseconds timeout);
  void write_all(std::string_view data);
  void shutdown();

  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  SessionOptions options_;
  std::string buffer_;
  std::int64_t next_request_id_ = 1;
};

std::unique_ptr<ScorerSession> spawn_scorer(std::span<const std::string> argv, SessionOptions options = {});
std::vector<ProbDist> score_batch_remote(ScorerSession& session, std::span<const std::string> texts);

/// Scorer adapter sending each document's raw text to the session.
class RemoteScorer : public Scorer {
 public:
  explicit RemoteScorer(std::shared_ptr<ScorerSession> session) : session_(std::move(session)) {}
  std::vector<ProbDist> score_batch(std::span<const Document> docs) override;

 private:
  std::shared_ptr<ScorerSession> session_;
};

}  // namespace hopeal
