#include "hopeal/scorer_protocol.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <thread>

#include "hopeal/error.hpp"

extern char** environ;

namespace hopeal {
namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;
using nlohmann::ordered_json;

std::string dump(const ordered_json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

json parse_line(std::string_view line, std::string_view what) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string(what) + ": malformed JSON: " + e.what());
  }
}

std::string errno_text(int err) { return std::strerror(err); }

}  // namespace

std::string handshake_line() {
  ordered_json j;
  j["protocol"] = kProtocolName;
  j["version"] = kProtocolVersion;
  return dump(j) + "\n";
}

std::string encode_request(const ScoreRequest& req) {
  ordered_json j;
  j["request_id"] = req.request_id;
  j["texts"] = req.texts;
  return dump(j) + "\n";
}

std::string encode_response(const ScoreResponse& resp) {
  ordered_json j;
  j["request_id"] = resp.request_id;
  j["probs"] = ordered_json::array();
  for (const auto& row : resp.probs) j["probs"].push_back({row[0], row[1]});
  return dump(j) + "\n";
}

ScoreResponse decode_response(std::string_view line) {
  const json j = parse_line(line, "response");
  if (!j.is_object()) throw ProtocolError("response: expected a JSON object");
  if (j.contains("error")) throw ProtocolError("scorer reported an error: " + j["error"].dump());
  if (!j.contains("request_id") || !j["request_id"].is_number_integer()) {
    throw ProtocolError("response: missing integer request_id");
  }
  if (!j.contains("probs") || !j["probs"].is_array()) throw ProtocolError("response: missing probs array");
  ScoreResponse resp;
  resp.request_id = j["request_id"].get<std::int64_t>();
  for (const auto& row : j["probs"]) {
    if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
      throw ProtocolError("response: each probs row must be a pair of numbers");
    }
    resp.probs.push_back({row[0].get<double>(), row[1].get<double>()});
  }
  return resp;
}

ScoreRequest decode_request(std::string_view line) {
  const json j = parse_line(line, "request");
  if (!j.is_object() || !j.contains("request_id") || !j["request_id"].is_number_integer() || !j.contains("texts") ||
      !j["texts"].is_array()) {
    throw ProtocolError("request: expected {\"request_id\":N,\"texts\":[...]}");
  }
  ScoreRequest req;
  req.request_id = j["request_id"].get<std::int64_t>();
  for (const auto& t : j["texts"]) {
    if (!t.is_string()) throw ProtocolError("request: texts must be strings");
    req.texts.push_back(t.get<std::string>());
  }
  return req;
}

std::vector<ProbDist> validate_response(const ScoreRequest& req, const ScoreResponse& resp) {
  if (resp.request_id != req.request_id) {
    throw ProtocolError("response id " + std::to_string(resp.request_id) + " does not answer request " +
                        std::to_string(req.request_id));
  }
  if (resp.probs.size() != req.texts.size()) {
    throw ProtocolError("response has " + std::to_string(resp.probs.size()) + " rows for " +
                        std::to_string(req.texts.size()) + " texts");
  }
  std::vector<ProbDist> out;
  out.reserve(resp.probs.size());
  for (std::size_t i = 0; i < resp.probs.size(); ++i) {
    try {
      out.push_back(ProbDist::from_pair(resp.probs[i][0], resp.probs[i][1]));
    } catch (const InputError& e) {
      throw ProtocolError("response row " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

std::vector<std::string> split_command(std::string_view command) {
  std::vector<std::string> args;
  std::string cur;
  bool have = false;
  char quote = 0;
  for (std::size_t i = 0; i < command.size(); ++i) {
    const char c = command[i];
    if (quote) {
      if (c == quote) {
        quote = 0;
      } else if (c == '\\' && quote == '"' && i + 1 < command.size()) {
        cur.push_back(command[++i]);
      } else {
        cur.push_back(c);
      }
    } else if (c == '\'' || c == '"') {
      quote = c;
      have = true;
    } else if (c == '\\' && i + 1 < command.size()) {
      cur.push_back(command[++i]);
      have = true;
    } else if (c == ' ' || c == '\t' || c == '\n') {
      if (have) args.push_back(std::move(cur));
      cur.clear();
      have = false;
    } else {
      cur.push_back(c);
      have = true;
    }
  }
  if (quote) throw InputError("unterminated quote in command: " + std::string(command));
  if (have) args.push_back(std::move(cur));
  return args;
}

std::unique_ptr<ScorerSession> ScorerSession::spawn(std::span<const std::string> argv, SessionOptions options) {
  if (argv.empty()) throw ProtocolError("empty scorer command");

  // A scorer that dies mid-request must surface as an EPIPE error, not kill us.
  ::signal(SIGPIPE, SIG_IGN);

  int in_pipe[2];   // parent writes, child reads
  int out_pipe[2];  // child writes, parent reads
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw ProtocolError("pipe: " + errno_text(errno));
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw ProtocolError("pipe: " + errno_text(errno));
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

  std::vector<char*> cargv;
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  pid_t pid = -1;
  const int rc = ::posix_spawnp(&pid, cargv[0], &actions, nullptr, cargv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  if (rc != 0) {
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    throw ProtocolError("cannot start scorer '" + argv[0] + "': " + errno_text(rc));
  }

  std::unique_ptr<ScorerSession> session(new ScorerSession(pid, in_pipe[1], out_pipe[0], options));
  const std::string line = session->read_line(options.handshake_timeout);
  const json hs = parse_line(line, "handshake");
  if (!hs.is_object() || hs.value("protocol", std::string()) != kProtocolName || !hs.contains("version") ||
      !hs["version"].is_number_integer()) {
    throw ProtocolError("unexpected handshake: " + line);
  }
  const auto version = hs["version"].get<std::int64_t>();
  if (version != kProtocolVersion) {
    throw ProtocolError("scorer speaks protocol version " + std::to_string(version) + ", expected " +
                        std::to_string(kProtocolVersion));
  }
  return session;
}

ScorerSession::~ScorerSession() { shutdown(); }

void ScorerSession::shutdown() {
  if (to_child_ >= 0) ::close(to_child_);
  to_child_ = -1;
  if (pid_ > 0) {
    const auto deadline = Clock::now() + std::chrono::seconds(2);
    int status = 0;
    pid_t done = 0;
    while ((done = ::waitpid(pid_, &status, WNOHANG)) == 0 && Clock::now() < deadline) {
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (done == 0) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    }
    pid_ = -1;
  }
  if (from_child_ >= 0) ::close(from_child_);
  from_child_ = -1;
}

std::string ScorerSession::read_line(std::chrono::milliseconds timeout) {
  const auto deadline = Clock::now() + timeout;
  while (true) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (left.count() <= 0) throw ProtocolError("timed out waiting for the scorer");
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 1000 * 60 * 60)));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError("poll: " + errno_text(errno));
    }
    if (ready == 0) continue;
    char chunk[65536];
    const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      throw ProtocolError("read from scorer: " + errno_text(errno));
    }
    if (n == 0) throw ProtocolError("scorer closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

void ScorerSession::write_all(std::string_view data) {
  if (to_child_ < 0) throw ProtocolError("scorer session is closed");
  while (!data.empty()) {
    const ssize_t n = ::write(to_child_, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError("write to scorer: " + errno_text(errno));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

std::vector<ProbDist> ScorerSession::score(std::span<const std::string> texts) {
  if (texts.empty()) return {};
  ScoreRequest req;
  req.request_id = next_request_id_++;
  req.texts.assign(texts.begin(), texts.end());
  write_all(encode_request(req));
  return validate_response(req, decode_response(read_line(options_.response_timeout)));
}

std::unique_ptr<ScorerSession> spawn_scorer(std::span<const std::string> argv, SessionOptions options) {
  return ScorerSession::spawn(argv, options);
}

std::vector<ProbDist> score_batch_remote(ScorerSession& session, std::span<const std::string> texts) {
  return session.score(texts);
}

std::vector<ProbDist> RemoteScorer::score_batch(std::span<const Document> docs) {
  std::vector<std::string> texts;
  texts.reserve(docs.size());
  for (const auto& d : docs) texts.push_back(d.raw_text);
  return session_->score(texts);
}

}  // namespace hopeal
