/*
 * Copyright 2026 The ERAlign Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "eralign/scorer.h"

#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <unicode/utf8.h>

#include "eralign/features.h"
#include "json.hpp"

namespace eralign {

namespace {

std::unordered_map<std::string, double> TrigramCounts(std::string_view text) {
  const std::string norm = normalize_text(text);
  std::vector<std::size_t> b;
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(norm.data());
  const auto len = static_cast<std::int32_t>(norm.size());
  for (std::int32_t i = 0; i < len;) {
    b.push_back(static_cast<std::size_t>(i));
    UChar32 c;
    U8_NEXT(bytes, i, len, c);
  }
  b.push_back(norm.size());
  std::unordered_map<std::string, double> counts;
  const std::size_t n = b.size() - 1;
  if (n == 0) return counts;
  if (n < 3) {
    counts[norm] += 1.0;
    return counts;
  }
  for (std::size_t k = 0; k + 2 < n; ++k) {
    counts[norm.substr(b[k], b[k + 3] - b[k])] += 1.0;
  }
  return counts;
}

}  // namespace

double LexicalNgramScorer::Similarity(std::string_view a, std::string_view b) {
  const auto ca = TrigramCounts(a);
  const auto cb = TrigramCounts(b);
  if (ca.empty() || cb.empty()) return 0.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [g, v] : ca) {
    na += v * v;
    auto it = cb.find(g);
    if (it != cb.end()) dot += v * it->second;
  }
  for (const auto& [g, v] : cb) nb += v * v;
  return dot / std::sqrt(na * nb);
}

std::vector<double> LexicalNgramScorer::Score(
    std::span<const ScoreRequest> requests) {
  std::vector<double> out;
  out.reserve(requests.size());
  for (const ScoreRequest& r : requests) {
    out.push_back(Similarity(r.source_text, r.target_text));
  }
  return out;
}

PrecomputedTableScorer PrecomputedTableScorer::Load(
    const std::filesystem::path& path, const KnowledgeGraph& source,
    const KnowledgeGraph& target) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  PrecomputedTableScorer scorer;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::int64_t src = 0, tgt = 0;
    double score = 0.0;
    std::string extra;
    if (!(fields >> src >> tgt >> score) || (fields >> extra)) {
      throw ParseError(path.string(), line_no,
                       "malformed line: expected src_id<TAB>tgt_id<TAB>score");
    }
    if (!std::isfinite(score)) {
      throw ParseError(path.string(), line_no, "non-finite score");
    }
    const auto s = source.entity_by_key(src);
    const auto t = target.entity_by_key(tgt);
    if (!s || !t) {
      throw ParseError(path.string(), line_no,
                       "unknown entity id " + std::to_string(!s ? src : tgt));
    }
    scorer.table_[{*s, *t}] = score;
  }
  return scorer;
}

std::vector<double> PrecomputedTableScorer::Score(
    std::span<const ScoreRequest> requests) {
  std::vector<double> out;
  out.reserve(requests.size());
  for (const ScoreRequest& r : requests) {
    auto it = table_.find({r.source, r.target});
    out.push_back(it == table_.end() ? 0.0 : it->second);
  }
  return out;
}

std::vector<double> FunctionScorer::Score(
    std::span<const ScoreRequest> requests) {
  std::vector<double> out;
  out.reserve(requests.size());
  for (std::size_t k = 0; k < requests.size(); ++k) {
    const double v = fn_(requests[k]);
    if (!std::isfinite(v)) throw ScorerError("scorer returned non-finite", k);
    out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// External process

ExternalProcessScorer::ExternalProcessScorer(const std::string& command) {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0) {
    throw ScorerError(std::string("socketpair: ") + std::strerror(errno), 0);
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    throw ScorerError(std::string("fork: ") + std::strerror(errno), 0);
  }
  if (pid == 0) {
    ::close(fds[0]);
    ::dup2(fds[1], STDIN_FILENO);
    ::dup2(fds[1], STDOUT_FILENO);
    if (fds[1] != STDIN_FILENO && fds[1] != STDOUT_FILENO) ::close(fds[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(fds[1]);
  pid_ = pid;
  fd_ = fds[0];

  std::string line;
  for (;;) {
    if (!ReadLine(line)) {
      Shutdown();
      throw ScorerError("scorer worker exited before signalling ready: " +
                            command,
                        0);
    }
    if (line.empty()) continue;
    const auto msg = nlohmann::json::parse(line, nullptr, false);
    if (!msg.is_discarded() && msg.is_object() && msg.value("ready", false)) {
      break;
    }
    Shutdown();
    throw ScorerError("scorer worker sent unexpected first line: " + line, 0);
  }
}

ExternalProcessScorer::~ExternalProcessScorer() { Shutdown(); }

void ExternalProcessScorer::Shutdown() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_WR);
    ::close(fd_);
    fd_ = -1;
  }
  if (pid_ > 0) {
    int status = 0;
    for (int k = 0; k < 100; ++k) {
      if (::waitpid(pid_, &status, WNOHANG) != 0) {
        pid_ = -1;
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

bool ExternalProcessScorer::ReadLine(std::string& line) {
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return true;
    }
    char chunk[4096];
    const ssize_t got = ::recv(fd_, chunk, sizeof(chunk), 0);
    if (got < 0 && errno == EINTR) continue;
    if (got <= 0) return false;
    buffer_.append(chunk, static_cast<std::size_t>(got));
  }
}

std::vector<double> ExternalProcessScorer::Score(
    std::span<const ScoreRequest> requests) {
  std::vector<std::optional<double>> results(requests.size());
  const auto first_unanswered = [&] {
    for (std::size_t k = 0; k < results.size(); ++k) {
      if (!results[k]) return k;
    }
    return results.size();
  };
  if (fd_ < 0) throw ScorerError("scorer worker is not running", 0);

  std::unordered_map<std::int64_t, std::size_t> index_of;
  std::string out;
  for (std::size_t k = 0; k < requests.size(); ++k) {
    const std::int64_t id = next_id_++;
    index_of[id] = k;
    nlohmann::json req = {{"id", id},
                          {"a", std::string(requests[k].source_text)},
                          {"b", std::string(requests[k].target_text)}};
    out += req.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    out += '\n';
  }

  std::size_t written = 0, answered = 0;
  while (answered < requests.size()) {
    pollfd pfd{fd_, POLLIN, 0};
    if (written < out.size()) pfd.events |= POLLOUT;
    if (::poll(&pfd, 1, -1) < 0) {
      if (errno == EINTR) continue;
      throw ScorerError(std::string("poll: ") + std::strerror(errno),
                        first_unanswered());
    }
    if ((pfd.revents & POLLOUT) && written < out.size()) {
      const ssize_t n = ::send(fd_, out.data() + written, out.size() - written,
                               MSG_NOSIGNAL | MSG_DONTWAIT);
      if (n < 0 && errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR) {
        throw ScorerError("scorer worker closed its input",
                          first_unanswered());
      }
      if (n > 0) written += static_cast<std::size_t>(n);
    }
    if (pfd.revents & (POLLIN | POLLHUP | POLLERR)) {
      char chunk[4096];
      const ssize_t got = ::recv(fd_, chunk, sizeof(chunk), MSG_DONTWAIT);
      if (got == 0 || (got < 0 && errno != EAGAIN && errno != EINTR)) {
        throw ScorerError("scorer worker exited with " +
                              std::to_string(requests.size() - answered) +
                              " requests outstanding",
                          first_unanswered());
      }
      if (got > 0) buffer_.append(chunk, static_cast<std::size_t>(got));
      std::size_t nl;
      while ((nl = buffer_.find('\n')) != std::string::npos) {
        const std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (line.empty()) continue;
        const auto msg = nlohmann::json::parse(line, nullptr, false);
        if (msg.is_discarded() || !msg.is_object() || !msg.contains("id") ||
            !msg["id"].is_number_integer()) {
          throw ScorerError("malformed scorer response: " + line,
                            first_unanswered());
        }
        auto it = index_of.find(msg["id"].get<std::int64_t>());
        if (it == index_of.end() || results[it->second]) {
          throw ScorerError("unexpected response id in: " + line,
                            first_unanswered());
        }
        if (msg.contains("error")) {
          throw ScorerError("scorer error: " + msg["error"].dump(), it->second);
        }
        if (!msg.contains("score") || !msg["score"].is_number() ||
            !std::isfinite(msg["score"].get<double>())) {
          throw ScorerError("scorer response without finite score: " + line,
                            it->second);
        }
        results[it->second] = msg["score"].get<double>();
        ++answered;
      }
    }
  }
  std::vector<double> scores;
  scores.reserve(results.size());
  for (const auto& r : results) scores.push_back(*r);
  return scores;
}

std::unique_ptr<Scorer> make_scorer(const ScorerBinding& binding,
                                    const KnowledgeGraph& source,
                                    const KnowledgeGraph& target) {
  switch (binding.kind) {
    case ScorerKind::kLexicalNgram:
      return std::make_unique<LexicalNgramScorer>();
    case ScorerKind::kExternalProcess:
      return std::make_unique<ExternalProcessScorer>(binding.command);
    case ScorerKind::kPrecomputedTable:
      return std::make_unique<PrecomputedTableScorer>(
          PrecomputedTableScorer::Load(binding.table_path, source, target));
  }
  throw InvalidArgument("unknown scorer kind");
}

}  // namespace eralign
