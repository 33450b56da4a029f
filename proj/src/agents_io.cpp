// External agents: a child process speaking JSON lines, or an HTTP endpoint.

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <iostream>
#include <mutex>
#include <thread>

#include "httplib.h"
#include "invdes/agents.hpp"

namespace invdes {

namespace {

using Clock = std::chrono::steady_clock;

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

json request_body(const TurnRequest& req) {
  json j = {{"task_id", req.task_id},
            {"attempt", req.attempt},
            {"turn", req.turn},
            {"goal_rendering", req.goal_rendering},
            {"schema", req.schema}};
  if (req.feedback) j["feedback"] = *req.feedback;
  return j;
}

/// Extracts raw_text from a reply line; nullopt when malformed.
std::optional<std::string> reply_text(const std::string& line) {
  auto j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("raw_text") || !j["raw_text"].is_string()) {
    return std::nullopt;
  }
  return j["raw_text"].get<std::string>();
}

bool valid_handshake(const std::string& line) {
  auto j = json::parse(line, nullptr, false);
  return !j.is_discarded() && j.is_object() && j.value("protocol", std::string()) == "invdes-agent" &&
         j.value("version", 0) == kAgentProtocolVersion;
}

class ChildProcess {
 public:
  explicit ChildProcess(const std::string& command) {
    ignore_sigpipe();
    int in[2], out[2];
    if (::pipe(in) != 0 || ::pipe(out) != 0) throw AgentError("pipe failed: " + std::string(std::strerror(errno)));
    pid_ = ::fork();
    if (pid_ < 0) throw AgentError("fork failed: " + std::string(std::strerror(errno)));
    if (pid_ == 0) {
      ::dup2(in[0], STDIN_FILENO);
      ::dup2(out[1], STDOUT_FILENO);
      ::close(in[0]), ::close(in[1]), ::close(out[0]), ::close(out[1]);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(in[0]);
    ::close(out[1]);
    to_child_ = in[1];
    from_child_ = out[0];
    ::fcntl(to_child_, F_SETFD, FD_CLOEXEC);
    ::fcntl(from_child_, F_SETFD, FD_CLOEXEC);
  }

  ~ChildProcess() {
    if (to_child_ >= 0) ::close(to_child_);
    if (from_child_ >= 0) ::close(from_child_);
    if (pid_ > 0) {
      for (int i = 0; i < 50; ++i) {
        if (::waitpid(pid_, nullptr, WNOHANG) == pid_) return;
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, nullptr, 0);
    }
  }

  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  void write_line(const std::string& line) {
    std::string data = line + "\n";
    std::size_t off = 0;
    while (off < data.size()) {
      const auto n = ::write(to_child_, data.data() + off, data.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw AgentError("agent process closed its input");
      }
      off += static_cast<std::size_t>(n);
    }
  }

  enum class Read { Line, Timeout };

  /// Next line within timeout_ms; throws AgentError on EOF.
  Read read_line(std::string& line, int timeout_ms) {
    const auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms);
    while (true) {
      const auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return Read::Line;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
      if (left <= 0) return Read::Timeout;
      if (!fill(static_cast<int>(left))) return Read::Timeout;
    }
  }

  /// Discards complete lines that are already waiting; returns how many.
  int drain() {
    int n = 0;
    while (fill(0)) {
    }
    for (auto nl = buffer_.find('\n'); nl != std::string::npos; nl = buffer_.find('\n')) {
      buffer_.erase(0, nl + 1);
      ++n;
    }
    return n;
  }

 private:
  // Reads what is available within timeout_ms. False on timeout.
  bool fill(int timeout_ms) {
    pollfd p{from_child_, POLLIN, 0};
    const int rc = ::poll(&p, 1, timeout_ms);
    if (rc < 0) {
      if (errno == EINTR) return true;
      throw AgentError("poll failed");
    }
    if (rc == 0) return false;
    char buf[65536];
    const auto n = ::read(from_child_, buf, sizeof buf);
    if (n < 0) {
      if (errno == EINTR) return true;
      throw AgentError("read from agent process failed");
    }
    if (n == 0) throw AgentError("agent process exited");
    buffer_.append(buf, static_cast<std::size_t>(n));
    return true;
  }

  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

class StdioSession final : public AgentSession {
 public:
  explicit StdioSession(const StdioAgentOptions& o) : opts_(o), child_(o.command) {
    std::string line;
    if (child_.read_line(line, o.handshake_timeout_ms) != ChildProcess::Read::Line || !valid_handshake(line)) {
      throw AgentError("agent handshake failed");
    }
  }

  AgentReply respond(const TurnRequest& req) override {
    if (const int extra = child_.drain(); extra > 0) {
      std::cerr << "agent protocol violation: discarded " << extra << " unexpected line(s)\n";
    }
    child_.write_line(request_body(req).dump());
    std::string line;
    const auto deadline = Clock::now() + std::chrono::milliseconds(opts_.turn_timeout_ms);
    while (true) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
      if (left <= 0 || child_.read_line(line, static_cast<int>(left)) == ChildProcess::Read::Timeout) {
        return {"", "timeout after " + std::to_string(opts_.turn_timeout_ms) + " ms"};
      }
      // Replies tagged with another turn are stale.
      auto j = json::parse(line, nullptr, false);
      if (j.is_object() && j.contains("turn") && j["turn"].is_number_integer() && j["turn"].get<int>() != req.turn) {
        std::cerr << "agent protocol violation: reply for turn " << j["turn"].get<int>() << " discarded\n";
        continue;
      }
      break;
    }
    auto text = reply_text(line);
    if (!text) return {"", "malformed reply line"};
    return {*text, std::nullopt};
  }

 private:
  StdioAgentOptions opts_;
  ChildProcess child_;
};

class StdioAgent final : public Agent {
 public:
  explicit StdioAgent(StdioAgentOptions o) : opts_(std::move(o)) {}
  std::string name() const override { return "stdio"; }
  std::unique_ptr<AgentSession> open(const TaskRecord&, int) const override {
    return std::make_unique<StdioSession>(opts_);
  }
  void handshake() const override { StdioSession probe(opts_); }

 private:
  StdioAgentOptions opts_;
};

struct ParsedUrl {
  std::string origin;  // scheme://host:port
  std::string prefix;  // path without trailing slash
};

ParsedUrl split_url(const std::string& url) {
  const auto scheme = url.find("://");
  const auto path = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  ParsedUrl p;
  p.origin = path == std::string::npos ? url : url.substr(0, path);
  p.prefix = path == std::string::npos ? "" : url.substr(path);
  while (!p.prefix.empty() && p.prefix.back() == '/') p.prefix.pop_back();
  return p;
}

class HttpSession final : public AgentSession {
 public:
  explicit HttpSession(const HttpAgentOptions& o) : url_(split_url(o.url)), client_(url_.origin) {
    const auto secs = o.turn_timeout_ms / 1000;
    const auto usecs = (o.turn_timeout_ms % 1000) * 1000;
    client_.set_read_timeout(secs, usecs);
    client_.set_write_timeout(secs, usecs);
    client_.set_connection_timeout(secs, usecs);
  }

  /// Body of the reply, or nullopt with `err` set.
  std::optional<std::string> post(const json& body, std::string& err) {
    auto res = client_.Post(url_.prefix + "/turn", body.dump(), "application/json");
    if (!res) {
      if (res.error() == httplib::Error::Read) {
        err = "timeout";
        return std::nullopt;
      }
      throw AgentError("http agent unreachable: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      err = "http status " + std::to_string(res->status);
      return std::nullopt;
    }
    return res->body;
  }

  AgentReply respond(const TurnRequest& req) override {
    std::string err;
    auto body = post(request_body(req), err);
    if (!body) return {"", err};
    auto text = reply_text(*body);
    if (!text) return {"", "malformed reply body"};
    return {*text, std::nullopt};
  }

 private:
  ParsedUrl url_;
  httplib::Client client_;
};

class HttpAgent final : public Agent {
 public:
  explicit HttpAgent(HttpAgentOptions o) : opts_(std::move(o)) {}
  std::string name() const override { return "http"; }
  std::unique_ptr<AgentSession> open(const TaskRecord&, int) const override {
    return std::make_unique<HttpSession>(opts_);
  }
  void handshake() const override {
    HttpSession s(opts_);
    std::string err;
    auto body = s.post({{"handshake", true}, {"version", kAgentProtocolVersion}}, err);
    if (!body || !valid_handshake(*body)) throw AgentError("agent handshake failed" + (err.empty() ? "" : ": " + err));
  }

 private:
  HttpAgentOptions opts_;
};

}  // namespace

std::unique_ptr<Agent> make_stdio_agent(StdioAgentOptions options) {
  return std::make_unique<StdioAgent>(std::move(options));
}

std::unique_ptr<Agent> make_http_agent(HttpAgentOptions options) {
  return std::make_unique<HttpAgent>(std::move(options));
}

}  // namespace invdes
