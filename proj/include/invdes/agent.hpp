#pragma once

// Agent interface. The harness opens one session per attempt, so nothing
// carries over between attempts; within a session the agent sees every
// harness message in order.

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "invdes/model.hpp"

namespace invdes {

/// Transport failure (child crashed, connection refused). The harness marks
/// the attempt errored and moves on.
class AgentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TurnRequest {
  std::string task_id;
  int attempt = 0;
  int turn = 0;                  // 1-based
  std::string goal_rendering;    // same text every turn
  json schema;                   // design schema of the domain
  std::optional<std::string> feedback;  // harness message after turn 1
  /// The message the agent should answer: the goal on turn 1, otherwise
  /// the feedback or retry text.
  const std::string& message() const { return feedback ? *feedback : goal_rendering; }
};

struct AgentReply {
  std::string raw_text;
  // Set when the transport delivered no usable reply (timeout, malformed
  // line); the turn then counts as a parse failure.
  std::optional<std::string> protocol_error;
};

class AgentSession {
 public:
  virtual ~AgentSession() = default;
  virtual AgentReply respond(const TurnRequest& request) = 0;
};

class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string name() const = 0;
  virtual std::unique_ptr<AgentSession> open(const TaskRecord& task, int attempt) const = 0;
  /// False when sessions must not run concurrently.
  virtual bool concurrent() const { return true; }
  /// Checks the transport before a run; throws AgentError on failure.
  virtual void handshake() const {}
};

}  // namespace invdes
