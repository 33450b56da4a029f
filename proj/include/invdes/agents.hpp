#pragma once

// Reference agents and external-process adapters.

#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "invdes/agent.hpp"
#include "invdes/domain.hpp"
#include "invdes/rng.hpp"

namespace invdes {

inline constexpr int kAgentProtocolVersion = 1;
inline constexpr double kDiscreteResampleProb = 0.2;

/// `{"domain": ..., "params": ...}` inside a json fence.
std::string design_reply(const Design& d);

/// A valid design drawn from the goal's constraint box (the sampler shared
/// with task generation). Falls back to the last draw if none validates.
Design random_design(const Goal& goal, CounterRng& rng);

/// Fresh random designs; after `budget` turns replies without a design.
std::unique_ptr<Agent> make_random_agent(int budget, std::uint64_t seed);

/// Greedy local search driven by the textual feedback rows.
std::unique_ptr<Agent> make_hillclimb_agent(double step_scale, std::uint64_t seed);

/// Replies with a fixed design per task id (e.g. the hidden generators).
std::unique_ptr<Agent> make_replay_agent(std::map<std::string, Design> designs);

/// Replies with the same text every turn.
std::unique_ptr<Agent> make_constant_agent(std::string text);

struct StdioAgentOptions {
  std::string command;  // run through /bin/sh -c
  int turn_timeout_ms = 60'000;
  int handshake_timeout_ms = 10'000;
};

/// One child process per session. Protocol: the child first prints
/// {"protocol": "invdes-agent", "version": 1}; then for every request line
/// {task_id, attempt, turn, goal_rendering, schema, feedback?} it prints one
/// line {"raw_text": ...}.
std::unique_ptr<Agent> make_stdio_agent(StdioAgentOptions options);

struct HttpAgentOptions {
  std::string url;  // scheme://host:port[/prefix]; requests go to <prefix>/turn
  int turn_timeout_ms = 60'000;
};

/// Same message bodies as the stdio protocol, one POST per turn.
std::unique_ptr<Agent> make_http_agent(HttpAgentOptions options);

/// Throws AgentError when the agent does not answer the handshake.
void agent_handshake(const Agent& agent);

/// Parses `random:seed=1,budget=20`, `hillclimb:seed=1,step=0.1`,
/// `replay`, `stdio:<command>`, `http:url=...`. `hidden` feeds replay.
std::unique_ptr<Agent> make_agent(const std::string& spec, const std::map<std::string, Design>& hidden = {},
                                  int turn_timeout_ms = 60'000);

}  // namespace invdes
