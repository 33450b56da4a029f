#include "invdes/agents.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "invdes/harness.hpp"

namespace invdes {

namespace {

constexpr int kRandomRetries = 64;
constexpr double kSigmaGrow = 1.3;
constexpr double kSigmaShrink = 0.85;
constexpr double kSigmaMin = 0.02;
constexpr double kSigmaMax = 3.0;
constexpr double kBiasWeight = 0.5;
constexpr double kPassRowWeight = 0.3;
constexpr double kSensitivityDecay = 0.7;
// Non-improving local steps before a fresh random design is tried.
constexpr int kRestartAfter = 12;
// Integer coordinates wider than this are stepped like reals.
constexpr double kWideInteger = 12.0;

const char* const kNoDesign = "No further designs: the proposal budget is exhausted.";

class RandomSession final : public AgentSession {
 public:
  RandomSession(const TaskRecord& task, int attempt, int budget, std::uint64_t seed)
      : task_(task), attempt_(attempt), budget_(budget), seed_(seed) {}

  AgentReply respond(const TurnRequest& req) override {
    if (req.turn > budget_) return {kNoDesign, std::nullopt};
    Design d;
    for (int r = 0; r < kRandomRetries; ++r) {
      CounterRng rng{seed_, hash_string(task_.task_id), static_cast<std::uint64_t>(attempt_),
                     static_cast<std::uint64_t>(req.turn), static_cast<std::uint64_t>(r)};
      d = random_design(task_.goal, rng);
      if (seen_.insert(canonicalize(d.params).dump()).second) break;
    }
    return {design_reply(d), std::nullopt};
  }

 private:
  const TaskRecord& task_;
  int attempt_;
  int budget_;
  std::uint64_t seed_;
  std::set<std::string> seen_;
};

class RandomAgent final : public Agent {
 public:
  RandomAgent(int budget, std::uint64_t seed) : budget_(budget), seed_(seed) {
    if (budget < 1) throw ContractError("random agent budget must be >= 1");
  }
  std::string name() const override {
    return "random-b" + std::to_string(budget_) + "-s" + std::to_string(seed_);
  }
  std::unique_ptr<AgentSession> open(const TaskRecord& task, int attempt) const override {
    return std::make_unique<RandomSession>(task, attempt, budget_, seed_);
  }

 private:
  int budget_;
  std::uint64_t seed_;
};

bool steps_continuously(const Coordinate& c) {
  return c.type == CoordType::Real || (c.type == CoordType::Integer && c.span() > kWideInteger);
}

class HillClimbSession final : public AgentSession {
 public:
  HillClimbSession(const TaskRecord& task, int attempt, double step, std::uint64_t seed)
      : task_(task), domain_(get_domain(task.goal.domain)), step_(step), seed_(seed), attempt_(attempt) {
    coords_ = domain_.coordinates(task.goal);
    for (const auto& t : task.goal.targets) metric_index_[t.metric_name] = metric_index_.size();
    sens_.assign(coords_.size(), std::vector<double>(metric_index_.size(), 0.0));
  }

  AgentReply respond(const TurnRequest& req) override {
    CounterRng rng{seed_, hash_string(task_.task_id), static_cast<std::uint64_t>(attempt_),
                   static_cast<std::uint64_t>(req.turn)};
    if (req.turn == 1 || !have_last_) {
      last_ = task_.starting_design ? domain_.encode(task_.goal, *task_.starting_design)
                                    : domain_.encode(task_.goal, random_design(task_.goal, rng));
      have_last_ = true;
      return {design_reply(domain_.decode(task_.goal, last_)), std::nullopt};
    }
    const auto fb = req.feedback ? parse_feedback(*req.feedback) : std::nullopt;
    std::vector<double> err(metric_index_.size(), 0.0);
    const double reward = fb ? fb->reward : -1.0;
    if (fb) {
      for (const auto& row : fb->rows) {
        auto it = metric_index_.find(row.metric);
        if (it == metric_index_.end()) continue;
        const double w = row.pass ? (row.kind == TargetKind::Exact ? kPassRowWeight : 0.0) : 1.0;
        err[it->second] = w * std::clamp(row.rel_error, -10.0, 10.0);
      }
    }
    if (fb && have_best_ && !jumped_) learn(last_, err);
    if (!have_best_ || reward > best_reward_) {
      if (have_best_ && !jumped_) sigma_ = std::min(kSigmaMax, sigma_ * kSigmaGrow);
      if (jumped_) {
        sigma_ = 1.0;
        for (auto& row : sens_) std::fill(row.begin(), row.end(), 0.0);
      }
      best_ = last_;
      best_err_ = err;
      best_reward_ = reward;
      have_best_ = true;
      stall_ = 0;
    } else if (!jumped_) {
      sigma_ = std::max(kSigmaMin, sigma_ * kSigmaShrink);
      ++stall_;
    }
    jumped_ = false;
    if (fb && fb->success && fb->n_targets_met == static_cast<int>(fb->rows.size())) {
      last_ = best_;
    } else if (step_ > 0.0 && stall_ >= kRestartAfter) {
      // Escape a local optimum; the incumbent is kept unless the jump beats it.
      last_ = domain_.encode(task_.goal, random_design(task_.goal, rng));
      jumped_ = true;
      stall_ = 0;
    } else {
      last_ = propose(rng);
    }
    return {design_reply(domain_.decode(task_.goal, last_)), std::nullopt};
  }

 private:
  // Secant estimate of d(rel_error)/d(unit coordinate) from the last step.
  void learn(const Point& x, const std::vector<double>& err) {
    std::vector<double> du(coords_.size(), 0.0);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (!steps_continuously(coords_[i])) continue;
      du[i] = to_unit(coords_[i], x[i]) - to_unit(coords_[i], best_[i]);
      norm2 += du[i] * du[i];
    }
    if (norm2 < 1e-18) return;
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (du[i] == 0.0) continue;
      for (std::size_t m = 0; m < err.size(); ++m) {
        const double est = (err[m] - best_err_[m]) * du[i] / norm2;
        sens_[i][m] = kSensitivityDecay * sens_[i][m] + (1.0 - kSensitivityDecay) * est;
      }
    }
  }

  Point propose(CounterRng& rng) {
    Point x = best_;
    if (step_ <= 0.0) return x;
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      const auto& c = coords_[i];
      if (steps_continuously(c)) {
        double g = 0.0;
        for (std::size_t m = 0; m < best_err_.size(); ++m) g += best_err_[m] * sens_[i][m];
        const double scale = sigma_ * step_;
        const double bias = g > 0.0 ? -kBiasWeight * scale : g < 0.0 ? kBiasWeight * scale : 0.0;
        x[i] = from_unit(c, to_unit(c, best_[i]) + bias + scale * rng.normal());
      } else if (rng.bernoulli(kDiscreteResampleProb)) {
        const auto hi = c.type == CoordType::Categorical ? static_cast<long long>(c.choices.size()) - 1
                                                          : std::llround(c.hi);
        const auto lo = c.type == CoordType::Categorical ? 0LL : std::llround(c.lo);
        x[i] = static_cast<double>(rng.integer(lo, std::max(lo, hi)));
      }
    }
    return clamp_point(coords_, x);
  }

  const TaskRecord& task_;
  const Domain& domain_;
  double step_;
  std::uint64_t seed_;
  int attempt_;
  std::vector<Coordinate> coords_;
  std::map<std::string, std::size_t> metric_index_;
  std::vector<std::vector<double>> sens_;
  Point last_, best_;
  std::vector<double> best_err_;
  double best_reward_ = -1.0;
  double sigma_ = 1.0;
  int stall_ = 0;
  bool jumped_ = false;
  bool have_last_ = false;
  bool have_best_ = false;
};

class HillClimbAgent final : public Agent {
 public:
  HillClimbAgent(double step, std::uint64_t seed) : step_(step), seed_(seed) {
    if (step < 0.0) throw ContractError("hill-climb step_scale must be >= 0");
  }
  std::string name() const override {
    std::ostringstream os;
    os << "hillclimb-st" << step_ << "-s" << seed_;
    return os.str();
  }
  std::unique_ptr<AgentSession> open(const TaskRecord& task, int attempt) const override {
    return std::make_unique<HillClimbSession>(task, attempt, step_, seed_);
  }

 private:
  double step_;
  std::uint64_t seed_;
};

class FixedSession final : public AgentSession {
 public:
  explicit FixedSession(std::string text) : text_(std::move(text)) {}
  AgentReply respond(const TurnRequest&) override { return {text_, std::nullopt}; }

 private:
  std::string text_;
};

class ReplayAgent final : public Agent {
 public:
  explicit ReplayAgent(std::map<std::string, Design> designs) : designs_(std::move(designs)) {}
  std::string name() const override { return "replay"; }
  std::unique_ptr<AgentSession> open(const TaskRecord& task, int) const override {
    auto it = designs_.find(task.task_id);
    return std::make_unique<FixedSession>(it == designs_.end() ? "no recorded design for this task"
                                                               : design_reply(it->second));
  }

 private:
  std::map<std::string, Design> designs_;
};

class ConstantAgent final : public Agent {
 public:
  explicit ConstantAgent(std::string text) : text_(std::move(text)) {}
  std::string name() const override { return "constant"; }
  std::unique_ptr<AgentSession> open(const TaskRecord&, int) const override {
    return std::make_unique<FixedSession>(text_);
  }

 private:
  std::string text_;
};

std::map<std::string, std::string> key_values(const std::string& s) {
  std::map<std::string, std::string> out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ContractError("agent option '" + item + "' is not key=value");
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

}  // namespace

std::string design_reply(const Design& d) { return "```json\n" + to_json(d).dump() + "\n```"; }

Design random_design(const Goal& goal, CounterRng& rng) {
  const auto& dom = get_domain(goal.domain);
  const auto coords = dom.coordinates(goal);
  Design d;
  for (int r = 0; r < kRandomRetries; ++r) {
    d = dom.decode(goal, sample_point(coords, rng));
    if (design_errors(dom, goal, d.params).empty()) break;
  }
  return d;
}

std::unique_ptr<Agent> make_random_agent(int budget, std::uint64_t seed) {
  return std::make_unique<RandomAgent>(budget, seed);
}

std::unique_ptr<Agent> make_hillclimb_agent(double step_scale, std::uint64_t seed) {
  return std::make_unique<HillClimbAgent>(step_scale, seed);
}

std::unique_ptr<Agent> make_replay_agent(std::map<std::string, Design> designs) {
  return std::make_unique<ReplayAgent>(std::move(designs));
}

std::unique_ptr<Agent> make_constant_agent(std::string text) {
  return std::make_unique<ConstantAgent>(std::move(text));
}

void agent_handshake(const Agent& agent) { agent.handshake(); }

std::unique_ptr<Agent> make_agent(const std::string& spec, const std::map<std::string, Design>& hidden,
                                  int turn_timeout_ms) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  try {
    if (kind == "random") {
      auto kv = key_values(rest);
      return make_random_agent(std::stoi(kv.count("budget") ? kv["budget"] : "20"),
                               std::stoull(kv.count("seed") ? kv["seed"] : "0"));
    }
    if (kind == "hillclimb") {
      auto kv = key_values(rest);
      return make_hillclimb_agent(std::stod(kv.count("step") ? kv["step"] : "0.1"),
                                  std::stoull(kv.count("seed") ? kv["seed"] : "0"));
    }
    if (kind == "replay") {
      if (hidden.empty()) throw ContractError("replay agent needs the hidden generating designs");
      return make_replay_agent(hidden);
    }
    if (kind == "stdio") {
      if (rest.empty()) throw ContractError("stdio agent needs a command");
      StdioAgentOptions o;
      o.command = rest;
      o.turn_timeout_ms = turn_timeout_ms;
      return make_stdio_agent(o);
    }
    if (kind == "http") {
      auto kv = key_values(rest);
      if (!kv.count("url")) throw ContractError("http agent needs url=...");
      return make_http_agent({kv["url"], kv.count("timeout_ms") ? std::stoi(kv["timeout_ms"]) : turn_timeout_ms});
    }
  } catch (const std::invalid_argument&) {
    throw ContractError("bad agent spec '" + spec + "'");
  } catch (const std::out_of_range&) {
    throw ContractError("bad agent spec '" + spec + "'");
  }
  throw ContractError("unknown agent spec '" + spec + "'");
}

}  // namespace invdes
