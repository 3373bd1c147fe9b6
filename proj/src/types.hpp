#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace costcomm {

enum class Status {
  Ok = 0,
  InvalidArgument,
  ParseError,
  ValidationError,
  Unsupported,
  CapExceeded,
  NoConvergence,
  Infeasible,
  ZeroNormalizer,
  Internal,
};

// All library failures are reported as Error; the C API maps status codes 1:1.
class Error : public std::runtime_error {
public:
  Error(Status status, const std::string& message)
      : std::runtime_error(message), status_(status) {}
  Status status() const { return status_; }

private:
  Status status_;
};

[[noreturn]] inline void fail(Status status, const std::string& message) {
  throw Error(status, message);
}

// Tolerances and limits shared across modules.
inline constexpr double kRowSumTol = 1e-9;       // stochastic-row validation
inline constexpr double kDriftTol = 1e-6;        // belief drift before renormalization
inline constexpr double kProbFloor = 1e-12;      // branch-expansion probability floor
inline constexpr std::int64_t kQuantFactor = 1000000000;  // belief key quantization
inline constexpr std::size_t kDefaultEnumCap = 1u << 20;  // prescription pairs
inline constexpr std::size_t kDefaultReachCap = 1000000;  // reachable-set memo keys

enum class DiscountMode { PerPhase, PerStep };

// Local-state process of one agent: P(x'|x,u) plus the initial distribution.
struct AgentDynamics {
  int num_states = 0;
  int num_actions = 0;
  // transition[x][u][x']
  std::vector<std::vector<std::vector<double>>> transition;
  std::vector<double> initial;
};

// Stage cost c[x1][x2][u1][u2] shared by both agents.
using JointCost = std::vector<std::vector<std::vector<std::vector<double>>>>;

// Communication price: a constant, or a table over the joint state.
struct CommCost {
  bool state_dependent = false;
  double fixed = 0.0;
  std::vector<std::vector<double>> table;  // [x1][x2], used when state_dependent

  double at(int x1, int x2) const {
    return state_dependent ? table[x1][x2] : fixed;
  }
};

// Limits on when and how often the agents may communicate. Unset optionals
// mean unbounded.
struct CommConstraints {
  int s_min = 0;
  std::optional<int> s_max;
  std::optional<int> max_count;
};

struct Horizon {
  bool finite = false;
  int steps = 0;  // T, when finite
};

struct Scenario {
  AgentDynamics agents[2];
  JointCost cost;
  CommCost comm_cost;
  double discount = 1.0;
  DiscountMode discount_mode = DiscountMode::PerPhase;
  double erasure_prob = 0.0;
  std::optional<CommConstraints> constraints;
  Horizon horizon;
  // Optional display names for actions, one list per agent; defaults to
  // stringified indices. Used only when rendering prescriptions.
  std::vector<std::string> action_labels[2];

  double cost_at(int x1, int x2, int u1, int u2) const {
    return cost[x1][x2][u1][u2];
  }
  double max_stage_cost() const;
  double max_comm_cost() const;
};

// Channel output for one step: either the joint state was delivered or
// nothing was (Phi), together with the attempt pattern m=(m1,m2).
struct Observation {
  bool delivered = false;
  int x1 = -1;
  int x2 = -1;
  int m1 = 0;
  int m2 = 0;

  static Observation phi(int m1 = 0, int m2 = 0) {
    Observation o;
    o.m1 = m1;
    o.m2 = m2;
    return o;
  }
  static Observation joint(int x1, int x2, int m1, int m2) {
    Observation o;
    o.delivered = true;
    o.x1 = x1;
    o.x2 = x2;
    o.m1 = m1;
    o.m2 = m2;
    return o;
  }
};

}  // namespace costcomm
