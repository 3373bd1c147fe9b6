#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "solver.hpp"

namespace costcomm {

struct SimOptions {
  std::uint64_t seed = 1;
  long episodes = 1000;
  int horizon_cap = 0;     // >0 truncates discounted episodes at this length
  double tail_tol = 0.05;  // discounted-tail truncation target when deriving
  std::string trace_path;  // when nonempty, per-phase TSV records are written
};

struct SimStats {
  double mean = 0.0;            // average discounted cost per episode
  double std_error = 0.0;       // sample standard error of the mean
  double comm_frequency = 0.0;  // attempts per communication decision
  long episodes = 0;
  int horizon = 0;       // steps simulated per episode
  double tail_bound = 0.0;  // discounted cost neglected by truncation, at most
};

// Rolls out the solution's policy on sampled state paths. Each episode draws
// from its own generator (mt19937_64 seeded with splitmix64(seed + episode)),
// so results do not depend on episode order. Both agents maintain their own
// replica of the shared belief pair; the replicas are asserted identical
// after every update. Trace columns:
//   episode t phase x1 x2 m1 m2 z u1 u2 stage_cost
// with one row per phase; the discounted episode cost is recoverable from the
// rows via the per-phase weights (see control_discount).
SimStats simulate(const Solution& sol, const SimOptions& opts = SimOptions{});

// One processed step of the exact joint filter: the communication
// prescription pair in force, the channel output seen, and optionally the
// control pair applied afterwards (omit to stop right after the exchange).
struct FilterStep {
  CommPair g;
  Observation z;
  std::optional<CtrlPair> l;
};

// Joint conditional distribution P(x1,x2 | history) by direct forward
// propagation of the joint chain, independent of the per-agent machinery.
// Throws InvalidArgument on a probability-zero history.
std::vector<std::vector<double>> exact_joint_filter(
    const Scenario& s, const std::vector<FilterStep>& steps);

// Exhaustive optimum for a one-step unconstrained scenario: enumerate
// communication pairs and optimize the control pair separately against each
// channel outcome's conditional joint distribution. No per-agent
// factorization involved.
double brute_force_T1(const Scenario& s);

// Exhaustive optimum for a two-step unconstrained scenario over the full
// decision tree, propagating the joint distribution exactly. Exponential;
// verification sizes only.
double brute_force_T2(const Scenario& s);

}  // namespace costcomm
