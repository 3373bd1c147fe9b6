#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "belief.hpp"
#include "prescriptions.hpp"
#include "scenario.hpp"
#include "value.hpp"

namespace costcomm {

struct SolveOptions {
  int grid_nodes = 201;  // nodes per belief axis in the discounted grid mode
  double vi_tol = 0.0;   // sup-norm stopping threshold; <=0 picks the default
                         // 1e-6 * (1 - theta^2) * cost scale
  int max_sweeps = 100000;
  int fixed_sweeps = 0;  // >0: run exactly this many sweeps, no threshold
  std::size_t reach_cap = kDefaultReachCap;
  std::size_t enum_cap = kDefaultEnumCap;
  bool force_erasure_model = false;  // use erasure arithmetic even at p_e = 0
  std::optional<DiscountMode> discount_mode;  // overrides the scenario's mode
};

// Baseline solves fix the communication prescription pair.
enum class GammaRestriction { None, AllZero, AllOne };

struct SolveReport {
  double value = 0.0;  // at the initial belief pair
  int iterations = 0;
  double residual = 0.0;
  int grid_nodes = 0;
  std::size_t memo_entries = 0;
  double wall_ms = 0.0;
  std::string mode;  // "grid", "reachable" or "joint-mdp"
  std::uint64_t scenario_hash = 0;
};

// Exact joint-state tables for the always-communicate reduction: beliefs stay
// degenerate after every exchange, so values are linear in the joint belief.
// comm_value[x1][x2] includes the communication charge; ctrl_value is the
// post-exchange optimal control value.
struct AlwaysMdpTables {
  std::vector<std::vector<double>> comm_value;
  std::vector<std::vector<double>> ctrl_value;
  std::vector<std::vector<int>> best_u1;
  std::vector<std::vector<int>> best_u2;
};

// A solved scenario: value representation, extracted policy and diagnostics.
// Prescription choices refer to the enumeration orders stored here.
class Solution {
public:
  Scenario scenario;  // with any option overrides applied
  SolveReport report;
  std::vector<CommPair> comm_pairs;
  std::vector<CtrlPair> ctrl_pairs;
  GammaRestriction restriction = GammaRestriction::None;

  std::shared_ptr<GridTables> grid;          // discounted solves
  std::shared_ptr<ReachableTables> reach;    // finite-horizon solves
  std::shared_ptr<AlwaysMdpTables> mdp;      // always-communicate reduction

  bool stationary() const { return !scenario.horizon.finite; }
  BeliefPair initial_pair() const;
  ConstraintState initial_cstate() const;

  // Prescriptions chosen at a decision point; t is 1-based, ignored by
  // stationary solutions. Grid solutions answer off-node queries with the
  // nearest node's choice (an approximation inherent to the grid mode).
  CommPair decide_comm(const BeliefPair& pair, ConstraintState cs, int t = 1) const;
  CtrlPair decide_ctrl(const BeliefPair& pair, ConstraintState cs, int t = 1) const;

  // Value of a belief pair at the given phase (interpolated in grid mode).
  double value_at(const BeliefPair& pair, bool comm_phase, ConstraintState cs,
                  int t = 1) const;

  // Constraint-state transitions, clamped to the tracked ranges.
  ConstraintState next_on_attempt(ConstraintState cs) const;
  ConstraintState next_on_silence(ConstraintState cs) const;
};

// Evaluator for the continuation value of a belief pair.
using PairValueFn =
    std::function<double(const BeliefPair&, const ConstraintState&)>;

struct BackupResult {
  double value = 0.0;
  std::uint32_t choice = 0;
};

// One control-phase Bellman backup: minimum over control prescription pairs
// of expected stage cost plus the (mode-discounted) propagated continuation.
// Ties break to the first pair in enumeration order.
BackupResult control_backup(const BeliefPair& pair, const Scenario& s,
                            const std::vector<CtrlPair>& pairs,
                            const PairValueFn& v_next,
                            ConstraintState cs = ConstraintState{});

// One communication-phase Bellman backup: minimum over feasible communication
// prescription pairs of the expected communication charge plus the discounted
// expected continuation over channel outcomes. Outcome branches with
// probability <= 1e-12 are not expanded. Returns +infinity when the
// constraint state is a dead end (communication demanded, budget exhausted).
BackupResult comm_backup(const BeliefPair& pair, const Scenario& s,
                         const std::vector<CommPair>& pairs,
                         const PairValueFn& v_plus,
                         ConstraintState cs = ConstraintState{},
                         GammaRestriction restriction = GammaRestriction::None,
                         bool erasure_model = false);

// Solves the scenario with its own horizon mode: exact reachable-set backward
// induction when finite, grid value iteration when discounted. Constraint
// handling follows the scenario's constraints field.
Solution solve(const Scenario& s, const SolveOptions& opts = SolveOptions{});

// Best value subject to never communicating (control still optimized).
Solution solve_baseline_never(const Scenario& s, const SolveOptions& opts = SolveOptions{});

// Best value subject to communicating every step. Without erasure this is the
// exact joint-state reduction; with erasure it falls back to a restricted
// solve. Constraints, if any, are ignored by both baselines.
Solution solve_baseline_always(const Scenario& s, const SolveOptions& opts = SolveOptions{});

}  // namespace costcomm
