#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "belief.hpp"
#include "types.hpp"

namespace costcomm {

// Quantized coordinates of a BeliefPair, used as a memoization key. Holds all
// coordinates of both agents' beliefs, scaled by kQuantFactor and rounded.
struct BeliefKey {
  std::array<std::int32_t, 8> q{};
  std::uint8_t n1 = 0;
  std::uint8_t n2 = 0;

  bool operator==(const BeliefKey&) const = default;
};

BeliefKey quantize(const BeliefPair& pair);
// Raw inverse (coordinates divided by the factor, no renormalization); each
// coordinate is within 0.5/kQuantFactor of the original.
BeliefPair dequantize(const BeliefKey& key);

// Communication bookkeeping for the constrained program, as observed at a
// communication decision: since_last counts steps since the most recent
// attempt (1 right after one), used counts attempts so far.
struct ConstraintState {
  std::int32_t since_last = 1;
  std::int32_t used = 0;

  bool operator==(const ConstraintState&) const = default;
};

struct MemoKey {
  BeliefKey belief;
  ConstraintState cstate;

  bool operator==(const MemoKey&) const = default;
};

struct MemoKeyHash {
  std::size_t operator()(const MemoKey& k) const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
      for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xffu;
        h *= 1099511628211ull;
      }
    };
    for (int i = 0; i < k.belief.n1 + k.belief.n2; ++i)
      mix(static_cast<std::uint32_t>(k.belief.q[i]));
    mix((static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.cstate.since_last)) << 32) |
        static_cast<std::uint32_t>(k.cstate.used));
    return static_cast<std::size_t>(h);
  }
};

// One interpolation stencil entry: a grid-node index and its weight.
struct StencilEntry {
  int node = 0;
  double weight = 0.0;
};

// Regular grid over one agent's belief simplex: all distributions with
// coordinates that are multiples of 1/(G-1), in lexicographic order. Off-node
// beliefs are evaluated by linear interpolation over a triangulation of the
// simplex (plain linear interpolation for 2-state agents).
class AgentGrid {
public:
  AgentGrid() = default;
  AgentGrid(int num_states, int nodes_per_axis);

  int count() const { return static_cast<int>(nodes_.size()); }
  int states() const { return n_; }
  int steps() const { return S_; }
  const Belief& node(int rank) const { return nodes_[rank]; }
  int delta_rank(int x) const { return delta_ranks_[x]; }

  // Lexicographic rank of an integer composition summing to S.
  int rank(const std::vector<int>& comp) const;

  // Interpolation stencil for an arbitrary belief: at most `states` entries,
  // weights nonnegative and summing to 1. Appends to out.
  void stencil(const Belief& pi, std::vector<StencilEntry>& out) const;

  // Grid node closest to the belief (largest stencil weight, first on ties).
  int nearest(const Belief& pi) const;

private:
  int n_ = 0;
  int S_ = 0;
  std::vector<Belief> nodes_;
  std::vector<int> delta_ranks_;
  std::vector<std::vector<std::int64_t>> binom_;
};

// Values and chosen prescriptions over the node set of a belief-pair grid,
// one table per phase and constraint layer.
struct GridTables {
  AgentGrid g1;
  AgentGrid g2;
  int layers = 1;  // constraint layers (since_last values); 1 when unconstrained
  // Indexed [layer][node] with node = rank1 * g2.count() + rank2.
  std::vector<std::vector<double>> comm_value;
  std::vector<std::vector<double>> ctrl_value;
  std::vector<std::vector<std::uint32_t>> comm_choice;
  std::vector<std::vector<std::uint32_t>> ctrl_choice;

  int pair_count() const { return g1.count() * g2.count(); }
  double interpolate(const std::vector<double>& table, const BeliefPair& pair) const;
};

struct MemoEntry {
  double value = 0.0;
  std::uint32_t choice = 0;
};

// Exact finite-horizon values over the beliefs reachable from the initial
// pair, keyed by quantized belief and constraint state, one map per time and
// phase.
struct ReachableTables {
  int horizon = 0;
  // comm[t-1] and ctrl[t-1] for t = 1..T.
  std::vector<std::unordered_map<MemoKey, MemoEntry, MemoKeyHash>> comm;
  std::vector<std::unordered_map<MemoKey, MemoEntry, MemoKeyHash>> ctrl;

  std::size_t total_entries() const;
};

}  // namespace costcomm
