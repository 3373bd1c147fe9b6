#pragma once

#include <vector>

#include "prescriptions.hpp"
#include "types.hpp"

namespace costcomm {

// Distribution over one agent's local states.
struct Belief {
  std::vector<double> w;

  int size() const { return static_cast<int>(w.size()); }
  double operator[](int x) const { return w[x]; }

  // Validates (nonnegative, sums to 1 within tol) and renormalizes exactly.
  static Belief normalized(std::vector<double> weights, double tol = kRowSumTol);
  static Belief delta(int num_states, int x);

  bool operator==(const Belief& other) const { return w == other.w; }
};

struct BeliefPair {
  Belief b1;
  Belief b2;

  const Belief& agent(int i) const { return i == 0 ? b1 : b2; }
  bool operator==(const BeliefPair& other) const = default;
};

// Probability that no agent communicates: factorizes per agent over the
// silent states.
double prob_no_comm(const BeliefPair& pair, const CommPair& g);

// Probability that the channel delivers joint state (x1,x2): nonzero only
// when at least one agent's prescription fires there.
double prob_comm_outcome(const BeliefPair& pair, const CommPair& g, int x1, int x2);

// Post-communication belief update for one agent: a delivered joint state
// collapses to its component, Phi conditions on the silent states. Throws
// ZeroNormalizer when the prescription fires on all of the belief's support
// (a probability-zero branch the caller must not expand).
Belief post_comm_update(const Belief& pi, const CommPrescription& g,
                        const Observation& z, int agent);

// Post-control propagation through the dynamics under prescription l.
Belief post_control_update(const Belief& pi, const CtrlPrescription& l,
                           const AgentDynamics& dyn);

// Erasure-channel variant of post_comm_update. With a delivered joint state
// it collapses as usual; with Phi the observed attempt pattern m still
// conditions each agent's belief on {x : g(x) = m_i}.
Belief post_comm_update_erasure(const Belief& pi, const CommPrescription& g,
                                const Observation& z, int agent);

struct OutcomeProb {
  Observation z;
  double prob = 0.0;
};

// Distribution over (z, m) channel outcomes when attempts are erased with
// probability p_e. Deterministic order: (Phi,(0,0)), (Phi,(0,1)), (Phi,(1,0)),
// (Phi,(1,1)), then delivered joint states row-major. Total mass 1.
std::vector<OutcomeProb> erasure_outcome_probs(const BeliefPair& pair,
                                               const CommPair& g, double p_e);

}  // namespace costcomm
