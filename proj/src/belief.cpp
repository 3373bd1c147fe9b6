#include "belief.hpp"

#include <cmath>

namespace costcomm {

Belief Belief::normalized(std::vector<double> weights, double tol) {
  double sum = 0.0;
  for (double v : weights) {
    if (!(v >= 0.0) || !std::isfinite(v))
      fail(Status::ValidationError, "belief: weights must be nonnegative and finite");
    sum += v;
  }
  if (std::abs(sum - 1.0) > tol)
    fail(Status::Internal, "belief: weight drift " + std::to_string(sum - 1.0) +
                               " exceeds tolerance");
  for (double& v : weights) v /= sum;
  return Belief{std::move(weights)};
}

Belief Belief::delta(int num_states, int x) {
  std::vector<double> w(num_states, 0.0);
  w[x] = 1.0;
  return Belief{std::move(w)};
}

double prob_no_comm(const BeliefPair& pair, const CommPair& g) {
  double p = 1.0;
  for (int i = 0; i < 2; ++i) {
    const Belief& pi = pair.agent(i);
    double silent = 0.0;
    for (int x = 0; x < pi.size(); ++x)
      if (g.agent(i).at(x) == 0) silent += pi[x];
    p *= silent;
  }
  return p;
}

double prob_comm_outcome(const BeliefPair& pair, const CommPair& g, int x1, int x2) {
  const int fires = std::max(g.first.at(x1), g.second.at(x2));
  return fires * pair.b1[x1] * pair.b2[x2];
}

Belief post_comm_update(const Belief& pi, const CommPrescription& g,
                        const Observation& z, int agent) {
  if (z.delivered) return Belief::delta(pi.size(), agent == 0 ? z.x1 : z.x2);
  std::vector<double> w(pi.size(), 0.0);
  double norm = 0.0;
  for (int x = 0; x < pi.size(); ++x)
    if (g.at(x) == 0) norm += (w[x] = pi.w[x]);
  if (norm <= 0.0)
    fail(Status::ZeroNormalizer,
         "post_comm_update: prescription fires on the belief's entire support");
  for (double& v : w) v /= norm;
  return Belief{std::move(w)};
}

Belief post_control_update(const Belief& pi, const CtrlPrescription& l,
                           const AgentDynamics& dyn) {
  std::vector<double> w(dyn.num_states, 0.0);
  for (int x = 0; x < dyn.num_states; ++x) {
    if (pi.w[x] == 0.0) continue;
    const auto& row = dyn.transition[x][l.at(x)];
    for (int nx = 0; nx < dyn.num_states; ++nx) w[nx] += pi.w[x] * row[nx];
  }
  double sum = 0.0;
  for (double v : w) sum += v;
  if (std::abs(sum - 1.0) > kDriftTol)
    fail(Status::Internal, "post_control_update: belief drift exceeds tolerance");
  for (double& v : w) v /= sum;
  return Belief{std::move(w)};
}

Belief post_comm_update_erasure(const Belief& pi, const CommPrescription& g,
                                const Observation& z, int agent) {
  if (z.delivered) {
    if (z.m1 == 0 && z.m2 == 0)
      fail(Status::InvalidArgument,
           "post_comm_update_erasure: delivery with no attempt is illegal");
    return Belief::delta(pi.size(), agent == 0 ? z.x1 : z.x2);
  }
  const int mi = agent == 0 ? z.m1 : z.m2;
  std::vector<double> w(pi.size(), 0.0);
  double norm = 0.0;
  for (int x = 0; x < pi.size(); ++x)
    if (g.at(x) == mi) norm += (w[x] = pi.w[x]);
  if (norm <= 0.0)
    fail(Status::ZeroNormalizer,
         "post_comm_update_erasure: attempt pattern has no support");
  for (double& v : w) v /= norm;
  return Belief{std::move(w)};
}

std::vector<OutcomeProb> erasure_outcome_probs(const BeliefPair& pair,
                                               const CommPair& g, double p_e) {
  if (p_e < 0.0 || p_e > 1.0)
    fail(Status::InvalidArgument, "erasure_outcome_probs: p_e must lie in [0,1]");
  std::vector<OutcomeProb> out;
  // P(attempt pattern m) factorizes per agent over {x : g(x) = m_i}.
  double pattern[2][2];
  for (int i = 0; i < 2; ++i) {
    const Belief& pi = pair.agent(i);
    pattern[i][0] = pattern[i][1] = 0.0;
    for (int x = 0; x < pi.size(); ++x) pattern[i][g.agent(i).at(x)] += pi[x];
  }
  out.push_back({Observation::phi(0, 0), pattern[0][0] * pattern[1][0]});
  for (int m1 = 0; m1 < 2; ++m1)
    for (int m2 = 0; m2 < 2; ++m2) {
      if (m1 == 0 && m2 == 0) continue;
      out.push_back({Observation::phi(m1, m2), p_e * pattern[0][m1] * pattern[1][m2]});
    }
  for (int x1 = 0; x1 < pair.b1.size(); ++x1)
    for (int x2 = 0; x2 < pair.b2.size(); ++x2) {
      const int m1 = g.first.at(x1);
      const int m2 = g.second.at(x2);
      if (m1 == 0 && m2 == 0) continue;
      out.push_back({Observation::joint(x1, x2, m1, m2),
                     (1.0 - p_e) * pair.b1[x1] * pair.b2[x2]});
    }
  return out;
}

}  // namespace costcomm
