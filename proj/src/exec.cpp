#include "exec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>

#include "scenario.hpp"

namespace costcomm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Canonical 53-bit uniform in [0,1), independent of library distributions.
double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

int sample(const std::vector<double>& p, double r) {
  double acc = 0.0;
  int last = 0;
  for (int i = 0; i < static_cast<int>(p.size()); ++i) {
    if (p[i] <= 0.0) continue;
    last = i;
    acc += p[i];
    if (r < acc) return i;
  }
  return last;
}

int derive_horizon(const Scenario& s, const SimOptions& opts, double& tail_bound) {
  if (s.horizon.finite) {
    tail_bound = 0.0;
    return s.horizon.steps;
  }
  if (opts.horizon_cap > 0) {
    const double round = s.discount * control_discount(s);
    tail_bound = std::pow(round, opts.horizon_cap) *
                 (s.max_comm_cost() + s.discount * s.max_stage_cost()) /
                 (1.0 - round);
    return opts.horizon_cap;
  }
  const double round = s.discount * control_discount(s);
  const double factor = (s.max_comm_cost() + s.discount * s.max_stage_cost()) /
                        (1.0 - round);
  if (factor <= opts.tail_tol) {
    tail_bound = factor * round;
    return 1;
  }
  const int h = std::max(
      1, static_cast<int>(std::ceil(std::log(opts.tail_tol / factor) /
                                    std::log(round))));
  tail_bound = std::pow(round, h) * factor;
  return h;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SimStats simulate(const Solution& sol, const SimOptions& opts) {
  const Scenario& s = sol.scenario;
  if (opts.episodes <= 0)
    fail(Status::InvalidArgument, "simulate: episodes must be positive");
  const bool erasure = s.erasure_prob > 0.0;
  const double theta = s.discount;
  const double theta_u = control_discount(s);

  SimStats stats;
  stats.episodes = opts.episodes;
  stats.horizon = derive_horizon(s, opts, stats.tail_bound);
  const int horizon = stats.horizon;

  std::ofstream trace;
  if (!opts.trace_path.empty()) {
    trace.open(opts.trace_path);
    if (!trace)
      fail(Status::InvalidArgument,
           "simulate: cannot open trace file " + opts.trace_path);
    trace << "# episode\tt\tphase\tx1\tx2\tm1\tm2\tz\tu1\tu2\tstage_cost\n";
  }

  std::vector<double> totals;
  totals.reserve(opts.episodes);
  long long attempts_total = 0;

  for (long e = 0; e < opts.episodes; ++e) {
    std::mt19937_64 eng(splitmix64(opts.seed + static_cast<std::uint64_t>(e)));
    int x1 = sample(s.agents[0].initial, uniform01(eng));
    int x2 = sample(s.agents[1].initial, uniform01(eng));
    BeliefPair replica_a = sol.initial_pair();
    BeliefPair replica_b = replica_a;
    ConstraintState cs = sol.initial_cstate();
    double total = 0.0;
    double wc = 1.0;  // discount weight of the step's communication phase
    for (int t = 1; t <= horizon; ++t) {
      const CommPair g = sol.decide_comm(replica_a, cs, t);
      const int m1 = g.first.at(x1);
      const int m2 = g.second.at(x2);
      const bool attempt = m1 != 0 || m2 != 0;
      Observation z = Observation::phi(0, 0);
      if (attempt) {
        const bool erased = erasure && uniform01(eng) < s.erasure_prob;
        z = erased ? Observation::phi(m1, m2)
                   : Observation::joint(x1, x2, m1, m2);
        ++attempts_total;
      }
      const double rho_charged = attempt ? s.comm_cost.at(x1, x2) : 0.0;
      total += wc * rho_charged;

      for (BeliefPair* bp : {&replica_a, &replica_b}) {
        if (erasure) {
          bp->b1 = post_comm_update_erasure(bp->b1, g.first, z, 0);
          bp->b2 = post_comm_update_erasure(bp->b2, g.second, z, 1);
        } else {
          bp->b1 = post_comm_update(bp->b1, g.first, z, 0);
          bp->b2 = post_comm_update(bp->b2, g.second, z, 1);
        }
      }
      if (!(replica_a == replica_b))
        fail(Status::Internal, "simulate: belief replicas diverged");
      cs = attempt ? sol.next_on_attempt(cs) : sol.next_on_silence(cs);

      const CtrlPair l = sol.decide_ctrl(replica_a, cs, t);
      const int u1 = l.first.at(x1);
      const int u2 = l.second.at(x2);
      const double c = s.cost_at(x1, x2, u1, u2);
      const double wu = wc * theta;
      total += wu * c;

      if (trace.is_open()) {
        std::string zs = "phi";
        if (z.delivered)
          zs = std::to_string(z.x1) + "," + std::to_string(z.x2);
        trace << e << '\t' << t << "\tcomm\t" << x1 << '\t' << x2 << '\t' << m1
              << '\t' << m2 << '\t' << zs << "\t-\t-\t" << fmt_double(rho_charged)
              << '\n';
        trace << e << '\t' << t << "\tctrl\t" << x1 << '\t' << x2
              << "\t-\t-\t-\t" << u1 << '\t' << u2 << '\t' << fmt_double(c)
              << '\n';
      }

      for (BeliefPair* bp : {&replica_a, &replica_b}) {
        bp->b1 = post_control_update(bp->b1, l.first, s.agents[0]);
        bp->b2 = post_control_update(bp->b2, l.second, s.agents[1]);
      }
      if (!(replica_a == replica_b))
        fail(Status::Internal, "simulate: belief replicas diverged");
      x1 = sample(s.agents[0].transition[x1][u1], uniform01(eng));
      x2 = sample(s.agents[1].transition[x2][u2], uniform01(eng));
      wc = wu * theta_u;
    }
    totals.push_back(total);
  }

  double sum = 0.0;
  for (double v : totals) sum += v;
  stats.mean = sum / static_cast<double>(totals.size());
  if (totals.size() > 1) {
    double ss = 0.0;
    for (double v : totals) ss += (v - stats.mean) * (v - stats.mean);
    stats.std_error = std::sqrt(ss / static_cast<double>(totals.size() - 1)) /
                      std::sqrt(static_cast<double>(totals.size()));
  }
  stats.comm_frequency = static_cast<double>(attempts_total) /
                         (static_cast<double>(opts.episodes) * horizon);
  return stats;
}

namespace {

using Joint = std::vector<std::vector<double>>;

Joint initial_joint(const Scenario& s) {
  const int n1 = s.agents[0].num_states;
  const int n2 = s.agents[1].num_states;
  Joint d(n1, std::vector<double>(n2, 0.0));
  for (int x1 = 0; x1 < n1; ++x1)
    for (int x2 = 0; x2 < n2; ++x2)
      d[x1][x2] = s.agents[0].initial[x1] * s.agents[1].initial[x2];
  return d;
}

Joint propagate_joint(const Scenario& s, const Joint& d, const CtrlPair& l) {
  const int n1 = s.agents[0].num_states;
  const int n2 = s.agents[1].num_states;
  Joint out(n1, std::vector<double>(n2, 0.0));
  for (int x1 = 0; x1 < n1; ++x1)
    for (int x2 = 0; x2 < n2; ++x2) {
      const double w = d[x1][x2];
      if (w == 0.0) continue;
      const auto& r1 = s.agents[0].transition[x1][l.first.at(x1)];
      const auto& r2 = s.agents[1].transition[x2][l.second.at(x2)];
      for (int y1 = 0; y1 < n1; ++y1) {
        if (r1[y1] == 0.0) continue;
        for (int y2 = 0; y2 < n2; ++y2) out[y1][y2] += w * r1[y1] * r2[y2];
      }
    }
  return out;
}

struct JointOutcome {
  double prob = 0.0;
  Joint cond;
};

// Channel outcome distribution and conditionals computed directly on the
// joint distribution (no per-agent factorization).
std::vector<JointOutcome> joint_outcomes(const Scenario& s, const Joint& d,
                                         const CommPair& g) {
  const int n1 = static_cast<int>(d.size());
  const int n2 = static_cast<int>(d[0].size());
  const double pe = s.erasure_prob;
  std::vector<JointOutcome> out;

  // Silent and erased-attempt outcomes, grouped by attempt pattern.
  for (int m1 = 0; m1 < 2; ++m1)
    for (int m2 = 0; m2 < 2; ++m2) {
      double mass = 0.0;
      Joint cond(n1, std::vector<double>(n2, 0.0));
      for (int x1 = 0; x1 < n1; ++x1)
        for (int x2 = 0; x2 < n2; ++x2)
          if (g.first.at(x1) == m1 && g.second.at(x2) == m2) {
            mass += d[x1][x2];
            cond[x1][x2] = d[x1][x2];
          }
      const double prob = (m1 == 0 && m2 == 0) ? mass : pe * mass;
      if (prob <= 1e-15 || mass <= 0.0) continue;
      for (auto& row : cond)
        for (double& v : row) v /= mass;
      out.push_back({prob, std::move(cond)});
    }
  // Delivered outcomes.
  for (int x1 = 0; x1 < n1; ++x1)
    for (int x2 = 0; x2 < n2; ++x2) {
      if (g.first.at(x1) == 0 && g.second.at(x2) == 0) continue;
      const double prob = (1.0 - pe) * d[x1][x2];
      if (prob <= 1e-15) continue;
      Joint cond(n1, std::vector<double>(n2, 0.0));
      cond[x1][x2] = 1.0;
      out.push_back({prob, std::move(cond)});
    }
  return out;
}

double expected_rho(const Scenario& s, const Joint& d, const CommPair& g) {
  double acc = 0.0;
  for (int x1 = 0; x1 < static_cast<int>(d.size()); ++x1)
    for (int x2 = 0; x2 < static_cast<int>(d[0].size()); ++x2)
      if (g.first.at(x1) != 0 || g.second.at(x2) != 0)
        acc += s.comm_cost.at(x1, x2) * d[x1][x2];
  return acc;
}

double expected_cost(const Scenario& s, const Joint& d, const CtrlPair& l) {
  double acc = 0.0;
  for (int x1 = 0; x1 < static_cast<int>(d.size()); ++x1)
    for (int x2 = 0; x2 < static_cast<int>(d[0].size()); ++x2)
      acc += s.cost_at(x1, x2, l.first.at(x1), l.second.at(x2)) * d[x1][x2];
  return acc;
}

void require_unconstrained_finite(const Scenario& s, int steps,
                                  const char* name) {
  if (!s.horizon.finite || s.horizon.steps != steps)
    fail(Status::InvalidArgument,
         std::string(name) + ": scenario must have a finite horizon of " +
             std::to_string(steps));
  if (s.constraints)
    fail(Status::Unsupported,
         std::string(name) + ": communication constraints are not supported");
}

double tree_comm_value(const Scenario& s, const Joint& d, int t,
                       const std::vector<CommPair>& comm_pairs,
                       const std::vector<CtrlPair>& ctrl_pairs);

double tree_ctrl_value(const Scenario& s, const Joint& d, int t,
                       const std::vector<CommPair>& comm_pairs,
                       const std::vector<CtrlPair>& ctrl_pairs) {
  const double theta_u = control_discount(s);
  double best = kInf;
  for (const CtrlPair& l : ctrl_pairs) {
    double v = expected_cost(s, d, l);
    if (t < s.horizon.steps)
      v += theta_u * tree_comm_value(s, propagate_joint(s, d, l), t + 1,
                                     comm_pairs, ctrl_pairs);
    best = std::min(best, v);
  }
  return best;
}

double tree_comm_value(const Scenario& s, const Joint& d, int t,
                       const std::vector<CommPair>& comm_pairs,
                       const std::vector<CtrlPair>& ctrl_pairs) {
  double best = kInf;
  for (const CommPair& g : comm_pairs) {
    double acc = 0.0;
    for (const JointOutcome& o : joint_outcomes(s, d, g))
      acc += o.prob * tree_ctrl_value(s, o.cond, t, comm_pairs, ctrl_pairs);
    best = std::min(best, expected_rho(s, d, g) + s.discount * acc);
  }
  return best;
}

}  // namespace

std::vector<std::vector<double>> exact_joint_filter(
    const Scenario& s, const std::vector<FilterStep>& steps) {
  const int n1 = s.agents[0].num_states;
  const int n2 = s.agents[1].num_states;
  const double pe = s.erasure_prob;
  Joint d = initial_joint(s);
  for (const FilterStep& st : steps) {
    double norm = 0.0;
    for (int x1 = 0; x1 < n1; ++x1)
      for (int x2 = 0; x2 < n2; ++x2) {
        const int m1 = st.g.first.at(x1);
        const int m2 = st.g.second.at(x2);
        double like = 0.0;
        if (st.z.delivered) {
          if (x1 == st.z.x1 && x2 == st.z.x2 && m1 == st.z.m1 &&
              m2 == st.z.m2 && (m1 != 0 || m2 != 0))
            like = 1.0 - pe;
        } else if (st.z.m1 == 0 && st.z.m2 == 0) {
          if (m1 == 0 && m2 == 0) like = 1.0;
        } else {
          if (m1 == st.z.m1 && m2 == st.z.m2) like = pe;
        }
        d[x1][x2] *= like;
        norm += d[x1][x2];
      }
    if (norm <= 0.0)
      fail(Status::InvalidArgument,
           "exact_joint_filter: probability-zero history");
    for (auto& row : d)
      for (double& v : row) v /= norm;
    if (st.l) d = propagate_joint(s, d, *st.l);
  }
  return d;
}

double brute_force_T1(const Scenario& s) {
  require_unconstrained_finite(s, 1, "brute_force_T1");
  const auto comm_pairs = enumerate_comm_pairs(s);
  const auto ctrl_pairs = enumerate_ctrl_pairs(s);
  const Joint d0 = initial_joint(s);
  double best = kInf;
  for (const CommPair& g : comm_pairs) {
    double acc = 0.0;
    for (const JointOutcome& o : joint_outcomes(s, d0, g)) {
      // The coordinator sees the channel output before choosing controls, so
      // the best control pair is optimized per outcome.
      double bc = kInf;
      for (const CtrlPair& l : ctrl_pairs)
        bc = std::min(bc, expected_cost(s, o.cond, l));
      acc += o.prob * bc;
    }
    best = std::min(best, expected_rho(s, d0, g) + s.discount * acc);
  }
  return best;
}

double brute_force_T2(const Scenario& s) {
  require_unconstrained_finite(s, 2, "brute_force_T2");
  const auto comm_pairs = enumerate_comm_pairs(s);
  const auto ctrl_pairs = enumerate_ctrl_pairs(s);
  return tree_comm_value(s, initial_joint(s), 1, comm_pairs, ctrl_pairs);
}

}  // namespace costcomm
