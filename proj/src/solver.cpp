#include "solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <utility>

#include "scenario.hpp"

namespace costcomm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ctrl_discount(const Scenario& s) { return control_discount(s); }

// Feasibility of acting at a communication decision under the constraints.
enum class Feas { Free, ForcedSilent, ForcedComm, DeadEnd };

// Clamped bookkeeping ranges for the constraint state. since_last saturates
// once it stops affecting feasibility, so unconstrained scenarios track the
// single state {1,0} and constrained ones stay within a small layer set.
struct ConstraintPlan {
  bool active = false;
  int s_min = 0;
  std::optional<int> s_max;
  std::optional<int> max_count;
  int sa_cap = 1;  // since_last ranges over 1..sa_cap
  int sb_cap = 0;  // used ranges over 0..sb_cap

  explicit ConstraintPlan(const Scenario& s) {
    if (!s.constraints) return;
    active = true;
    s_min = s.constraints->s_min;
    s_max = s.constraints->s_max;
    max_count = s.constraints->max_count;
    sa_cap = s_max ? std::max(1, *s_max) : s_min + 1;
    sa_cap = std::max(sa_cap, 1);
    sb_cap = max_count ? *max_count : 0;
  }

  Feas classify(ConstraintState cs) const {
    if (!active) return Feas::Free;
    const bool exhausted = max_count && cs.used >= *max_count;
    if (s_max && cs.since_last >= *s_max)
      return exhausted ? Feas::DeadEnd : Feas::ForcedComm;
    if (exhausted || cs.since_last < s_min) return Feas::ForcedSilent;
    return Feas::Free;
  }

  ConstraintState on_attempt(ConstraintState cs) const {
    return ConstraintState{1, std::min(cs.used + 1, sb_cap)};
  }
  ConstraintState on_silence(ConstraintState cs) const {
    return ConstraintState{std::min(cs.since_last + 1, sa_cap), cs.used};
  }
  ConstraintState clamp(ConstraintState cs) const {
    return ConstraintState{std::clamp(cs.since_last, 1, sa_cap),
                           std::clamp(cs.used, 0, sb_cap)};
  }
};

// Candidate index range [lo, hi) after applying a baseline restriction and
// the feasibility verdict. Relies on the enumeration order: the all-silent
// pair is first, the all-transmit pair last. An empty range means no
// prescription is admissible.
std::pair<std::size_t, std::size_t> comm_candidates(std::size_t count,
                                                    GammaRestriction restriction,
                                                    Feas feas) {
  std::size_t lo = 0, hi = count;
  if (restriction == GammaRestriction::AllZero || feas == Feas::ForcedSilent)
    hi = std::min(hi, std::size_t{1});
  if (restriction == GammaRestriction::AllOne || feas == Feas::ForcedComm)
    lo = std::max(lo, count - 1);
  return {lo, hi};
}

}  // namespace

BackupResult control_backup(const BeliefPair& pair, const Scenario& s,
                            const std::vector<CtrlPair>& pairs,
                            const PairValueFn& v_next, ConstraintState cs) {
  const int n1 = s.agents[0].num_states;
  const int n2 = s.agents[1].num_states;
  const double theta_u = ctrl_discount(s);
  BackupResult best{kInf, 0};
  for (std::size_t li = 0; li < pairs.size(); ++li) {
    const CtrlPair& l = pairs[li];
    double stage = 0.0;
    for (int x1 = 0; x1 < n1; ++x1)
      for (int x2 = 0; x2 < n2; ++x2)
        stage += s.cost_at(x1, x2, l.first.at(x1), l.second.at(x2)) *
                 pair.b1[x1] * pair.b2[x2];
    BeliefPair next{post_control_update(pair.b1, l.first, s.agents[0]),
                    post_control_update(pair.b2, l.second, s.agents[1])};
    const double v = stage + theta_u * v_next(next, cs);
    if (v < best.value) {
      best.value = v;
      best.choice = static_cast<std::uint32_t>(li);
    }
  }
  return best;
}

BackupResult comm_backup(const BeliefPair& pair, const Scenario& s,
                         const std::vector<CommPair>& pairs,
                         const PairValueFn& v_plus, ConstraintState cs,
                         GammaRestriction restriction, bool erasure_model) {
  const ConstraintPlan plan(s);
  const Feas feas = plan.classify(cs);
  if (feas == Feas::DeadEnd) return BackupResult{kInf, 0};

  const int n1 = s.agents[0].num_states;
  const int n2 = s.agents[1].num_states;
  const double theta = s.discount;
  const bool erasure = erasure_model || s.erasure_prob > 0.0;
  const auto [lo, hi] = comm_candidates(pairs.size(), restriction, feas);
  if (lo >= hi) return BackupResult{kInf, 0};

  const ConstraintState cs_attempt = plan.on_attempt(cs);
  const ConstraintState cs_silence = plan.on_silence(cs);

  BackupResult best{kInf, static_cast<std::uint32_t>(lo)};
  for (std::size_t gi = lo; gi < hi; ++gi) {
    const CommPair& g = pairs[gi];
    // Expected communication charge: collected whenever any agent transmits,
    // priced at the realized joint state.
    double rho_term = 0.0;
    for (int x1 = 0; x1 < n1; ++x1)
      for (int x2 = 0; x2 < n2; ++x2)
        if (g.first.at(x1) != 0 || g.second.at(x2) != 0)
          rho_term += s.comm_cost.at(x1, x2) * pair.b1[x1] * pair.b2[x2];

    double acc = 0.0;
    if (!erasure) {
      const double p_phi = prob_no_comm(pair, g);
      if (p_phi > kProbFloor) {
        const Observation z = Observation::phi(0, 0);
        BeliefPair next{post_comm_update(pair.b1, g.first, z, 0),
                        post_comm_update(pair.b2, g.second, z, 1)};
        acc += p_phi * v_plus(next, cs_silence);
      }
      for (int x1 = 0; x1 < n1; ++x1)
        for (int x2 = 0; x2 < n2; ++x2) {
          const double p = prob_comm_outcome(pair, g, x1, x2);
          if (p > kProbFloor) {
            BeliefPair next{Belief::delta(n1, x1), Belief::delta(n2, x2)};
            acc += p * v_plus(next, cs_attempt);
          }
        }
    } else {
      for (const OutcomeProb& o : erasure_outcome_probs(pair, g, s.erasure_prob)) {
        if (o.prob <= kProbFloor) continue;
        BeliefPair next{post_comm_update_erasure(pair.b1, g.first, o.z, 0),
                        post_comm_update_erasure(pair.b2, g.second, o.z, 1)};
        const bool attempt = o.z.m1 != 0 || o.z.m2 != 0;
        acc += o.prob * v_plus(next, attempt ? cs_attempt : cs_silence);
      }
    }
    const double v = rho_term + theta * acc;
    if (v < best.value) {
      best.value = v;
      best.choice = static_cast<std::uint32_t>(gi);
    }
  }
  return best;
}

namespace {

// ---------------------------------------------------------------------------
// Finite horizon: memoized backward induction over the reachable belief set.
// ---------------------------------------------------------------------------

struct ReachSolver {
  const Scenario& s;
  const SolveOptions& opts;
  const std::vector<CommPair>& comm_pairs;
  const std::vector<CtrlPair>& ctrl_pairs;
  GammaRestriction restriction;
  ReachableTables tables;
  std::size_t entries = 0;

  ReachSolver(const Scenario& s_, const SolveOptions& opts_,
              const std::vector<CommPair>& cp, const std::vector<CtrlPair>& up,
              GammaRestriction r)
      : s(s_), opts(opts_), comm_pairs(cp), ctrl_pairs(up), restriction(r) {
    tables.horizon = s.horizon.steps;
    tables.comm.resize(s.horizon.steps);
    tables.ctrl.resize(s.horizon.steps);
  }

  template <typename Map>
  void insert(Map& map, const MemoKey& key, const BackupResult& r) {
    map.emplace(key, MemoEntry{r.value, r.choice});
    if (++entries > opts.reach_cap)
      fail(Status::CapExceeded,
           "reachable belief set exceeded the cap of " +
               std::to_string(opts.reach_cap) +
               " entries; raise reach_cap or shorten the horizon");
  }

  double comm_value(int t, const BeliefPair& pair, ConstraintState cs) {
    if (t > s.horizon.steps) return 0.0;
    const MemoKey key{quantize(pair), cs};
    auto& map = tables.comm[t - 1];
    if (auto it = map.find(key); it != map.end()) return it->second.value;
    const BackupResult r = comm_backup(
        pair, s, comm_pairs,
        [&](const BeliefPair& p, const ConstraintState& c) {
          return ctrl_value(t, p, c);
        },
        cs, restriction, opts.force_erasure_model);
    insert(map, key, r);
    return r.value;
  }

  double ctrl_value(int t, const BeliefPair& pair, ConstraintState cs) {
    const MemoKey key{quantize(pair), cs};
    auto& map = tables.ctrl[t - 1];
    if (auto it = map.find(key); it != map.end()) return it->second.value;
    const BackupResult r = control_backup(
        pair, s, ctrl_pairs,
        [&](const BeliefPair& p, const ConstraintState& c) {
          return comm_value(t + 1, p, c);
        },
        cs);
    insert(map, key, r);
    return r.value;
  }
};

// ---------------------------------------------------------------------------
// Discounted horizon: value iteration over a product grid of belief simplices
// with precomputed per-prescription probabilities and stencils.
// ---------------------------------------------------------------------------

struct GridSolver {
  const Scenario& s;
  const SolveOptions& opts;
  const std::vector<CommPair>& comm_pairs;
  const std::vector<CtrlPair>& ctrl_pairs;
  GammaRestriction restriction;
  ConstraintPlan plan;

  AgentGrid g1, g2;
  int N1 = 0, N2 = 0, NP = 0, L = 1;
  double theta = 0.0, theta_u = 0.0, p_e = 0.0;
  bool erasure = false;

  using Stencil = std::vector<StencilEntry>;
  // Per agent, per prescription mask, per node.
  std::vector<std::vector<double>> silent_p[2];
  std::vector<std::vector<Stencil>> silent_cond[2];
  std::vector<std::vector<double>> fire_p[2];
  std::vector<std::vector<Stencil>> fire_cond[2];
  std::vector<std::vector<double>> rho_term;   // [gi][node]
  std::vector<std::vector<double>> cost_term;  // [li][node]
  // Per agent, per local control map, per node.
  std::vector<std::vector<Stencil>> img[2];
  int maps2 = 1;  // agent-2 control map count; li = i1 * maps2 + i2

  GridSolver(const Scenario& s_, const SolveOptions& opts_,
             const std::vector<CommPair>& cp, const std::vector<CtrlPair>& up,
             GammaRestriction r)
      : s(s_), opts(opts_), comm_pairs(cp), ctrl_pairs(up), restriction(r),
        plan(s_) {
    if (opts.grid_nodes < 2)
      fail(Status::InvalidArgument, "grid_nodes must be at least 2");
    g1 = AgentGrid(s.agents[0].num_states, opts.grid_nodes);
    g2 = AgentGrid(s.agents[1].num_states, opts.grid_nodes);
    N1 = g1.count();
    N2 = g2.count();
    NP = N1 * N2;
    L = plan.sa_cap;
    theta = s.discount;
    theta_u = ctrl_discount(s);
    p_e = s.erasure_prob;
    erasure = opts.force_erasure_model || p_e > 0.0;
    precompute();
  }

  const AgentGrid& grid(int a) const { return a == 0 ? g1 : g2; }

  void precompute() {
    for (int a = 0; a < 2; ++a) {
      const AgentGrid& g = grid(a);
      const int n = g.states();
      const int masks = 1 << n;
      silent_p[a].assign(masks, std::vector<double>(g.count(), 0.0));
      silent_cond[a].assign(masks, std::vector<Stencil>(g.count()));
      if (erasure) {
        fire_p[a].assign(masks, std::vector<double>(g.count(), 0.0));
        fire_cond[a].assign(masks, std::vector<Stencil>(g.count()));
      }
      for (int m = 0; m < masks; ++m) {
        const CommPrescription gp{static_cast<std::uint32_t>(m), n};
        for (int r = 0; r < g.count(); ++r) {
          const Belief& pi = g.node(r);
          double sil = 0.0, fire = 0.0;
          for (int x = 0; x < n; ++x)
            (gp.at(x) == 0 ? sil : fire) += pi[x];
          silent_p[a][m][r] = sil;
          if (sil > 0.0) {
            const Belief eta = post_comm_update(pi, gp, Observation::phi(0, 0), a);
            g.stencil(eta, silent_cond[a][m][r]);
          }
          if (erasure) {
            fire_p[a][m][r] = fire;
            if (fire > 0.0) {
              const Observation z = a == 0 ? Observation::phi(1, 0)
                                           : Observation::phi(0, 1);
              const Belief eta = post_comm_update_erasure(pi, gp, z, a);
              g.stencil(eta, fire_cond[a][m][r]);
            }
          }
        }
      }
    }

    rho_term.assign(comm_pairs.size(), std::vector<double>(NP, 0.0));
    for (std::size_t gi = 0; gi < comm_pairs.size(); ++gi) {
      const CommPair& g = comm_pairs[gi];
      for (int i1 = 0; i1 < N1; ++i1) {
        const Belief& pi1 = g1.node(i1);
        for (int i2 = 0; i2 < N2; ++i2) {
          const Belief& pi2 = g2.node(i2);
          double acc = 0.0;
          for (int x1 = 0; x1 < pi1.size(); ++x1)
            for (int x2 = 0; x2 < pi2.size(); ++x2)
              if (g.first.at(x1) != 0 || g.second.at(x2) != 0)
                acc += s.comm_cost.at(x1, x2) * pi1[x1] * pi2[x2];
          rho_term[gi][i1 * N2 + i2] = acc;
        }
      }
    }

    // Agent-local control maps in enumeration order, extracted from the pair
    // list so the pair index decomposes as li = i1 * maps2 + i2.
    std::int64_t m2 = 1;
    for (int x = 0; x < s.agents[1].num_states; ++x)
      m2 *= s.agents[1].num_actions;
    maps2 = static_cast<int>(m2);
    const int maps1 = static_cast<int>(ctrl_pairs.size()) / maps2;
    for (int a = 0; a < 2; ++a) {
      const AgentGrid& g = grid(a);
      const int count = a == 0 ? maps1 : maps2;
      img[a].assign(count, std::vector<Stencil>(g.count()));
      for (int mi = 0; mi < count; ++mi) {
        const CtrlPrescription& l =
            a == 0 ? ctrl_pairs[static_cast<std::size_t>(mi) * maps2].first
                   : ctrl_pairs[mi].second;
        for (int r = 0; r < g.count(); ++r) {
          const Belief beta = post_control_update(g.node(r), l, s.agents[a]);
          g.stencil(beta, img[a][mi][r]);
        }
      }
    }

    cost_term.assign(ctrl_pairs.size(), std::vector<double>(NP, 0.0));
    for (std::size_t li = 0; li < ctrl_pairs.size(); ++li) {
      const CtrlPair& l = ctrl_pairs[li];
      for (int i1 = 0; i1 < N1; ++i1) {
        const Belief& pi1 = g1.node(i1);
        for (int i2 = 0; i2 < N2; ++i2) {
          const Belief& pi2 = g2.node(i2);
          double acc = 0.0;
          for (int x1 = 0; x1 < pi1.size(); ++x1)
            for (int x2 = 0; x2 < pi2.size(); ++x2)
              acc += s.cost_at(x1, x2, l.first.at(x1), l.second.at(x2)) *
                     pi1[x1] * pi2[x2];
          cost_term[li][i1 * N2 + i2] = acc;
        }
      }
    }
  }

  double eval(const std::vector<double>& table, const Stencil& s1,
              const Stencil& s2) const {
    double v = 0.0;
    for (const StencilEntry& e1 : s1)
      for (const StencilEntry& e2 : s2)
        v += e1.weight * e2.weight * table[e1.node * N2 + e2.node];
    return v;
  }

  GridTables run(SolveReport& report) {
    GridTables out;
    out.g1 = g1;
    out.g2 = g2;
    out.layers = L;
    out.comm_value.assign(L, std::vector<double>(NP, 0.0));
    out.ctrl_value.assign(L, std::vector<double>(NP, 0.0));
    out.comm_choice.assign(L, std::vector<std::uint32_t>(NP, 0));
    out.ctrl_choice.assign(L, std::vector<std::uint32_t>(NP, 0));
    std::vector<std::vector<double>> comm_next(L, std::vector<double>(NP, 0.0));
    std::vector<std::vector<double>> ctrl_next(L, std::vector<double>(NP, 0.0));

    const double scale = std::max({1.0, s.max_stage_cost(), s.max_comm_cost()});
    const double tol = opts.vi_tol > 0.0
                           ? opts.vi_tol
                           : 1e-6 * (1.0 - theta * theta_u) * scale;

    int sweep = 0;
    double residual = kInf;
    while (true) {
      ++sweep;
      residual = 0.0;

      // Control phase reads the previous communication-phase table.
      for (int layer = 0; layer < L; ++layer) {
        const std::vector<double>& v_comm = out.comm_value[layer];
        for (int i1 = 0; i1 < N1; ++i1)
          for (int i2 = 0; i2 < N2; ++i2) {
            const int node = i1 * N2 + i2;
            double best = kInf;
            std::uint32_t bc = 0;
            for (std::size_t li = 0; li < ctrl_pairs.size(); ++li) {
              const int a1 = static_cast<int>(li) / maps2;
              const int a2 = static_cast<int>(li) % maps2;
              const double v =
                  cost_term[li][node] +
                  theta_u * eval(v_comm, img[0][a1][i1], img[1][a2][i2]);
              if (v < best) {
                best = v;
                bc = static_cast<std::uint32_t>(li);
              }
            }
            residual = std::max(residual, std::abs(best - out.ctrl_value[layer][node]));
            ctrl_next[layer][node] = best;
            out.ctrl_choice[layer][node] = bc;
          }
      }

      // Communication phase reads the control-phase table just written.
      for (int layer = 0; layer < L; ++layer) {
        const Feas feas = plan.classify(ConstraintState{layer + 1, 0});
        const auto [lo, hi] = comm_candidates(comm_pairs.size(), restriction, feas);
        if (lo >= hi)
          fail(Status::Infeasible, "no communication prescription is admissible");
        const int silent_layer = std::min(layer + 1, L - 1);
        const std::vector<double>& v_sil = ctrl_next[silent_layer];
        const std::vector<double>& v_att = ctrl_next[0];
        for (int i1 = 0; i1 < N1; ++i1)
          for (int i2 = 0; i2 < N2; ++i2) {
            const int node = i1 * N2 + i2;
            double best = kInf;
            std::uint32_t bc = static_cast<std::uint32_t>(lo);
            for (std::size_t gi = lo; gi < hi; ++gi) {
              const int m1 = static_cast<int>(comm_pairs[gi].first.mask);
              const int m2 = static_cast<int>(comm_pairs[gi].second.mask);
              double acc = 0.0;
              const double sp = silent_p[0][m1][i1] * silent_p[1][m2][i2];
              if (sp > kProbFloor)
                acc += sp * eval(v_sil, silent_cond[0][m1][i1], silent_cond[1][m2][i2]);
              if (erasure) {
                // Erased-attempt branches, ordered by attempt pattern.
                for (int mm = 1; mm < 4; ++mm) {
                  const int mm1 = mm >> 1, mm2 = mm & 1;
                  const double p =
                      p_e * (mm1 ? fire_p[0][m1][i1] : silent_p[0][m1][i1]) *
                      (mm2 ? fire_p[1][m2][i2] : silent_p[1][m2][i2]);
                  if (p > kProbFloor)
                    acc += p * eval(v_att,
                                    mm1 ? fire_cond[0][m1][i1] : silent_cond[0][m1][i1],
                                    mm2 ? fire_cond[1][m2][i2] : silent_cond[1][m2][i2]);
                }
              }
              const Belief& pi1 = g1.node(i1);
              const Belief& pi2 = g2.node(i2);
              for (int x1 = 0; x1 < pi1.size(); ++x1)
                for (int x2 = 0; x2 < pi2.size(); ++x2) {
                  if (((m1 >> x1) & 1) == 0 && ((m2 >> x2) & 1) == 0) continue;
                  const double p = erasure ? (1.0 - p_e) * pi1[x1] * pi2[x2]
                                           : pi1[x1] * pi2[x2];
                  if (p > kProbFloor)
                    acc += p * v_att[g1.delta_rank(x1) * N2 + g2.delta_rank(x2)];
                }
              const double v = rho_term[gi][node] + theta * acc;
              if (v < best) {
                best = v;
                bc = static_cast<std::uint32_t>(gi);
              }
            }
            residual = std::max(residual, std::abs(best - out.comm_value[layer][node]));
            comm_next[layer][node] = best;
            out.comm_choice[layer][node] = bc;
          }
      }

      std::swap(out.comm_value, comm_next);
      std::swap(out.ctrl_value, ctrl_next);

      if (opts.fixed_sweeps > 0) {
        if (sweep >= opts.fixed_sweeps) break;
      } else if (residual < tol) {
        break;
      } else if (sweep >= opts.max_sweeps) {
        fail(Status::NoConvergence,
             "value iteration did not reach tolerance " + std::to_string(tol) +
                 " within " + std::to_string(opts.max_sweeps) +
                 " sweeps (residual " + std::to_string(residual) + ")");
      }
    }

    report.iterations = sweep;
    report.residual = residual;
    report.grid_nodes = opts.grid_nodes;
    report.mode = "grid";

    // Certified range: no policy can accrue more than the per-step maxima.
    const double bound =
        (s.max_comm_cost() + s.max_stage_cost()) / (1.0 - theta * theta_u);
    const double hi_bound = bound * (1.0 + 1e-9) + 1e-9;
    for (const auto* tables : {&out.comm_value, &out.ctrl_value})
      for (const auto& layer : *tables)
        for (const double v : layer)
          if (!(v >= -1e-9 && v <= hi_bound))
            fail(Status::Internal, "value table escaped the certified range");
    return out;
  }
};

// ---------------------------------------------------------------------------
// Always-communicate reduction: beliefs collapse every step, so the value is
// linear in the joint belief and satisfies a joint-state fixed point.
// ---------------------------------------------------------------------------

AlwaysMdpTables solve_always_mdp(const Scenario& s, SolveReport& report) {
  const int n1 = s.agents[0].num_states;
  const int n2 = s.agents[1].num_states;
  const int a1 = s.agents[0].num_actions;
  const int a2 = s.agents[1].num_actions;
  const double theta = s.discount;
  const double theta_u = ctrl_discount(s);

  AlwaysMdpTables t;
  t.comm_value.assign(n1, std::vector<double>(n2, 0.0));
  t.ctrl_value.assign(n1, std::vector<double>(n2, 0.0));
  t.best_u1.assign(n1, std::vector<int>(n2, 0));
  t.best_u2.assign(n1, std::vector<int>(n2, 0));

  const double scale = std::max({1.0, s.max_stage_cost(), s.max_comm_cost()});
  const double tol = 1e-12 * scale;
  const int max_iters = 2000000;
  double residual = kInf;
  int iter = 0;
  while (residual >= tol) {
    if (++iter > max_iters)
      fail(Status::NoConvergence, "joint-state value iteration stalled");
    residual = 0.0;
    for (int x1 = 0; x1 < n1; ++x1)
      for (int x2 = 0; x2 < n2; ++x2) {
        double best = kInf;
        int bu1 = 0, bu2 = 0;
        for (int u1 = 0; u1 < a1; ++u1)
          for (int u2 = 0; u2 < a2; ++u2) {
            double cont = 0.0;
            for (int y1 = 0; y1 < n1; ++y1) {
              const double p1 = s.agents[0].transition[x1][u1][y1];
              if (p1 == 0.0) continue;
              for (int y2 = 0; y2 < n2; ++y2)
                cont += p1 * s.agents[1].transition[x2][u2][y2] *
                        t.comm_value[y1][y2];
            }
            const double v = s.cost_at(x1, x2, u1, u2) + theta_u * cont;
            if (v < best) {
              best = v;
              bu1 = u1;
              bu2 = u2;
            }
          }
        residual = std::max(residual, std::abs(best - t.ctrl_value[x1][x2]));
        t.ctrl_value[x1][x2] = best;
        t.best_u1[x1][x2] = bu1;
        t.best_u2[x1][x2] = bu2;
      }
    for (int x1 = 0; x1 < n1; ++x1)
      for (int x2 = 0; x2 < n2; ++x2) {
        const double v = s.comm_cost.at(x1, x2) + theta * t.ctrl_value[x1][x2];
        residual = std::max(residual, std::abs(v - t.comm_value[x1][x2]));
        t.comm_value[x1][x2] = v;
      }
  }
  report.iterations = iter;
  report.residual = residual;
  report.mode = "joint-mdp";
  return t;
}

Solution solve_impl(const Scenario& input, const SolveOptions& opts,
                    GammaRestriction restriction, bool strip_constraints) {
  Scenario s = input;
  if (opts.discount_mode) s.discount_mode = *opts.discount_mode;
  if (strip_constraints) s.constraints.reset();
  validate_scenario(s);

  const auto t0 = std::chrono::steady_clock::now();
  Solution sol;
  sol.scenario = s;
  sol.restriction = restriction;
  sol.comm_pairs = enumerate_comm_pairs(s, opts.enum_cap);
  sol.ctrl_pairs = enumerate_ctrl_pairs(s, opts.enum_cap);
  sol.report.scenario_hash = scenario_hash(s);

  if (s.horizon.finite) {
    ReachSolver rs(s, opts, sol.comm_pairs, sol.ctrl_pairs, restriction);
    const double v = rs.comm_value(1, sol.initial_pair(), sol.initial_cstate());
    if (!std::isfinite(v))
      fail(Status::Infeasible,
           "constraints admit no feasible communication schedule");
    sol.reach = std::make_shared<ReachableTables>(std::move(rs.tables));
    sol.report.value = v;
    sol.report.mode = "reachable";
    sol.report.iterations = s.horizon.steps;
    sol.report.memo_entries = rs.entries;
  } else {
    if (s.constraints && (s.constraints->s_max || s.constraints->max_count))
      fail(Status::Unsupported,
           "discounted constrained solves support a minimum gap only");
    GridSolver gs(s, opts, sol.comm_pairs, sol.ctrl_pairs, restriction);
    sol.grid = std::make_shared<GridTables>(gs.run(sol.report));
    sol.report.value =
        sol.grid->interpolate(sol.grid->comm_value[0], sol.initial_pair());
    sol.report.memo_entries =
        static_cast<std::size_t>(sol.grid->layers) * sol.grid->pair_count() * 2;
  }
  sol.report.wall_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
  return sol;
}

}  // namespace

BeliefPair Solution::initial_pair() const {
  return BeliefPair{Belief::normalized(scenario.agents[0].initial),
                    Belief::normalized(scenario.agents[1].initial)};
}

ConstraintState Solution::initial_cstate() const {
  return ConstraintPlan(scenario).clamp(ConstraintState{1, 0});
}

ConstraintState Solution::next_on_attempt(ConstraintState cs) const {
  return ConstraintPlan(scenario).on_attempt(cs);
}

ConstraintState Solution::next_on_silence(ConstraintState cs) const {
  return ConstraintPlan(scenario).on_silence(cs);
}

CommPair Solution::decide_comm(const BeliefPair& pair, ConstraintState cs,
                               int t) const {
  if (mdp) return comm_pairs.back();
  const ConstraintState cl = ConstraintPlan(scenario).clamp(cs);
  if (grid) {
    const int layer = std::min(cl.since_last, grid->layers) - 1;
    const int node = grid->g1.nearest(pair.b1) * grid->g2.count() +
                     grid->g2.nearest(pair.b2);
    return comm_pairs[grid->comm_choice[layer][node]];
  }
  if (t < 1 || t > reach->horizon)
    fail(Status::InvalidArgument, "decision time outside the solved horizon");
  const auto& map = reach->comm[t - 1];
  const auto it = map.find(MemoKey{quantize(pair), cl});
  if (it == map.end())
    fail(Status::InvalidArgument,
         "belief pair is not part of the solved reachable set");
  if (!std::isfinite(it->second.value))
    fail(Status::Infeasible, "no feasible prescription at this decision point");
  return comm_pairs[it->second.choice];
}

CtrlPair Solution::decide_ctrl(const BeliefPair& pair, ConstraintState cs,
                               int t) const {
  if (mdp) {
    const PairValueFn lin = [this](const BeliefPair& p, const ConstraintState&) {
      double v = 0.0;
      for (int x1 = 0; x1 < p.b1.size(); ++x1)
        for (int x2 = 0; x2 < p.b2.size(); ++x2)
          v += p.b1[x1] * p.b2[x2] * mdp->comm_value[x1][x2];
      return v;
    };
    return ctrl_pairs[control_backup(pair, scenario, ctrl_pairs, lin, cs).choice];
  }
  const ConstraintState cl = ConstraintPlan(scenario).clamp(cs);
  if (grid) {
    const int layer = std::min(cl.since_last, grid->layers) - 1;
    const int node = grid->g1.nearest(pair.b1) * grid->g2.count() +
                     grid->g2.nearest(pair.b2);
    return ctrl_pairs[grid->ctrl_choice[layer][node]];
  }
  if (t < 1 || t > reach->horizon)
    fail(Status::InvalidArgument, "decision time outside the solved horizon");
  const auto& map = reach->ctrl[t - 1];
  const auto it = map.find(MemoKey{quantize(pair), cl});
  if (it == map.end())
    fail(Status::InvalidArgument,
         "belief pair is not part of the solved reachable set");
  return ctrl_pairs[it->second.choice];
}

double Solution::value_at(const BeliefPair& pair, bool comm_phase,
                          ConstraintState cs, int t) const {
  if (mdp) {
    const PairValueFn lin = [this](const BeliefPair& p, const ConstraintState&) {
      double v = 0.0;
      for (int x1 = 0; x1 < p.b1.size(); ++x1)
        for (int x2 = 0; x2 < p.b2.size(); ++x2)
          v += p.b1[x1] * p.b2[x2] * mdp->comm_value[x1][x2];
      return v;
    };
    // A delivery collapses the belief before the control phase, so the
    // communication-phase value is linear in the joint belief.
    if (comm_phase) return lin(pair, cs);
    return control_backup(pair, scenario, ctrl_pairs, lin, cs).value;
  }
  const ConstraintState cl = ConstraintPlan(scenario).clamp(cs);
  if (grid) {
    const int layer = std::min(cl.since_last, grid->layers) - 1;
    const auto& table =
        comm_phase ? grid->comm_value[layer] : grid->ctrl_value[layer];
    return grid->interpolate(table, pair);
  }
  if (t < 1 || t > reach->horizon)
    fail(Status::InvalidArgument, "decision time outside the solved horizon");
  const auto& map = comm_phase ? reach->comm[t - 1] : reach->ctrl[t - 1];
  const auto it = map.find(MemoKey{quantize(pair), cl});
  if (it == map.end())
    fail(Status::InvalidArgument,
         "belief pair is not part of the solved reachable set");
  return it->second.value;
}

Solution solve(const Scenario& s, const SolveOptions& opts) {
  return solve_impl(s, opts, GammaRestriction::None, false);
}

Solution solve_baseline_never(const Scenario& s, const SolveOptions& opts) {
  return solve_impl(s, opts, GammaRestriction::AllZero, true);
}

Solution solve_baseline_always(const Scenario& input, const SolveOptions& opts) {
  if (!input.horizon.finite && input.erasure_prob <= 0.0 &&
      !opts.force_erasure_model) {
    Scenario s = input;
    if (opts.discount_mode) s.discount_mode = *opts.discount_mode;
    s.constraints.reset();
    validate_scenario(s);
    const auto t0 = std::chrono::steady_clock::now();
    Solution sol;
    sol.scenario = s;
    sol.restriction = GammaRestriction::AllOne;
    sol.comm_pairs = enumerate_comm_pairs(s, opts.enum_cap);
    sol.ctrl_pairs = enumerate_ctrl_pairs(s, opts.enum_cap);
    sol.report.scenario_hash = scenario_hash(s);
    sol.mdp = std::make_shared<AlwaysMdpTables>(solve_always_mdp(s, sol.report));
    const BeliefPair init = sol.initial_pair();
    double v = 0.0;
    for (int x1 = 0; x1 < init.b1.size(); ++x1)
      for (int x2 = 0; x2 < init.b2.size(); ++x2)
        v += init.b1[x1] * init.b2[x2] * sol.mdp->comm_value[x1][x2];
    sol.report.value = v;
    sol.report.wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
    return sol;
  }
  return solve_impl(input, opts, GammaRestriction::AllOne, true);
}

}  // namespace costcomm
