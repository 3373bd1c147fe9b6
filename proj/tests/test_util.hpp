#pragma once

// Shared test helpers: deterministic random scenario generation, error-status
// capture and absolute-tolerance comparison.

#include <cmath>
#include <ostream>
#include <random>
#include <utility>
#include <vector>

#include "scenario.hpp"

namespace testutil {

// CHECK(x == near(y, tol)) passes when |x - y| <= tol.
struct Near {
  double target = 0.0;
  double tol = 0.0;
};

inline Near near(double target, double tol) { return Near{target, tol}; }

inline bool operator==(double value, const Near& n) {
  return std::fabs(value - n.target) <= n.tol;
}

inline std::ostream& operator<<(std::ostream& os, const Near& n) {
  return os << n.target << " +/- " << n.tol;
}

inline std::vector<double> random_dist(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.02, 1.0);
  std::vector<double> w(n);
  double sum = 0.0;
  for (double& v : w) sum += (v = u(rng));
  for (double& v : w) v /= sum;
  return w;
}

struct ScenarioSpec {
  int num_states = 2;
  int num_actions = 2;
  bool finite = false;
  int steps = 1;
  double theta = 0.9;
  double erasure = 0.0;
  double cost_max = 10.0;
  double rho_max = 5.0;
};

// Random two-agent scenario with stochastic transition rows, costs drawn
// uniformly from [0, cost_max] and a fixed communication price from
// [0, rho_max]. Deterministic given the generator state.
inline costcomm::Scenario random_scenario(std::mt19937_64& rng,
                                          const ScenarioSpec& spec = {}) {
  using costcomm::Scenario;
  std::uniform_real_distribution<double> uc(0.0, spec.cost_max);
  std::uniform_real_distribution<double> ur(0.0, spec.rho_max);

  Scenario s;
  for (int i = 0; i < 2; ++i) {
    auto& a = s.agents[i];
    a.num_states = spec.num_states;
    a.num_actions = spec.num_actions;
    a.transition.resize(spec.num_states);
    for (auto& per_state : a.transition) {
      per_state.resize(spec.num_actions);
      for (auto& row : per_state) row = random_dist(rng, spec.num_states);
    }
    a.initial = random_dist(rng, spec.num_states);
  }
  s.cost.assign(
      spec.num_states,
      std::vector<std::vector<std::vector<double>>>(
          spec.num_states, std::vector<std::vector<double>>(
                               spec.num_actions,
                               std::vector<double>(spec.num_actions, 0.0))));
  for (auto& l1 : s.cost)
    for (auto& l2 : l1)
      for (auto& l3 : l2)
        for (double& v : l3) v = uc(rng);
  s.comm_cost.fixed = ur(rng);
  s.discount = spec.theta;
  s.erasure_prob = spec.erasure;
  s.horizon.finite = spec.finite;
  s.horizon.steps = spec.steps;
  costcomm::validate_scenario(s);
  return s;
}

template <typename F>
costcomm::Status status_of(F&& f) {
  try {
    std::forward<F>(f)();
    return costcomm::Status::Ok;
  } catch (const costcomm::Error& e) {
    return e.status();
  }
}

}  // namespace testutil
