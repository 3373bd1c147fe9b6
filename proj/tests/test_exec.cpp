#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "exec.hpp"
#include "test_util.hpp"

using namespace costcomm;
using testutil::status_of;

namespace {

int sample_index(const std::vector<OutcomeProb>& outs, double r) {
  double acc = 0.0;
  int last = 0;
  for (int i = 0; i < static_cast<int>(outs.size()); ++i) {
    if (outs[i].prob <= 0.0) continue;
    last = i;
    acc += outs[i].prob;
    if (r < acc) return i;
  }
  return last;
}

void check_factored_matches_joint(const Scenario& s,
                                  const std::vector<FilterStep>& steps,
                                  const BeliefPair& pair) {
  const auto joint = exact_joint_filter(s, steps);
  const int n1 = s.agents[0].num_states;
  const int n2 = s.agents[1].num_states;
  for (int x1 = 0; x1 < n1; ++x1) {
    double marg = 0.0;
    for (int x2 = 0; x2 < n2; ++x2) marg += joint[x1][x2];
    CHECK(marg == testutil::near(pair.b1[x1], 1e-12));
  }
  for (int x2 = 0; x2 < n2; ++x2) {
    double marg = 0.0;
    for (int x1 = 0; x1 < n1; ++x1) marg += joint[x1][x2];
    CHECK(marg == testutil::near(pair.b2[x2], 1e-12));
  }
  for (int x1 = 0; x1 < n1; ++x1)
    for (int x2 = 0; x2 < n2; ++x2)
      CHECK(joint[x1][x2] ==
            testutil::near(pair.b1[x1] * pair.b2[x2], 1e-12));
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string tok;
  std::istringstream in(line);
  while (std::getline(in, tok, '\t')) out.push_back(tok);
  return out;
}

std::filesystem::path temp_file(const std::string& stem) {
  return std::filesystem::temp_directory_path() /
         (stem + "_" + std::to_string(::getpid()) + ".tsv");
}

}  // namespace

TEST_CASE("the joint filter starts from the product of the initial beliefs") {
  std::mt19937_64 rng(11);
  const Scenario s = testutil::random_scenario(rng);
  const auto joint = exact_joint_filter(s, {});
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2)
      CHECK(joint[x1][x2] == s.agents[0].initial[x1] * s.agents[1].initial[x2]);
}

TEST_CASE("per-agent belief updates track the exact joint filter") {
  std::mt19937_64 rng(314);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 12; ++trial) {
    testutil::ScenarioSpec spec;
    spec.num_states = trial % 2 == 0 ? 2 : 3;
    spec.erasure = trial < 6 ? 0.0 : 0.3;
    const Scenario s = testutil::random_scenario(rng, spec);
    const auto comm_pairs = enumerate_comm_pairs(s);
    const auto ctrl_pairs = enumerate_ctrl_pairs(s);

    BeliefPair pair{Belief::normalized(s.agents[0].initial),
                    Belief::normalized(s.agents[1].initial)};
    std::vector<FilterStep> steps;
    const int length = 1 + trial % 3;
    for (int t = 0; t < length; ++t) {
      const CommPair& g = comm_pairs[rng() % comm_pairs.size()];
      const auto outs = erasure_outcome_probs(pair, g, s.erasure_prob);
      const Observation z = outs[sample_index(outs, u(rng))].z;
      pair.b1 = post_comm_update_erasure(pair.b1, g.first, z, 0);
      pair.b2 = post_comm_update_erasure(pair.b2, g.second, z, 1);
      steps.push_back(FilterStep{g, z, std::nullopt});
      check_factored_matches_joint(s, steps, pair);

      const CtrlPair& l = ctrl_pairs[rng() % ctrl_pairs.size()];
      pair.b1 = post_control_update(pair.b1, l.first, s.agents[0]);
      pair.b2 = post_control_update(pair.b2, l.second, s.agents[1]);
      steps.back().l = l;
      check_factored_matches_joint(s, steps, pair);
    }
  }
}

TEST_CASE("exhaustive baselines reject mismatched scenarios") {
  std::mt19937_64 rng(21);
  testutil::ScenarioSpec spec;
  spec.finite = true;
  spec.steps = 2;
  const Scenario two = testutil::random_scenario(rng, spec);
  CHECK(status_of([&] { brute_force_T1(two); }) == Status::InvalidArgument);

  spec.steps = 1;
  Scenario one = testutil::random_scenario(rng, spec);
  one.constraints = CommConstraints{0, std::nullopt, 1};
  CHECK(status_of([&] { brute_force_T1(one); }) == Status::Unsupported);
  CHECK(status_of([&] { brute_force_T2(two); }) == Status::Ok);
}

TEST_CASE("baseline policies pin the observed exchange frequency") {
  const Scenario s = defense_scenario(0.3, 0.6, 0.3, 0.6, 0.95, 1.0);
  SolveOptions opts;
  opts.grid_nodes = 11;
  SimOptions sim;
  sim.episodes = 50;

  const SimStats always = simulate(solve_baseline_always(s, opts), sim);
  CHECK(always.comm_frequency == 1.0);
  const SimStats never = simulate(solve_baseline_never(s, opts), sim);
  CHECK(never.comm_frequency == 0.0);
}

TEST_CASE("simulation statistics are reproducible for a fixed seed") {
  const Scenario s = defense_scenario(0.3, 0.6, 0.3, 0.6, 0.95, 1.0);
  SolveOptions opts;
  opts.grid_nodes = 11;
  const Solution sol = solve(s, opts);
  SimOptions sim;
  sim.episodes = 200;
  sim.seed = 42;
  const SimStats a = simulate(sol, sim);
  const SimStats b = simulate(sol, sim);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  CHECK(a.comm_frequency == b.comm_frequency);
  sim.seed = 43;
  const SimStats c = simulate(sol, sim);
  CHECK(a.mean != c.mean);
}

TEST_CASE("zero-cost rollouts report zero mean and spread") {
  Scenario s = defense_scenario(0.3, 0.6, 0.3, 0.6, 0.9, 0.0);
  for (auto& l1 : s.cost)
    for (auto& l2 : l1)
      for (auto& l3 : l2)
        for (double& v : l3) v = 0.0;
  SolveOptions opts;
  opts.grid_nodes = 11;
  SimOptions sim;
  sim.episodes = 20;
  const SimStats st = simulate(solve(s, opts), sim);
  CHECK(st.mean == 0.0);
  CHECK(st.std_error == 0.0);
  CHECK(st.horizon == 1);
  CHECK(st.tail_bound == 0.0);
}

TEST_CASE("the rollout horizon follows the scenario and the caps") {
  const Scenario disc = defense_scenario(0.3, 0.6, 0.3, 0.6, 0.95, 1.0);
  SolveOptions opts;
  opts.grid_nodes = 11;
  const Solution sol = solve(disc, opts);

  SUBCASE("a finite scenario runs exactly its horizon") {
    Scenario fin = disc;
    fin.horizon.finite = true;
    fin.horizon.steps = 3;
    SimOptions sim;
    sim.episodes = 10;
    const SimStats st = simulate(solve(fin), sim);
    CHECK(st.horizon == 3);
    CHECK(st.tail_bound == 0.0);
  }
  SUBCASE("the default tail target bounds the neglected cost") {
    SimOptions sim;
    sim.episodes = 5;
    const SimStats st = simulate(sol, sim);
    CHECK(st.horizon > 1);
    CHECK(st.tail_bound > 0.0);
    CHECK(st.tail_bound <= 0.05);
  }
  SUBCASE("an explicit cap truncates and reports the looser tail") {
    SimOptions sim;
    sim.episodes = 5;
    sim.horizon_cap = 10;
    const SimStats st = simulate(sol, sim);
    CHECK(st.horizon == 10);
    CHECK(st.tail_bound > 0.05);
  }
  SUBCASE("a loose tail target collapses the horizon to one step") {
    SimOptions sim;
    sim.episodes = 5;
    sim.tail_tol = 2000.0;
    const SimStats st = simulate(sol, sim);
    CHECK(st.horizon == 1);
  }
}

TEST_CASE("trace files reproduce the reported mean exactly") {
  Scenario s = defense_scenario(0.3, 0.6, 0.3, 0.6, 0.95, 1.0);
  s.horizon.finite = true;
  s.horizon.steps = 3;
  const Solution sol = solve(s);

  const auto path = temp_file("costcomm_trace");
  SimOptions sim;
  sim.episodes = 5;
  sim.seed = 7;
  sim.trace_path = path.string();
  const SimStats st = simulate(sol, sim);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line ==
        "# episode\tt\tphase\tx1\tx2\tm1\tm2\tz\tu1\tu2\tstage_cost");

  const double theta = s.discount;
  const double theta_u = control_discount(s);
  std::vector<double> totals(5, 0.0);
  std::vector<double> weight_comm(5, 1.0);
  int rows = 0;
  while (std::getline(in, line)) {
    const auto cols = split_tabs(line);
    REQUIRE(cols.size() == 11);
    const int e = std::stoi(cols[0]);
    const double cost = std::stod(cols[10]);
    if (cols[2] == "comm") {
      CHECK(cols[8] == "-");
      CHECK(cols[9] == "-");
      totals[e] += weight_comm[e] * cost;
    } else {
      REQUIRE(cols[2] == "ctrl");
      CHECK(cols[5] == "-");
      CHECK(cols[6] == "-");
      CHECK(cols[7] == "-");
      const double wu = weight_comm[e] * theta;
      totals[e] += wu * cost;
      weight_comm[e] = wu * theta_u;
    }
    ++rows;
  }
  CHECK(rows == 5 * 3 * 2);

  double sum = 0.0;
  for (double v : totals) sum += v;
  CHECK(sum / 5.0 == st.mean);
  std::filesystem::remove(path);
}

TEST_CASE("rollout averages land near the solver value") {
  const Scenario s = defense_scenario(0.3, 0.6, 0.3, 0.6, 0.95, 1.0);
  SolveOptions opts;
  opts.grid_nodes = 51;
  const Solution sol = solve(s, opts);
  SimOptions sim;
  sim.episodes = 2000;
  sim.seed = 3;
  const SimStats st = simulate(sol, sim);
  const double err = std::abs(st.mean - sol.report.value);
  CHECK(err <= 5.0 * st.std_error + 0.5);
}

TEST_CASE("simulation rejects unusable options") {
  const Scenario s = defense_scenario(0.3, 0.6, 0.3, 0.6, 0.95, 1.0);
  SolveOptions opts;
  opts.grid_nodes = 11;
  const Solution sol = solve(s, opts);

  SimOptions bad;
  bad.episodes = 0;
  CHECK(status_of([&] { simulate(sol, bad); }) == Status::InvalidArgument);

  SimOptions trace;
  trace.episodes = 1;
  trace.trace_path = "/nonexistent-dir/deeper/trace.tsv";
  CHECK(status_of([&] { simulate(sol, trace); }) == Status::InvalidArgument);
}
