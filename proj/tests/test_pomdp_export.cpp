#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <doctest.h>

#include "pomdp_export.hpp"
#include "test_util.hpp"

using namespace costcomm;
using testutil::status_of;

namespace {

Scenario export_scenario() {
  return defense_scenario(0.3, 0.6, 0.3, 0.6, 0.95, 2.0);
}

int state_index(const PomdpDoc& doc, const std::string& name) {
  const auto it = std::find(doc.states.begin(), doc.states.end(), name);
  REQUIRE(it != doc.states.end());
  return static_cast<int>(it - doc.states.begin());
}

}  // namespace

TEST_CASE("the exported process declares states, actions and observations") {
  const PomdpDoc doc = parse_pomdp(export_pomdp(export_scenario()));
  CHECK(doc.discount == 0.95);
  REQUIRE(doc.states.size() == 8);
  CHECK(doc.states[0] == "s0_0_comm");
  CHECK(doc.states[1] == "s0_0_ctrl");
  CHECK(doc.states[7] == "s1_1_ctrl");

  REQUIRE(doc.actions.size() == 32);
  CHECK(doc.actions[0] == "g0_00_00");
  CHECK(doc.actions[4] == "g4_10_00");
  CHECK(doc.actions[15] == "g15_11_11");
  CHECK(doc.actions[16] == "u0_0.0_0.0");
  CHECK(doc.actions[31] == "u15_1.1_1.1");

  CHECK(doc.observations ==
        std::vector<std::string>{"phi", "z0_0", "z0_1", "z1_0", "z1_1",
                                 "o_ctrl"});

  REQUIRE(doc.start.size() == 8);
  CHECK(doc.start[0] == 1.0);
  double mass = 0.0;
  for (double v : doc.start) mass += v;
  CHECK(mass == 1.0);
}

TEST_CASE("every exported transition row set is stochastic") {
  const PomdpDoc doc = parse_pomdp(export_pomdp(export_scenario()));
  std::map<std::pair<int, int>, double> sums;
  for (const PomdpDoc::Trans& t : doc.transitions) {
    REQUIRE(t.from >= 0);
    REQUIRE(t.to >= 0);
    sums[{t.action, t.from}] += t.prob;
  }
  // Every action writes a row set for every state, in either phase.
  CHECK(sums.size() == doc.actions.size() * doc.states.size());
  for (const auto& [key, sum] : sums)
    CHECK(sum == testutil::near(1.0, 1e-12));
}

TEST_CASE("exported dynamics factor the two agents' chains") {
  const PomdpDoc doc = parse_pomdp(export_pomdp(export_scenario()));
  const int u0 = 16;
  const int from = state_index(doc, "s0_0_ctrl");
  std::map<int, double> row;
  for (const PomdpDoc::Trans& t : doc.transitions)
    if (t.action == u0 && t.from == from) row[t.to] = t.prob;
  REQUIRE(row.size() == 4);
  CHECK(row[state_index(doc, "s0_0_comm")] == testutil::near(0.49, 1e-15));
  CHECK(row[state_index(doc, "s0_1_comm")] == testutil::near(0.21, 1e-15));
  CHECK(row[state_index(doc, "s1_0_comm")] == testutil::near(0.21, 1e-15));
  CHECK(row[state_index(doc, "s1_1_comm")] == testutil::near(0.09, 1e-15));

  // A communication action leaves the joint state in place and flips phase.
  for (const PomdpDoc::Trans& t : doc.transitions)
    if (t.action == 0 && t.from == state_index(doc, "s0_0_comm")) {
      CHECK(t.to == state_index(doc, "s0_0_ctrl"));
      CHECK(t.prob == 1.0);
    }
}

TEST_CASE("exported observations reveal the channel output only") {
  const PomdpDoc doc = parse_pomdp(export_pomdp(export_scenario()));
  int comm_rows = 0, ctrl_rows = 0;
  for (const PomdpDoc::ObsEntry& o : doc.obs_entries) {
    if (o.action < 16) {
      ++comm_rows;
      CHECK(o.prob == 1.0);
      const bool end_ctrl = doc.states[o.to].find("_ctrl") != std::string::npos;
      if (o.action == 15 && end_ctrl)
        CHECK(doc.observations[o.obs].front() == 'z');
      if (o.action == 0)
        CHECK(doc.observations[o.obs] == "phi");
    } else {
      ++ctrl_rows;
      CHECK(o.to == -1);
      CHECK(doc.observations[o.obs] == "o_ctrl");
      CHECK(o.prob == 1.0);
    }
  }
  CHECK(comm_rows == 128);
  CHECK(ctrl_rows == 16);
}

TEST_CASE("exported rewards negate the costs and penalize phase abuse") {
  const PomdpDoc doc = parse_pomdp(export_pomdp(export_scenario()));
  CHECK(doc.rewards.size() == 256);
  const double penalty = 10.0 * 170.0 / (1.0 - 0.95);

  auto reward = [&](int action, const std::string& from) {
    for (const PomdpDoc::RewardEntry& r : doc.rewards)
      if (r.action == action && r.from == state_index(doc, from))
        return r.value;
    FAIL("missing reward row");
    return 0.0;
  };
  CHECK(reward(16, "s1_1_ctrl") == -20.0);
  CHECK(reward(16, "s1_1_comm") == -penalty);
  CHECK(reward(15, "s0_0_comm") == -2.0);
  CHECK(reward(0, "s0_0_comm") == 0.0);
  CHECK(reward(0, "s0_0_ctrl") == -penalty);
}

TEST_CASE("the export is restricted to the representable scenario family") {
  Scenario finite = export_scenario();
  finite.horizon.finite = true;
  finite.horizon.steps = 3;
  CHECK(status_of([&] { export_pomdp(finite); }) == Status::Unsupported);

  Scenario per_step = export_scenario();
  per_step.discount_mode = DiscountMode::PerStep;
  CHECK(status_of([&] { export_pomdp(per_step); }) == Status::Unsupported);

  Scenario erasure = export_scenario();
  erasure.erasure_prob = 0.2;
  CHECK(status_of([&] { export_pomdp(erasure); }) == Status::Unsupported);

  Scenario priced = export_scenario();
  priced.comm_cost.state_dependent = true;
  priced.comm_cost.table = {{1.0, 2.0}, {3.0, 4.0}};
  CHECK(status_of([&] { export_pomdp(priced); }) == Status::Unsupported);

  Scenario constrained = export_scenario();
  constrained.constraints = CommConstraints{2, std::nullopt, std::nullopt};
  CHECK(status_of([&] { export_pomdp(constrained); }) == Status::Unsupported);
}

TEST_CASE("the export is byte-identical across calls") {
  const Scenario s = export_scenario();
  CHECK(export_pomdp(s) == export_pomdp(s));
}

TEST_CASE("the reader rejects malformed documents") {
  CHECK(status_of([] { parse_pomdp("bogus: 1\n"); }) == Status::ParseError);
  CHECK(status_of([] { parse_pomdp("discount: 0.9\n"); }) == Status::ParseError);
  CHECK_NOTHROW(parse_pomdp(export_pomdp(export_scenario())));
}
