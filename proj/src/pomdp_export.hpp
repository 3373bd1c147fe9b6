#pragma once

#include <string>
#include <vector>

#include "scenario.hpp"

namespace costcomm {

// Renders the coordinator decision process as a flat-file POMDP in the
// conventional "discount / values / states / actions / observations" text
// format (reward-maximizing, so costs are negated).
//
// Encoding: one POMDP state per (joint state, phase); communication
// prescription pairs and control prescription pairs are separate action
// groups, each legal in its own phase. A wrong-phase action self-loops with a
// penalty of 10 * max cost / (1 - discount), large enough that no optimizing
// solver picks it. Because the format conditions observations on (action, end
// state) only, wrong-phase self-loops reuse the observation row of the
// legitimate entry for that pair; those branches are never on an optimal
// path. Channel outputs are observed after communication actions; control
// actions emit the single placeholder observation.
//
// Supported inputs: discounted horizon, per-phase discounting, reliable
// channel (erasure probability 0), constant communication price, no
// constraints. Anything else throws Unsupported.
std::string export_pomdp(const Scenario& s);

// Minimal reader for the exported format, sufficient for round-trip checks.
struct PomdpDoc {
  double discount = 0.0;
  std::vector<std::string> states;
  std::vector<std::string> actions;
  std::vector<std::string> observations;
  std::vector<double> start;

  struct Trans {
    int action = 0, from = 0, to = 0;
    double prob = 0.0;
  };
  struct ObsEntry {
    int action = 0, to = 0, obs = 0;  // to == -1 encodes a wildcard end state
    double prob = 0.0;
  };
  struct RewardEntry {
    int action = 0, from = 0;  // end state and observation are wildcards
    double value = 0.0;
  };
  std::vector<Trans> transitions;
  std::vector<ObsEntry> obs_entries;
  std::vector<RewardEntry> rewards;
};

PomdpDoc parse_pomdp(const std::string& text);

}  // namespace costcomm
