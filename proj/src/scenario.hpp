#pragma once

#include <string>

#include "types.hpp"

namespace costcomm {

// Checks every Scenario invariant (stochastic rows, dimensions, ranges,
// constraint feasibility). Throws Error with the offending path.
void validate_scenario(const Scenario& s);

// Discount applied to the continuation of a control phase. The communication
// phase always carries the discount; per-phase mode charges it at both phases
// (a full step compounds to discount^2), per-step mode once per step.
inline double control_discount(const Scenario& s) {
  return s.discount_mode == DiscountMode::PerPhase ? s.discount : 1.0;
}

// Parses and validates a scenario from its JSON document form.
Scenario load_scenario(const std::string& json_text);

// Serializes to the canonical JSON form; load_scenario(serialize_scenario(s))
// reproduces s field for field.
std::string serialize_scenario(const Scenario& s);

// FNV-1a hash of the canonical serialized form, for run reports.
std::uint64_t scenario_hash(const Scenario& s);

// Two-state ("safe", "attack") / two-action ("nothing", "defend") benchmark
// instance. State 0 moves to attack with probability p_a under both actions;
// state 1 stays under "nothing" and recovers with probability p_v under
// "defend". Cost: 0 when both safe, 20 when any agent is under attack, plus a
// 150 surcharge when both defend. Initial state (0,0), fixed comm cost rho.
Scenario defense_scenario(double pa1, double pv1, double pa2, double pv2,
                          double theta, double rho);

}  // namespace costcomm
