#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "types.hpp"

namespace costcomm {

// Map from one agent's local state to a communicate/stay-silent decision,
// stored as a bitmask (bit x = decision at state x).
struct CommPrescription {
  std::uint32_t mask = 0;
  int width = 0;

  int at(int x) const { return static_cast<int>((mask >> x) & 1u); }
  bool all_zero() const { return mask == 0; }
};

// Map from one agent's local state to a control action.
struct CtrlPrescription {
  std::vector<int> action;  // action[x]

  int at(int x) const { return action[x]; }
};

struct CommPair {
  CommPrescription first;
  CommPrescription second;

  const CommPrescription& agent(int i) const { return i == 0 ? first : second; }
};

struct CtrlPair {
  CtrlPrescription first;
  CtrlPrescription second;

  const CtrlPrescription& agent(int i) const { return i == 0 ? first : second; }
};

// All communication prescription pairs in lexicographic (mask1, mask2) order;
// the first element is (all-zero, all-zero). Throws CapExceeded when the pair
// count would exceed cap.
std::vector<CommPair> enumerate_comm_pairs(const Scenario& s,
                                           std::size_t cap = kDefaultEnumCap);

// All control prescription pairs in lexicographic order over the two action
// arrays (agent 1 outermost, state 0 most significant).
std::vector<CtrlPair> enumerate_ctrl_pairs(const Scenario& s,
                                           std::size_t cap = kDefaultEnumCap);

// Report renderings, e.g. "[0,1]" for a comm prescription and "[d,n]" for a
// control prescription with labeled actions.
std::string render_comm(const CommPrescription& g);
std::string render_ctrl(const CtrlPrescription& l, const std::vector<std::string>& labels);

}  // namespace costcomm
