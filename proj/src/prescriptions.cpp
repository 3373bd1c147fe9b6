#include "prescriptions.hpp"

namespace costcomm {

namespace {

// Number of functions state->range, guarded against overflow past cap.
std::size_t pow_capped(std::size_t base, int exp, std::size_t cap) {
  std::size_t n = 1;
  for (int i = 0; i < exp; ++i) {
    if (n > cap / base + 1) return cap + 1;
    n *= base;
  }
  return n;
}

}  // namespace

std::vector<CommPair> enumerate_comm_pairs(const Scenario& s, std::size_t cap) {
  const int n1 = s.agents[0].num_states;
  const int n2 = s.agents[1].num_states;
  if (n1 >= 31 || n2 >= 31)
    fail(Status::CapExceeded, "enumerate_comm_pairs: state space too large");
  const std::size_t c1 = std::size_t{1} << n1;
  const std::size_t c2 = std::size_t{1} << n2;
  if (c1 > cap / c2 + 1 || c1 * c2 > cap)
    fail(Status::CapExceeded,
         "enumerate_comm_pairs: " + std::to_string(c1) + "*" + std::to_string(c2) +
             " pairs exceed cap " + std::to_string(cap));
  std::vector<CommPair> out;
  out.reserve(c1 * c2);
  for (std::uint32_t m1 = 0; m1 < c1; ++m1)
    for (std::uint32_t m2 = 0; m2 < c2; ++m2)
      out.push_back({{m1, n1}, {m2, n2}});
  return out;
}

std::vector<CtrlPair> enumerate_ctrl_pairs(const Scenario& s, std::size_t cap) {
  const int n1 = s.agents[0].num_states;
  const int n2 = s.agents[1].num_states;
  const std::size_t c1 = pow_capped(s.agents[0].num_actions, n1, cap);
  const std::size_t c2 = pow_capped(s.agents[1].num_actions, n2, cap);
  if (c1 > cap || c2 > cap || c1 > cap / c2 + 1 || c1 * c2 > cap)
    fail(Status::CapExceeded, "enumerate_ctrl_pairs: pair count exceeds cap " +
                                  std::to_string(cap));

  // Lexicographic enumeration of action arrays, state 0 most significant.
  auto all_maps = [](int states, int actions, std::size_t count) {
    std::vector<CtrlPrescription> maps;
    maps.reserve(count);
    CtrlPrescription cur;
    cur.action.assign(states, 0);
    for (std::size_t k = 0; k < count; ++k) {
      maps.push_back(cur);
      for (int x = states - 1; x >= 0; --x) {
        if (++cur.action[x] < actions) break;
        cur.action[x] = 0;
      }
    }
    return maps;
  };
  const auto maps1 = all_maps(n1, s.agents[0].num_actions, c1);
  const auto maps2 = all_maps(n2, s.agents[1].num_actions, c2);
  std::vector<CtrlPair> out;
  out.reserve(c1 * c2);
  for (const auto& l1 : maps1)
    for (const auto& l2 : maps2) out.push_back({l1, l2});
  return out;
}

std::string render_comm(const CommPrescription& g) {
  std::string out = "[";
  for (int x = 0; x < g.width; ++x) {
    if (x) out += ",";
    out += std::to_string(g.at(x));
  }
  return out + "]";
}

std::string render_ctrl(const CtrlPrescription& l, const std::vector<std::string>& labels) {
  std::string out = "[";
  for (std::size_t x = 0; x < l.action.size(); ++x) {
    if (x) out += ",";
    const int a = l.action[x];
    out += (a < static_cast<int>(labels.size())) ? labels[a] : std::to_string(a);
  }
  return out + "]";
}

}  // namespace costcomm
