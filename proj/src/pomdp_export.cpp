#include "pomdp_export.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "prescriptions.hpp"

namespace costcomm {
namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string bits(const CommPrescription& g) {
  std::string s;
  for (int x = 0; x < g.width; ++x) s += static_cast<char>('0' + g.at(x));
  return s;
}

std::string digits(const CtrlPrescription& l) {
  std::string s;
  for (std::size_t x = 0; x < l.action.size(); ++x) {
    if (x) s += '.';
    s += std::to_string(l.action[x]);
  }
  return s;
}

}  // namespace

std::string export_pomdp(const Scenario& s) {
  if (s.horizon.finite)
    fail(Status::Unsupported, "export_pomdp: requires a discounted horizon");
  if (s.discount_mode != DiscountMode::PerPhase)
    fail(Status::Unsupported, "export_pomdp: requires per-phase discounting");
  if (s.erasure_prob > 0.0)
    fail(Status::Unsupported, "export_pomdp: erasure channel not representable");
  if (s.comm_cost.state_dependent)
    fail(Status::Unsupported,
         "export_pomdp: state-dependent communication price not representable");
  if (s.constraints)
    fail(Status::Unsupported, "export_pomdp: constraints not representable");

  const int n1 = s.agents[0].num_states;
  const int n2 = s.agents[1].num_states;
  const auto comm_pairs = enumerate_comm_pairs(s);
  const auto ctrl_pairs = enumerate_ctrl_pairs(s);
  const double penalty =
      10.0 * std::max({1.0, s.max_stage_cost(), s.max_comm_cost()}) /
      (1.0 - s.discount);

  auto state_name = [&](int x1, int x2, bool comm) {
    return "s" + std::to_string(x1) + "_" + std::to_string(x2) +
           (comm ? "_comm" : "_ctrl");
  };
  auto obs_name = [&](int x1, int x2) {
    return "z" + std::to_string(x1) + "_" + std::to_string(x2);
  };

  std::ostringstream out;
  out << "# Coordinator process for a two-agent team with a shared channel.\n";
  out << "# States pair the joint agent state with the phase; rewards are\n";
  out << "# negated costs. Wrong-phase actions self-loop at a penalty.\n";
  out << "discount: " << num(s.discount) << "\n";
  out << "values: reward\n";

  out << "states:";
  for (int x1 = 0; x1 < n1; ++x1)
    for (int x2 = 0; x2 < n2; ++x2)
      for (int phase = 0; phase < 2; ++phase)
        out << " " << state_name(x1, x2, phase == 0);
  out << "\n";

  std::vector<std::string> action_names;
  for (std::size_t gi = 0; gi < comm_pairs.size(); ++gi)
    action_names.push_back("g" + std::to_string(gi) + "_" +
                           bits(comm_pairs[gi].first) + "_" +
                           bits(comm_pairs[gi].second));
  for (std::size_t li = 0; li < ctrl_pairs.size(); ++li)
    action_names.push_back("u" + std::to_string(li) + "_" +
                           digits(ctrl_pairs[li].first) + "_" +
                           digits(ctrl_pairs[li].second));
  out << "actions:";
  for (const std::string& a : action_names) out << " " << a;
  out << "\n";

  out << "observations: phi";
  for (int x1 = 0; x1 < n1; ++x1)
    for (int x2 = 0; x2 < n2; ++x2) out << " " << obs_name(x1, x2);
  out << " o_ctrl\n";

  out << "start:";
  for (int x1 = 0; x1 < n1; ++x1)
    for (int x2 = 0; x2 < n2; ++x2) {
      out << " " << num(s.agents[0].initial[x1] * s.agents[1].initial[x2]);
      out << " 0";
    }
  out << "\n\n";

  for (std::size_t gi = 0; gi < comm_pairs.size(); ++gi) {
    const CommPair& g = comm_pairs[gi];
    const std::string& a = action_names[gi];
    for (int x1 = 0; x1 < n1; ++x1)
      for (int x2 = 0; x2 < n2; ++x2) {
        const bool fires = g.first.at(x1) != 0 || g.second.at(x2) != 0;
        out << "T: " << a << " : " << state_name(x1, x2, true) << " : "
            << state_name(x1, x2, false) << " 1.0\n";
        out << "T: " << a << " : " << state_name(x1, x2, false) << " : "
            << state_name(x1, x2, false) << " 1.0\n";
        out << "O: " << a << " : " << state_name(x1, x2, false) << " : "
            << (fires ? obs_name(x1, x2) : std::string("phi")) << " 1.0\n";
        // End states in the communication phase are unreachable under this
        // action; a filler row keeps every observation table stochastic.
        out << "O: " << a << " : " << state_name(x1, x2, true) << " : phi 1.0\n";
        out << "R: " << a << " : " << state_name(x1, x2, true)
            << " : * : * " << num(fires ? -s.comm_cost.at(x1, x2) : 0.0) << "\n";
        out << "R: " << a << " : " << state_name(x1, x2, false) << " : * : * "
            << num(-penalty) << "\n";
      }
  }

  for (std::size_t li = 0; li < ctrl_pairs.size(); ++li) {
    const CtrlPair& l = ctrl_pairs[li];
    const std::string& a = action_names[comm_pairs.size() + li];
    for (int x1 = 0; x1 < n1; ++x1)
      for (int x2 = 0; x2 < n2; ++x2) {
        const auto& r1 = s.agents[0].transition[x1][l.first.at(x1)];
        const auto& r2 = s.agents[1].transition[x2][l.second.at(x2)];
        for (int y1 = 0; y1 < n1; ++y1)
          for (int y2 = 0; y2 < n2; ++y2) {
            const double p = r1[y1] * r2[y2];
            if (p > 0.0)
              out << "T: " << a << " : " << state_name(x1, x2, false) << " : "
                  << state_name(y1, y2, true) << " " << num(p) << "\n";
          }
        out << "T: " << a << " : " << state_name(x1, x2, true) << " : "
            << state_name(x1, x2, true) << " 1.0\n";
        out << "R: " << a << " : " << state_name(x1, x2, false) << " : * : * "
            << num(-s.cost_at(x1, x2, l.first.at(x1), l.second.at(x2))) << "\n";
        out << "R: " << a << " : " << state_name(x1, x2, true) << " : * : * "
            << num(-penalty) << "\n";
      }
    out << "O: " << a << " : * : o_ctrl 1.0\n";
  }

  return out.str();
}

namespace {

int index_of(const std::vector<std::string>& names, const std::string& token,
             const char* what) {
  if (token == "*") return -1;
  const auto it = std::find(names.begin(), names.end(), token);
  if (it == names.end())
    fail(Status::ParseError, std::string("parse_pomdp: unknown ") + what +
                                 " '" + token + "'");
  return static_cast<int>(it - names.begin());
}

std::vector<std::string> split_ws(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

PomdpDoc parse_pomdp(const std::string& text) {
  PomdpDoc doc;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.resize(hash);
    std::vector<std::string> parts;
    {
      // Split on ':' first, whitespace within each part second.
      std::string cur;
      std::istringstream ls(line);
      while (std::getline(ls, cur, ':')) parts.push_back(cur);
    }
    if (parts.empty() || split_ws(parts[0]).empty()) continue;
    const std::string head = split_ws(parts[0])[0];
    if (head == "discount") {
      doc.discount = std::stod(parts.at(1));
    } else if (head == "values") {
      if (split_ws(parts.at(1))[0] != "reward")
        fail(Status::ParseError, "parse_pomdp: expected reward values");
    } else if (head == "states") {
      doc.states = split_ws(parts.at(1));
    } else if (head == "actions") {
      doc.actions = split_ws(parts.at(1));
    } else if (head == "observations") {
      doc.observations = split_ws(parts.at(1));
    } else if (head == "start") {
      for (const std::string& tok : split_ws(parts.at(1)))
        doc.start.push_back(std::stod(tok));
    } else if (head == "T") {
      const auto tail = split_ws(parts.at(3));
      doc.transitions.push_back(
          {index_of(doc.actions, split_ws(parts.at(1))[0], "action"),
           index_of(doc.states, split_ws(parts.at(2))[0], "state"),
           index_of(doc.states, tail.at(0), "state"), std::stod(tail.at(1))});
    } else if (head == "O") {
      const auto tail = split_ws(parts.at(3));
      doc.obs_entries.push_back(
          {index_of(doc.actions, split_ws(parts.at(1))[0], "action"),
           index_of(doc.states, split_ws(parts.at(2))[0], "state"),
           index_of(doc.observations, tail.at(0), "observation"),
           std::stod(tail.at(1))});
    } else if (head == "R") {
      const auto tail = split_ws(parts.at(4));
      doc.rewards.push_back(
          {index_of(doc.actions, split_ws(parts.at(1))[0], "action"),
           index_of(doc.states, split_ws(parts.at(2))[0], "state"),
           std::stod(tail.at(1))});
    } else {
      fail(Status::ParseError, "parse_pomdp: unexpected line '" + line + "'");
    }
  }
  if (doc.states.empty() || doc.actions.empty() || doc.observations.empty())
    fail(Status::ParseError, "parse_pomdp: missing declarations");
  return doc;
}

}  // namespace costcomm
