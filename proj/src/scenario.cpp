#include "scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace costcomm {

using nlohmann::json;

double Scenario::max_stage_cost() const {
  double m = 0.0;
  for (const auto& a : cost)
    for (const auto& b : a)
      for (const auto& c1 : b)
        for (double v : c1) m = std::max(m, std::abs(v));
  return m;
}

double Scenario::max_comm_cost() const {
  if (!comm_cost.state_dependent) return comm_cost.fixed;
  double m = 0.0;
  for (const auto& row : comm_cost.table)
    for (double v : row) m = std::max(m, v);
  return m;
}

namespace {

void check(bool ok, Status status, const std::string& message) {
  if (!ok) fail(status, message);
}

void check_distribution(const std::vector<double>& row, const std::string& path) {
  double sum = 0.0;
  for (double v : row) {
    check(std::isfinite(v) && v >= 0.0, Status::ValidationError,
          path + ": entries must be finite and nonnegative");
    sum += v;
  }
  check(std::abs(sum - 1.0) <= kRowSumTol, Status::ValidationError,
        path + ": row sums to " + std::to_string(sum) + ", expected 1");
}

}  // namespace

void validate_scenario(const Scenario& s) {
  for (int i = 0; i < 2; ++i) {
    const AgentDynamics& a = s.agents[i];
    const std::string who = "agents[" + std::to_string(i) + "]";
    check(a.num_states >= 1, Status::ValidationError, who + ".num_states must be positive");
    check(a.num_actions >= 1, Status::ValidationError, who + ".num_actions must be positive");
    check(static_cast<int>(a.transition.size()) == a.num_states, Status::ValidationError,
          who + ".transition: expected " + std::to_string(a.num_states) + " state rows");
    for (int x = 0; x < a.num_states; ++x) {
      check(static_cast<int>(a.transition[x].size()) == a.num_actions, Status::ValidationError,
            who + ".transition[" + std::to_string(x) + "]: expected " +
                std::to_string(a.num_actions) + " action rows");
      for (int u = 0; u < a.num_actions; ++u) {
        const auto& row = a.transition[x][u];
        check(static_cast<int>(row.size()) == a.num_states, Status::ValidationError,
              who + ".transition[" + std::to_string(x) + "][" + std::to_string(u) +
                  "]: expected " + std::to_string(a.num_states) + " entries");
        check_distribution(row, who + ".transition[" + std::to_string(x) + "][" +
                                    std::to_string(u) + "]");
      }
    }
    check(static_cast<int>(a.initial.size()) == a.num_states, Status::ValidationError,
          who + ".initial: wrong length");
    check_distribution(a.initial, who + ".initial");
    if (!s.action_labels[i].empty())
      check(static_cast<int>(s.action_labels[i].size()) == a.num_actions,
            Status::ValidationError, who + ": action label count mismatch");
  }

  check(static_cast<int>(s.cost.size()) == s.agents[0].num_states, Status::ValidationError,
        "cost: expected " + std::to_string(s.agents[0].num_states) + " rows for agent 1 states");
  for (int x1 = 0; x1 < s.agents[0].num_states; ++x1) {
    check(static_cast<int>(s.cost[x1].size()) == s.agents[1].num_states, Status::ValidationError,
          "cost[" + std::to_string(x1) + "]: wrong agent-2 state dimension");
    for (int x2 = 0; x2 < s.agents[1].num_states; ++x2) {
      check(static_cast<int>(s.cost[x1][x2].size()) == s.agents[0].num_actions,
            Status::ValidationError,
            "cost[" + std::to_string(x1) + "][" + std::to_string(x2) +
                "]: wrong agent-1 action dimension");
      for (int u1 = 0; u1 < s.agents[0].num_actions; ++u1) {
        check(static_cast<int>(s.cost[x1][x2][u1].size()) == s.agents[1].num_actions,
              Status::ValidationError,
              "cost[" + std::to_string(x1) + "][" + std::to_string(x2) + "][" +
                  std::to_string(u1) + "]: wrong agent-2 action dimension");
        for (int u2 = 0; u2 < s.agents[1].num_actions; ++u2)
          check(std::isfinite(s.cost[x1][x2][u1][u2]), Status::ValidationError,
                "cost entry not finite");
      }
    }
  }

  if (s.comm_cost.state_dependent) {
    check(static_cast<int>(s.comm_cost.table.size()) == s.agents[0].num_states,
          Status::ValidationError, "comm_cost.table: wrong agent-1 dimension");
    for (const auto& row : s.comm_cost.table) {
      check(static_cast<int>(row.size()) == s.agents[1].num_states, Status::ValidationError,
            "comm_cost.table: wrong agent-2 dimension");
      for (double v : row)
        check(std::isfinite(v) && v >= 0.0, Status::ValidationError,
              "comm_cost.table: entries must be nonnegative");
    }
  } else {
    check(std::isfinite(s.comm_cost.fixed) && s.comm_cost.fixed >= 0.0,
          Status::ValidationError, "comm_cost.fixed must be nonnegative");
  }

  check(s.discount > 0.0 && s.discount <= 1.0, Status::ValidationError,
        "discount must lie in (0,1]");
  check(s.erasure_prob >= 0.0 && s.erasure_prob <= 1.0, Status::ValidationError,
        "erasure_prob must lie in [0,1]");
  if (!s.horizon.finite)
    check(s.discount < 1.0, Status::ValidationError,
          "horizon.discounted requires discount < 1");
  else
    check(s.horizon.steps >= 1, Status::ValidationError, "horizon.finite must be >= 1");

  if (s.constraints) {
    const CommConstraints& c = *s.constraints;
    check(c.s_min >= 0, Status::ValidationError, "constraints.s_min must be >= 0");
    if (c.s_max) {
      check(*c.s_max >= 1, Status::ValidationError, "constraints.s_max must be >= 1");
      check(*c.s_max >= c.s_min, Status::ValidationError,
            "constraints: s_min exceeds s_max");
    }
    if (c.max_count)
      check(*c.max_count >= 0, Status::ValidationError, "constraints.max_count must be >= 0");
    if (c.s_max && c.max_count && s.horizon.finite)
      check(static_cast<long long>(*c.s_max) * (*c.max_count + 1) >= s.horizon.steps,
            Status::Infeasible,
            "constraints: s_max*(max_count+1) cannot cover the horizon");
  }
}

namespace {

DiscountMode parse_discount_mode(const std::string& text) {
  if (text == "per-phase") return DiscountMode::PerPhase;
  if (text == "per-step") return DiscountMode::PerStep;
  fail(Status::ParseError, "discount_mode: expected \"per-phase\" or \"per-step\", got \"" +
                               text + "\"");
}

std::vector<double> parse_vector(const json& j, const std::string& path) {
  if (!j.is_array()) fail(Status::ParseError, path + ": expected an array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) fail(Status::ParseError, path + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

const json& field(const json& j, const std::string& key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) fail(Status::ParseError, path + ": missing field \"" + key + "\"");
  return *it;
}

}  // namespace

Scenario load_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(Status::ParseError, std::string("scenario: invalid JSON: ") + e.what());
  }

  Scenario s;
  const json& agents = field(j, "agents", "scenario");
  if (!agents.is_array() || agents.size() != 2)
    fail(Status::ParseError, "agents: expected exactly 2 entries");
  for (int i = 0; i < 2; ++i) {
    const json& a = agents[i];
    const std::string who = "agents[" + std::to_string(i) + "]";
    AgentDynamics& dyn = s.agents[i];
    dyn.num_states = field(a, "num_states", who).get<int>();
    dyn.num_actions = field(a, "num_actions", who).get<int>();
    const json& tr = field(a, "transition", who);
    if (!tr.is_array()) fail(Status::ParseError, who + ".transition: expected an array");
    for (std::size_t x = 0; x < tr.size(); ++x) {
      dyn.transition.emplace_back();
      if (!tr[x].is_array())
        fail(Status::ParseError, who + ".transition: expected nested arrays");
      for (std::size_t u = 0; u < tr[x].size(); ++u)
        dyn.transition.back().push_back(parse_vector(
            tr[x][u], who + ".transition[" + std::to_string(x) + "][" + std::to_string(u) + "]"));
    }
    dyn.initial = parse_vector(field(a, "initial", who), who + ".initial");
    if (a.contains("action_labels"))
      for (const auto& lbl : a["action_labels"])
        s.action_labels[i].push_back(lbl.get<std::string>());
  }

  const json& cost = field(j, "cost", "scenario");
  for (const auto& l1 : cost) {
    s.cost.emplace_back();
    for (const auto& l2 : l1) {
      s.cost.back().emplace_back();
      for (const auto& l3 : l2)
        s.cost.back().back().push_back(parse_vector(l3, "cost"));
    }
  }

  const json& cc = field(j, "comm_cost", "scenario");
  if (cc.contains("fixed")) {
    s.comm_cost.state_dependent = false;
    s.comm_cost.fixed = cc["fixed"].get<double>();
  } else if (cc.contains("table")) {
    s.comm_cost.state_dependent = true;
    for (const auto& row : cc["table"])
      s.comm_cost.table.push_back(parse_vector(row, "comm_cost.table"));
  } else {
    fail(Status::ParseError, "comm_cost: expected \"fixed\" or \"table\"");
  }

  s.discount = field(j, "discount", "scenario").get<double>();
  if (j.contains("discount_mode"))
    s.discount_mode = parse_discount_mode(j["discount_mode"].get<std::string>());
  if (j.contains("erasure_prob")) s.erasure_prob = j["erasure_prob"].get<double>();

  if (j.contains("constraints") && !j["constraints"].is_null()) {
    const json& c = j["constraints"];
    CommConstraints con;
    if (c.contains("s_min")) con.s_min = c["s_min"].get<int>();
    if (c.contains("s_max") && !c["s_max"].is_null()) con.s_max = c["s_max"].get<int>();
    if (c.contains("max_count") && !c["max_count"].is_null())
      con.max_count = c["max_count"].get<int>();
    s.constraints = con;
  }

  const json& h = field(j, "horizon", "scenario");
  if (h.is_object() && h.contains("finite")) {
    s.horizon.finite = true;
    s.horizon.steps = h["finite"].get<int>();
  } else if ((h.is_object() && h.contains("discounted")) ||
             (h.is_string() && h.get<std::string>() == "discounted")) {
    s.horizon.finite = false;
  } else {
    fail(Status::ParseError, "horizon: expected {\"finite\": T} or {\"discounted\": true}");
  }

  validate_scenario(s);
  return s;
}

std::string serialize_scenario(const Scenario& s) {
  json j;
  for (int i = 0; i < 2; ++i) {
    json a;
    a["num_states"] = s.agents[i].num_states;
    a["num_actions"] = s.agents[i].num_actions;
    a["transition"] = s.agents[i].transition;
    a["initial"] = s.agents[i].initial;
    if (!s.action_labels[i].empty()) a["action_labels"] = s.action_labels[i];
    j["agents"].push_back(a);
  }
  j["cost"] = s.cost;
  if (s.comm_cost.state_dependent)
    j["comm_cost"] = {{"table", s.comm_cost.table}};
  else
    j["comm_cost"] = {{"fixed", s.comm_cost.fixed}};
  j["discount"] = s.discount;
  j["discount_mode"] =
      s.discount_mode == DiscountMode::PerPhase ? "per-phase" : "per-step";
  j["erasure_prob"] = s.erasure_prob;
  if (s.constraints) {
    json c;
    c["s_min"] = s.constraints->s_min;
    c["s_max"] = s.constraints->s_max ? json(*s.constraints->s_max) : json(nullptr);
    c["max_count"] =
        s.constraints->max_count ? json(*s.constraints->max_count) : json(nullptr);
    j["constraints"] = c;
  }
  if (s.horizon.finite)
    j["horizon"] = {{"finite", s.horizon.steps}};
  else
    j["horizon"] = {{"discounted", true}};
  return j.dump(2);
}

std::uint64_t scenario_hash(const Scenario& s) {
  const std::string text = serialize_scenario(s);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Scenario defense_scenario(double pa1, double pv1, double pa2, double pv2,
                          double theta, double rho) {
  const double pa[2] = {pa1, pa2};
  const double pv[2] = {pv1, pv2};
  for (int i = 0; i < 2; ++i)
    if (pa[i] < 0.0 || pa[i] > 1.0 || pv[i] < 0.0 || pv[i] > 1.0)
      fail(Status::InvalidArgument, "defense_scenario: probabilities must lie in [0,1]");

  Scenario s;
  for (int i = 0; i < 2; ++i) {
    AgentDynamics& a = s.agents[i];
    a.num_states = 2;
    a.num_actions = 2;
    a.transition = {
        {{1.0 - pa[i], pa[i]}, {1.0 - pa[i], pa[i]}},  // from safe
        {{0.0, 1.0}, {pv[i], 1.0 - pv[i]}},            // from attack
    };
    a.initial = {1.0, 0.0};
    s.action_labels[i] = {"n", "d"};
  }
  s.cost.assign(2, std::vector<std::vector<std::vector<double>>>(
                       2, std::vector<std::vector<double>>(2, std::vector<double>(2, 0.0))));
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2)
      for (int u1 = 0; u1 < 2; ++u1)
        for (int u2 = 0; u2 < 2; ++u2) {
          double c = (x1 == 0 && x2 == 0) ? 0.0 : 20.0;
          if (u1 == 1 && u2 == 1) c += 150.0;
          s.cost[x1][x2][u1][u2] = c;
        }
  s.comm_cost.fixed = rho;
  s.discount = theta;
  s.horizon.finite = false;
  validate_scenario(s);
  return s;
}

}  // namespace costcomm
