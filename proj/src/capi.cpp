#include "costcomm/costcomm.h"

#include <cstdio>
#include <cstring>
#include <new>
#include <string>

#include "exec.hpp"
#include "pomdp_export.hpp"
#include "scenario.hpp"
#include "solver.hpp"

struct cc_scenario {
  costcomm::Scenario s;
};

struct cc_solution {
  costcomm::Solution sol;
};

namespace {

thread_local std::string g_last_error;

cc_status status_code(costcomm::Status s) {
  using costcomm::Status;
  switch (s) {
    case Status::Ok: return CC_OK;
    case Status::InvalidArgument: return CC_INVALID_ARGUMENT;
    case Status::ParseError: return CC_PARSE_ERROR;
    case Status::ValidationError: return CC_VALIDATION_ERROR;
    case Status::Unsupported: return CC_UNSUPPORTED;
    case Status::CapExceeded: return CC_CAP_EXCEEDED;
    case Status::NoConvergence: return CC_NO_CONVERGENCE;
    case Status::Infeasible: return CC_INFEASIBLE;
    case Status::ZeroNormalizer: return CC_ZERO_NORMALIZER;
    case Status::Internal: return CC_INTERNAL;
  }
  return CC_INTERNAL;
}

template <typename Fn>
cc_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return CC_OK;
  } catch (const costcomm::Error& e) {
    g_last_error = e.what();
    return status_code(e.status());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return CC_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CC_INTERNAL;
  }
}

cc_status invalid(const char* message) {
  g_last_error = message;
  return CC_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

costcomm::SolveOptions convert(const cc_solve_options* opts) {
  costcomm::SolveOptions o;
  if (!opts) return o;
  if (opts->grid_nodes > 0) o.grid_nodes = opts->grid_nodes;
  if (opts->vi_tol > 0.0) o.vi_tol = opts->vi_tol;
  if (opts->max_sweeps > 0) o.max_sweeps = opts->max_sweeps;
  if (opts->fixed_sweeps > 0) o.fixed_sweeps = opts->fixed_sweeps;
  if (opts->reach_cap > 0) o.reach_cap = static_cast<std::size_t>(opts->reach_cap);
  if (opts->enum_cap > 0) o.enum_cap = static_cast<std::size_t>(opts->enum_cap);
  o.force_erasure_model = opts->force_erasure_model != 0;
  if (opts->discount_mode == 1) o.discount_mode = costcomm::DiscountMode::PerPhase;
  else if (opts->discount_mode == 2) o.discount_mode = costcomm::DiscountMode::PerStep;
  else if (opts->discount_mode != 0)
    costcomm::fail(costcomm::Status::InvalidArgument,
                   "discount_mode must be 0, 1 or 2");
  return o;
}

}  // namespace

extern "C" {

const char* cc_last_error(void) { return g_last_error.c_str(); }

const char* cc_version(void) { return "costcomm 1.0.0"; }

void cc_string_free(char* s) { delete[] s; }

cc_status cc_scenario_load_json(const char* json_text, cc_scenario** out) {
  if (!json_text || !out) return invalid("null argument");
  return guarded([&] {
    auto* h = new cc_scenario{costcomm::load_scenario(json_text)};
    *out = h;
  });
}

cc_status cc_scenario_defense(double pa1, double pv1, double pa2, double pv2,
                              double theta, double rho, cc_scenario** out) {
  if (!out) return invalid("null argument");
  return guarded([&] {
    *out = new cc_scenario{
        costcomm::defense_scenario(pa1, pv1, pa2, pv2, theta, rho)};
  });
}

cc_status cc_scenario_with_rho(const cc_scenario* s, double rho,
                               cc_scenario** out) {
  if (!s || !out) return invalid("null argument");
  return guarded([&] {
    costcomm::Scenario copy = s->s;
    copy.comm_cost = costcomm::CommCost{false, rho, {}};
    costcomm::validate_scenario(copy);
    *out = new cc_scenario{std::move(copy)};
  });
}

cc_status cc_scenario_with_erasure(const cc_scenario* s, double p_e,
                                   cc_scenario** out) {
  if (!s || !out) return invalid("null argument");
  return guarded([&] {
    costcomm::Scenario copy = s->s;
    copy.erasure_prob = p_e;
    costcomm::validate_scenario(copy);
    *out = new cc_scenario{std::move(copy)};
  });
}

cc_status cc_scenario_without_constraints(const cc_scenario* s,
                                          cc_scenario** out) {
  if (!s || !out) return invalid("null argument");
  return guarded([&] {
    costcomm::Scenario copy = s->s;
    copy.constraints.reset();
    *out = new cc_scenario{std::move(copy)};
  });
}

cc_status cc_scenario_to_json(const cc_scenario* s, char** out) {
  if (!s || !out) return invalid("null argument");
  return guarded([&] { *out = dup_string(costcomm::serialize_scenario(s->s)); });
}

cc_status cc_scenario_hash(const cc_scenario* s, uint64_t* out) {
  if (!s || !out) return invalid("null argument");
  return guarded([&] { *out = costcomm::scenario_hash(s->s); });
}

void cc_scenario_free(cc_scenario* s) { delete s; }

void cc_solve_options_init(cc_solve_options* opts) {
  if (!opts) return;
  *opts = cc_solve_options{};
}

cc_status cc_solve(const cc_scenario* s, const cc_solve_options* opts,
                   cc_solution** out) {
  if (!s || !out) return invalid("null argument");
  return guarded([&] {
    *out = new cc_solution{costcomm::solve(s->s, convert(opts))};
  });
}

cc_status cc_solve_baseline(const cc_scenario* s, const cc_solve_options* opts,
                            cc_baseline which, cc_solution** out) {
  if (!s || !out) return invalid("null argument");
  return guarded([&] {
    const costcomm::SolveOptions o = convert(opts);
    if (which == CC_BASELINE_NEVER)
      *out = new cc_solution{costcomm::solve_baseline_never(s->s, o)};
    else if (which == CC_BASELINE_ALWAYS)
      *out = new cc_solution{costcomm::solve_baseline_always(s->s, o)};
    else
      costcomm::fail(costcomm::Status::InvalidArgument, "unknown baseline");
  });
}

cc_status cc_solution_report(const cc_solution* sol, cc_report* out) {
  if (!sol || !out) return invalid("null argument");
  const costcomm::SolveReport& r = sol->sol.report;
  *out = cc_report{};
  out->value = r.value;
  out->iterations = r.iterations;
  out->residual = r.residual;
  out->grid_nodes = r.grid_nodes;
  out->memo_entries = r.memo_entries;
  out->wall_ms = r.wall_ms;
  std::snprintf(out->mode, sizeof out->mode, "%s", r.mode.c_str());
  out->scenario_hash = r.scenario_hash;
  return CC_OK;
}

void cc_solution_free(cc_solution* sol) { delete sol; }

void cc_sim_options_init(cc_sim_options* opts) {
  if (!opts) return;
  *opts = cc_sim_options{};
  opts->seed = 1;
}

cc_status cc_simulate(const cc_solution* sol, const cc_sim_options* opts,
                      cc_sim_stats* out) {
  if (!sol || !out) return invalid("null argument");
  return guarded([&] {
    costcomm::SimOptions o;
    if (opts) {
      o.seed = opts->seed;
      if (opts->episodes > 0) o.episodes = opts->episodes;
      if (opts->horizon_cap > 0) o.horizon_cap = opts->horizon_cap;
      if (opts->tail_tol > 0.0) o.tail_tol = opts->tail_tol;
      if (opts->trace_path) o.trace_path = opts->trace_path;
    }
    const costcomm::SimStats st = costcomm::simulate(sol->sol, o);
    *out = cc_sim_stats{};
    out->mean = st.mean;
    out->std_error = st.std_error;
    out->comm_frequency = st.comm_frequency;
    out->tail_bound = st.tail_bound;
    out->episodes = st.episodes;
    out->horizon = st.horizon;
  });
}

cc_status cc_export_pomdp(const cc_scenario* s, char** out) {
  if (!s || !out) return invalid("null argument");
  return guarded([&] { *out = dup_string(costcomm::export_pomdp(s->s)); });
}

}  // extern "C"
