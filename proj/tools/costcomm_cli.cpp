// Command-line front end for the costcomm library. Talks to the solver
// exclusively through the C API. Reports are deterministic for fixed inputs;
// wall-clock timings go to stderr so saved outputs stay byte-identical.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "costcomm/costcomm.h"

namespace {

[[noreturn]] void die(const std::string& message) {
  std::fprintf(stderr, "error: %s\n", message.c_str());
  std::exit(1);
}

void check(cc_status status, const std::string& what) {
  if (status != CC_OK) die(what + ": " + cc_last_error());
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hash_hex(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct Common {
  std::string scenario_path;
  std::string out_path;
  int grid = 201;
  double vi_tol = 0.0;
  std::string discount_mode = "scenario";
  std::uint64_t seed = 1;
  double erasure = -1.0;  // <0 keeps the scenario's channel
  bool no_constraints = false;
  std::uint64_t reach_cap = 0;
  std::uint64_t enum_cap = 0;
  int fixed_sweeps = 0;
  int max_sweeps = 0;
  bool force_erasure = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--scenario", c.scenario_path, "Scenario JSON file")
      ->required();
  cmd->add_option("--out", c.out_path, "Output path (default: stdout)");
  cmd->add_option("--grid", c.grid, "Belief grid nodes per axis");
  cmd->add_option("--vi-tol", c.vi_tol, "Value-iteration stopping threshold");
  cmd->add_option("--discount-mode", c.discount_mode,
                  "scenario | per-phase | per-step")
      ->check(CLI::IsMember({"scenario", "per-phase", "per-step"}));
  cmd->add_option("--seed", c.seed, "Simulation seed");
  cmd->add_option("--erasure", c.erasure,
                  "Override the channel erasure probability");
  cmd->add_flag("--no-constraints", c.no_constraints,
                "Drop the scenario's communication constraints");
  cmd->add_option("--reach-cap", c.reach_cap,
                  "Finite-horizon reachable-set entry cap");
  cmd->add_option("--enum-cap", c.enum_cap, "Prescription-pair cap");
  cmd->add_option("--fixed-sweeps", c.fixed_sweeps,
                  "Run exactly this many VI sweeps");
  cmd->add_option("--max-sweeps", c.max_sweeps, "VI sweep limit");
  cmd->add_flag("--force-erasure-model", c.force_erasure,
                "Use erasure arithmetic even when p_e = 0");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) die("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

cc_scenario* load_scenario(const Common& c) {
  const std::string text = read_file(c.scenario_path);
  cc_scenario* s = nullptr;
  check(cc_scenario_load_json(text.c_str(), &s), c.scenario_path);
  if (c.erasure >= 0.0) {
    cc_scenario* t = nullptr;
    check(cc_scenario_with_erasure(s, c.erasure, &t), "--erasure");
    cc_scenario_free(s);
    s = t;
  }
  if (c.no_constraints) {
    cc_scenario* t = nullptr;
    check(cc_scenario_without_constraints(s, &t), "--no-constraints");
    cc_scenario_free(s);
    s = t;
  }
  return s;
}

cc_solve_options solve_options(const Common& c) {
  cc_solve_options o;
  cc_solve_options_init(&o);
  o.grid_nodes = c.grid;
  o.vi_tol = c.vi_tol;
  o.max_sweeps = c.max_sweeps;
  o.fixed_sweeps = c.fixed_sweeps;
  o.reach_cap = c.reach_cap;
  o.enum_cap = c.enum_cap;
  o.force_erasure_model = c.force_erasure ? 1 : 0;
  o.discount_mode = c.discount_mode == "per-phase" ? 1
                    : c.discount_mode == "per-step" ? 2
                                                    : 0;
  return o;
}

std::string base_flags(const Common& c) {
  std::ostringstream o;
  o << "grid=" << c.grid << " vi_tol=" << fmt(c.vi_tol)
    << " discount_mode=" << c.discount_mode;
  if (c.erasure >= 0.0) o << " erasure=" << fmt(c.erasure);
  if (c.no_constraints) o << " no_constraints=1";
  if (c.reach_cap) o << " reach_cap=" << c.reach_cap;
  if (c.enum_cap) o << " enum_cap=" << c.enum_cap;
  if (c.fixed_sweeps) o << " fixed_sweeps=" << c.fixed_sweeps;
  if (c.max_sweeps) o << " max_sweeps=" << c.max_sweeps;
  if (c.force_erasure) o << " force_erasure_model=1";
  return o.str();
}

std::string stanza(const std::string& command, const cc_scenario* s,
                   const Common& c, const std::string& extra_flags) {
  std::uint64_t h = 0;
  check(cc_scenario_hash(s, &h), "hash");
  std::ostringstream o;
  o << "# command: " << command << "\n";
  o << "# version: " << cc_version() << "\n";
  o << "# scenario_hash: " << hash_hex(h) << "\n";
  o << "# flags: " << base_flags(c)
    << (extra_flags.empty() ? "" : " " + extra_flags) << "\n";
  o << "# seed: " << c.seed << "\n";
  return o.str();
}

void write_output(const Common& c, const std::string& content) {
  if (c.out_path.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
    return;
  }
  std::ofstream out(c.out_path, std::ios::binary);
  if (!out) die("cannot write " + c.out_path);
  out << content;
}

void report_elapsed(const char* command,
                    std::chrono::steady_clock::time_point t0) {
  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  std::fprintf(stderr, "%s completed in %.1f ms\n", command, ms);
}

std::vector<double> parse_rho_list(const std::string& text) {
  std::vector<double> out;
  std::string tok;
  std::istringstream in(text);
  while (std::getline(in, tok, ',')) {
    if (tok.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      die("bad --rho entry '" + tok + "'");
    }
  }
  return out;
}

void append_report(std::ostringstream& o, const cc_report& r) {
  o << "value: " << fmt(r.value) << "\n";
  o << "mode: " << r.mode << "\n";
  o << "iterations: " << r.iterations << "\n";
  o << "residual: " << fmt(r.residual) << "\n";
  o << "grid_nodes: " << r.grid_nodes << "\n";
  o << "memo_entries: " << static_cast<unsigned long long>(r.memo_entries)
    << "\n";
}

int cmd_solve(const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  cc_scenario* s = load_scenario(c);
  const cc_solve_options opts = solve_options(c);
  cc_solution* sol = nullptr;
  check(cc_solve(s, &opts, &sol), "solve");
  cc_report r;
  check(cc_solution_report(sol, &r), "report");
  std::ostringstream o;
  o << stanza("solve", s, c, "");
  append_report(o, r);
  write_output(c, o.str());
  report_elapsed("solve", t0);
  cc_solution_free(sol);
  cc_scenario_free(s);
  return 0;
}

int cmd_baselines(const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  cc_scenario* s = load_scenario(c);
  const cc_solve_options opts = solve_options(c);
  cc_solution* best = nullptr;
  cc_solution* never = nullptr;
  cc_solution* always = nullptr;
  check(cc_solve(s, &opts, &best), "solve");
  check(cc_solve_baseline(s, &opts, CC_BASELINE_NEVER, &never), "never");
  check(cc_solve_baseline(s, &opts, CC_BASELINE_ALWAYS, &always), "always");
  std::ostringstream o;
  o << stanza("baselines", s, c, "");
  o << "policy\tvalue\tmode\titerations\tresidual\n";
  const cc_solution* sols[3] = {best, never, always};
  const char* names[3] = {"optimal", "never", "always"};
  for (int i = 0; i < 3; ++i) {
    cc_report r;
    check(cc_solution_report(sols[i], &r), "report");
    o << names[i] << '\t' << fmt(r.value) << '\t' << r.mode << '\t'
      << r.iterations << '\t' << fmt(r.residual) << "\n";
  }
  write_output(c, o.str());
  report_elapsed("baselines", t0);
  cc_solution_free(always);
  cc_solution_free(never);
  cc_solution_free(best);
  cc_scenario_free(s);
  return 0;
}

struct SweepRow {
  bool failed = false;
  std::string error;
  double optimal = 0.0, never = 0.0, always = 0.0;
  int iterations = 0;
  double residual = 0.0;
  std::string mode;
};

int cmd_sweep(const Common& c, const std::string& rho_text) {
  const auto t0 = std::chrono::steady_clock::now();
  cc_scenario* s = load_scenario(c);
  const cc_solve_options opts = solve_options(c);
  const std::vector<double> rhos = parse_rho_list(rho_text);
  std::vector<SweepRow> rows(rhos.size());

  // Independent solves per price point; results land in their own slots so
  // the table order never depends on scheduling.
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(hw, rhos.size());
  std::vector<std::thread> pool;
  std::size_t next = 0;
  std::mutex next_mu;
  auto worker = [&] {
    while (true) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(next_mu);
        if (next >= rhos.size()) return;
        i = next++;
      }
      SweepRow& row = rows[i];
      cc_scenario* si = nullptr;
      if (cc_scenario_with_rho(s, rhos[i], &si) != CC_OK) {
        row.failed = true;
        row.error = cc_last_error();
        continue;
      }
      cc_solution* best = nullptr;
      cc_solution* never = nullptr;
      cc_solution* always = nullptr;
      cc_report r;
      if (cc_solve(si, &opts, &best) != CC_OK ||
          cc_solve_baseline(si, &opts, CC_BASELINE_NEVER, &never) != CC_OK ||
          cc_solve_baseline(si, &opts, CC_BASELINE_ALWAYS, &always) != CC_OK) {
        row.failed = true;
        row.error = cc_last_error();
      } else {
        cc_solution_report(best, &r);
        row.optimal = r.value;
        row.iterations = r.iterations;
        row.residual = r.residual;
        row.mode = r.mode;
        cc_solution_report(never, &r);
        row.never = r.value;
        cc_solution_report(always, &r);
        row.always = r.value;
      }
      cc_solution_free(always);
      cc_solution_free(never);
      cc_solution_free(best);
      cc_scenario_free(si);
    }
  };
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].failed)
      die("sweep at rho=" + fmt(rhos[i]) + ": " + rows[i].error);

  std::ostringstream o;
  std::string flags = "rho=" + rho_text;
  o << stanza("sweep", s, c, flags);
  o << "rho\toptimal\tnever\talways\titerations\tresidual\tmode\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SweepRow& r = rows[i];
    o << fmt(rhos[i]) << '\t' << fmt(r.optimal) << '\t' << fmt(r.never)
      << '\t' << fmt(r.always) << '\t' << r.iterations << '\t'
      << fmt(r.residual) << '\t' << r.mode << "\n";
  }
  write_output(c, o.str());
  report_elapsed("sweep", t0);
  cc_scenario_free(s);
  return 0;
}

int cmd_simulate(const Common& c, const std::string& baseline, long episodes,
                 int horizon_cap, double tail_tol, const std::string& trace) {
  const auto t0 = std::chrono::steady_clock::now();
  cc_scenario* s = load_scenario(c);
  const cc_solve_options opts = solve_options(c);
  cc_solution* sol = nullptr;
  if (baseline == "never")
    check(cc_solve_baseline(s, &opts, CC_BASELINE_NEVER, &sol), "never");
  else if (baseline == "always")
    check(cc_solve_baseline(s, &opts, CC_BASELINE_ALWAYS, &sol), "always");
  else
    check(cc_solve(s, &opts, &sol), "solve");

  cc_sim_options so;
  cc_sim_options_init(&so);
  so.seed = c.seed;
  so.episodes = episodes;
  so.horizon_cap = horizon_cap;
  so.tail_tol = tail_tol;
  so.trace_path = trace.empty() ? nullptr : trace.c_str();
  cc_sim_stats st;
  check(cc_simulate(sol, &so, &st), "simulate");
  cc_report r;
  check(cc_solution_report(sol, &r), "report");

  std::ostringstream extra;
  extra << "policy=" << (baseline.empty() ? "optimal" : baseline)
        << " episodes=" << episodes;
  if (horizon_cap > 0) extra << " horizon_cap=" << horizon_cap;
  if (tail_tol > 0.0) extra << " tail_tol=" << fmt(tail_tol);
  if (!trace.empty()) extra << " trace=" << trace;
  std::ostringstream o;
  o << stanza("simulate", s, c, extra.str());
  o << "mean: " << fmt(st.mean) << "\n";
  o << "std_error: " << fmt(st.std_error) << "\n";
  o << "comm_frequency: " << fmt(st.comm_frequency) << "\n";
  o << "episodes: " << st.episodes << "\n";
  o << "horizon: " << st.horizon << "\n";
  o << "tail_bound: " << fmt(st.tail_bound) << "\n";
  o << "solver_value: " << fmt(r.value) << "\n";
  o << "solver_mode: " << r.mode << "\n";
  write_output(c, o.str());
  report_elapsed("simulate", t0);
  cc_solution_free(sol);
  cc_scenario_free(s);
  return 0;
}

int cmd_export_pomdp(const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  cc_scenario* s = load_scenario(c);
  char* text = nullptr;
  check(cc_export_pomdp(s, &text), "export-pomdp");
  std::ostringstream o;
  o << stanza("export-pomdp", s, c, "");
  o << text;
  cc_string_free(text);
  write_output(c, o.str());
  report_elapsed("export-pomdp", t0);
  cc_scenario_free(s);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Solver and simulator for two-agent stochastic control with priced "
      "on-demand state sharing"};
  app.require_subcommand(1);

  Common c;
  std::string rho_text;
  std::string baseline;
  std::string trace;
  long episodes = 1000;
  int horizon_cap = 0;
  double tail_tol = 0.0;

  CLI::App* solve = app.add_subcommand("solve", "Solve and print a run report");
  add_common(solve, c);

  CLI::App* simulate =
      app.add_subcommand("simulate", "Solve, then roll out the policy");
  add_common(simulate, c);
  simulate->add_option("--episodes", episodes, "Episode count");
  simulate->add_option("--baseline", baseline, "optimal | never | always")
      ->check(CLI::IsMember({"optimal", "never", "always"}));
  simulate->add_option("--trace", trace, "Per-phase TSV trace file");
  simulate->add_option("--horizon-cap", horizon_cap,
                       "Discounted episode length cap");
  simulate->add_option("--tail-tol", tail_tol,
                       "Discounted tail target when deriving the horizon");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Solve optimal and baselines across communication prices");
  add_common(sweep, c);
  sweep->add_option("--rho", rho_text, "Comma-separated price list");

  CLI::App* baselines = app.add_subcommand(
      "baselines", "Compare optimal, never and always policies");
  add_common(baselines, c);

  CLI::App* export_cmd = app.add_subcommand(
      "export-pomdp", "Write the coordinator process in flat POMDP text form");
  add_common(export_cmd, c);

  CLI11_PARSE(app, argc, argv);

  if (solve->parsed()) return cmd_solve(c);
  if (simulate->parsed())
    return cmd_simulate(c, baseline == "optimal" ? "" : baseline, episodes,
                        horizon_cap, tail_tol, trace);
  if (sweep->parsed()) return cmd_sweep(c, rho_text);
  if (baselines->parsed()) return cmd_baselines(c);
  if (export_cmd->parsed()) return cmd_export_pomdp(c);
  return 1;
}
