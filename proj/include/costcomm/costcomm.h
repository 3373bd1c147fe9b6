/* C interface to the costcomm solver/simulator library.
 *
 * Every function returns a cc_status; CC_OK means success. On failure the
 * thread-local message from cc_last_error() describes the problem and output
 * parameters are left untouched. Handles are freed with their matching
 * cc_*_free function; strings returned through char** are freed with
 * cc_string_free.
 */
#ifndef COSTCOMM_H
#define COSTCOMM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cc_status {
  CC_OK = 0,
  CC_INVALID_ARGUMENT = 1,
  CC_PARSE_ERROR = 2,
  CC_VALIDATION_ERROR = 3,
  CC_UNSUPPORTED = 4,
  CC_CAP_EXCEEDED = 5,
  CC_NO_CONVERGENCE = 6,
  CC_INFEASIBLE = 7,
  CC_ZERO_NORMALIZER = 8,
  CC_INTERNAL = 9
} cc_status;

typedef struct cc_scenario cc_scenario;
typedef struct cc_solution cc_solution;

/* Most recent error message on the calling thread; "" when none. */
const char* cc_last_error(void);
const char* cc_version(void);
void cc_string_free(char* s);

/* --- scenarios ----------------------------------------------------------- */

cc_status cc_scenario_load_json(const char* json_text, cc_scenario** out);

/* Two-state / two-action benchmark instance (see the library docs). */
cc_status cc_scenario_defense(double pa1, double pv1, double pa2, double pv2,
                              double theta, double rho, cc_scenario** out);

/* Copy of s with the communication price replaced by the constant rho. */
cc_status cc_scenario_with_rho(const cc_scenario* s, double rho,
                               cc_scenario** out);

/* Copy of s with the channel erasure probability replaced. */
cc_status cc_scenario_with_erasure(const cc_scenario* s, double p_e,
                                   cc_scenario** out);

/* Copy of s with any communication constraints removed. */
cc_status cc_scenario_without_constraints(const cc_scenario* s,
                                          cc_scenario** out);

/* Canonical JSON form; parsing it back reproduces the scenario exactly. */
cc_status cc_scenario_to_json(const cc_scenario* s, char** out);
cc_status cc_scenario_hash(const cc_scenario* s, uint64_t* out);
void cc_scenario_free(cc_scenario* s);

/* --- solving ------------------------------------------------------------- */

typedef struct cc_solve_options {
  int grid_nodes;      /* <=0: 201 nodes per belief axis */
  double vi_tol;       /* <=0: 1e-6 * (1 - round discount) * cost scale */
  int max_sweeps;      /* <=0: 100000 */
  int fixed_sweeps;    /* >0: run exactly this many sweeps */
  uint64_t reach_cap;  /* 0: 1000000 memo entries */
  uint64_t enum_cap;   /* 0: 2^20 prescription pairs */
  int force_erasure_model; /* nonzero: erasure arithmetic even at p_e = 0 */
  int discount_mode;   /* 0: scenario's own; 1: per-phase; 2: per-step */
} cc_solve_options;

void cc_solve_options_init(cc_solve_options* opts);

typedef enum cc_baseline {
  CC_BASELINE_NEVER = 1, /* never communicate, control still optimized */
  CC_BASELINE_ALWAYS = 2 /* communicate every step */
} cc_baseline;

cc_status cc_solve(const cc_scenario* s, const cc_solve_options* opts,
                   cc_solution** out);
cc_status cc_solve_baseline(const cc_scenario* s, const cc_solve_options* opts,
                            cc_baseline which, cc_solution** out);

typedef struct cc_report {
  double value;      /* at the initial belief pair */
  int iterations;
  double residual;
  int grid_nodes;
  uint64_t memo_entries;
  double wall_ms;
  char mode[16];     /* "grid", "reachable" or "joint-mdp" */
  uint64_t scenario_hash;
} cc_report;

cc_status cc_solution_report(const cc_solution* sol, cc_report* out);
void cc_solution_free(cc_solution* sol);

/* --- simulation ---------------------------------------------------------- */

typedef struct cc_sim_options {
  uint64_t seed;
  long episodes;          /* <=0: 1000 */
  int horizon_cap;        /* >0 truncates discounted episodes */
  double tail_tol;        /* <=0: 0.05 */
  const char* trace_path; /* NULL or "": no trace file */
} cc_sim_options;

void cc_sim_options_init(cc_sim_options* opts);

typedef struct cc_sim_stats {
  double mean;
  double std_error;
  double comm_frequency;
  double tail_bound;
  long episodes;
  int horizon;
} cc_sim_stats;

cc_status cc_simulate(const cc_solution* sol, const cc_sim_options* opts,
                      cc_sim_stats* out);

/* --- export -------------------------------------------------------------- */

/* Flat-file POMDP text form of the coordinator process. */
cc_status cc_export_pomdp(const cc_scenario* s, char** out);

#ifdef __cplusplus
}
#endif

#endif /* COSTCOMM_H */
