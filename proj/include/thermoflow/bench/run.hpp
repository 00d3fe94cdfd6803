#ifndef THERMOFLOW_BENCH_RUN_HPP
#define THERMOFLOW_BENCH_RUN_HPP

#include <ostream>
#include <string>

#include "thermoflow/bench/cases.hpp"
#include "thermoflow/bench/config.hpp"
#include "thermoflow/bench/oracle.hpp"
#include "thermoflow/solver.hpp"

namespace thermoflow::bench {

struct RunResult {
  SolveStats stats;
  State final_state;
  std::vector<std::string> source_notes;
};

/// Builds the case and runs its schedule. When cfg.out is set, writes
/// <out>.csv (one MetricsRow per step) and <out>.json (summary and config echo).
RunResult run_case(const CaseConfig& cfg, const AssemblyHook& hook = {});

/// CSV columns: step, dt, newton_iters, total_linear_iters, avg_linear_per_newton,
/// residual_p, residual_e, residual_o, wall_time.
void write_metrics_csv(std::ostream& out, const SolveStats& stats, bool include_wall_time = true);

std::string summary_json(const CaseConfig& cfg, const RunResult& result);

struct OracleResult {
  SchurConditionNumbers cond;
  int cells = 0;
  int steps_run = 0;
};

/// Runs the case for cfg.steps (default 1) steps and evaluates the Schur
/// condition numbers at the last converged state.
OracleResult run_oracle(const CaseConfig& cfg);

std::string oracle_json(const CaseConfig& cfg, const OracleResult& r);

}  // namespace thermoflow::bench

#endif
