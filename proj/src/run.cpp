#include "thermoflow/bench/run.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>

namespace thermoflow::bench {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

nlohmann::json config_echo(const CaseConfig& cfg) {
  nlohmann::json echo = nlohmann::json::object();
  for (const auto& [k, v] : cfg.echo) echo[k] = v;
  return echo;
}

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json("inf");
}

}  // namespace

void write_metrics_csv(std::ostream& out, const SolveStats& stats, bool include_wall_time) {
  out << "step,dt,newton_iters,total_linear_iters,avg_linear_per_newton,residual_p,residual_e,"
         "residual_o";
  if (include_wall_time) out << ",wall_time";
  out << "\n";
  for (const auto& s : stats.steps) {
    const int lin = s.total_linear();
    const double avg = s.newton_iterations ? static_cast<double>(lin) / s.newton_iterations : 0.0;
    out << s.step << "," << fmt(s.dt) << "," << s.newton_iterations << "," << lin << ","
        << fmt(avg) << "," << fmt(s.residual_p) << "," << fmt(s.residual_e) << ","
        << fmt(s.residual_o);
    if (include_wall_time) out << "," << fmt(s.wall_seconds);
    out << "\n";
  }
}

std::string summary_json(const CaseConfig& cfg, const RunResult& r) {
  const auto& st = r.stats;
  nlohmann::json j;
  j["case"] = cfg.case_name;
  j["n"] = cfg.n;
  j["precond"] = cfg.precond;
  j["subdomains"] = cfg.subdomains;
  j["coupling_factor"] = cfg.coupling_factor;
  j["aborted"] = st.aborted;
  j["abort_reason"] = st.abort_reason;
  j["total_newton_iters"] = st.total_newton();
  j["total_linear_iters"] = st.total_linear();
  j["avg_linear_per_newton"] = st.avg_linear_per_newton();
  j["decoupling_fallbacks"] = st.decoupling_fallbacks;
  j["sources"] = r.source_notes;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : st.steps) {
    const int lin = s.total_linear();
    rows.push_back({{"step", s.step},
                    {"dt", s.dt},
                    {"newton_iters", s.newton_iterations},
                    {"total_linear_iters", lin},
                    {"avg_linear_per_newton",
                     s.newton_iterations ? static_cast<double>(lin) / s.newton_iterations : 0.0},
                    {"linear_iters", s.linear_iterations},
                    {"residual_p", s.residual_p},
                    {"residual_e", s.residual_e},
                    {"residual_o", s.residual_o},
                    {"converged", s.converged},
                    {"dt_cuts", s.dt_cuts},
                    {"wall_time", s.wall_seconds}});
  }
  j["steps"] = rows;
  j["config"] = config_echo(cfg);
  return j.dump(2);
}

RunResult run_case(const CaseConfig& cfg, const AssemblyHook& hook) {
  const CaseSetup c = build_case(cfg);
  RunResult r;
  r.source_notes = c.source_notes;
  r.stats = time_loop(c.model, c.initial, c.linear, c.schedule, c.newton, &r.final_state, hook);
  if (!cfg.out.empty()) {
    std::ofstream csv(cfg.out + ".csv");
    if (!csv) throw std::runtime_error("cannot write " + cfg.out + ".csv");
    write_metrics_csv(csv, r.stats);
    std::ofstream js(cfg.out + ".json");
    if (!js) throw std::runtime_error("cannot write " + cfg.out + ".json");
    js << summary_json(cfg, r) << "\n";
  }
  return r;
}

OracleResult run_oracle(const CaseConfig& cfg) {
  CaseSetup c = build_case(cfg);
  if (c.model.num_cells() > kOracleMaxCells)
    throw std::invalid_argument("oracle: the case has " + std::to_string(c.model.num_cells()) +
                                " cells, above the dense limit of " +
                                std::to_string(kOracleMaxCells));
  const int steps = cfg.steps.value_or(1);
  State prev = c.initial;
  if (steps > 1) {
    Schedule s = c.schedule;
    s.steps = steps - 1;
    const SolveStats st = time_loop(c.model, c.initial, c.linear, s, c.newton, &prev);
    if (st.aborted) throw std::runtime_error("oracle: run aborted: " + st.abort_reason);
  }
  const NewtonResult last = newton_solve(c.model, prev, c.linear, c.newton);
  if (!last.converged) throw std::runtime_error("oracle: last step failed: " + last.failure);
  OracleResult r;
  r.cond = schur_condition_oracle(c.model, last.state, prev);
  r.cells = c.model.num_cells();
  r.steps_run = steps;
  return r;
}

std::string oracle_json(const CaseConfig& cfg, const OracleResult& r) {
  nlohmann::json j;
  j["case"] = cfg.case_name;
  j["cells"] = r.cells;
  j["steps_run"] = r.steps_run;
  j["cond_Sdiag_inv_S"] = finite_or_null(r.cond.diag);
  j["cond_SATT_inv_S"] = finite_or_null(r.cond.att);
  j["cond_ST_inv_S"] = finite_or_null(r.cond.st);
  j["cond_A_TT"] = finite_or_null(r.cond.A_TT);
  j["cond_S"] = finite_or_null(r.cond.S);
  j["config"] = config_echo(cfg);
  return j.dump(2);
}

}  // namespace thermoflow::bench
