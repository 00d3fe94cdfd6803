// thermoflow command line: run cases, the Schur condition study, and matrix export.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>

#include "thermoflow/bench/cases.hpp"
#include "thermoflow/bench/config.hpp"
#include "thermoflow/bench/run.hpp"
#include "thermoflow/sparse/matrix_market.hpp"

using namespace thermoflow;
using namespace thermoflow::bench;

namespace {

struct Overrides {
  std::optional<std::string> case_name, precond, decouple, order, scaling, out;
  std::optional<int> n, ilu_level, subdomains, steps;
  std::optional<double> coupling_factor, dt;

  void add_to(CLI::App* app) {
    app->add_option("--case", case_name, "case name");
    app->add_option("--n", n, "cells per side");
    app->add_option("--precond", precond, "preconditioner variant");
    app->add_option("--decouple", decouple, "none, qi or ti");
    app->add_option("--ilu-level", ilu_level, "ILU fill level");
    app->add_option("--subdomains", subdomains, "block-Jacobi subdomain count");
    app->add_option("--coupling-factor", coupling_factor, "oil compressibility/expansion factor");
    app->add_option("--dt", dt, "time step in days");
    app->add_option("--steps", steps, "number of time steps");
    app->add_option("--order", order, "restricted-first or ilu-first");
    app->add_option("--scaling", scaling, "on or off");
    app->add_option("--out", out, "output prefix");
  }

  void apply(CaseConfig& c) const {
    const auto set = [&](const char* key, const auto& v) {
      if (!v) return;
      if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, std::string>)
        apply_setting(c, key, *v);
      else
        apply_setting(c, key, std::to_string(*v));
    };
    set("case", case_name);
    set("n", n);
    set("precond", precond);
    set("decouple", decouple);
    set("ilu_level", ilu_level);
    set("subdomains", subdomains);
    set("coupling_factor", coupling_factor);
    set("dt_days", dt);
    set("steps", steps);
    set("order", order);
    set("scaling", scaling);
    set("out", out);
  }
};

CaseConfig load(const std::string& path, const Overrides& o) {
  CaseConfig c = path.empty() ? CaseConfig{} : load_config(path);
  o.apply(c);
  return c;
}

int cmd_run(const std::string& path, const Overrides& o) {
  const CaseConfig cfg = load(path, o);
  const RunResult r = run_case(cfg);
  write_metrics_csv(std::cout, r.stats, true);
  std::printf("case=%s n=%d precond=%s P=%d newton=%d linear=%d avg=%.4g%s\n",
              cfg.case_name.c_str(), cfg.n, cfg.precond.c_str(), cfg.subdomains,
              r.stats.total_newton(), r.stats.total_linear(), r.stats.avg_linear_per_newton(),
              r.stats.aborted ? " ABORTED" : "");
  if (r.stats.aborted) {
    std::fprintf(stderr, "run aborted: %s\n", r.stats.abort_reason.c_str());
    return 2;
  }
  return 0;
}

int cmd_oracle(const std::string& path, const Overrides& o) {
  const CaseConfig cfg = load(path, o);
  const OracleResult r = run_oracle(cfg);
  const std::string js = oracle_json(cfg, r);
  std::cout << js << "\n";
  if (!cfg.out.empty()) {
    std::FILE* f = std::fopen((cfg.out + ".json").c_str(), "w");
    if (!f) throw std::runtime_error("cannot write " + cfg.out + ".json");
    std::fprintf(f, "%s\n", js.c_str());
    std::fclose(f);
  }
  return 0;
}

int cmd_export(const std::string& path, const Overrides& o, int step) {
  CaseConfig cfg = load(path, o);
  if (step < 1) throw std::invalid_argument("--step must be >= 1");
  cfg.steps = step;
  const std::string prefix = cfg.out.empty() ? "thermoflow" : cfg.out;
  cfg.out.clear();
  const CaseSetup setup = build_case(cfg);
  int calls = 0;
  bool written = false;
  int current_step = 1;
  int newton_in_step = 0;
  // The hook sees every linearization; the first one of the requested step is exported.
  const AssemblyHook hook = [&](const LinearizedSystem& sys, const State& x) {
    ++calls;
    (void)x;
    if (written || current_step != step || newton_in_step++ != 0) return;
    write_matrix_market(prefix + "_A.mtx", sys.system.matrix);
    const Field fields[3] = {Field::p, Field::T, Field::s};
    const char* names[3] = {"p", "T", "s"};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        write_matrix_market(prefix + "_A_" + names[a] + names[b] + ".mtx",
                            sys.system.block(fields[a], fields[b]));
    write_matrix_market(prefix + "_ST.mtx", assemble_schur_approx(setup.model, x));
    written = true;
  };
  // Run step by step so the hook knows which step it is in.
  State x = setup.initial;
  for (current_step = 1; current_step <= step; ++current_step) {
    newton_in_step = 0;
    Schedule one = setup.schedule;
    one.steps = 1;
    State next;
    const SolveStats st = time_loop(setup.model, x, setup.linear, one, setup.newton, &next, hook);
    if (st.aborted) throw std::runtime_error("export: step " + std::to_string(current_step) +
                                             " failed: " + st.abort_reason);
    x = std::move(next);
    if (written) break;
  }
  std::printf("wrote %s_A.mtx, 9 blocks and %s_ST.mtx (%d linearizations)\n", prefix.c_str(),
              prefix.c_str(), calls);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thermal two-phase simulator with CPR/CPTR preconditioners"};
  app.require_subcommand(1);

  std::string run_cfg, oracle_cfg, export_cfg;
  Overrides run_o, oracle_o, export_o;
  int export_step = 1;

  auto* run = app.add_subcommand("run", "run a case and print per-step metrics");
  run->add_option("--config", run_cfg, "key = value configuration file");
  run_o.add_to(run);

  auto* oracle = app.add_subcommand("oracle", "Schur complement condition number study");
  oracle->add_option("--config", oracle_cfg, "key = value configuration file");
  oracle_o.add_to(oracle);

  auto* exp = app.add_subcommand("export-matrix", "write the Jacobian of a step in Matrix Market form");
  exp->add_option("--config", export_cfg, "key = value configuration file");
  exp->add_option("--step", export_step, "time step whose first Newton system is exported");
  export_o.add_to(exp);

  auto* list = app.add_subcommand("list", "list cases and preconditioner variants");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(run_cfg, run_o);
    if (*oracle) return cmd_oracle(oracle_cfg, oracle_o);
    if (*exp) return cmd_export(export_cfg, export_o, export_step);
    if (*list) {
      std::printf("cases:");
      for (const auto& c : case_names()) std::printf(" %s", c.c_str());
      std::printf("\nvariants:");
      for (const auto& v : variant_names()) std::printf(" %s", v.c_str());
      std::printf("\n");
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
