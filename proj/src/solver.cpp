#include "thermoflow/solver.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>

#include "thermoflow/sparse/direct.hpp"
#include "thermoflow/sparse/kernels.hpp"

namespace thermoflow {

namespace {

double state_norm(const State& x) {
  double s = 0.0;
  for (const auto* v : {&x.p, &x.T, &x.s_o})
    for (double a : *v) s += a * a;
  return std::sqrt(s);
}

State apply_step(const State& x, const DofLayout& layout, std::span<const double> dx,
                 double lambda) {
  const int n = x.num_cells();
  State out = x;
  std::vector<double> dp(n), dT(n), ds(n);
  layout.unpack(dx, dp, dT, ds);
  for (int c = 0; c < n; ++c) {
    out.p[c] += lambda * dp[c];
    out.T[c] += lambda * dT[c];
    out.s_o[c] += lambda * ds[c];
  }
  return out;
}

double vec_norm(std::span<const double> v) { return kernels::serial::norm2(v); }

}  // namespace

void NewtonConfig::validate() const {
  if (!(rtol_f > 0.0) || !(rtol_step > 0.0) || !(gmres.rtol > 0.0))
    throw std::invalid_argument("newton: tolerances must be > 0");
  if (max_newton < 1 || max_halvings < 0 || gmres.max_iterations < 1)
    throw std::invalid_argument("newton: iteration limits must be positive");
}

void Schedule::validate() const {
  if (steps < 1) throw std::invalid_argument("schedule: steps must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("schedule: dt must be > 0");
  if (dt_max < 0.0 || max_cuts < 0) throw std::invalid_argument("schedule: invalid step control");
}

int StepStats::total_linear() const {
  return std::accumulate(linear_iterations.begin(), linear_iterations.end(), 0);
}

int SolveStats::total_newton() const {
  int s = 0;
  for (const auto& st : steps) s += st.newton_iterations;
  return s;
}

int SolveStats::total_linear() const {
  int s = 0;
  for (const auto& st : steps) s += st.total_linear();
  return s;
}

double SolveStats::avg_linear_per_newton() const {
  const int n = total_newton();
  return n == 0 ? 0.0 : static_cast<double>(total_linear()) / n;
}

NewtonResult newton_solve(const ReservoirModel& model, const State& prev,
                          const LinearSolverConfig& linear, const NewtonConfig& cfg,
                          const AssemblyHook& hook) {
  cfg.validate();
  linear.precond.validate(model.scaling.enabled);
  const DofLayout layout(model.num_cells(), linear.ordering,
                         slab_partition(model.grid, linear.subdomains));
  const bool needs_schur = linear.precond.stage_one.solver == StageSolver::block_schur;

  NewtonResult res;
  res.state = prev;
  res.stats.dt = model.dt;
  State& x = res.state;
  if (cfg.record_iterates) res.iterates.push_back(x);

  const auto fail = [&](std::string why) {
    res.converged = false;
    res.failure = std::move(why);
    return res;
  };
  const auto record_norms = [&](const WeightedResidual& w) {
    res.stats.residual_p = vec_norm(w.F_p);
    res.stats.residual_e = vec_norm(w.F_e);
    res.stats.residual_o = vec_norm(w.F_o);
  };

  std::optional<LinearizedSystem> sys;
  try {
    sys = linearize(model, x, prev, layout);
  } catch (const std::exception& e) {
    return fail(std::string("assembly: ") + e.what());
  }
  if (hook) hook(*sys, x);
  record_norms(sys->weighted);
  const double f0 = vec_norm(sys->residual);
  double f = f0;
  if (f0 == 0.0) {
    res.converged = true;
    return res;
  }

  for (int k = 0; k < cfg.max_newton; ++k) {
    std::vector<double> rhs(sys->residual.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -sys->residual[i];
    std::vector<double> dx;
    try {
      if (linear.direct) {
        const SparseDirectSolver lu(sys->system.matrix);
        dx.resize(rhs.size());
        lu.apply(rhs, dx);
        res.stats.linear_iterations.push_back(0);
      } else {
        CsrMatrix schur;
        if (needs_schur) schur = assemble_schur_approx(model, x);
        const auto pc = build_preconditioner(linear.precond, sys->system, needs_schur ? &schur : nullptr);
        res.decoupling_fallbacks += static_cast<long>(pc->decoupling_fallbacks.size());
        GmresResult g = gmres(sys->system.matrix, rhs, *pc, cfg.gmres);
        res.stats.linear_iterations.push_back(g.iterations);
        if (!g.converged) {
          ++res.stats.newton_iterations;
          std::ostringstream os;
          os << "GMRES did not converge in " << g.iterations
             << " iterations (relative residual " << g.relative_residual << ")";
          return fail(os.str());
        }
        dx = std::move(g.x);
      }
    } catch (const std::exception& e) {
      ++res.stats.newton_iterations;
      return fail(std::string("linear solve: ") + e.what());
    }
    ++res.stats.newton_iterations;

    // Backtracking line search on the scaled residual norm.
    double lambda = 1.0;
    bool accepted = false;
    State trial;
    WeightedResidual trial_w;
    double f_trial = 0.0;
    for (int h = 0; h <= cfg.max_halvings; ++h, lambda *= 0.5) {
      trial = apply_step(x, layout, dx, lambda);
      try {
        trial_w = apply_weighting_and_scaling(model, assemble_residual(model, trial, prev));
      } catch (const std::exception&) {
        continue;  // outside the property ranges: shorten the step
      }
      f_trial = trial_w.norm2();
      if (std::isfinite(f_trial) && f_trial <= (1.0 - cfg.armijo * lambda) * f) {
        accepted = true;
        break;
      }
    }
    if (!accepted) return fail("line search found no sufficient decrease");

    const double step_norm = lambda * vec_norm(dx);
    x = std::move(trial);
    f = f_trial;
    record_norms(trial_w);
    if (cfg.record_iterates) res.iterates.push_back(x);
    if (f <= cfg.rtol_f * f0 || step_norm <= cfg.rtol_step * state_norm(x)) {
      res.converged = true;
      if (hook) {
        try {
          hook(linearize(model, x, prev, layout), x);
        } catch (const std::exception&) {
        }
      }
      return res;
    }
    try {
      sys = linearize(model, x, prev, layout);
    } catch (const std::exception& e) {
      return fail(std::string("assembly: ") + e.what());
    }
    if (hook) hook(*sys, x);
  }
  std::ostringstream os;
  os << "Newton did not converge in " << cfg.max_newton << " iterations (|F|/|F0| = " << f / f0
     << ")";
  return fail(os.str());
}

SolveStats time_loop(const ReservoirModel& model, const State& initial,
                     const LinearSolverConfig& linear, const Schedule& schedule,
                     const NewtonConfig& cfg, State* final_state, const AssemblyHook& hook) {
  schedule.validate();
  model.validate();
  SolveStats stats;
  ReservoirModel m = model;
  State x = initial;
  const double total = schedule.steps * schedule.dt;
  const double dt_max = schedule.dt_max > 0.0 ? schedule.dt_max : schedule.dt;
  double t = 0.0, dt = schedule.dt;
  int cuts = 0;
  while (true) {
    if (!schedule.heuristics && static_cast<int>(stats.steps.size()) == schedule.steps) break;
    if (schedule.heuristics && t >= total * (1.0 - 1e-12)) break;
    if (schedule.heuristics) dt = std::min(dt, total - t);
    m.dt = dt;
    const auto start = std::chrono::steady_clock::now();
    NewtonResult r = newton_solve(m, x, linear, cfg, hook);
    stats.decoupling_fallbacks += r.decoupling_fallbacks;
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!r.converged) {
      std::ostringstream os;
      os << "step " << stats.steps.size() + 1 << " at t = " << t << " s, dt = " << dt
         << " s: " << r.failure;
      if (!schedule.heuristics || cuts >= schedule.max_cuts) {
        if (schedule.heuristics) os << " (after " << cuts << " time-step cuts)";
        stats.aborted = true;
        stats.abort_reason = os.str();
        // Keep the failed attempt's counts so partial metrics stay informative.
        r.stats.step = static_cast<int>(stats.steps.size()) + 1;
        r.stats.time = t + dt;
        r.stats.dt_cuts = cuts;
        r.stats.wall_seconds = wall;
        r.stats.converged = false;
        stats.steps.push_back(std::move(r.stats));
        break;
      }
      ++cuts;
      dt *= 0.5;
      continue;
    }
    t += dt;
    x = std::move(r.state);
    r.stats.step = static_cast<int>(stats.steps.size()) + 1;
    r.stats.time = t;
    r.stats.dt_cuts = cuts;
    r.stats.wall_seconds = wall;
    const int newton = r.stats.newton_iterations;
    stats.steps.push_back(std::move(r.stats));
    cuts = 0;
    if (schedule.heuristics && newton <= 5) dt = std::min(1.5 * dt, dt_max);
  }
  if (final_state) *final_state = std::move(x);
  return stats;
}

}  // namespace thermoflow
