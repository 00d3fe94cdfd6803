#ifndef THERMOFLOW_SOLVER_HPP
#define THERMOFLOW_SOLVER_HPP

#include <functional>
#include <string>
#include <vector>

#include "thermoflow/discretization.hpp"
#include "thermoflow/precond.hpp"
#include "thermoflow/sparse/gmres.hpp"

namespace thermoflow {

struct NewtonConfig {
  double rtol_f = 1e-8;
  double rtol_step = 1e-8;
  int max_newton = 20;
  int max_halvings = 8;
  double armijo = 1e-4;
  GmresOptions gmres;
  /// Keep every Newton iterate in the result (testing).
  bool record_iterates = false;

  void validate() const;
};

/// How each Newton system is solved.
struct LinearSolverConfig {
  TwoStageSpec precond;
  Ordering ordering = Ordering::field_wise;
  int subdomains = 1;
  /// Solve the Newton systems with a sparse direct LU instead of GMRES.
  bool direct = false;
};

struct StepStats {
  int step = 0;
  double time = 0.0;  // end time of the step, s
  double dt = 0.0;    // s
  int newton_iterations = 0;
  std::vector<int> linear_iterations;  // GMRES iterations per Newton step
  double residual_p = 0.0, residual_e = 0.0, residual_o = 0.0;  // final weighted residual norms
  int dt_cuts = 0;
  double wall_seconds = 0.0;
  bool converged = true;  // false only for the failed step that aborted a run

  int total_linear() const;
};

struct SolveStats {
  std::vector<StepStats> steps;
  bool aborted = false;
  std::string abort_reason;
  /// Decoupling blocks that fell back to D = 0 (summed over all Newton steps).
  long decoupling_fallbacks = 0;

  int total_newton() const;
  int total_linear() const;
  /// total GMRES iterations / total Newton iterations (0 when no Newton step ran).
  double avg_linear_per_newton() const;
};

/// Called after every linearization with the system and the state it was built at.
using AssemblyHook = std::function<void(const LinearizedSystem&, const State&)>;

struct NewtonResult {
  State state;
  StepStats stats;
  bool converged = false;
  std::string failure;
  std::vector<State> iterates;  // only with record_iterates
  long decoupling_fallbacks = 0;
};

NewtonResult newton_solve(const ReservoirModel& model, const State& prev,
                          const LinearSolverConfig& linear, const NewtonConfig& cfg = {},
                          const AssemblyHook& hook = {});

struct Schedule {
  int steps = 2;
  double dt = 864000.0;  // s
  /// Heuristic step control: halve on failure, grow by 1.5 after easy steps.
  bool heuristics = false;
  double dt_max = 0.0;  // 0: the nominal dt
  int max_cuts = 5;

  void validate() const;
};

/// Runs the schedule from `initial`. Without heuristics exactly `steps` steps
/// of length dt are taken and a failed step aborts. With heuristics the same
/// total time is covered with adaptive steps.
SolveStats time_loop(const ReservoirModel& model, const State& initial,
                     const LinearSolverConfig& linear, const Schedule& schedule,
                     const NewtonConfig& cfg = {}, State* final_state = nullptr,
                     const AssemblyHook& hook = {});

}  // namespace thermoflow

#endif
