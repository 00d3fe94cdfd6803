#ifndef THERMOFLOW_BENCH_CASES_HPP
#define THERMOFLOW_BENCH_CASES_HPP

#include <string>
#include <vector>

#include "thermoflow/bench/config.hpp"
#include "thermoflow/discretization.hpp"
#include "thermoflow/solver.hpp"

namespace thermoflow::bench {

/// A ready-to-run experiment built from a CaseConfig.
struct CaseSetup {
  ReservoirModel model;
  State initial;
  Schedule schedule;
  LinearSolverConfig linear;
  NewtonConfig newton;
  /// Human-readable source placement, one line per source.
  std::vector<std::string> source_notes;
};

/// heater-2d, well-2d-iso, well-2d-aniso, well-3d, crosscoup-2d, spe10-slice.
const std::vector<std::string>& case_names();

/// Builds model, initial state, schedule and solver settings. Throws
/// ConfigError for inconsistent settings.
CaseSetup build_case(const CaseConfig& cfg);

/// Deterministic log-normal permeability (m^2) and matching porosity on an
/// nx x ny slice, used when no field files are supplied.
void synthetic_slice_fields(int nx, int ny, std::vector<double>& perm, std::vector<double>& phi);

}  // namespace thermoflow::bench

#endif
