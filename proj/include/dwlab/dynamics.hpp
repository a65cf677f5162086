#pragma once

// Time integration of the undamped, linearly damped and nonlinearly damped
// wave equation in the eigenbasis. The damped solvers use the implicit
// midpoint rule, which reproduces the energy balance step by step: the
// discrete flux is accumulated from the same midpoint velocity the step
// uses, so E(0) - E(t) - flux(t) sits at rounding level.

#include "dwlab/collocation.hpp"
#include "dwlab/nonlinear_damping.hpp"
#include "dwlab/spectral.hpp"

#include <cstddef>
#include <vector>

namespace dwlab {

/// Step indices at which the integrator records output; always contains 0
/// and the final step.
struct SampleSchedule {
  std::vector<std::size_t> steps;

  static SampleSchedule every(std::size_t n_steps, std::size_t stride);
  /// Roughly `per_decade` samples per decade of step index.
  static SampleSchedule logarithmic(std::size_t n_steps, std::size_t per_decade);
};

struct SimulationOptions {
  double T = 1.0;
  double dt = 1e-2;
  std::size_t stride = 1;
  /// Nonzero switches storage to logarithmic thinning.
  std::size_t log_per_decade = 0;
  bool keep_states = true;

  std::size_t n_steps() const;
  SampleSchedule schedule() const;
  void validate() const;
};

struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> energies;
  /// Cumulative dissipated energy, flux[0] = 0.
  std::vector<double> flux;
  GraphNorms initial_norms;

  std::size_t size() const { return times.size(); }
  double initial_energy() const { return energies.empty() ? 0.0 : energies.front(); }
  /// max_t |E(0) - E(t) - flux(t)| / E(0).
  double max_identity_residual() const;
  bool energies_nonincreasing(double relative_tol) const;
  bool flux_nondecreasing() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<StatePair> states;
};

struct Run {
  Trajectory trajectory;
  EnergyTrace trace;
};

struct NewtonOptions {
  double tolerance = 1e-12;
  int max_iterations = 50;
  int max_halvings = 30;
};

struct NewtonStats {
  std::size_t steps = 0;
  std::size_t total_iterations = 0;
  int max_iterations = 0;
  double max_final_residual = 0.0;

  double mean_iterations() const {
    return steps == 0 ? 0.0 : static_cast<double>(total_iterations) / static_cast<double>(steps);
  }
};

struct NonlinearRun {
  Trajectory trajectory;
  EnergyTrace trace;
  NewtonStats newton;
};

/// Exact modal solution phi_k(t) = w0_k cos(w_k t) + w1_k sin(w_k t) / w_k.
StatePair undamped_state(const SpectralOperator& op, const StatePair& init, double t);
Trajectory solve_undamped(const SpectralOperator& op, const StatePair& init, const std::vector<double>& times);

Run solve_damped_linear(const SpectralOperator& op, const DampingMap& damp, const StatePair& init,
                        const SimulationOptions& options);

/// u'' + A u + P[a g(u')] = 0 with P the modal projection computed on
/// `collocation`. The stage equation is solved by damped Newton.
NonlinearRun solve_damped_nonlinear(const SpectralOperator& op, const ModalCollocation& collocation,
                                    const NonlinearDamping& g, const StatePair& init,
                                    const SimulationOptions& options, const NewtonOptions& newton = {});
NonlinearRun solve_damped_nonlinear(const SpectralOperator& op, const DampingProfile& a_profile,
                                    const NonlinearDamping& g, const StatePair& init,
                                    const SimulationOptions& options, const NewtonOptions& newton = {});

/// Comparison of the damped solution w with the undamped phi sharing its
/// initial data, through v = phi - w.
struct ErrorSystemReport {
  std::vector<double> times;
  std::vector<double> energy_v;   // E(v(t))
  std::vector<double> flux_v;     // int_0^t ||B* v'||^2
  std::vector<double> flux_phi;   // int_0^t ||B* phi'||^2
  std::vector<double> margins;    // flux_phi - energy_v - flux_v
  double worst_margin = 0.0;
  double initial_energy = 0.0;
  bool holds = true;
  /// max_t |E(w(t)) - (E(phi(0)) - 2 int_0^t ||B* phi'||^2)| / E(0): the
  /// printed identity mixing the damped energy with the undamped flux.
  double mixed_identity_deviation = 0.0;
  /// max_t |E(w(0)) - E(w(t)) - int_0^t ||B* w'||^2| / E(0).
  double energy_identity_residual = 0.0;
};

/// Integrates w and phi with the same midpoint rule, so v obeys the
/// discrete error system exactly.
ErrorSystemReport error_system_check(const SpectralOperator& op, const DampingMap& damp, const StatePair& init,
                                     const SimulationOptions& options);

}  // namespace dwlab
