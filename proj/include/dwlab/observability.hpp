#pragma once

// Observability Gramians of the undamped flow through the damping operator,
// and the horizon-limited observability inequalities.

#include "dwlab/rate.hpp"
#include "dwlab/spectral.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dwlab {

/// x^T Q x = int_0^T ||B* phi'(t)||^2 dt for x = (w0; w1), phi the undamped
/// solution issued from (w0, w1).
struct Gramian {
  double T = 0.0;
  Matrix Q;

  double form(const StatePair& state) const;
};

Gramian assemble_gramian(const SpectralOperator& op, const DampingMap& damp, double T);

/// Horizon 1 / G(1 / (2 C Lambda)); RangeError if 1/(2 C Lambda) leaves G's domain.
double observation_horizon(const RateFunction& G, double C, double Lambda);

struct WeakObsOptions {
  std::size_t samples = 4096;
  std::uint64_t seed = 20240607;
  std::size_t refine_starts = 4;
  int refine_sweeps = 25;
};

struct WeakObsResult {
  /// Empirical lower envelope of Gramian / (vx G(weak / vx)) over the probes.
  double constant = 0.0;
  StatePair minimizer;
  std::size_t evaluations = 0;
  std::uint64_t seed = 0;
};

WeakObsResult weak_obs_constant(const SpectralOperator& op, const DampingMap& damp, double T,
                                const RateFunction& G, const WeakObsOptions& options = {});

struct ObservabilityEntry {
  std::size_t index = 0;
  double Lambda = 0.0;
  double horizon = 0.0;
  double integral = 0.0;
  double vx = 0.0;
  double margin = 0.0;  // factor * integral - vx
  bool pass = false;
};

struct ObservabilityReport {
  std::string form;       // "obs1" or "obs2"
  double factor = 0.0;    // 16 for obs1, C for obs2
  double C = 0.0;
  std::vector<ObservabilityEntry> entries;
  bool all_pass = true;
  double worst_margin = 0.0;
};

/// ||(w0,w1)||^2_{VxX} <= 16 int_0^{horizon} ||B* phi'||^2 per state.
ObservabilityReport verify_obs1(const std::vector<StatePair>& states, const SpectralOperator& op,
                                const DampingMap& damp, const RateFunction& G, double C);

/// ||(w0,w1)||^2_{VxX} <= C int_0^{horizon} ||B* phi'||^2 per state.
ObservabilityReport verify_obs2(const std::vector<StatePair>& states, const SpectralOperator& op,
                                const DampingMap& damp, const RateFunction& G, double C);

/// Smallest C (to bisection accuracy, rounded up) for which verify_obs2
/// passes on every state. Throws NumericFailure when no C up to 1e12 works.
double empirical_obs2_constant(const std::vector<StatePair>& states, const SpectralOperator& op,
                               const DampingMap& damp, const RateFunction& G);

}  // namespace dwlab
