#pragma once

// Decay fits against rate curves and the two directions of the
// decay/observability equivalence for the linearly damped system.

#include "dwlab/dynamics.hpp"
#include "dwlab/observability.hpp"
#include "dwlab/rate.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace dwlab {

enum class NormChoice { vx, da_v };

std::string to_string(NormChoice n);

struct FitWindow {
  double t_min = 1.0;
  double t_max = std::numeric_limits<double>::infinity();
};

/// Minimal C with E(t) <= C * norm * bound(t) over the retained samples.
struct DecayFit {
  double C = 0.0;
  std::string rate;
  NormChoice norm = NormChoice::vx;
  double norm_value = 0.0;
  double t_first = 0.0;  // first and last retained sample
  double t_last = 0.0;
  double t_argmax = 0.0;
  std::vector<double> times;
  std::vector<double> bounds;     // bound(t)
  std::vector<double> residuals;  // C * norm * bound(t) - E(t) >= 0
  /// False when the constant is attained in the last tenth (log time) of the
  /// window: the ratio is still growing and the rate is not witnessed.
  bool decay_witnessed = true;
};

/// Generic fit against a caller-supplied bound curve. Samples where `bound`
/// throws RangeError or is non-positive are excluded from the window.
DecayFit fit_decay_profile(const EnergyTrace& trace, const std::function<double(double)>& bound,
                           const std::string& rate_label, NormChoice norm, const FitWindow& window);

/// Fit against G^-1(1/t).
DecayFit fit_decay_constant(const EnergyTrace& trace, const RateFunction& G, NormChoice norm,
                            const FitWindow& window = {});

/// Fit against F^-1(1/sqrt(t)).
DecayFit fit_reverse_decay(const EnergyTrace& trace, const RateFunction& G, NormChoice norm,
                           const FitWindow& window = {});

enum class Verdict { pass, fail, hypothesis_unmet };

std::string to_string(Verdict v);

struct ForwardReport {
  Verdict verdict = Verdict::fail;
  std::string note;
  std::optional<DecayFit> fit;
  std::optional<ObservabilityReport> observability;
};

/// Damped run -> decay fit (vx norm) -> 16-constant observability at the
/// horizon 1/G(1/(2 C Lambda)) for the same initial data.
ForwardReport theorem1_forward(const SpectralOperator& op, const DampingMap& damp, const RateFunction& G,
                               const StatePair& init, double T_sim, double dt, const FitWindow& window = {});

struct ReverseProbe {
  std::size_t index = 0;
  DecayFit fit;
};

struct ReverseReport {
  Verdict verdict = Verdict::fail;
  std::string note;
  XFinvReport monotonicity;
  std::optional<ObservabilityReport> observability;
  std::vector<ReverseProbe> probes;
  double uniform_C = 0.0;  // max of the per-probe constants
};

/// Checks the x F^-1(1/x) monotonicity and the C_obs observability on the
/// probes, then fits each probe's damped energy against
/// da_v * F^-1(1/sqrt(t)).
ReverseReport theorem1_reverse(const SpectralOperator& op, const DampingMap& damp, const RateFunction& G,
                               double C_obs, const std::vector<StatePair>& states, double T_sim, double dt,
                               const FitWindow& window = {10.0}, std::size_t log_per_decade = 200);

/// (E(w(0)) + E(w'(0))) / E(w(0)), with w'(0) = (w1, -A w0 - B B* w1).
double lambda_tilde(const SpectralOperator& op, const DampingMap& damp, const StatePair& init);

/// Energy of the time-differentiated state at t = 0.
double derivative_energy(const SpectralOperator& op, const DampingMap& damp, const StatePair& init);

}  // namespace dwlab
