#pragma once

// Sampled decreasing functions H and the recursion argument that turns
//   H(s) <= c / G(H(s))^2 * (H(s) - H(s + 1/G(H(s))))
// into the decay bound H(t) <= C F^-1(1/sqrt(t)).

#include "dwlab/rate.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace dwlab {

/// Positive nonincreasing samples bounded by one, interpolated piecewise
/// linearly in log-time.
class SampledH {
 public:
  SampledH(std::vector<double> times, std::vector<double> values);

  /// Throws RangeError outside [t_min, t_max].
  double operator()(double t) const;
  bool covers(double t) const { return t >= times_.front() && t <= times_.back(); }
  bool is_knot(double t) const;

  double t_min() const { return times_.front(); }
  double t_max() const { return times_.back(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }

  SampledH scaled(double factor) const;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

/// Psi_t(s) = 1 / (F^-1(t/s) + G^-1(1/t)).
double psi(double t, double s, const RateFunction& F, const RateFunction& G);

struct HypothesisReport {
  bool pass = true;
  std::size_t checked = 0;
  std::size_t skipped = 0;       // s + 1/G(H(s)) beyond the grid
  std::size_t interpolated = 0;  // right endpoint between knots
  double min_slack = 0.0;
  std::optional<double> first_violation;
};

HypothesisReport check_hypothesis(const SampledH& H, const RateFunction& G, double c);

struct ConclusionReport {
  double C_min = 0.0;
  bool finite = false;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  double t_argmax = 0.0;
};

/// C_min = max_t H(t) / F^-1(1/sqrt(t)).
ConclusionReport check_conclusion(const SampledH& H, const RateFunction& F);

/// Builds the slowest-decaying H on a log grid that satisfies the recursion
/// at every knot, saturating it wherever the right endpoint is interpolated.
SampledH saturating_H(const RateFunction& G, double c, double t_min, double t_max, std::size_t points);

struct PsiMonotonicityReport {
  bool c_scaled = true;
  std::size_t pairs = 0;
  std::size_t violations = 0;
  double worst_excess = 0.0;  // max of lhs / max(1, rhs) - 1
};

/// Checks Psi_t(t+s) H(t+s) <= max(1, Psi_t(s) H(s)) for knot pairs (s, t)
/// with t + s on the grid span. With `c_scaled`, Psi is built from F/c,
/// which absorbs the recursion constant; with c = 1 both coincide.
PsiMonotonicityReport check_psi_monotonicity(const SampledH& H, const RateFunction& G, double c, bool c_scaled,
                                             std::size_t t_stride = 1);

struct ChainReading {
  std::string name;
  std::size_t checked = 0;
  std::size_t violations = 0;
};

/// Evaluates the n-step chain
///   Psi_t((n+1)t) H((n+1)t) <= max(1, rhs)
/// under the two readings rhs = Psi_t(nt) H(nt) and rhs = Psi_nt(t) H(nt).
std::vector<ChainReading> chain_readings(const SampledH& H, const RateFunction& G, double c);

struct LemmaOptions {
  double t_min = 1.0;
  double t_max = 1e6;
  std::size_t points = 512;
  std::size_t psi_stride = 1;
};

struct LemmaReport {
  std::string rate;
  double c = 0.0;
  XFinvReport monotonicity;
  HypothesisReport hypothesis;
  ConclusionReport conclusion;
  PsiMonotonicityReport psi_scaled;
  PsiMonotonicityReport psi_unscaled;
  std::vector<ChainReading> chains;
  std::optional<SampledH> H;
  bool pass = false;
};

/// Throws HypothesisUnmet when x F^-1(1/x) is not increasing for G.
LemmaReport lemma_end_to_end(const RateFunction& G, double c, const LemmaOptions& options = {});

}  // namespace dwlab
