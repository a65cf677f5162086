#include "dwlab/lemma.hpp"

#include "dwlab/errors.hpp"
#include "dwlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace dwlab {

namespace {

constexpr double kShave = 1e-12;
constexpr double kPsiTol = 1e-9;

}  // namespace

SampledH::SampledH(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.empty() || times_.size() != values_.size())
    throw InvalidArgument("SampledH: times and values must be nonempty and of equal length");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!(times_[i] > 0.0)) throw InvalidArgument("SampledH: times must be positive");
    if (!(values_[i] > 0.0) || values_[i] > 1.0) throw InvalidArgument("SampledH: values must lie in (0, 1]");
    if (i > 0 && !(times_[i] > times_[i - 1])) throw InvalidArgument("SampledH: times must increase");
    if (i > 0 && values_[i] > values_[i - 1]) throw InvalidArgument("SampledH: values must be nonincreasing");
  }
}

double SampledH::operator()(double t) const {
  if (!covers(t)) throw RangeError("SampledH: t outside the sampled span", times_.front(), times_.back());
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  const auto i = static_cast<std::size_t>(it - times_.begin());
  if (*it == t) return values_[i];
  const double theta = std::log(t / times_[i - 1]) / std::log(times_[i] / times_[i - 1]);
  return (1.0 - theta) * values_[i - 1] + theta * values_[i];
}

bool SampledH::is_knot(double t) const { return std::binary_search(times_.begin(), times_.end(), t); }

SampledH SampledH::scaled(double factor) const {
  std::vector<double> v = values_;
  for (double& x : v) x *= factor;
  // Bypass the (0,1] bound check: scaled copies only feed ratio checks.
  SampledH out(times_, std::vector<double>(values_.size(), 1.0));
  out.values_ = std::move(v);
  return out;
}

double psi(double t, double s, const RateFunction& F, const RateFunction& G) {
  if (!(t > 0.0) || !(s > 0.0)) throw InvalidArgument("psi: t and s must be positive");
  return 1.0 / (inverse(F, t / s) + inverse(G, 1.0 / t));
}

HypothesisReport check_hypothesis(const SampledH& H, const RateFunction& G, double c) {
  if (!(c > 0.0)) throw InvalidArgument("check_hypothesis: c must be positive");
  HypothesisReport report;
  report.min_slack = std::numeric_limits<double>::infinity();
  const auto& times = H.times();
  const auto& values = H.values();
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double s = times[i];
    const double h = values[i];
    const double g = G(h);
    const double right = s + 1.0 / g;
    if (!H.covers(right)) {
      ++report.skipped;
      continue;
    }
    if (!H.is_knot(right)) ++report.interpolated;
    const double slack = c / (g * g) * (h - H(right)) - h;
    ++report.checked;
    report.min_slack = std::min(report.min_slack, slack);
    if (slack < 0.0) {
      report.pass = false;
      if (!report.first_violation) report.first_violation = s;
    }
  }
  if (report.checked == 0) report.min_slack = 0.0;
  return report;
}

ConclusionReport check_conclusion(const SampledH& H, const RateFunction& F) {
  ConclusionReport report;
  double best = 0.0;
  const auto& times = H.times();
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double y = 1.0 / std::sqrt(times[i]);
    if (!F.in_range(y)) {
      ++report.skipped;
      continue;
    }
    const double ratio = H.values()[i] / inverse(F, y);
    ++report.evaluated;
    if (ratio > best) {
      best = ratio;
      report.t_argmax = times[i];
    }
  }
  report.C_min = best;
  report.finite = report.evaluated > 0 && std::isfinite(best);
  return report;
}

SampledH saturating_H(const RateFunction& G, double c, double t_min, double t_max, std::size_t points) {
  require_increasing(G, "saturating_H");
  if (!(c > 0.0)) throw InvalidArgument("saturating_H: c must be positive");
  if (!(t_min > 0.0) || !(t_max > t_min) || points < 2)
    throw InvalidArgument("saturating_H: need 0 < t_min < t_max and at least two points");
  const RateFunction F = make_F(G);
  const auto times = log_space(t_min, t_max, points);
  const std::size_t n = times.size();

  // Start where G(h0)^2 <= c/2, so every saturated step keeps at least half of H.
  double h0 = std::min(1.0, G.x_max());
  if (G(h0) * G(h0) > 0.5 * c) {
    const double target = std::sqrt(0.5 * c);
    if (!G.in_range(target)) throw ConstructionError("saturating_H: no admissible starting value for this c");
    h0 = inverse(G, target);
  }

  std::vector<double> values(n, 0.0);
  std::vector<double> pending(n, std::numeric_limits<double>::infinity());
  values[0] = h0;
  double own_bound = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      double v = std::min({values[i - 1], pending[i], own_bound});
      if (v < values[i - 1]) v *= 1.0 - kShave;
      if (!(v > 0.0))
        throw ConstructionError("saturating_H: feasible set empty at t=" + std::to_string(times[i]));
      values[i] = v;
    }
    own_bound = std::numeric_limits<double>::infinity();
    const double h = values[i];
    const double right = times[i] + 1.0 / G(h);
    if (right > t_max) continue;
    const double cap = h - F(h) / c;
    const auto it = std::upper_bound(times.begin(), times.end(), right);
    const auto k = static_cast<std::size_t>(it - times.begin()) - 1;
    if (k > i) {
      pending[k] = std::min(pending[k], cap);
    } else {
      // Right endpoint inside (s_i, s_{i+1}): interpolation fixes the next knot.
      const double theta = std::log(right / times[i]) / std::log(times[i + 1] / times[i]);
      own_bound = h - F(h) / (c * theta);
    }
  }
  return SampledH(times, values);
}

PsiMonotonicityReport check_psi_monotonicity(const SampledH& H, const RateFunction& G, double c, bool c_scaled,
                                             std::size_t t_stride) {
  const RateFunction F = make_F(G);
  const double scale = c_scaled ? c : 1.0;
  PsiMonotonicityReport report;
  report.c_scaled = c_scaled;
  const auto& times = H.times();
  t_stride = std::max<std::size_t>(1, t_stride);
  for (std::size_t j = 0; j < times.size(); j += t_stride) {
    const double t = times[j];
    if (!G.in_range(1.0 / t)) continue;
    const double g_inv = inverse(G, 1.0 / t);
    auto psi_t = [&](double s) -> std::optional<double> {
      const double y = scale * t / s;
      if (!F.in_range(y)) return std::nullopt;
      return 1.0 / (inverse(F, y) + g_inv);
    };
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double s = times[i];
      if (!H.covers(t + s)) break;
      const auto left_psi = psi_t(t + s);
      const auto right_psi = psi_t(s);
      if (!left_psi || !right_psi) continue;
      const double lhs = *left_psi * H(t + s);
      const double rhs = std::max(1.0, *right_psi * H.values()[i]);
      ++report.pairs;
      const double excess = lhs / rhs - 1.0;
      report.worst_excess = std::max(report.worst_excess, excess);
      if (excess > kPsiTol) ++report.violations;
    }
  }
  return report;
}

std::vector<ChainReading> chain_readings(const SampledH& H, const RateFunction& G, double c) {
  const RateFunction F = make_F(G);
  ChainReading at_nt{"Psi_t evaluated at nt", 0, 0};
  ChainReading subscript_nt{"Psi_nt evaluated at t", 0, 0};
  auto psi_c = [&](double t, double s) -> std::optional<double> {
    const double y = c * t / s;
    if (!F.in_range(y) || !G.in_range(1.0 / t)) return std::nullopt;
    return 1.0 / (inverse(F, y) + inverse(G, 1.0 / t));
  };
  const auto& times = H.times();
  for (std::size_t j = 0; j < times.size(); j += 8) {
    const double t = times[j];
    const double n_max = std::floor(H.t_max() / t) - 1.0;
    if (n_max < 1.0) break;
    std::set<long long> ns;
    for (double x : log_space(1.0, n_max, 48)) ns.insert(std::llround(std::floor(x)));
    for (long long n : ns) {
      const double nt = static_cast<double>(n) * t;
      const double next = static_cast<double>(n + 1) * t;
      if (!H.covers(nt) || !H.covers(next)) continue;
      const auto lhs_psi = psi_c(t, next);
      if (!lhs_psi) continue;
      const double lhs = *lhs_psi * H(next);
      const double h_nt = H(nt);
      if (const auto a = psi_c(t, nt)) {
        ++at_nt.checked;
        if (lhs > std::max(1.0, *a * h_nt) * (1.0 + kPsiTol)) ++at_nt.violations;
      }
      if (const auto b = psi_c(nt, t)) {
        ++subscript_nt.checked;
        if (lhs > std::max(1.0, *b * h_nt) * (1.0 + kPsiTol)) ++subscript_nt.violations;
      }
    }
  }
  return {at_nt, subscript_nt};
}

LemmaReport lemma_end_to_end(const RateFunction& G, double c, const LemmaOptions& options) {
  LemmaReport report;
  report.rate = G.describe();
  report.c = c;
  report.monotonicity = xFinv_profile(G, log_space(1e-3, 1e6, 256));
  if (!report.monotonicity.increasing)
    throw HypothesisUnmet("lemma_end_to_end: x -> x F^-1(1/x) is not increasing for G=" + G.describe());
  require_increasing(G, "lemma_end_to_end");

  SampledH H = saturating_H(G, c, options.t_min, options.t_max, options.points);
  report.hypothesis = check_hypothesis(H, G, c);
  report.conclusion = check_conclusion(H, make_F(G));
  report.psi_scaled = check_psi_monotonicity(H, G, c, true, options.psi_stride);
  report.psi_unscaled = check_psi_monotonicity(H, G, c, false, options.psi_stride);
  report.chains = chain_readings(H, G, c);
  report.pass = report.hypothesis.pass && report.conclusion.finite && report.psi_scaled.violations == 0;
  report.H = std::move(H);
  return report;
}

}  // namespace dwlab
