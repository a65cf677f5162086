#include "dwlab/observability.hpp"

#include "dwlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace dwlab {

namespace {

constexpr double kResonance = 1e-9;

// int_0^T cos(c t) dt
double cos_integral(double c, double T) {
  if (std::abs(c) < kResonance) return T;
  return std::sin(c * T) / c;
}

// int_0^T sin(c t) dt
double sin_integral(double c, double T) {
  if (std::abs(c) < kResonance) return 0.5 * c * T * T;
  const double s = std::sin(0.5 * c * T);
  return 2.0 * s * s / c;
}

struct TrigMoments {
  double ss;  // int sin(a t) sin(b t)
  double cc;  // int cos(a t) cos(b t)
  double sc;  // int sin(a t) cos(b t)
};

TrigMoments moments(double a, double b, double T) {
  const double diff = cos_integral(a - b, T);
  const double sum = cos_integral(a + b, T);
  return {0.5 * (diff - sum), 0.5 * (diff + sum), 0.5 * (sin_integral(a + b, T) + sin_integral(a - b, T))};
}

}  // namespace

double Gramian::form(const StatePair& state) const {
  const Vector x = state.stacked();
  return x.dot(Q * x);
}

Gramian assemble_gramian(const SpectralOperator& op, const DampingMap& damp, double T) {
  if (!(T > 0.0)) throw InvalidArgument("assemble_gramian: T must be positive");
  const auto n = static_cast<Eigen::Index>(op.n_modes());
  const Vector& omega = op.frequencies();
  const Matrix& M = damp.coupling;
  Matrix Q = Matrix::Zero(2 * n, 2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const double m = M(j, k);
      if (m == 0.0) continue;
      const TrigMoments mo = moments(omega(j), omega(k), T);
      Q(j, k) = m * omega(j) * omega(k) * mo.ss;
      Q(n + j, n + k) = m * mo.cc;
      const double cross = -m * omega(j) * mo.sc;
      Q(j, n + k) = cross;
      Q(n + k, j) = cross;
    }
  }
  return Gramian{T, std::move(Q)};
}

double observation_horizon(const RateFunction& G, double C, double Lambda) {
  const double arg = 1.0 / (2.0 * C * Lambda);
  return 1.0 / G(arg);
}

WeakObsResult weak_obs_constant(const SpectralOperator& op, const DampingMap& damp, double T,
                                const RateFunction& G, const WeakObsOptions& options) {
  require_increasing(G, "weak_obs_constant");
  const Gramian gram = assemble_gramian(op, damp, T);
  const auto n = static_cast<Eigen::Index>(op.n_modes());
  const Vector& lambda = op.eigenvalues();

  WeakObsResult result;
  result.seed = options.seed;
  auto ratio = [&](const Vector& x) {
    ++result.evaluations;
    const StatePair s = StatePair::from_stacked(x);
    const GraphNorms norms = graph_norms(s, op);
    return x.dot(gram.Q * x) / (norms.vx * G(norms.weak / norms.vx));
  };
  auto normalize = [&](Vector x) {
    const GraphNorms norms = graph_norms(StatePair::from_stacked(x), op);
    return Vector(x / std::sqrt(norms.vx));
  };

  std::vector<std::pair<double, Vector>> candidates;
  candidates.reserve(options.samples + 2 * static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < 2 * n; ++k) {
    Vector x = Vector::Zero(2 * n);
    x(k) = 1.0;
    x = normalize(x);
    candidates.emplace_back(ratio(x), x);
  }
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < options.samples; ++i) {
    Vector x(2 * n);
    for (Eigen::Index k = 0; k < 2 * n; ++k) x(k) = normal(rng);
    x = normalize(x);
    candidates.emplace_back(ratio(x), x);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  // Coordinate scales that make each coordinate contribute O(1) to vx.
  Vector scale(2 * n);
  scale.head(n) = lambda.cwiseSqrt().cwiseInverse();
  scale.tail(n).setOnes();

  double best = candidates.front().first;
  Vector best_x = candidates.front().second;
  const std::size_t starts = std::min(options.refine_starts, candidates.size());
  for (std::size_t s = 0; s < starts; ++s) {
    Vector x = candidates[s].second;
    double value = candidates[s].first;
    double step = 0.25;
    for (int sweep = 0; sweep < options.refine_sweeps && step > 1e-6; ++sweep) {
      bool improved = false;
      for (Eigen::Index k = 0; k < 2 * n; ++k) {
        for (double sign : {1.0, -1.0}) {
          Vector trial = x;
          trial(k) += sign * step * scale(k);
          if (trial.cwiseAbs().maxCoeff() == 0.0) continue;
          trial = normalize(trial);
          const double v = ratio(trial);
          if (v < value) {
            value = v;
            x = trial;
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (value < best) {
      best = value;
      best_x = x;
    }
  }
  result.constant = std::max(best, 0.0);
  result.minimizer = StatePair::from_stacked(best_x);
  return result;
}

namespace {

ObservabilityReport verify_obs(const std::string& form, double factor, const std::vector<StatePair>& states,
                               const SpectralOperator& op, const DampingMap& damp, const RateFunction& G,
                               double C) {
  if (!(C > 0.0)) throw InvalidArgument("verify_" + form + ": C must be positive");
  require_increasing(G, "verify_" + form);
  ObservabilityReport report;
  report.form = form;
  report.factor = factor;
  report.C = C;
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < states.size(); ++i) {
    const StatePair& s = states[i];
    if (s.is_zero()) throw DegenerateInput("verify_" + form + ": state " + std::to_string(i) + " is zero");
    ObservabilityEntry e;
    e.index = i;
    e.Lambda = lambda_ratio(s, op);
    try {
      e.horizon = observation_horizon(G, C, e.Lambda);
    } catch (const RangeError& err) {
      throw RangeError("verify_" + form + ": state " + std::to_string(i) + ": " + err.what());
    }
    e.integral = assemble_gramian(op, damp, e.horizon).form(s);
    e.vx = graph_norms(s, op).vx;
    e.margin = factor * e.integral - e.vx;
    e.pass = e.margin >= 0.0;
    report.all_pass = report.all_pass && e.pass;
    report.worst_margin = std::min(report.worst_margin, e.margin);
    report.entries.push_back(e);
  }
  return report;
}

}  // namespace

ObservabilityReport verify_obs1(const std::vector<StatePair>& states, const SpectralOperator& op,
                                const DampingMap& damp, const RateFunction& G, double C) {
  return verify_obs("obs1", 16.0, states, op, damp, G, C);
}

ObservabilityReport verify_obs2(const std::vector<StatePair>& states, const SpectralOperator& op,
                                const DampingMap& damp, const RateFunction& G, double C) {
  return verify_obs("obs2", C, states, op, damp, G, C);
}

double empirical_obs2_constant(const std::vector<StatePair>& states, const SpectralOperator& op,
                               const DampingMap& damp, const RateFunction& G) {
  require_increasing(G, "empirical_obs2_constant");
  double uniform = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const StatePair& s = states[i];
    if (s.is_zero()) throw DegenerateInput("empirical_obs2_constant: zero state " + std::to_string(i));
    const double Lambda = lambda_ratio(s, op);
    const double vx = graph_norms(s, op).vx;
    auto slack = [&](double C) {
      return C * assemble_gramian(op, damp, observation_horizon(G, C, Lambda)).form(s) - vx;
    };
    // Smallest C keeping 1/(2 C Lambda) inside G's domain.
    double lo = 1.0 / (2.0 * Lambda * G.x_max()) * (1.0 + 1e-12);
    if (slack(lo) >= 0.0) {
      uniform = std::max(uniform, lo);
      continue;
    }
    double hi = 2.0 * lo;
    while (slack(hi) < 0.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e12) {
        std::ostringstream os;
        os << "empirical_obs2_constant: state " << i << " is not observed for any C <= 1e12";
        throw NumericFailure(os.str());
      }
    }
    for (int it = 0; it < 80 && hi - lo > 1e-14 * hi; ++it) {
      const double mid = std::sqrt(lo * hi);
      (slack(mid) >= 0.0 ? hi : lo) = mid;
    }
    uniform = std::max(uniform, hi);
  }
  return uniform;
}

}  // namespace dwlab
