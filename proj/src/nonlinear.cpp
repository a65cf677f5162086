#include "dwlab/nonlinear.hpp"

#include "dwlab/collocation.hpp"
#include "dwlab/errors.hpp"
#include "dwlab/grid.hpp"
#include "dwlab/observability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dwlab {

namespace {

constexpr double kReplayTol = 1e-9;

// Linear interpolation of a sampled curve, clamped to its ends.
double sample_at(const std::vector<double>& times, const std::vector<double>& values, double t) {
  if (t <= times.front()) return values.front();
  if (t >= times.back()) return values.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto i = static_cast<std::size_t>(it - times.begin());
  const double theta = (t - times[i - 1]) / (times[i] - times[i - 1]);
  return (1.0 - theta) * values[i - 1] + theta * values[i];
}

SimulationOptions run_options(double T, double dt, std::size_t stride) {
  SimulationOptions opts;
  opts.T = T;
  opts.dt = std::min(dt, T);
  opts.keep_states = false;
  opts.stride = stride > 0 ? stride : std::max<std::size_t>(1, opts.n_steps() / 20000);
  return opts;
}

}  // namespace

double e1_norm(const Vector& first, const Vector& second, const SpectralOperator& op) {
  return first.squaredNorm() + op.eigenvalues().dot(second.cwiseAbs2());
}

NonlinearInvariants compute_X(const StatePair& init, const SpectralOperator& op, const DampingProfile& a_profile,
                              const NonlinearDamping& g) {
  check_dimensions(init, op);
  NonlinearInvariants inv;
  inv.E0 = energy(init, op);
  if (!(inv.E0 > 0.0)) throw DegenerateInput("compute_X: initial energy is zero");

  const ModalCollocation colloc(op, a_profile);
  Vector nodal = colloc.synthesize(init.w1);
  for (Eigen::Index q = 0; q < nodal.size(); ++q) nodal(q) = g.g(nodal(q));
  const Vector first = -op.eigenvalues().cwiseProduct(init.w0) - colloc.project(nodal);
  inv.E1 = e1_norm(first, init.w1, op);

  const GrowthBands& b = g.bands;
  inv.X_val = inv.E0 + inv.E1 + std::pow(inv.E1, 2.0 * b.p - 1.0) + std::pow(inv.E1, 1.0 + (b.r - b.k) / (b.r + 1.0));
  inv.Lambda_r = ((b.r - 1.0) + inv.X_val) / inv.E0;
  return inv;
}

HypothesisAReport check_hypothesis_A(const SpectralOperator& op, const DampingProfile& a_profile,
                                     const StatePair& init, const RateFunction& G_base, double C,
                                     const NonlinearInvariants& invariants) {
  if (!(C > 0.0)) throw InvalidArgument("check_hypothesis_A: C must be positive");
  require_increasing(G_base, "check_hypothesis_A");
  HypothesisAReport report;
  report.C = C;
  report.Lambda_r = invariants.Lambda_r;
  report.monotone_xFinv = xFinv_profile(G_base, log_space(1e-3, 1e6, 256)).increasing;
  report.horizon = observation_horizon(G_base, C, invariants.Lambda_r);
  const DampingMap damp = build_damping(op, a_profile);
  report.integral = assemble_gramian(op, damp, report.horizon).form(init);
  report.vx = graph_norms(init, op).vx;
  report.margin = C * report.integral - report.vx;
  report.pass = report.monotone_xFinv && report.margin >= 0.0;
  return report;
}

PropositionReport proposition_check(const SpectralOperator& op, const DampingProfile& a_profile,
                                    const NonlinearDamping& g, const StatePair& init, double h, double s0, double C,
                                    const RateFunction& G_base, double dt, double T_cap) {
  if (init.is_zero()) throw DegenerateInput("proposition_check: initial data is identically zero");
  if (!(h > 0.0) || !(s0 >= 0.0)) throw InvalidArgument("proposition_check: need h > 0 and s0 >= 0");
  if (!(T_cap > s0)) throw InvalidArgument("proposition_check: the simulation cap must exceed s0");
  PropositionReport report;
  report.h = h;
  report.s0 = s0;
  report.invariants = compute_X(init, op, a_profile, g);
  report.hypothesis = check_hypothesis_A(op, a_profile, init, G_base, C, report.invariants);
  if (!report.hypothesis.pass)
    throw HypothesisUnmet("proposition_check: the observability hypothesis fails for this initial data");

  const RateFunction G = make_nonlinear_G(C, g.bands.r, G_base);
  report.window = 1.0 / G(h);
  const double end = s0 + report.window;
  report.horizon_capped = !(end <= T_cap);
  const double T_run = report.horizon_capped ? T_cap : end;

  const NonlinearRun run = solve_damped_nonlinear(op, a_profile, g, init, run_options(T_run, dt, 1));
  const auto& tr = run.trace;
  report.lhs = sample_at(tr.times, tr.energies, s0);
  report.flux_term = sample_at(tr.times, tr.flux, T_run) - sample_at(tr.times, tr.flux, s0);
  report.first_term = h * ((g.bands.r - 1.0) + report.invariants.X_val);
  const double rhs = report.first_term + report.flux_term;
  report.margin = rhs - report.lhs;
  report.required_c = rhs > 0.0 ? report.lhs / rhs : std::numeric_limits<double>::infinity();
  return report;
}

NonlinearDecayReport nonlinear_decay_check(const SpectralOperator& op, const DampingProfile& a_profile,
                                           const NonlinearDamping& g, const StatePair& init, double T_sim,
                                           double dt, const RateFunction& G_base,
                                           const NonlinearDecayOptions& options) {
  if (init.is_zero()) throw DegenerateInput("nonlinear_decay_check: initial data is identically zero");
  if (!(options.c0 > 0.0) || !(options.c_prime > 0.0))
    throw InvalidArgument("nonlinear_decay_check: c0 and c' must be positive");
  NonlinearDecayReport report;
  report.invariants = compute_X(init, op, a_profile, g);
  report.hypothesis = check_hypothesis_A(op, a_profile, init, G_base, options.C, report.invariants);
  if (!report.hypothesis.pass) {
    report.verdict = Verdict::hypothesis_unmet;
    report.note = "the observability hypothesis fails: no decay can be inferred";
    return report;
  }

  const double r = g.bands.r;
  const double K = (r - 1.0) + report.invariants.X_val;
  const RateFunction G = make_nonlinear_G(options.C, r, G_base);

  const NonlinearRun run = solve_damped_nonlinear(op, a_profile, g, init, run_options(T_sim, dt, options.stride));
  const EnergyTrace& tr = run.trace;
  report.newton = run.newton;
  report.identity_residual = tr.max_identity_residual();
  const double T_end = tr.times.back();
  auto H = [&](double s) { return sample_at(tr.times, tr.energies, s) / K; };
  auto flux = [&](double s) { return sample_at(tr.times, tr.flux, s); };

  // Probe times for the recursion bookkeeping.
  const double s_lo = std::max(tr.times.size() > 1 ? tr.times[1] : dt, dt);
  const std::vector<double> probes =
      T_end / (1.0 + options.c0) > s_lo ? log_space(s_lo, T_end / (1.0 + options.c0), 400) : std::vector<double>{};

  RecursionReplay& rp = report.replay;
  if (options.c) {
    rp.c = *options.c;
    rp.c_source = "supplied";
  } else {
    double best = 0.0;
    const double h = 1.0 / (2.0 * options.C * report.invariants.Lambda_r);
    if (G.in_domain(h)) {
      const double tau = 1.0 / G(h);
      for (double s : probes) {
        if (!(s + tau <= T_end)) break;
        const double d = flux(s + tau) - flux(s);
        if (d > 0.0) best = std::max(best, H(s) * K / d);
      }
    }
    if (best > 0.0) {
      rp.c = best;
      rp.c_source = "fitted-window";
    } else {
      for (double s : probes) {
        const double hs = H(s);
        if (!G.in_domain(hs)) continue;
        const double next = s + 1.0 / G(hs);
        if (!(next <= T_end)) continue;
        const double drop = hs - H(next);
        if (drop > 0.0) best = std::max(best, hs / drop);
      }
      rp.c = best > 0.0 ? best : 1.0;
      rp.c_source = best > 0.0 ? "fitted-step" : "default";
    }
  }

  const double c = rp.c;
  const double ratio = c / (c + 1.0);
  for (double s : probes) {
    const double hs = H(s);
    if (!G.in_domain(hs) || !(G(hs) > 0.0)) {
      ++rp.skipped;
      continue;
    }
    const double tau = 1.0 / G(hs);
    const double h_next = H((1.0 + options.c0) * s);
    if (s + tau <= T_end) {
      ++rp.step_checked;
      if (H(s + tau) > ratio * hs * (1.0 + kReplayTol)) ++rp.step_violations;
    }
    if (options.c0 * s <= c * tau) {
      const double y = c / (options.c0 * s);
      if (!G.in_range(y)) {
        ++rp.skipped;
        continue;
      }
      ++rp.first_case_checked;
      if (h_next > inverse(G, y) * (1.0 + kReplayTol)) ++rp.first_case_violations;
    } else {
      ++rp.second_case_checked;
      if (h_next > ratio * hs * (1.0 + kReplayTol)) ++rp.second_case_violations;
    }
  }

  const auto [g_lo, g_hi] = G.range();
  report.dilation = dilation_profile(G, options.c0, c, log_space(std::max(g_hi * 1e-12, g_lo), g_hi, 200));

  FitWindow w = options.window;
  w.t_max = std::min(w.t_max, T_end);
  const double nv = tr.initial_norms.vx;
  const double c_prime = options.c_prime;
  report.fit = fit_decay_profile(
      tr, [&](double t) { return K / nv * inverse(G, c_prime / t); },
      "G^-1(c'/t) ((r-1)+X) with G=" + G.describe(), NormChoice::vx, w);

  if (G_base.kind() == "power") {
    const PowerExponents ex = nonlinear_power_exponents(G_base.params().at("p"), r);
    report.exponents = ex;
    for (const auto& [label, e] : {std::pair{"quoted", ex.quoted}, std::pair{"composed", ex.composed}}) {
      const DecayFit f = fit_decay_profile(
          tr, [&, e = e](double t) { return K / nv * std::pow(t, -1.0 / e); }, label, NormChoice::vx, w);
      report.exponent_fits.push_back(ExponentFit{label, e, f.C, f.decay_witnessed});
    }
  }

  report.trace = tr;
  if (!report.dilation.holds) {
    report.verdict = Verdict::hypothesis_unmet;
    report.note = "G fails the dilation condition for this (c0, c)";
  } else if (std::isfinite(report.fit->C) && report.fit->decay_witnessed) {
    report.verdict = Verdict::pass;
    report.note = "finite constant against G^-1(c'/t) on the window";
  } else {
    report.verdict = Verdict::fail;
    report.note = "the decay bound is not witnessed on the window";
  }
  return report;
}

}  // namespace dwlab
