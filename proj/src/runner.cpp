#include "dwlab/runner.hpp"

#include "dwlab/decay.hpp"
#include "dwlab/errors.hpp"
#include "dwlab/grid.hpp"
#include "dwlab/io.hpp"
#include "dwlab/lemma.hpp"
#include "dwlab/nonlinear.hpp"
#include "dwlab/observability.hpp"

#include <algorithm>
#include <cmath>

namespace dwlab {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

int verdict_code(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return exit_pass;
    case Verdict::hypothesis_unmet:
      return exit_hypothesis;
    case Verdict::fail:
      return exit_fail;
  }
  return exit_fail;
}

// Unmet dominates fail, fail dominates pass.
Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::hypothesis_unmet || b == Verdict::hypothesis_unmet) return Verdict::hypothesis_unmet;
  if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
  return Verdict::pass;
}

Json fit_json(const DecayFit& f) {
  return Json{{"C", f.C},
              {"rate", f.rate},
              {"norm", to_string(f.norm)},
              {"norm_value", f.norm_value},
              {"t_first", f.t_first},
              {"t_last", f.t_last},
              {"t_argmax", f.t_argmax},
              {"samples", f.times.size()},
              {"decay_witnessed", f.decay_witnessed}};
}

std::string fit_plot(const DecayFit& f) {
  io::Table t{{"t", "E", "bound"}, {}};
  for (std::size_t i = 0; i < f.times.size(); ++i) {
    const double bound = f.C * f.norm_value * f.bounds[i];
    t.rows.push_back({f.times[i], bound - f.residuals[i], bound});
  }
  return io::to_csv(t);
}

SimulationOptions sim_options(const ExperimentConfig& c) {
  SimulationOptions o;
  o.T = c.simulation.T;
  o.dt = c.simulation.dt;
  o.stride = c.simulation.stride;
  o.log_per_decade = c.simulation.log_per_decade;
  o.keep_states = false;
  return o;
}

struct Context {
  const ExperimentConfig& config;
  fs::path out;
  Json artifacts = Json::array();

  void write(const std::string& name, const std::string& text) {
    io::write_text(out / name, text);
    artifacts.push_back(name);
  }
  void write_trace(const EnergyTrace& trace) {
    write("trace.csv", io::trace_to_csv(trace));
    write("trace.json", io::trace_to_json(trace).dump(2) + "\n");
  }
};

Verdict run_simulate(Context& ctx, Json& results) {
  const auto& c = ctx.config;
  const SpectralOperator op = make_operator(c);
  const DampingMap damp = build_damping(op, make_profile(c));
  const StatePair init = make_probes(op.n_modes(), 1, c.seed).front();
  const Run run = solve_damped_linear(op, damp, init, sim_options(c));
  const EnergyTrace& tr = run.trace;
  ctx.write_trace(tr);
  io::Table plot{{"t", "E", "bound"}, {}};
  for (std::size_t i = 0; i < tr.size(); ++i) plot.rows.push_back({tr.times[i], tr.energies[i], tr.initial_energy()});
  ctx.write("plot.csv", io::to_csv(plot));

  const double residual = tr.max_identity_residual();
  const bool monotone = tr.energies_nonincreasing(1e-12);
  results["initial_energy"] = tr.initial_energy();
  results["final_energy"] = tr.energies.back();
  results["identity_residual"] = residual;
  results["energy_nonincreasing"] = monotone;
  results["flux_nondecreasing"] = tr.flux_nondecreasing();
  return residual <= 1e-10 && monotone ? Verdict::pass : Verdict::fail;
}

Verdict run_gramian(Context& ctx, Json& results) {
  const auto& c = ctx.config;
  const SpectralOperator op = make_operator(c);
  const DampingMap damp = build_damping(op, make_profile(c));
  const RateFunction G = make_rate(c);
  const double T = c.observability.T;
  const Gramian gram = assemble_gramian(op, damp, T);
  ctx.write("gramian.csv", io::gramian_to_csv(gram));

  WeakObsOptions wo;
  wo.samples = c.observability.samples;
  wo.seed = c.seed;
  const WeakObsResult weak = weak_obs_constant(op, damp, T, G, wo);
  results["T"] = T;
  results["weak_observability"] = {{"empirical_constant", weak.constant},
                                   {"evaluations", weak.evaluations},
                                   {"seed", weak.seed}};

  const auto probes = make_probes(op.n_modes(), c.probes.count, c.seed);
  const double C = c.observability.C ? *c.observability.C : empirical_obs2_constant(probes, op, damp, G);
  const ObservabilityReport obs = verify_obs2(probes, op, damp, G, C);
  results["C_source"] = c.observability.C ? "config" : "empirical";
  results["observability"] = io::to_json(obs);

  // Does the weak inequality with constant c_w carry over to the horizon
  // form with constant 16 at C = 1/c_w? Failing probes are reported.
  Json implication{{"weak_constant", weak.constant}};
  if (weak.constant > 0.0) {
    implication["C"] = 1.0 / weak.constant;
    try {
      const ObservabilityReport obs1 = verify_obs1(probes, op, damp, G, 1.0 / weak.constant);
      Json candidates = Json::array();
      for (const auto& e : obs1.entries)
        if (!e.pass) candidates.push_back(e.index);
      implication["holds"] = obs1.all_pass;
      implication["worst_margin"] = obs1.worst_margin;
      implication["counterexample_candidates"] = candidates;
    } catch (const RangeError& e) {
      implication["holds"] = nullptr;
      implication["note"] = e.what();
    }
  } else {
    implication["holds"] = nullptr;
    implication["note"] = "weak observability constant is zero; the implication is vacuous";
  }
  results["implication"] = implication;

  io::Table plot{{"t", "E", "bound"}, {}};
  const double vx = graph_norms(probes.front(), op).vx;
  for (double t : lin_space(T / 100.0, T, 100))
    plot.rows.push_back({t, assemble_gramian(op, damp, t).form(probes.front()), vx / C});
  ctx.write("plot.csv", io::to_csv(plot));
  return obs.all_pass ? Verdict::pass : Verdict::fail;
}

Verdict run_forward(Context& ctx, Json& results) {
  const auto& c = ctx.config;
  const SpectralOperator op = make_operator(c);
  const DampingMap damp = build_damping(op, make_profile(c));
  const RateFunction G = make_rate(c);
  const auto probes = make_probes(op.n_modes(), c.probes.count, c.seed);
  const FitWindow window{c.fit.t_min, c.fit.t_max};

  Verdict verdict = Verdict::pass;
  Json entries = Json::array();
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const ForwardReport r = theorem1_forward(op, damp, G, probes[i], c.simulation.T, c.simulation.dt, window);
    verdict = combine(verdict, r.verdict);
    Json e{{"index", i}, {"verdict", to_string(r.verdict)}, {"note", r.note}};
    if (r.fit) e["fit"] = fit_json(*r.fit);
    if (r.observability) {
      const auto& o = r.observability->entries.front();
      e["Lambda"] = o.Lambda;
      e["T_star"] = o.horizon;
      e["integral"] = o.integral;
      e["vx"] = o.vx;
      e["margin"] = o.margin;
    }
    entries.push_back(e);
    if (i == 0 && r.fit) ctx.write("plot.csv", fit_plot(*r.fit));
  }
  results["rate"] = G.describe();
  results["probes"] = entries;

  SimulationOptions o = sim_options(c);
  o.stride = std::max<std::size_t>(o.stride, o.n_steps() / 20000);
  ctx.write_trace(solve_damped_linear(op, damp, probes.front(), o).trace);
  return verdict;
}

Verdict run_reverse(Context& ctx, Json& results) {
  const auto& c = ctx.config;
  const SpectralOperator op = make_operator(c);
  const DampingMap damp = build_damping(op, make_profile(c));
  const RateFunction G = make_rate(c);
  const auto probes = make_probes(op.n_modes(), c.probes.count, c.seed);
  const double C_obs = c.observability.C ? *c.observability.C : empirical_obs2_constant(probes, op, damp, G);
  const std::size_t per_decade = c.simulation.log_per_decade > 0 ? c.simulation.log_per_decade : 200;
  const ReverseReport r = theorem1_reverse(op, damp, G, C_obs, probes, c.simulation.T, c.simulation.dt,
                                           FitWindow{c.fit.t_min, c.fit.t_max}, per_decade);
  results["rate"] = G.describe();
  results["C_obs"] = C_obs;
  results["C_source"] = c.observability.C ? "config" : "empirical";
  results["note"] = r.note;
  results["xFinv_monotonicity"] = io::to_json(r.monotonicity);
  if (r.observability) results["observability"] = io::to_json(*r.observability);
  Json entries = Json::array();
  for (const auto& p : r.probes) entries.push_back(Json{{"index", p.index}, {"fit", fit_json(p.fit)}});
  results["probes"] = entries;
  results["uniform_C"] = r.uniform_C;
  if (!r.probes.empty()) ctx.write("plot.csv", fit_plot(r.probes.front().fit));

  SimulationOptions o = sim_options(c);
  o.log_per_decade = per_decade;
  ctx.write_trace(solve_damped_linear(op, damp, probes.front(), o).trace);
  return r.verdict;
}

Json replay_json(const RecursionReplay& r) {
  return Json{{"c", r.c},
              {"c_source", r.c_source},
              {"step", {{"checked", r.step_checked}, {"violations", r.step_violations}}},
              {"first_case", {{"checked", r.first_case_checked}, {"violations", r.first_case_violations}}},
              {"second_case", {{"checked", r.second_case_checked}, {"violations", r.second_case_violations}}},
              {"skipped", r.skipped}};
}

Verdict run_lemma(Context& ctx, Json& results) {
  const auto& c = ctx.config;
  const RateFunction G = make_rate(c);
  LemmaOptions opts;
  opts.t_min = c.lemma.t_min;
  opts.t_max = c.lemma.t_max;
  opts.points = c.lemma.points;
  const LemmaReport r = lemma_end_to_end(G, c.lemma.c, opts);
  const auto& h = r.hypothesis;
  results["rate"] = r.rate;
  results["c"] = r.c;
  results["xFinv_monotonicity"] = io::to_json(r.monotonicity);
  results["hypothesis"] = {{"pass", h.pass},
                           {"checked", h.checked},
                           {"skipped", h.skipped},
                           {"interpolated", h.interpolated},
                           {"min_slack", h.min_slack}};
  results["conclusion"] = {{"C_min", r.conclusion.C_min},
                           {"finite", r.conclusion.finite},
                           {"evaluated", r.conclusion.evaluated},
                           {"t_argmax", r.conclusion.t_argmax}};
  auto psi_json = [](const PsiMonotonicityReport& p) {
    return Json{{"c_scaled", p.c_scaled}, {"pairs", p.pairs}, {"violations", p.violations}, {"worst_excess", p.worst_excess}};
  };
  results["psi_monotonicity"] = psi_json(r.psi_scaled);
  results["psi_monotonicity_unscaled"] = psi_json(r.psi_unscaled);
  Json chains = Json::array();
  for (const auto& ch : r.chains)
    chains.push_back(Json{{"reading", ch.name}, {"checked", ch.checked}, {"violations", ch.violations}});
  results["chain_readings"] = chains;

  ctx.write("H.csv", io::sampled_h_to_csv(*r.H));
  const RateFunction F = make_F(G);
  io::Table plot{{"t", "E", "bound"}, {}};
  for (std::size_t i = 0; i < r.H->times().size(); ++i) {
    const double t = r.H->times()[i];
    const double y = 1.0 / std::sqrt(t);
    if (!F.in_range(y)) continue;
    plot.rows.push_back({t, r.H->values()[i], r.conclusion.C_min * inverse(F, y)});
  }
  ctx.write("plot.csv", io::to_csv(plot));
  return r.pass ? Verdict::pass : Verdict::fail;
}

Verdict run_nonlinear(Context& ctx, Json& results) {
  const auto& c = ctx.config;
  const SpectralOperator op = make_operator(c);
  const DampingProfile profile = make_profile(c);
  const NonlinearDamping law = make_law(c);
  const RateFunction G_base = make_rate(c);
  const StatePair init = make_probes(op.n_modes(), 1, c.seed).front();

  NonlinearDecayOptions opts;
  opts.c0 = c.nonlinear.c0;
  opts.c_prime = c.nonlinear.c_prime;
  opts.C = c.nonlinear.C;
  opts.c = c.nonlinear.c;
  opts.window = FitWindow{c.nonlinear.t_min};
  opts.stride = c.simulation.stride > 1 ? c.simulation.stride : 0;
  const NonlinearDecayReport r =
      nonlinear_decay_check(op, profile, law, init, c.simulation.T, c.simulation.dt, G_base, opts);

  const auto& b = law.bands;
  results["law"] = law.description();
  results["bands"] = {{"r", b.r},   {"k", b.k},   {"p", b.p},   {"c1", b.c1}, {"c2", b.c2},
                      {"c3", b.c3}, {"c4", b.c4}, {"condition_iii", {b.condition_iii_first, b.condition_iii_second}}};
  const auto& inv = r.invariants;
  results["invariants"] = {{"E0", inv.E0}, {"E1", inv.E1}, {"X", inv.X_val}, {"Lambda_r", inv.Lambda_r}};
  const auto& a = r.hypothesis;
  results["hypothesis_A"] = {{"pass", a.pass},
                             {"xFinv_increasing", a.monotone_xFinv},
                             {"C", a.C},
                             {"T_star", a.horizon},
                             {"integral", a.integral},
                             {"vx", a.vx},
                             {"margin", a.margin}};
  results["note"] = r.note;
  if (r.verdict != Verdict::hypothesis_unmet || !r.trace.times.empty()) {
    results["identity_residual"] = r.identity_residual;
    results["newton"] = {{"steps", r.newton.steps},
                         {"mean_iterations", r.newton.mean_iterations()},
                         {"max_iterations", r.newton.max_iterations},
                         {"max_final_residual", r.newton.max_final_residual}};
    results["dilation"] = {{"holds", r.dilation.holds},
                           {"evaluated", r.dilation.evaluated},
                           {"worst_margin", r.dilation.worst_margin}};
    results["replay"] = replay_json(r.replay);
  }
  if (r.fit) {
    results["fit"] = fit_json(*r.fit);
    ctx.write("plot.csv", fit_plot(*r.fit));
  }
  if (r.exponents) {
    results["exponents"] = {{"quoted", r.exponents->quoted}, {"composed", r.exponents->composed}};
    Json fits = Json::array();
    for (const auto& f : r.exponent_fits)
      fits.push_back(Json{{"label", f.label}, {"exponent", f.exponent}, {"C", f.C}, {"decay_witnessed", f.decay_witnessed}});
    results["exponent_fits"] = fits;
  }
  if (!r.trace.times.empty()) ctx.write_trace(r.trace);
  return r.verdict;
}

Verdict run_fit(Context& ctx, Json& results) {
  const auto& c = ctx.config;
  fs::path path(c.trace);
  if (path.is_relative() && !c.base_dir.empty()) path = c.base_dir / path;
  EnergyTrace trace = io::load_trace(path);
  const NormChoice norm = c.fit.norm == "vx" ? NormChoice::vx : NormChoice::da_v;
  const bool have_norms = trace.initial_norms.vx > 0.0;
  if (!have_norms) {
    // A CSV trace carries no norms; vx is twice the initial energy.
    if (norm == NormChoice::da_v) throw InvalidArgument("fit: the da_v norm needs a JSON trace with initial_norms");
    trace.initial_norms.vx = 2.0 * trace.initial_energy();
  }
  const RateFunction G = make_rate(c);
  const FitWindow window{c.fit.t_min, c.fit.t_max};
  const DecayFit f = c.fit.rate == "forward" ? fit_decay_constant(trace, G, norm, window)
                                             : fit_reverse_decay(trace, G, norm, window);
  results["source"] = c.trace;
  results["norms_from"] = have_norms ? "trace" : "energy";
  results["fit"] = fit_json(f);
  ctx.write("plot.csv", fit_plot(f));
  return f.decay_witnessed ? Verdict::pass : Verdict::fail;
}

}  // namespace

RunOutcome run_pipeline(const ExperimentConfig& config, const fs::path& out_dir) {
  config.validate();
  Context ctx{config, out_dir};
  Json results = Json::object();
  Verdict verdict = Verdict::fail;
  const std::string& p = config.pipeline;
  if (p == "simulate") verdict = run_simulate(ctx, results);
  else if (p == "gramian") verdict = run_gramian(ctx, results);
  else if (p == "verify-forward") verdict = run_forward(ctx, results);
  else if (p == "verify-reverse") verdict = run_reverse(ctx, results);
  else if (p == "lemma") verdict = run_lemma(ctx, results);
  else if (p == "nonlinear") verdict = run_nonlinear(ctx, results);
  else verdict = run_fit(ctx, results);

  RunOutcome outcome;
  outcome.exit_code = verdict_code(verdict);
  ctx.artifacts.push_back("report.json");
  outcome.report = Json{{"pipeline", p},
                        {"verdict", to_string(verdict)},
                        {"exit_code", outcome.exit_code},
                        {"config", resolved_json(config)},
                        {"results", results},
                        {"artifacts", ctx.artifacts}};
  io::write_text(out_dir / "report.json", outcome.report.dump(2) + "\n");
  return outcome;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const HypothesisUnmet*>(&e)) return exit_hypothesis;
  if (dynamic_cast<const InvalidArgument*>(&e) || dynamic_cast<const DegenerateInput*>(&e) ||
      dynamic_cast<const InvalidDamping*>(&e))
    return exit_validation;
  return exit_numeric;
}

Json error_json(const std::exception& e) {
  std::string kind = "numeric-failure";
  if (dynamic_cast<const HypothesisUnmet*>(&e)) kind = "hypothesis-unmet";
  else if (dynamic_cast<const InvalidDamping*>(&e)) kind = "invalid-damping";
  else if (dynamic_cast<const InvalidArgument*>(&e)) kind = "validation";
  else if (dynamic_cast<const DegenerateInput*>(&e)) kind = "degenerate-input";
  else if (dynamic_cast<const RangeError*>(&e)) kind = "range-error";
  else if (dynamic_cast<const EmptyWindow*>(&e)) kind = "empty-window";
  else if (dynamic_cast<const ConstructionError*>(&e)) kind = "construction-error";
  return Json{{"error", kind}, {"message", e.what()}, {"exit_code", exit_code_for(e)}};
}

}  // namespace dwlab
