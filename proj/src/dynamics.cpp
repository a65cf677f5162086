#include "dwlab/dynamics.hpp"

#include "dwlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dwlab {

SampleSchedule SampleSchedule::every(std::size_t n_steps, std::size_t stride) {
  SampleSchedule s;
  stride = std::max<std::size_t>(1, stride);
  for (std::size_t m = 0; m <= n_steps; m += stride) s.steps.push_back(m);
  if (s.steps.back() != n_steps) s.steps.push_back(n_steps);
  return s;
}

SampleSchedule SampleSchedule::logarithmic(std::size_t n_steps, std::size_t per_decade) {
  SampleSchedule s;
  s.steps.push_back(0);
  if (n_steps > 0) {
    const double decades = std::log10(static_cast<double>(n_steps));
    const auto count = static_cast<std::size_t>(std::ceil(decades * static_cast<double>(per_decade)));
    for (std::size_t i = 0; i <= count; ++i) {
      const double u = decades * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(count, 1));
      s.steps.push_back(std::min(n_steps, static_cast<std::size_t>(std::llround(std::pow(10.0, u)))));
    }
    s.steps.push_back(n_steps);
  }
  std::sort(s.steps.begin(), s.steps.end());
  s.steps.erase(std::unique(s.steps.begin(), s.steps.end()), s.steps.end());
  return s;
}

std::size_t SimulationOptions::n_steps() const {
  return static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
}

SampleSchedule SimulationOptions::schedule() const {
  return log_per_decade > 0 ? SampleSchedule::logarithmic(n_steps(), log_per_decade)
                            : SampleSchedule::every(n_steps(), stride);
}

void SimulationOptions::validate() const {
  if (!(T > 0.0)) throw InvalidArgument("simulation: T must be positive");
  if (!(dt > 0.0) || dt > T) throw InvalidArgument("simulation: dt must satisfy 0 < dt <= T");
}

double EnergyTrace::max_identity_residual() const {
  const double e0 = initial_energy();
  double worst = 0.0;
  for (std::size_t i = 0; i < size(); ++i) worst = std::max(worst, std::abs(e0 - energies[i] - flux[i]));
  return e0 > 0.0 ? worst / e0 : worst;
}

bool EnergyTrace::energies_nonincreasing(double relative_tol) const {
  const double slack = relative_tol * initial_energy();
  for (std::size_t i = 1; i < size(); ++i)
    if (energies[i] > energies[i - 1] + slack) return false;
  return true;
}

bool EnergyTrace::flux_nondecreasing() const {
  if (!flux.empty() && flux.front() != 0.0) return false;
  for (std::size_t i = 1; i < flux.size(); ++i)
    if (flux[i] < flux[i - 1]) return false;
  return true;
}

StatePair undamped_state(const SpectralOperator& op, const StatePair& init, double t) {
  check_dimensions(init, op);
  const Vector& omega = op.frequencies();
  const Vector c = (omega * t).array().cos();
  const Vector s = (omega * t).array().sin();
  StatePair out;
  out.w0 = init.w0.cwiseProduct(c) + init.w1.cwiseProduct(s).cwiseQuotient(omega);
  out.w1 = -init.w0.cwiseProduct(omega).cwiseProduct(s) + init.w1.cwiseProduct(c);
  return out;
}

Trajectory solve_undamped(const SpectralOperator& op, const StatePair& init, const std::vector<double>& times) {
  check_dimensions(init, op);
  if (times.empty()) throw InvalidArgument("solve_undamped: empty time grid");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (times[i] < times[i - 1]) throw InvalidArgument("solve_undamped: time grid must be nondecreasing");
  Trajectory traj;
  traj.times = times;
  traj.states.reserve(times.size());
  for (double t : times) traj.states.push_back(undamped_state(op, init, t));
  return traj;
}

namespace {

// Shared recording logic for the midpoint integrators.
class Recorder {
 public:
  Recorder(const SimulationOptions& options, const SpectralOperator& op, const StatePair& init)
      : schedule_(options.schedule()), dt_(options.dt), keep_(options.keep_states) {
    trace_.initial_norms = graph_norms(init, op);
    const std::size_t n = schedule_.steps.size();
    trace_.times.reserve(n);
    trace_.energies.reserve(n);
    trace_.flux.reserve(n);
  }

  void maybe_record(std::size_t step, const Vector& w, const Vector& v, double energy_value, double flux) {
    if (next_ >= schedule_.steps.size() || schedule_.steps[next_] != step) return;
    ++next_;
    const double t = static_cast<double>(step) * dt_;
    trace_.times.push_back(t);
    trace_.energies.push_back(energy_value);
    trace_.flux.push_back(flux);
    if (keep_) {
      traj_.times.push_back(t);
      traj_.states.emplace_back(w, v);
    }
  }

  Trajectory take_trajectory() { return std::move(traj_); }
  EnergyTrace take_trace() { return std::move(trace_); }

 private:
  SampleSchedule schedule_;
  double dt_;
  bool keep_;
  std::size_t next_ = 0;
  Trajectory traj_;
  EnergyTrace trace_;
};

double modal_energy(const Vector& lambda, const Vector& w, const Vector& v) {
  return 0.5 * (v.squaredNorm() + lambda.dot(w.cwiseAbs2()));
}

}  // namespace

Run solve_damped_linear(const SpectralOperator& op, const DampingMap& damp, const StatePair& init,
                        const SimulationOptions& options) {
  check_dimensions(init, op);
  options.validate();
  const auto n = static_cast<Eigen::Index>(op.n_modes());
  if (damp.coupling.rows() != n || damp.coupling.cols() != n)
    throw InvalidArgument("solve_damped_linear: damping map size does not match operator");

  const double dt = options.dt;
  const Vector& lambda = op.eigenvalues();
  const Matrix& M = damp.coupling;
  // Unknown z = midpoint velocity: (2 + dt^2/2 A + dt M) z = 2 v - dt A w.
  Matrix K = dt * M;
  K.diagonal().array() += 2.0 + 0.5 * dt * dt * lambda.array();
  const Eigen::LLT<Matrix> solver(K);
  if (solver.info() != Eigen::Success) throw NumericFailure("solve_damped_linear: midpoint matrix not SPD");

  Vector w = init.w0;
  Vector v = init.w1;
  double flux = 0.0;
  Recorder rec(options, op, init);
  rec.maybe_record(0, w, v, modal_energy(lambda, w, v), flux);

  const std::size_t steps = options.n_steps();
  Vector rhs(n);
  Vector z(n);
  for (std::size_t m = 1; m <= steps; ++m) {
    rhs.noalias() = 2.0 * v - dt * lambda.cwiseProduct(w);
    z = solver.solve(rhs);
    flux += dt * z.dot(M * z);
    w.noalias() += dt * z;
    v = 2.0 * z - v;
    rec.maybe_record(m, w, v, modal_energy(lambda, w, v), flux);
  }
  return Run{rec.take_trajectory(), rec.take_trace()};
}

NonlinearRun solve_damped_nonlinear(const SpectralOperator& op, const ModalCollocation& collocation,
                                    const NonlinearDamping& g, const StatePair& init,
                                    const SimulationOptions& options, const NewtonOptions& newton) {
  check_dimensions(init, op);
  options.validate();
  const auto n = static_cast<Eigen::Index>(op.n_modes());
  if (collocation.basis().cols() != n) throw InvalidArgument("solve_damped_nonlinear: collocation size mismatch");

  const double dt = options.dt;
  const Vector& lambda = op.eigenvalues();
  const Vector diag = (2.0 + 0.5 * dt * dt * lambda.array()).matrix();
  const Eigen::Index q = collocation.n_nodes();

  Vector w = init.w0;
  Vector v = init.w1;
  double flux = 0.0;
  NewtonStats stats;
  Recorder rec(options, op, init);
  rec.maybe_record(0, w, v, modal_energy(lambda, w, v), flux);

  Vector nodal(q);
  Vector slope(q);
  auto damping_force = [&](const Vector& z) {
    const Vector u = collocation.synthesize(z);
    for (Eigen::Index i = 0; i < q; ++i) nodal(i) = g.g(u(i));
    return collocation.project(nodal);
  };

  const std::size_t steps = options.n_steps();
  for (std::size_t m = 1; m <= steps; ++m) {
    const Vector b = 2.0 * v - dt * lambda.cwiseProduct(w);
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    Vector z = v;
    Vector force = damping_force(z);
    Vector residual = diag.cwiseProduct(z) - b + dt * force;
    double res_norm = residual.cwiseAbs().maxCoeff();
    int iterations = 0;
    while (res_norm > newton.tolerance * scale) {
      if (iterations == newton.max_iterations) {
        std::ostringstream os;
        os << "solve_damped_nonlinear: Newton did not converge at step " << m << " (t=" << m * dt
           << ", residual " << res_norm << " after " << iterations << " iterations)";
        throw NumericFailure(os.str());
      }
      const Vector u = collocation.synthesize(z);
      for (Eigen::Index i = 0; i < q; ++i) slope(i) = g.dg(u(i));
      Matrix J = dt * collocation.weighted_gram(slope);
      J.diagonal() += diag;
      const Eigen::LLT<Matrix> solver(J);
      if (solver.info() != Eigen::Success) throw NumericFailure("solve_damped_nonlinear: Jacobian not SPD");
      const Vector delta = solver.solve(-residual);

      double alpha = 1.0;
      bool accepted = false;
      for (int h = 0; h <= newton.max_halvings; ++h, alpha *= 0.5) {
        const Vector trial = z + alpha * delta;
        const Vector trial_force = damping_force(trial);
        const Vector trial_residual = diag.cwiseProduct(trial) - b + dt * trial_force;
        const double trial_norm = trial_residual.cwiseAbs().maxCoeff();
        if (trial_norm < res_norm) {
          z = trial;
          force = trial_force;
          residual = trial_residual;
          res_norm = trial_norm;
          accepted = true;
          break;
        }
      }
      ++iterations;
      if (!accepted) {
        // Stagnation at rounding level counts as converged; anything else is a failure.
        if (res_norm <= 1e3 * newton.tolerance * scale) break;
        std::ostringstream os;
        os << "solve_damped_nonlinear: line search failed at step " << m << " (residual " << res_norm << ")";
        throw NumericFailure(os.str());
      }
    }
    stats.steps += 1;
    stats.total_iterations += static_cast<std::size_t>(iterations);
    stats.max_iterations = std::max(stats.max_iterations, iterations);
    stats.max_final_residual = std::max(stats.max_final_residual, res_norm / scale);

    flux += dt * z.dot(force);
    w.noalias() += dt * z;
    v = 2.0 * z - v;
    rec.maybe_record(m, w, v, modal_energy(lambda, w, v), flux);
  }
  return NonlinearRun{rec.take_trajectory(), rec.take_trace(), stats};
}

NonlinearRun solve_damped_nonlinear(const SpectralOperator& op, const DampingProfile& a_profile,
                                    const NonlinearDamping& g, const StatePair& init,
                                    const SimulationOptions& options, const NewtonOptions& newton) {
  const ModalCollocation collocation(op, a_profile);
  return solve_damped_nonlinear(op, collocation, g, init, options, newton);
}

ErrorSystemReport error_system_check(const SpectralOperator& op, const DampingMap& damp, const StatePair& init,
                                     const SimulationOptions& options) {
  check_dimensions(init, op);
  options.validate();
  const auto n = static_cast<Eigen::Index>(op.n_modes());
  const double dt = options.dt;
  const Vector& lambda = op.eigenvalues();
  const Matrix& M = damp.coupling;

  const Vector diag = (2.0 + 0.5 * dt * dt * lambda.array()).matrix();
  Matrix K = dt * M;
  K.diagonal() += diag;
  const Eigen::LLT<Matrix> damped(K);
  if (damped.info() != Eigen::Success) throw NumericFailure("error_system_check: midpoint matrix not SPD");

  Vector w = init.w0, wv = init.w1;
  Vector phi = init.w0, phiv = init.w1;
  double flux_w = 0.0, flux_phi = 0.0, flux_v = 0.0;
  const double e0 = modal_energy(lambda, w, wv);

  ErrorSystemReport report;
  report.initial_energy = e0;
  const auto schedule = options.schedule();
  std::size_t next = 0;
  double worst_mixed = 0.0;
  double worst_identity = 0.0;
  auto record = [&](std::size_t step) {
    const double ew = modal_energy(lambda, w, wv);
    worst_mixed = std::max(worst_mixed, std::abs(ew - (e0 - 2.0 * flux_phi)));
    worst_identity = std::max(worst_identity, std::abs(e0 - ew - flux_w));
    if (next >= schedule.steps.size() || schedule.steps[next] != step) return;
    ++next;
    const double ev = modal_energy(lambda, phi - w, phiv - wv);
    report.times.push_back(static_cast<double>(step) * dt);
    report.energy_v.push_back(ev);
    report.flux_v.push_back(flux_v);
    report.flux_phi.push_back(flux_phi);
    report.margins.push_back(flux_phi - ev - flux_v);
  };
  record(0);

  Vector zw(n), zphi(n), zv(n);
  const std::size_t steps = options.n_steps();
  for (std::size_t m = 1; m <= steps; ++m) {
    zw = damped.solve(2.0 * wv - dt * lambda.cwiseProduct(w));
    zphi = (2.0 * phiv - dt * lambda.cwiseProduct(phi)).cwiseQuotient(diag);
    zv = zphi - zw;
    flux_w += dt * zw.dot(M * zw);
    flux_phi += dt * zphi.dot(M * zphi);
    flux_v += dt * zv.dot(M * zv);
    w.noalias() += dt * zw;
    wv = 2.0 * zw - wv;
    phi.noalias() += dt * zphi;
    phiv = 2.0 * zphi - phiv;
    record(m);
  }

  report.worst_margin = *std::min_element(report.margins.begin(), report.margins.end());
  report.holds = report.worst_margin >= 0.0;
  report.mixed_identity_deviation = e0 > 0.0 ? worst_mixed / e0 : worst_mixed;
  report.energy_identity_residual = e0 > 0.0 ? worst_identity / e0 : worst_identity;
  return report;
}

}  // namespace dwlab
