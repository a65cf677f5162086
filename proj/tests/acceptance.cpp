// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include "dwlab/config.hpp"
#include "dwlab/decay.hpp"
#include "dwlab/dynamics.hpp"
#include "dwlab/grid.hpp"
#include "dwlab/io.hpp"
#include "dwlab/lemma.hpp"
#include "dwlab/nonlinear.hpp"
#include "dwlab/observability.hpp"
#include "dwlab/runner.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>

using namespace dwlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = elapsed < limit_s;
  const bool ok = out.pass && in_time;
  if (!ok) ++failures;
  std::printf("criterion %2d %-34s %s  %s  [%.2fs / %.0fs%s]\n", id, name, ok ? "PASS" : "FAIL", out.detail.c_str(),
              elapsed, limit_s, in_time ? "" : " over limit");
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// int_0^T phi'(t)^T M phi'(t) dt with phi' in closed modal form and M from
// composite Gauss quadrature of a e_j e_k.
struct GramianOracle {
  double L;
  std::size_t n;
  Matrix M;

  GramianOracle(double length, std::size_t modes, double alpha, double beta, double a0)
      : L(length), n(modes), M(modes, modes) {
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = j; k < n; ++k) {
        const double v = oracle::integrate_panels(
            [&](double x) {
              return a0 * oracle::sine_mode(static_cast<int>(j) + 1, x, L) * oracle::sine_mode(static_cast<int>(k) + 1, x, L);
            },
            alpha, beta, 64);
        M(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = v;
        M(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = v;
      }
  }

  double operator()(const StatePair& s, double T) const {
    Vector v(static_cast<Eigen::Index>(n));
    auto integrand = [&](double t) {
      for (std::size_t k = 0; k < n; ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        const double w = (static_cast<double>(k) + 1.0) * std::numbers::pi / L;
        v(i) = -s.w0(i) * w * std::sin(w * t) + s.w1(i) * std::cos(w * t);
      }
      return v.dot(M * v);
    };
    return oracle::integrate_panels(integrand, 0.0, T, 256);
  }
};

}  // namespace

int main() {
  criterion(1, "undamped energy conservation", 1.0, [] {
    const auto op = build_dirichlet_operator(64, 1.0);
    double drift = 0.0;
    for (const auto& s : make_probes(64, 8, 1)) {
      const double E0 = energy(s, op);
      for (double t : lin_space(0.0, 100.0, 2001)) drift = std::max(drift, std::abs(energy(undamped_state(op, s, t), op) - E0) / E0);
    }
    return Outcome{drift <= 1e-12, "max relative drift " + fmt("%.2e", drift) + " (<= 1e-12)"};
  });

  criterion(2, "discrete energy identity", 10.0, [] {
    const auto op = build_dirichlet_operator(64, 1.0);
    const auto damp = build_damping(op, DampingProfile::interval(0.3, 0.7, 1.0));
    SimulationOptions opt{20.0, 1e-3};
    opt.keep_states = false;
    double worst = 0.0;
    for (const auto& s : make_probes(64, 4, 1))
      worst = std::max(worst, solve_damped_linear(op, damp, s, opt).trace.max_identity_residual());
    return Outcome{worst <= 1e-10, "max residual/E(0) " + fmt("%.2e", worst) + " (<= 1e-10)"};
  });

  criterion(3, "gramian vs trajectory quadrature", 30.0, [] {
    const std::size_t n = 32;
    const double T = 5.0;
    const auto op = build_dirichlet_operator(static_cast<int>(n), 1.0);
    const auto damp = build_damping(op, DampingProfile::interval(0.3, 0.7, 1.0));
    const auto Q = assemble_gramian(op, damp, T);
    const GramianOracle ref(1.0, n, 0.3, 0.7, 1.0);
    double worst = 0.0;
    for (const auto& s : make_probes(n, 100, 3)) {
      const double r = ref(s, T);
      worst = std::max(worst, std::abs(Q.form(s) - r) / r);
    }
    return Outcome{worst <= 1e-8, "max relative error " + fmt("%.2e", worst) + " (<= 1e-8)"};
  });

  criterion(4, "inverse round trips", 1.0, [] {
    double worst = 0.0;
    std::size_t points = 0;
    for (const auto& f : {preset_power(0.5), preset_power(1.0), preset_power(2.0), preset_exp(1.0), preset_exp(2.0)}) {
      for (double x : log_space(f.check_floor(), f.x_max(), 256)) {
        worst = std::max(worst, std::abs(inverse(f, f(x)) - x) / x);
        ++points;
      }
    }
    return Outcome{worst <= 1e-10, std::to_string(points) + " points, max relative error " + fmt("%.2e", worst) + " (<= 1e-10)"};
  });

  criterion(5, "forward chain, constant 16", 120.0, [] {
    const auto op = build_dirichlet_operator(32, 1.0);
    const auto damp = build_damping(op, DampingProfile::constant(1.0));
    const auto probes = make_probes(32, 8, 1);
    bool ok = true;
    double worst = std::numeric_limits<double>::infinity();
    for (double p : {0.5, 1.0, 2.0}) {
      const auto G = preset_power(p, 1e3);
      for (const auto& s : probes) {
        const auto rep = theorem1_forward(op, damp, G, s, 50.0, 1e-2, {1.0, 50.0});
        ok = ok && rep.verdict == Verdict::pass && rep.observability && rep.observability->worst_margin >= 0.0;
        if (rep.observability) worst = std::min(worst, rep.observability->worst_margin);
      }
    }
    return Outcome{ok, "24 probe runs, worst margin " + fmt("%.3e", worst) + " (>= 0)"};
  });

  criterion(6, "reverse chain, dt-stable constant", 300.0, [] {
    const auto op = build_dirichlet_operator(32, 1.0);
    const auto damp = build_damping(op, DampingProfile::constant(1.0));
    const auto probes = make_probes(32, 8, 1);
    bool ok = true;
    std::ostringstream os;
    for (double p : {0.5, 1.0, 2.0}) {
      const auto G = preset_power(p, 1e3);
      const double C_obs = empirical_obs2_constant(probes, op, damp, G);
      const bool obs = verify_obs2(probes, op, damp, G, C_obs).all_pass;
      const auto coarse = theorem1_reverse(op, damp, G, C_obs, probes, 1000.0, 5e-3, {10.0, 1000.0}, 200);
      const auto fine = theorem1_reverse(op, damp, G, C_obs, probes, 1000.0, 2.5e-3, {10.0, 1000.0}, 200);
      const double drift = std::abs(fine.uniform_C / coarse.uniform_C - 1.0);
      const bool good = obs && coarse.verdict == Verdict::pass && fine.verdict == Verdict::pass &&
                        std::isfinite(coarse.uniform_C) && drift <= 0.1;
      ok = ok && good;
      os << "p=" << p << ": C=" << fmt("%.4g", fine.uniform_C) << " drift " << fmt("%.1e", drift) << "; ";
    }
    os << "(<= 10%)";
    return Outcome{ok, os.str()};
  });

  criterion(7, "recursion lemma end to end", 30.0, [] {
    bool ok = true;
    std::ostringstream os;
    for (double p : {1.0, 2.0}) {
      const auto rep = lemma_end_to_end(preset_power(p, 1.0), 1.0, {1.0, 1e6, 512, 1});
      ok = ok && rep.hypothesis.pass && rep.conclusion.finite && rep.psi_scaled.violations == 0 &&
           rep.psi_scaled.pairs > 0;
      os << "G=x^" << p << ": C_min=" << fmt("%.4g", rep.conclusion.C_min) << ", psi " << rep.psi_scaled.violations
         << "/" << rep.psi_scaled.pairs << "; ";
    }
    return Outcome{ok, os.str()};
  });

  criterion(8, "error-system inequality", 60.0, [] {
    const auto op = build_dirichlet_operator(32, 1.0);
    const auto damp = build_damping(op, DampingProfile::interval(0.3, 0.7, 1.0));
    double worst = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (const auto& s : make_probes(32, 10, 2)) {
      const auto rep = error_system_check(op, damp, s, {20.0, 1e-3, 10});
      ok = ok && rep.holds && rep.worst_margin >= 0.0;
      worst = std::min(worst, rep.worst_margin);
    }
    return Outcome{ok, "10 states, worst margin " + fmt("%.3e", worst) + " (>= 0)"};
  });

  criterion(9, "cubic damping energy law", 120.0, [] {
    const auto op = build_dirichlet_operator(32, 1.0);
    const auto law = validate_damping(cubic_law());
    SimulationOptions opt{10.0, 5e-4};
    opt.keep_states = false;
    const auto run = solve_damped_nonlinear(op, DampingProfile::constant(1.0), law, make_probes(32, 1, 1).front(), opt);
    const double res = run.trace.max_identity_residual();
    const double newton = run.newton.mean_iterations();
    return Outcome{res <= 1e-8 && newton <= 8.0,
                   "residual/E(0) " + fmt("%.2e", res) + " (<= 1e-8), mean Newton " + fmt("%.2f", newton) + " (<= 8)"};
  });

  criterion(10, "linear-limit consistency", 60.0, [] {
    const auto op = build_dirichlet_operator(32, 1.0);
    const auto profile = DampingProfile::interval(0.3, 0.7, 1.0);
    const auto damp = build_damping(op, profile);
    const auto law = validate_damping(linear_law());
    SimulationOptions opt{10.0, 1e-3, 10};
    opt.keep_states = false;
    double worst = 0.0;
    for (const auto& s : make_probes(32, 2, 4)) {
      const auto lin = solve_damped_linear(op, damp, s, opt).trace;
      const auto nl = solve_damped_nonlinear(op, profile, law, s, opt).trace;
      if (lin.size() != nl.size()) return Outcome{false, "sample grids differ"};
      for (std::size_t i = 0; i < lin.size(); ++i) worst = std::max(worst, std::abs(lin.energies[i] - nl.energies[i]));
    }
    return Outcome{worst <= 1e-10, "max |E_lin - E_nl| " + fmt("%.2e", worst) + " (<= 1e-10)"};
  });

  criterion(11, "decay exponent report", 1.0, [] {
    ExperimentConfig c;
    c.pipeline = "nonlinear";
    c.n_modes = 8;
    c.g.p = 1.0;
    c.g.r0 = 1e3;
    c.simulation.T = 5.0;
    c.simulation.dt = 1e-2;
    c.fit.t_min = 1.0;
    c.fit.t_max = 5.0;
    c.probes.count = 1;
    c.nonlinear.g.kind = "linear";
    c.validate();
    const auto dir = std::filesystem::temp_directory_path() / "dwlab_acceptance_exponents";
    run_pipeline(c, dir);
    const auto report = io::Json::parse(io::read_text(dir / "report.json"));
    const auto& e = report.at("results").at("exponents");
    const double quoted = e.at("quoted").get<double>();
    const double composed = e.at("composed").get<double>();
    std::filesystem::remove_all(dir);
    return Outcome{quoted == 20.0 && composed == 27.0,
                   "report.json exponents quoted=" + fmt("%g", quoted) + " composed=" + fmt("%g", composed)};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
