#pragma once

// Functionals of the initial data for the nonlinearly damped equation, the
// observability hypothesis on the undamped flow, the energy inequality with
// the nonlinear G(h) and the decay pipeline built on top of it.

#include "dwlab/decay.hpp"
#include "dwlab/dynamics.hpp"
#include "dwlab/nonlinear_damping.hpp"
#include "dwlab/rate.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dwlab {

struct NonlinearInvariants {
  double E0 = 0.0;
  double E1 = 0.0;
  double X_val = 0.0;
  double Lambda_r = 0.0;
};

/// ||(first, second)||^2 in L2 x H1_0 written in the eigenbasis:
/// sum first_k^2 + sum lambda_k second_k^2.
double e1_norm(const Vector& first, const Vector& second, const SpectralOperator& op);

/// E1 = e1_norm(-A u0 - P[a g(u1)], u1), with a g(u1) evaluated on the
/// collocation grid; X = E0 + E1 + E1^(2p-1) + E1^(1+(r-k)/(r+1));
/// Lambda_r = ((r-1) + X) / E0.
NonlinearInvariants compute_X(const StatePair& init, const SpectralOperator& op, const DampingProfile& a_profile,
                              const NonlinearDamping& g);

struct HypothesisAReport {
  bool monotone_xFinv = false;
  double C = 0.0;
  double Lambda_r = 0.0;
  double horizon = 0.0;
  double integral = 0.0;  // int_0^horizon int a |phi_t|^2
  double vx = 0.0;
  double margin = 0.0;    // C * integral - vx
  bool pass = false;
};

/// Observability of the undamped flow with the linear damping a, horizon
/// 1/G_base(1/(2 C Lambda_r)).
HypothesisAReport check_hypothesis_A(const SpectralOperator& op, const DampingProfile& a_profile,
                                     const StatePair& init, const RateFunction& G_base, double C,
                                     const NonlinearInvariants& invariants);

struct PropositionReport {
  HypothesisAReport hypothesis;
  NonlinearInvariants invariants;
  double h = 0.0;
  double s0 = 0.0;
  double window = 0.0;           // 1/G(h)
  bool horizon_capped = false;   // window truncated at the simulation cap
  double lhs = 0.0;              // E(u(s0))
  double first_term = 0.0;       // h ((r-1) + X)
  double flux_term = 0.0;        // dissipation over [s0, s0 + window]
  double margin = 0.0;           // first_term + flux_term - lhs, i.e. c = 1
  double required_c = 0.0;       // lhs / (first_term + flux_term)
};

/// Evaluates both sides of
///   E(u(s0)) <= c h ((r-1) + X) + c int_{s0}^{s0+1/G(h)} int a g(u_t) u_t
/// with G(h) = C h^(2r+1) F(h)^(4(r+1)). Throws HypothesisUnmet when the
/// observability prerequisite fails.
PropositionReport proposition_check(const SpectralOperator& op, const DampingProfile& a_profile,
                                    const NonlinearDamping& g, const StatePair& init, double h, double s0, double C,
                                    const RateFunction& G_base, double dt = 1e-2, double T_cap = 200.0);

struct RecursionReplay {
  double c = 0.0;
  std::string c_source;  // "supplied", "fitted-window" or "fitted-step"
  std::size_t first_case_checked = 0;
  std::size_t first_case_violations = 0;
  std::size_t second_case_checked = 0;
  std::size_t second_case_violations = 0;
  std::size_t step_checked = 0;     // H(s + 1/G(H(s))) <= c/(c+1) H(s)
  std::size_t step_violations = 0;
  std::size_t skipped = 0;
};

struct ExponentFit {
  std::string label;
  double exponent = 0.0;
  double C = 0.0;
  bool decay_witnessed = false;
};

struct NonlinearDecayOptions {
  double c0 = 1.0;
  double c_prime = 1.0;
  double C = 1.0;  // constant of the observability hypothesis and of G(h)
  std::optional<double> c;
  FitWindow window{};
  std::size_t stride = 0;  // 0 picks about 20000 samples
};

struct NonlinearDecayReport {
  Verdict verdict = Verdict::fail;
  std::string note;
  NonlinearInvariants invariants;
  HypothesisAReport hypothesis;
  DilationReport dilation;
  std::optional<DecayFit> fit;
  RecursionReplay replay;
  std::optional<PowerExponents> exponents;
  std::vector<ExponentFit> exponent_fits;
  double identity_residual = 0.0;
  NewtonStats newton;
  EnergyTrace trace;
};

/// Simulates the nonlinear system and fits
///   E(u(t)) <= C_fit G^-1(c'/t) ((r-1) + X)
/// on the window, replaying the dilation recursion on
/// H(s) = E(u(s)) / ((r-1) + X).
NonlinearDecayReport nonlinear_decay_check(const SpectralOperator& op, const DampingProfile& a_profile,
                                           const NonlinearDamping& g, const StatePair& init, double T_sim,
                                           double dt, const RateFunction& G_base,
                                           const NonlinearDecayOptions& options = {});

}  // namespace dwlab
