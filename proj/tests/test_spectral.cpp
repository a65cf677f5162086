#include "dwlab/errors.hpp"
#include "dwlab/spectral.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <numbers>

using namespace dwlab;
using std::numbers::pi;

namespace {

Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

StatePair random_state(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return {to_vector(oracle::gaussian(rng, n, 2.0)), to_vector(oracle::gaussian(rng, n, 1.0))};
}

}  // namespace

TEST_CASE("dirichlet eigenvalues") {
  CHECK(build_dirichlet_operator(1, pi).eigenvalue(0) == doctest::Approx(1.0).epsilon(1e-15));

  const auto op3 = build_dirichlet_operator(3, 1.0);
  for (int k = 1; k <= 3; ++k) CHECK(op3.eigenvalue(k - 1) == doctest::Approx(k * k * pi * pi).epsilon(1e-15));

  const auto op64 = build_dirichlet_operator(64, 1.0);
  CHECK(op64.eigenvalue(63) / op64.eigenvalue(0) == doctest::Approx(4096.0).epsilon(1e-14));
  for (std::size_t k = 1; k < op64.n_modes(); ++k) CHECK(op64.eigenvalue(k) > op64.eigenvalue(k - 1));

  CHECK_THROWS_AS(build_dirichlet_operator(0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(build_dirichlet_operator(4, 0.0), InvalidArgument);
  CHECK_THROWS_AS(build_dirichlet_operator(4, -1.0), InvalidArgument);
}

TEST_CASE("eigenfunctions are the normalized sines") {
  const auto op = build_dirichlet_operator(5, 2.0);
  for (std::size_t k = 0; k < 5; ++k)
    CHECK(op.eigenfunction(k, 0.3) == doctest::Approx(oracle::sine_mode(static_cast<int>(k) + 1, 0.3, 2.0)));
}

TEST_CASE("constant damping gives multiples of the identity") {
  const auto op = build_dirichlet_operator(16, 1.0);
  const auto one = build_damping(op, DampingProfile::constant(1.0));
  CHECK((one.coupling - Matrix::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-14);
  const auto zero = build_damping(op, DampingProfile::constant(0.0));
  CHECK(zero.coupling.cwiseAbs().maxCoeff() == 0.0);
  const auto full = build_damping(op, DampingProfile::interval(0.0, 1.0, 1.0));
  CHECK((full.coupling - Matrix::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("interval coupling matches adaptive quadrature") {
  const double L = 1.7;
  const auto op = build_dirichlet_operator(24, L);
  const double alpha = 0.31;
  const double beta = 1.12;
  const double a0 = 2.5;
  const auto damp = build_damping(op, DampingProfile::interval(alpha, beta, a0));
  double worst = 0.0;
  for (int j = 1; j <= 24; ++j)
    for (int k = j; k <= 24; ++k) {
      const double ref = oracle::integrate(
          [&](double x) { return a0 * oracle::sine_mode(j, x, L) * oracle::sine_mode(k, x, L); }, alpha, beta);
      worst = std::max(worst, std::abs(damp.coupling(j - 1, k - 1) - ref));
    }
  CHECK(worst <= 1e-10);
}

TEST_CASE("coupling is symmetric, PSD and additive over disjoint pieces") {
  const auto op = build_dirichlet_operator(32, 1.0);
  const auto left = build_damping(op, DampingProfile::interval(0.1, 0.3, 1.0));
  const auto right = build_damping(op, DampingProfile::interval(0.5, 0.8, 2.0));
  const auto both = build_damping(op, DampingProfile::pieces({{0.1, 0.3, 1.0}, {0.5, 0.8, 2.0}}));
  CHECK((both.coupling - both.coupling.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((both.coupling - left.coupling - right.coupling).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(both.coupling);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-12);
}

TEST_CASE("damping interval must lie in the domain") {
  const auto op = build_dirichlet_operator(4, 1.0);
  CHECK_THROWS_AS(build_damping(op, DampingProfile::interval(0.5, 1.5, 1.0)), InvalidArgument);
  CHECK_THROWS_AS(build_damping(op, DampingProfile::interval(-0.1, 0.5, 1.0)), InvalidArgument);
  CHECK_THROWS_AS(DampingProfile::interval(0.6, 0.4, 1.0), InvalidArgument);
  CHECK_THROWS_AS(DampingProfile::constant(-1.0), InvalidArgument);
}

TEST_CASE("energy examples") {
  const auto op = build_dirichlet_operator(4, pi);
  CHECK(energy(StatePair::velocity_mode(4, 0), op) == doctest::Approx(0.5));
  CHECK(energy(StatePair::position_mode(4, 0), op) == doctest::Approx(0.5));
  CHECK_THROWS_AS(energy(StatePair::zero(3), op), InvalidArgument);
}

TEST_CASE("energy equals the physical-space integral") {
  const double L = 1.3;
  const std::size_t n = 12;
  const auto op = build_dirichlet_operator(static_cast<int>(n), L);
  const StatePair s = random_state(n, 7);
  auto ux = [&](double x) {
    double v = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double kk = static_cast<double>(k + 1) * pi / L;
      v += s.w0(static_cast<Eigen::Index>(k)) * std::sqrt(2.0 / L) * kk * std::cos(kk * x);
    }
    return v;
  };
  auto ut = [&](double x) {
    double v = 0.0;
    for (std::size_t k = 0; k < n; ++k) v += s.w1(static_cast<Eigen::Index>(k)) * oracle::sine_mode(static_cast<int>(k) + 1, x, L);
    return v;
  };
  const double ref = 0.5 * oracle::integrate([&](double x) { return ut(x) * ut(x) + ux(x) * ux(x); }, 0.0, L);
  CHECK(std::abs(energy(s, op) - ref) <= 1e-12 * ref);
  CHECK(energy(s, op) == doctest::Approx(0.5 * graph_norms(s, op).vx).epsilon(1e-15));
}

TEST_CASE("graph norms and the Lambda ratio") {
  const auto op = build_dirichlet_operator(10, 1.0);
  for (std::size_t k : {0u, 4u, 9u}) {
    CHECK(lambda_ratio(StatePair::position_mode(10, k), op) == doctest::Approx(op.eigenvalue(k)));
    CHECK(lambda_ratio(StatePair::velocity_mode(10, k), op) == doctest::Approx(op.eigenvalue(k)));
  }
  StatePair mixed = StatePair::position_mode(10, 1);
  mixed.w1(6) = 0.7;
  const double L = lambda_ratio(mixed, op);
  CHECK(L >= op.eigenvalue(1));
  CHECK(L <= op.eigenvalue(6));

  CHECK_THROWS_AS(lambda_ratio(StatePair::zero(10), op), DegenerateInput);
  const GraphNorms z = graph_norms(StatePair::zero(10), op);
  CHECK(z.vx == 0.0);
  CHECK(z.da_v == 0.0);
  CHECK(z.weak == 0.0);
}

TEST_CASE("norm properties on random states") {
  const auto op = build_dirichlet_operator(20, 1.0);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const StatePair s = random_state(20, seed);
    const GraphNorms g = graph_norms(s, op);
    CHECK(g.weak * op.eigenvalue(0) <= g.vx * (1.0 + 1e-14));
    const double L = lambda_ratio(s, op);
    CHECK(L >= op.eigenvalue(0) * (1.0 - 1e-14));
    CHECK(L <= op.eigenvalue(19) * (1.0 + 1e-14));
    const StatePair scaled = s * -3.0;
    CHECK(lambda_ratio(scaled, op) == doctest::Approx(L).epsilon(1e-14));
    const GraphNorms gs = graph_norms(scaled, op);
    CHECK(gs.vx == doctest::Approx(9.0 * g.vx).epsilon(1e-14));
    CHECK(gs.da_v == doctest::Approx(9.0 * g.da_v).epsilon(1e-14));
    CHECK(gs.weak == doctest::Approx(9.0 * g.weak).epsilon(1e-14));
  }
}
