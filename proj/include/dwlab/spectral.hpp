#pragma once

// Spectral representation of the 1D Dirichlet Laplacian on (0, L), the
// bounded damping operator built from a profile a(x) >= 0, states in the
// eigenbasis, and the graph norms every pipeline is measured in.

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace dwlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Diagonal operator A with eigenvalues (k pi / L)^2 and eigenfunctions
/// sqrt(2/L) sin(k pi x / L), k = 1..n_modes.
class SpectralOperator {
 public:
  SpectralOperator(Vector eigenvalues, double length);

  std::size_t n_modes() const { return static_cast<std::size_t>(eigenvalues_.size()); }
  double length() const { return length_; }
  const Vector& eigenvalues() const { return eigenvalues_; }
  double eigenvalue(std::size_t k) const { return eigenvalues_(static_cast<Eigen::Index>(k)); }
  /// sqrt(lambda_k), the angular frequency of mode k.
  const Vector& frequencies() const { return frequencies_; }

  /// Value of the normalized eigenfunction of mode index `k` (0-based) at x.
  double eigenfunction(std::size_t k, double x) const;

 private:
  Vector eigenvalues_;
  Vector frequencies_;
  double length_;
};

SpectralOperator build_dirichlet_operator(int n_modes, double length);

/// One indicator piece a0 * 1_[alpha, beta](x).
struct DampingPiece {
  double alpha = 0.0;
  double beta = 0.0;
  double amplitude = 0.0;
};

/// Damping profile a(x): either the constant a0 on the whole domain or a sum
/// of indicator pieces.
class DampingProfile {
 public:
  static DampingProfile constant(double amplitude);
  static DampingProfile interval(double alpha, double beta, double amplitude);
  static DampingProfile pieces(std::vector<DampingPiece> pieces);

  bool is_constant() const { return constant_; }
  double constant_amplitude() const { return constant_amplitude_; }
  const std::vector<DampingPiece>& piece_list() const { return pieces_; }

  /// Pieces with a constant profile resolved to [0, length].
  std::vector<DampingPiece> resolved(double length) const;
  double value(double x, double length) const;
  std::string describe() const;

 private:
  bool constant_ = false;
  double constant_amplitude_ = 0.0;
  std::vector<DampingPiece> pieces_;
};

/// B realized as multiplication by sqrt(a); coupling holds the Gram matrix
/// M_jk = int a e_j e_k so that ||B* v||^2 = v^T M v.
struct DampingMap {
  DampingProfile profile;
  Matrix coupling;
};

DampingMap build_damping(const SpectralOperator& op, const DampingProfile& profile);

/// Position and velocity coefficients in the eigenbasis.
struct StatePair {
  Vector w0;
  Vector w1;

  StatePair() = default;
  StatePair(Vector position, Vector velocity) : w0(std::move(position)), w1(std::move(velocity)) {}

  static StatePair zero(std::size_t n);
  /// Pure mode k (0-based) in position or velocity.
  static StatePair position_mode(std::size_t n, std::size_t k);
  static StatePair velocity_mode(std::size_t n, std::size_t k);

  std::size_t size() const { return static_cast<std::size_t>(w0.size()); }
  bool is_zero() const;
  /// (w0; w1) as one vector of length 2n.
  Vector stacked() const;
  static StatePair from_stacked(const Vector& x);

  StatePair operator*(double c) const { return {w0 * c, w1 * c}; }
  StatePair operator-() const { return {-w0, -w1}; }
};

/// Squared graph norms of a state.
struct GraphNorms {
  double vx = 0.0;    // ||(w0,w1)||^2 in V x X
  double da_v = 0.0;  // ||(w0,w1)||^2 in D(A) x V
  double weak = 0.0;  // ||(w0,w1)||^2 in X x (D(A^1/2))'
};

void check_dimensions(const StatePair& state, const SpectralOperator& op);

GraphNorms graph_norms(const StatePair& state, const SpectralOperator& op);

/// E = 1/2 (sum w1_k^2 + sum lambda_k w0_k^2).
double energy(const StatePair& state, const SpectralOperator& op);

/// Lambda = ||.||^2_{D(A) x V} / ||.||^2_{V x X}.
double lambda_ratio(const StatePair& state, const SpectralOperator& op);

}  // namespace dwlab
