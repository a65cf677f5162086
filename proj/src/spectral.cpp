#include "dwlab/spectral.hpp"

#include "dwlab/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace dwlab {

namespace {

// int_alpha^beta cos(m pi x / L) dx, written with a product-to-sum identity
// so that short intervals do not cancel.
double cosine_integral(int m, double alpha, double beta, double length) {
  if (m == 0) return beta - alpha;
  const double kappa = m * std::numbers::pi / length;
  return 2.0 / kappa * std::cos(0.5 * kappa * (alpha + beta)) * std::sin(0.5 * kappa * (beta - alpha));
}

}  // namespace

SpectralOperator::SpectralOperator(Vector eigenvalues, double length)
    : eigenvalues_(std::move(eigenvalues)), length_(length) {
  if (eigenvalues_.size() == 0) throw InvalidArgument("SpectralOperator: no modes");
  if (!(length_ > 0.0)) throw InvalidArgument("SpectralOperator: length must be positive");
  for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k) {
    if (!(eigenvalues_(k) > 0.0)) throw InvalidArgument("SpectralOperator: eigenvalues must be positive");
    if (k > 0 && !(eigenvalues_(k) > eigenvalues_(k - 1)))
      throw InvalidArgument("SpectralOperator: eigenvalues must be strictly increasing");
  }
  frequencies_ = eigenvalues_.cwiseSqrt();
}

double SpectralOperator::eigenfunction(std::size_t k, double x) const {
  const double kk = static_cast<double>(k + 1);
  return std::sqrt(2.0 / length_) * std::sin(kk * std::numbers::pi * x / length_);
}

SpectralOperator build_dirichlet_operator(int n_modes, double length) {
  if (n_modes < 1) throw InvalidArgument("build_dirichlet_operator: n_modes must be >= 1");
  if (!(length > 0.0)) throw InvalidArgument("build_dirichlet_operator: length must be positive");
  Vector lambda(n_modes);
  for (int k = 0; k < n_modes; ++k) {
    const double kappa = (k + 1) * std::numbers::pi / length;
    lambda(k) = kappa * kappa;
  }
  return SpectralOperator(std::move(lambda), length);
}

DampingProfile DampingProfile::constant(double amplitude) {
  if (!(amplitude >= 0.0)) throw InvalidArgument("damping amplitude must be >= 0");
  DampingProfile p;
  p.constant_ = true;
  p.constant_amplitude_ = amplitude;
  return p;
}

DampingProfile DampingProfile::interval(double alpha, double beta, double amplitude) {
  return pieces({DampingPiece{alpha, beta, amplitude}});
}

DampingProfile DampingProfile::pieces(std::vector<DampingPiece> pieces) {
  for (const auto& piece : pieces) {
    if (!(piece.amplitude >= 0.0)) throw InvalidArgument("damping amplitude must be >= 0");
    if (!(piece.alpha < piece.beta)) throw InvalidArgument("damping interval must satisfy alpha < beta");
  }
  DampingProfile p;
  p.pieces_ = std::move(pieces);
  return p;
}

std::vector<DampingPiece> DampingProfile::resolved(double length) const {
  if (constant_) return {DampingPiece{0.0, length, constant_amplitude_}};
  return pieces_;
}

double DampingProfile::value(double x, double length) const {
  double a = 0.0;
  for (const auto& piece : resolved(length))
    if (x >= piece.alpha && x <= piece.beta) a += piece.amplitude;
  return a;
}

std::string DampingProfile::describe() const {
  std::ostringstream os;
  if (constant_) {
    os << "constant(" << constant_amplitude_ << ")";
    return os.str();
  }
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (i) os << " + ";
    os << pieces_[i].amplitude << "*1[" << pieces_[i].alpha << "," << pieces_[i].beta << "]";
  }
  return os.str();
}

DampingMap build_damping(const SpectralOperator& op, const DampingProfile& profile) {
  const double length = op.length();
  const int n = static_cast<int>(op.n_modes());
  Matrix coupling = Matrix::Zero(n, n);
  for (const auto& piece : profile.resolved(length)) {
    if (piece.alpha < 0.0 || piece.beta > length)
      throw InvalidArgument("build_damping: interval [" + std::to_string(piece.alpha) + ", " +
                            std::to_string(piece.beta) + "] outside [0, L]");
    if (piece.amplitude == 0.0) continue;
    // (2/L) sin(j pi x/L) sin(k pi x/L) = (1/L) [cos((j-k) pi x/L) - cos((j+k) pi x/L)]
    for (int j = 1; j <= n; ++j) {
      for (int k = j; k <= n; ++k) {
        const double entry = piece.amplitude / length *
                             (cosine_integral(k - j, piece.alpha, piece.beta, length) -
                              cosine_integral(k + j, piece.alpha, piece.beta, length));
        coupling(j - 1, k - 1) += entry;
        if (k != j) coupling(k - 1, j - 1) += entry;
      }
    }
  }
  return DampingMap{profile, std::move(coupling)};
}

StatePair StatePair::zero(std::size_t n) {
  return {Vector::Zero(static_cast<Eigen::Index>(n)), Vector::Zero(static_cast<Eigen::Index>(n))};
}

StatePair StatePair::position_mode(std::size_t n, std::size_t k) {
  StatePair s = zero(n);
  s.w0(static_cast<Eigen::Index>(k)) = 1.0;
  return s;
}

StatePair StatePair::velocity_mode(std::size_t n, std::size_t k) {
  StatePair s = zero(n);
  s.w1(static_cast<Eigen::Index>(k)) = 1.0;
  return s;
}

bool StatePair::is_zero() const {
  return std::max(w0.cwiseAbs().maxCoeff(), w1.cwiseAbs().maxCoeff()) == 0.0;
}

Vector StatePair::stacked() const {
  Vector x(w0.size() + w1.size());
  x << w0, w1;
  return x;
}

StatePair StatePair::from_stacked(const Vector& x) {
  const Eigen::Index n = x.size() / 2;
  return {x.head(n), x.tail(n)};
}

void check_dimensions(const StatePair& state, const SpectralOperator& op) {
  const auto n = static_cast<Eigen::Index>(op.n_modes());
  if (state.w0.size() != n || state.w1.size() != n)
    throw InvalidArgument("state dimension " + std::to_string(state.w0.size()) + "/" +
                          std::to_string(state.w1.size()) + " does not match n_modes " + std::to_string(n));
}

GraphNorms graph_norms(const StatePair& state, const SpectralOperator& op) {
  check_dimensions(state, op);
  const Vector& lambda = op.eigenvalues();
  const Vector p2 = state.w0.cwiseAbs2();
  const Vector v2 = state.w1.cwiseAbs2();
  GraphNorms g;
  g.vx = lambda.dot(p2) + v2.sum();
  g.da_v = lambda.cwiseAbs2().dot(p2) + lambda.dot(v2);
  g.weak = p2.sum() + lambda.cwiseInverse().dot(v2);
  return g;
}

double energy(const StatePair& state, const SpectralOperator& op) {
  check_dimensions(state, op);
  return 0.5 * (state.w1.squaredNorm() + op.eigenvalues().dot(state.w0.cwiseAbs2()));
}

double lambda_ratio(const StatePair& state, const SpectralOperator& op) {
  check_dimensions(state, op);
  if (state.is_zero()) throw DegenerateInput("lambda_ratio: state is identically zero");
  const GraphNorms g = graph_norms(state, op);
  return g.da_v / g.vx;
}

}  // namespace dwlab
