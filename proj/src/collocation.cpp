#include "dwlab/collocation.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dwlab {

namespace {

constexpr int kPanelOrder = 16;
// Half-panel phase that a 16-point rule integrates to ~1e-16.
constexpr double kMaxHalfPanelPhase = 4.0;

}  // namespace

ModalCollocation::ModalCollocation(const SpectralOperator& op, const DampingProfile& profile,
                                   int points_per_mode) {
  using Rule = boost::math::quadrature::gauss<double, kPanelOrder>;
  const double length = op.length();
  const auto n = static_cast<int>(op.n_modes());

  std::vector<double> breaks{0.0, length};
  for (const auto& piece : profile.resolved(length)) {
    breaks.push_back(std::clamp(piece.alpha, 0.0, length));
    breaks.push_back(std::clamp(piece.beta, 0.0, length));
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  const double top_frequency = 2.0 * n * std::numbers::pi / length;
  const double resolved_width = 2.0 * kMaxHalfPanelPhase / top_frequency;
  const double min_nodes = static_cast<double>(points_per_mode) * n;
  const double width_for_count = length * kPanelOrder / min_nodes;
  const double panel_width = std::min(resolved_width, width_for_count);

  std::vector<double> x;
  std::vector<double> w;
  const auto& abscissa = Rule::abscissa();
  const auto& weight = Rule::weights();
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    const double lo = breaks[b];
    const double hi = breaks[b + 1];
    const double a_mid = profile.value(0.5 * (lo + hi), length);
    if (a_mid == 0.0) continue;
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / panel_width)));
    const double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double centre = lo + (p + 0.5) * h;
      for (std::size_t i = 0; i < abscissa.size(); ++i) {
        const double offset = 0.5 * h * abscissa[i];
        const double wi = 0.5 * h * weight[i] * a_mid;
        x.push_back(centre + offset);
        w.push_back(wi);
        if (abscissa[i] != 0.0) {
          x.push_back(centre - offset);
          w.push_back(wi);
        }
      }
    }
  }

  const auto q = static_cast<Eigen::Index>(x.size());
  nodes_ = Eigen::Map<const Vector>(x.data(), q);
  weighted_ = Eigen::Map<const Vector>(w.data(), q);
  basis_.resize(q, n);
  const double scale = std::sqrt(2.0 / length);
  for (Eigen::Index i = 0; i < q; ++i)
    for (int k = 0; k < n; ++k) basis_(i, k) = scale * std::sin((k + 1) * std::numbers::pi * nodes_(i) / length);
}

Matrix ModalCollocation::weighted_gram(const Vector& nodal) const {
  const Vector d = weighted_.cwiseProduct(nodal);
  return basis_.transpose() * d.asDiagonal() * basis_;
}

}  // namespace dwlab
