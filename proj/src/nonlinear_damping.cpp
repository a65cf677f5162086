#include "dwlab/nonlinear_damping.hpp"

#include "dwlab/errors.hpp"
#include "dwlab/grid.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace dwlab {

namespace {

constexpr double kSmall = 1e-6;
constexpr double kLarge = 1e3;
constexpr double kBandSlack = 1e-9;

double local_slope(const std::function<double(double)>& g, double a, double b) {
  return std::log(std::abs(g(a)) / std::abs(g(b))) / std::log(a / b);
}

double tidy(double v) { return std::round(v * 1e9) / 1e9; }

}  // namespace

DampingLaw linear_law() {
  return {"linear", [](double s) { return s; }, [](double) { return 1.0; }};
}

DampingLaw cubic_law() {
  return {"cubic", [](double s) { return s * s * s; }, [](double s) { return 3.0 * s * s; }};
}

DampingLaw tabulated_law(std::vector<std::pair<double, double>> table) {
  if (table.size() < 2) throw InvalidArgument("tabulated_law: need at least two points");
  std::sort(table.begin(), table.end());
  for (std::size_t i = 1; i < table.size(); ++i)
    if (!(table[i].first > table[i - 1].first)) throw InvalidArgument("tabulated_law: duplicate abscissa");
  auto segment = [table](double s) {
    auto it = std::upper_bound(table.begin(), table.end(), s,
                               [](double v, const std::pair<double, double>& e) { return v < e.first; });
    if (it == table.begin()) ++it;
    if (it == table.end()) --it;
    return std::pair{*(it - 1), *it};
  };
  auto g = [segment](double s) {
    const auto [left, right] = segment(s);
    const double slope = (right.second - left.second) / (right.first - left.first);
    return left.second + slope * (s - left.first);
  };
  auto dg = [segment](double s) {
    const auto [left, right] = segment(s);
    return (right.second - left.second) / (right.first - left.first);
  };
  return {"table", g, dg};
}

DampingLaw custom_law(std::string kind, std::function<double(double)> g, std::function<double(double)> dg) {
  if (!dg) {
    dg = [g](double s) {
      const double h = 1e-6 * std::max(1.0, std::abs(s));
      return (g(s + h) - g(s - h)) / (2.0 * h);
    };
  }
  return {std::move(kind), std::move(g), std::move(dg)};
}

NonlinearDamping validate_damping(const DampingLaw& law, int dimension) {
  if (!law.g || !law.dg) throw InvalidArgument("validate_damping: law has no callable");
  if (law.g(0.0) != 0.0) throw InvalidDamping("g(0) must vanish", 0.0);

  const auto positive = log_space(kSmall, kLarge, 2001);
  std::vector<double> grid;
  grid.reserve(2 * positive.size() + 1);
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) grid.push_back(-*it);
  grid.push_back(0.0);
  grid.insert(grid.end(), positive.begin(), positive.end());

  double prev = -std::numeric_limits<double>::infinity();
  for (double s : grid) {
    const double v = law.g(s);
    if (!std::isfinite(v)) throw InvalidDamping("g is not finite", s);
    if (s * v < 0.0) throw InvalidDamping("sign condition s*g(s) >= 0 violated", s);
    if (!(v > prev)) throw InvalidDamping("g is not strictly increasing", s);
    prev = v;
  }

  GrowthBands bands;
  bands.dimension = dimension;
  double slope_hi = 0.0;
  double slope_lo = std::numeric_limits<double>::infinity();
  double tail_hi = 0.0;
  double tail_lo = std::numeric_limits<double>::infinity();
  for (double sign : {1.0, -1.0}) {
    const double near = local_slope(law.g, sign * kSmall, sign * 1e-4);
    const double far = local_slope(law.g, sign * 1e2, sign * kLarge);
    slope_hi = std::max(slope_hi, near);
    slope_lo = std::min(slope_lo, near);
    tail_hi = std::max(tail_hi, far);
    tail_lo = std::min(tail_lo, far);
  }
  if (!(slope_lo > 0.0)) throw InvalidDamping("g is flat at the origin", kSmall);
  bands.r = tidy(std::max({1.0, slope_hi, 1.0 / slope_lo}));
  bands.p = tidy(std::max(1.0, tail_hi));
  bands.k = tidy(std::clamp(tail_lo, 0.0, 1.0));

  // Each constant is an extreme of |g(s)| / |s|^q over one band, located on
  // the grid and polished by Brent's method between the neighbouring knots.
  auto extreme = [&](double lo, double hi, double q, bool maximize) {
    std::vector<double> knots;
    for (double a : positive)
      if (a > lo && a < hi) knots.push_back(a);
    knots.insert(knots.begin(), lo);
    knots.push_back(hi);
    double best = maximize ? 0.0 : std::numeric_limits<double>::infinity();
    for (double sign : {1.0, -1.0}) {
      auto ratio = [&](double a) { return std::abs(law.g(sign * a)) / std::pow(a, q); };
      std::size_t arg = 0;
      double local = maximize ? -1.0 : std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < knots.size(); ++i) {
        const double v = ratio(knots[i]);
        if (maximize ? v > local : v < local) {
          local = v;
          arg = i;
        }
      }
      const double a0 = knots[arg == 0 ? 0 : arg - 1];
      const double a1 = knots[std::min(arg + 1, knots.size() - 1)];
      if (a1 > a0) {
        auto objective = [&](double u) {
          const double v = ratio(std::exp(u));
          return maximize ? -v : v;
        };
        const auto [u, val] = boost::math::tools::brent_find_minima(objective, std::log(a0), std::log(a1), 52);
        (void)u;
        local = maximize ? std::max(local, -val) : std::min(local, val);
      }
      best = maximize ? std::max(best, local) : std::min(best, local);
    }
    return best;
  };
  const double c1 = extreme(kSmall, 1.0, bands.r, false);
  const double c2 = extreme(kSmall, 1.0, 1.0 / bands.r, true);
  const double c3 = extreme(1.0, kLarge, bands.k, false);
  const double c4 = extreme(1.0, kLarge, bands.p, true);
  bands.c1 = c1 * (1.0 - kBandSlack);
  bands.c2 = c2 * (1.0 + kBandSlack);
  bands.c3 = c3 * (1.0 - kBandSlack);
  bands.c4 = c4 * (1.0 + kBandSlack);
  bands.condition_iii_first = (dimension - 2) * (1.0 - bands.k) <= 4.0 * bands.r;
  bands.condition_iii_second = (dimension - 2) * (bands.p - 1.0) <= 1.0;
  return NonlinearDamping{law, bands};
}

BandViolations count_band_violations(const NonlinearDamping& damping, std::size_t points) {
  const auto& b = damping.bands;
  BandViolations out;
  const auto half = log_space(kSmall, kLarge, std::max<std::size_t>(2, points / 2));
  for (double a : half) {
    for (double sign : {1.0, -1.0}) {
      const double v = std::abs(damping.g(sign * a));
      ++out.checked;
      bool ok = true;
      if (a <= 1.0) ok = ok && b.c1 * std::pow(a, b.r) <= v && v <= b.c2 * std::pow(a, 1.0 / b.r);
      if (a >= 1.0) ok = ok && b.c3 * std::pow(a, b.k) <= v && v <= b.c4 * std::pow(a, b.p);
      if (!ok) ++out.violations;
    }
  }
  return out;
}

}  // namespace dwlab
