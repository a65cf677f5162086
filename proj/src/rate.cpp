#include "dwlab/rate.hpp"

#include "dwlab/errors.hpp"
#include "dwlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dwlab {

namespace {

constexpr std::size_t kMonotoneSamples = 256;
constexpr int kMaxBisection = 400;
constexpr int kMaxBracketHalvings = 1100;

std::vector<double> check_grid(double lo, double hi) {
  if (lo >= hi) return {hi};
  return log_space(lo, hi, kMonotoneSamples);
}

// Classifies a callable on a log grid; used where monotonicity is derived
// rather than declared.
Monotonicity classify(const RateFunction::Eval& f, double lo, double hi) {
  const auto grid = check_grid(lo, hi);
  bool up = true;
  bool down = true;
  double prev = f(grid.front());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double v = f(grid[i]);
    up = up && v > prev;
    down = down && v < prev;
    prev = v;
  }
  if (up) return Monotonicity::increasing;
  if (down) return Monotonicity::decreasing;
  return Monotonicity::unchecked;
}

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::string to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::increasing:
      return "increasing";
    case Monotonicity::decreasing:
      return "decreasing";
    case Monotonicity::unchecked:
      return "unchecked";
  }
  return "unchecked";
}

RateFunction::RateFunction(std::string kind, std::map<std::string, double> params, Eval eval, double x_max,
                           Monotonicity monotonicity, double x_min, std::optional<double> check_floor)
    : kind_(std::move(kind)),
      params_(std::move(params)),
      eval_(std::move(eval)),
      x_min_(x_min),
      x_max_(x_max),
      monotonicity_(monotonicity),
      check_floor_(0.0) {
  if (!(x_max_ > 0.0) || !(x_min_ >= 0.0) || !(x_min_ < x_max_))
    throw InvalidArgument("RateFunction " + kind_ + ": invalid domain");
  check_floor_ = std::max(x_min_, check_floor.value_or(x_max_ * 1e-6));
  if (check_floor_ <= 0.0) check_floor_ = x_max_ * 1e-6;
  if (monotonicity_ == Monotonicity::unchecked) return;

  const auto grid = check_grid(check_floor_, x_max_);
  double prev = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = eval_(grid[i]);
    if (!(v > 0.0) || !std::isfinite(v))
      throw InvalidArgument("RateFunction " + kind_ + ": not positive at x=" + format_number(grid[i]));
    if (i > 0) {
      const bool ok = monotonicity_ == Monotonicity::increasing ? v > prev : v < prev;
      if (!ok)
        throw InvalidArgument("RateFunction " + kind_ + ": not strictly " + to_string(monotonicity_) +
                              " near x=" + format_number(grid[i]));
    }
    prev = v;
  }
}

double RateFunction::operator()(double x) const {
  if (!in_domain(x))
    throw RangeError("RateFunction " + kind_ + ": x=" + format_number(x) + " outside domain", x_min_, x_max_);
  return eval_(x);
}

std::string RateFunction::describe() const {
  std::ostringstream os;
  os << kind_ << "(";
  bool first = true;
  for (const auto& [name, value] : params_) {
    if (!first) os << ", ";
    os << name << "=" << value;
    first = false;
  }
  os << ")";
  return os.str();
}

std::pair<double, double> RateFunction::range() const {
  const double edge_x = x_min_ > 0.0 ? x_min_ : std::numeric_limits<double>::min();
  const double edge = eval_(edge_x);
  const double top = eval_(x_max_);
  return edge <= top ? std::pair{edge, top} : std::pair{top, edge};
}

bool RateFunction::in_range(double y) const {
  if (monotonicity_ == Monotonicity::unchecked) return false;
  const auto [lo, hi] = range();
  return y >= lo && y <= hi && y > 0.0;
}

RateFunction preset_power(double p, double r0) {
  if (!std::isfinite(p) || (p >= -0.5 && p <= 0.0))
    throw InvalidArgument("preset_power: p must lie outside [-1/2, 0] (got " + format_number(p) + ")");
  if (!(r0 > 0.0)) throw InvalidArgument("preset_power: r0 must be positive");
  const auto mono = p > 0.0 ? Monotonicity::increasing : Monotonicity::decreasing;
  return RateFunction("power", {{"p", p}, {"r0", r0}}, [p](double x) { return std::pow(x, p); }, r0, mono);
}

RateFunction preset_exp(double p, double r0) {
  if (!(p > 0.0)) throw InvalidArgument("preset_exp: p must be positive (got " + format_number(p) + ")");
  if (!(r0 > 0.0)) throw InvalidArgument("preset_exp: r0 must be positive");
  // exp(-x^-p) underflows once x^-p passes ~700; verify monotonicity above that.
  const double floor = std::min(std::pow(600.0, -1.0 / p), 0.1 * r0);
  return RateFunction(
      "exp", {{"p", p}, {"r0", r0}}, [p](double x) { return std::exp(-std::pow(x, -p)) / std::sqrt(x); }, r0,
      Monotonicity::increasing, 0.0, floor);
}

RateFunction tabulated_rate(std::vector<std::pair<double, double>> table) {
  if (table.size() < 2) throw InvalidArgument("tabulated_rate: need at least two points");
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (!(table[i].first > 0.0) || !(table[i].second > 0.0))
      throw InvalidArgument("tabulated_rate: x and G(x) must be positive");
    if (i > 0 && !(table[i].first > table[i - 1].first))
      throw InvalidArgument("tabulated_rate: x must be strictly increasing");
  }
  const bool up = table[1].second > table[0].second;
  for (std::size_t i = 1; i < table.size(); ++i) {
    const bool step_up = table[i].second > table[i - 1].second;
    const bool step_down = table[i].second < table[i - 1].second;
    if ((up && !step_up) || (!up && !step_down))
      throw InvalidArgument("tabulated_rate: values not strictly monotone at x=" + format_number(table[i].first));
  }
  const double x_lo = table.front().first;
  const double x_hi = table.back().first;
  auto eval = [table = std::move(table)](double x) {
    auto it = std::upper_bound(table.begin(), table.end(), x,
                               [](double v, const std::pair<double, double>& e) { return v < e.first; });
    if (it == table.begin()) return table.front().second;
    if (it == table.end()) return table.back().second;
    const auto& [x1, y1] = *it;
    const auto& [x0, y0] = *(it - 1);
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
  };
  return RateFunction("table", {{"points", 0.0}}, std::move(eval), x_hi,
                      up ? Monotonicity::increasing : Monotonicity::decreasing, x_lo, x_lo);
}

RateFunction make_F(const RateFunction& G) {
  auto eval = [G](double x) {
    const double g = G(x);
    return x * g * g;
  };
  // Squaring G can underflow where G itself is still normal.
  double floor = G.check_floor();
  while (floor < G.x_max() && !(eval(floor) > 1e-280)) floor = std::min(2.0 * floor, G.x_max());
  const auto mono = G.increasing() ? Monotonicity::increasing : classify(eval, floor, G.x_max());
  auto params = G.params();
  return RateFunction("F[" + G.kind() + "]", std::move(params), std::move(eval), G.x_max(), mono, G.x_min(), floor);
}

double inverse(const RateFunction& f, double y) {
  if (f.monotonicity() == Monotonicity::unchecked)
    throw InvalidArgument("inverse: rate function " + f.describe() + " has no verified monotonicity");
  const auto [lo_y, hi_y] = f.range();
  if (!f.in_range(y))
    throw RangeError("inverse of " + f.describe() + ": y=" + format_number(y) + " outside range", lo_y, hi_y);

  const bool up = f.increasing();
  // below(x): f(x) lies on the small-x side of y.
  auto below = [&](double fx) { return up ? fx < y : fx > y; };

  double hi = f.x_max();
  double fhi = f(hi);
  if (fhi == y) return hi;
  double lo = std::max(0.5 * hi, f.x_min());
  double flo = f(lo);
  for (int i = 0; i < kMaxBracketHalvings && !below(flo) && flo != y; ++i) {
    hi = lo;
    fhi = flo;
    const double next = std::max(0.5 * lo, f.x_min());
    if (next == lo || next <= 0.0) break;
    lo = next;
    flo = f(lo);
  }
  if (flo == y) return lo;

  for (int i = 0; i < kMaxBisection; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == y) return mid;
    if (below(fm)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return std::abs(flo - y) <= std::abs(fhi - y) ? lo : hi;
}

void require_increasing(const RateFunction& G, const std::string& context) {
  if (!G.increasing())
    throw InvalidArgument(context + ": rate function " + G.describe() + " must be increasing (is " +
                          to_string(G.monotonicity()) + ")");
}

XFinvReport xFinv_profile(const RateFunction& G, const std::vector<double>& grid) {
  const RateFunction F = make_F(G);
  XFinvReport report;
  std::optional<double> prev;
  for (double x : grid) {
    if (!(x > 0.0) || !F.in_range(1.0 / x)) {
      ++report.skipped;
      continue;
    }
    const double value = x * inverse(F, 1.0 / x);
    ++report.evaluated;
    if (prev && value < *prev - 1e-12 * std::abs(*prev)) {
      report.increasing = false;
      if (!report.first_violation) report.first_violation = x;
    }
    prev = value;
  }
  return report;
}

bool check_xFinv_increasing(const RateFunction& G, const std::vector<double>& grid) {
  return xFinv_profile(G, grid).increasing;
}

double nonlinear_G(double h, double C, double r, const RateFunction& G_base) {
  if (!(h > 0.0)) throw InvalidArgument("nonlinear_G: h must be positive");
  const double g = G_base(h);
  const double F = h * g * g;
  return C * std::pow(h, 2.0 * r + 1.0) * std::pow(F, 4.0 * (r + 1.0));
}

RateFunction make_nonlinear_G(double C, double r, const RateFunction& G_base) {
  if (!(C > 0.0)) throw InvalidArgument("make_nonlinear_G: C must be positive");
  if (!(r >= 1.0)) throw InvalidArgument("make_nonlinear_G: r must be >= 1");
  auto eval = [C, r, G_base](double h) { return nonlinear_G(h, C, r, G_base); };
  // Pull the verification floor up to where the high power stays normal.
  double floor = G_base.x_max();
  while (floor > G_base.check_floor() && eval(0.5 * floor) > 1e-280) floor *= 0.5;
  floor = std::max(floor, G_base.check_floor());
  const auto mono = G_base.increasing() ? Monotonicity::increasing : classify(eval, floor, G_base.x_max());
  auto params = G_base.params();
  params["C"] = C;
  params["r"] = r;
  return RateFunction("nonlinear[" + G_base.kind() + "]", std::move(params), std::move(eval), G_base.x_max(), mono,
                      G_base.x_min(), floor);
}

PowerExponents nonlinear_power_exponents(double p, double r) {
  return PowerExponents{(4.0 * p + 3.0) * (2.0 * r + 1.0) - 1.0,
                        (2.0 * r + 1.0) + 4.0 * (r + 1.0) * (2.0 * p + 1.0)};
}

DilationReport dilation_profile(const RateFunction& G, double c0, double c, const std::vector<double>& grid) {
  if (!(c > 0.0) || !(c0 >= 0.0)) throw InvalidArgument("dilation condition: need c > 0, c0 >= 0");
  DilationReport report;
  report.worst_margin = std::numeric_limits<double>::infinity();
  const double factor = c / (c + 1.0);
  for (double x : grid) {
    const double stretched = x * (c0 + 1.0);
    if (!G.in_range(x) || !G.in_range(stretched)) {
      ++report.skipped;
      continue;
    }
    const double left = inverse(G, x);
    const double margin = left - factor * inverse(G, stretched);
    ++report.evaluated;
    report.worst_margin = std::min(report.worst_margin, margin);
    if (margin < -1e-12 * std::abs(left)) {
      report.holds = false;
      if (!report.first_violation) report.first_violation = x;
    }
  }
  return report;
}

bool check_G_dilation_condition(const RateFunction& G, double c0, double c, const std::vector<double>& grid) {
  return dilation_profile(G, c0, c, grid).holds;
}

}  // namespace dwlab
