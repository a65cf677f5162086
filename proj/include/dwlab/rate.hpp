#pragma once

// Rate functions: the decay generator G, F(x) = x G(x)^2, guarded numeric
// inverses and the structural hypotheses the decay theorems rely on.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dwlab {

enum class Monotonicity { increasing, decreasing, unchecked };

std::string to_string(Monotonicity m);

/// A continuous positive function on the domain (x_min, x_max].
///
/// Strict monotonicity is sample-verified on 256 log-spaced points at
/// construction unless `unchecked` is requested. Evaluation outside the
/// domain raises RangeError; inversion is by bracketed bisection.
class RateFunction {
 public:
  using Eval = std::function<double(double)>;

  RateFunction(std::string kind, std::map<std::string, double> params, Eval eval, double x_max,
               Monotonicity monotonicity, double x_min = 0.0, std::optional<double> check_floor = std::nullopt);

  double operator()(double x) const;
  bool in_domain(double x) const { return x > 0.0 && x >= x_min_ && x <= x_max_; }

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  Monotonicity monotonicity() const { return monotonicity_; }
  bool increasing() const { return monotonicity_ == Monotonicity::increasing; }
  const std::string& kind() const { return kind_; }
  const std::map<std::string, double>& params() const { return params_; }
  std::string describe() const;

  /// Closure of the attainable values {f(x) : x in domain}, ordered (lo, hi).
  std::pair<double, double> range() const;
  bool in_range(double y) const;

  /// Lower edge of the sample grid used for the construction-time check.
  double check_floor() const { return check_floor_; }

 private:
  std::string kind_;
  std::map<std::string, double> params_;
  Eval eval_;
  double x_min_;
  double x_max_;
  Monotonicity monotonicity_;
  double check_floor_;
};

/// G(x) = x^p on (0, r0]; p in the band [-1/2, 0] is rejected.
RateFunction preset_power(double p, double r0 = 1.0);

/// G(x) = exp(-x^-p) / sqrt(x) on (0, r0], p > 0.
RateFunction preset_exp(double p, double r0 = 1.0);

/// Piecewise-linear rate through (x, G(x)) pairs; must be strictly monotone.
RateFunction tabulated_rate(std::vector<std::pair<double, double>> table);

/// F(x) = x G(x)^2 on the domain of G.
RateFunction make_F(const RateFunction& G);

/// Solves f(x) = y by bisection. Throws RangeError for y outside f's range.
double inverse(const RateFunction& f, double y);

/// Throws InvalidArgument unless G is verified increasing.
void require_increasing(const RateFunction& G, const std::string& context);

struct XFinvReport {
  bool increasing = true;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;  // grid points where F^-1(1/x) is undefined
  std::optional<double> first_violation;
};

/// Evaluates x -> x F^-1(1/x) on the grid; nondecreasing within 1e-12 slack.
XFinvReport xFinv_profile(const RateFunction& G, const std::vector<double>& grid);
bool check_xFinv_increasing(const RateFunction& G, const std::vector<double>& grid);

/// C h^(2r+1) F(h)^(4(r+1)) with F = make_F(G_base).
double nonlinear_G(double h, double C, double r, const RateFunction& G_base);
RateFunction make_nonlinear_G(double C, double r, const RateFunction& G_base);

/// Exponents of the nonlinear decay rate for G_base = x^p: the closed form
/// (4p+3)(2r+1)-1 quoted for the power case and the exponent
/// (2r+1)+4(r+1)(2p+1) obtained by composing h^(2r+1) F(h)^(4(r+1)).
struct PowerExponents {
  double quoted = 0.0;
  double composed = 0.0;
};
PowerExponents nonlinear_power_exponents(double p, double r);

struct DilationReport {
  bool holds = true;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  double worst_margin = 0.0;  // min of G^-1(x) - c/(c+1) G^-1(x (c0+1))
  std::optional<double> first_violation;
};

/// G^-1(x) >= c/(c+1) G^-1(x (c0+1)) on the grid points inside G's range.
DilationReport dilation_profile(const RateFunction& G, double c0, double c, const std::vector<double>& grid);
bool check_G_dilation_condition(const RateFunction& G, double c0, double c, const std::vector<double>& grid);

}  // namespace dwlab
