#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace dwlab {

/// A scalar feedback law s -> g(s) together with its derivative.
struct DampingLaw {
  std::string kind;
  std::function<double(double)> g;
  std::function<double(double)> dg;
};

DampingLaw linear_law();
DampingLaw cubic_law();
/// Piecewise-linear law through (s, g(s)); extended linearly past the ends.
DampingLaw tabulated_law(std::vector<std::pair<double, double>> table);
/// Arbitrary law; a central difference stands in for a missing derivative.
DampingLaw custom_law(std::string kind, std::function<double(double)> g,
                      std::function<double(double)> dg = nullptr);

/// Growth exponents and constants witnessing
///   c1|s|^r <= |g(s)| <= c2|s|^(1/r)  for |s| <= 1,
///   c3|s|^k <= |g(s)| <= c4|s|^p      for |s| >= 1.
struct GrowthBands {
  double r = 1.0;
  double k = 1.0;
  double p = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 1.0;
  double c4 = 1.0;
  int dimension = 1;
  bool condition_iii_first = true;   // (n-2)(1-k) <= 4r
  bool condition_iii_second = true;  // (n-2)(p-1) <= 1
};

/// A validated law: continuous, strictly increasing, g(0) = 0, s g(s) >= 0,
/// with fitted growth bands.
struct NonlinearDamping {
  DampingLaw law;
  GrowthBands bands;

  double g(double s) const { return law.g(s); }
  double dg(double s) const { return law.dg(s); }
  std::string description() const { return law.kind; }
};

/// Grid-validates the law on |s| in [1e-6, 1e3] and fits the bands.
/// Throws InvalidDamping naming the first witness of a violation.
NonlinearDamping validate_damping(const DampingLaw& law, int dimension = 1);

struct BandViolations {
  std::size_t checked = 0;
  std::size_t violations = 0;
};

/// Re-evaluates the four band inequalities on `points` symmetric samples.
BandViolations count_band_violations(const NonlinearDamping& damping, std::size_t points);

}  // namespace dwlab
