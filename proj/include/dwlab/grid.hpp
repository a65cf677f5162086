#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace dwlab {

/// n points log-spaced on [lo, hi], endpoints exact.
inline std::vector<double> log_space(double lo, double hi, std::size_t n) {
  std::vector<double> out;
  if (n == 0) return out;
  if (n == 1) return {lo};
  out.reserve(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1)));
  out.front() = lo;
  out.back() = hi;
  return out;
}

inline std::vector<double> lin_space(double lo, double hi, std::size_t n) {
  std::vector<double> out;
  if (n == 0) return out;
  if (n == 1) return {lo};
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  out.back() = hi;
  return out;
}

}  // namespace dwlab
