#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace fraclab {

using Point = std::vector<double>;

inline double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline double distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline Point point1(double x) { return Point{x}; }

}  // namespace fraclab
