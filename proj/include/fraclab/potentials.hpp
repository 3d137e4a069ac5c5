#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fraclab/points.hpp"

namespace fraclab {

enum class GrowthKind { power, exponential, logarithmic, constant, counterexample, custom };

struct GrowthClass {
  GrowthKind kind = GrowthKind::custom;
  double param = 0.0;  // beta, kappa, or c; unused for counterexample/custom
};

// A locally bounded potential q >= 0, with growth metadata used by the
// IU diagnostics.
struct Potential {
  std::function<double(std::span<const double>)> evaluate;
  GrowthClass growth;
  std::string description;

  double operator()(std::span<const double> x) const { return evaluate(x); }
};

Potential make_power(double beta);        // |x|^beta
Potential make_exp(double beta);          // exp(beta |x|)
Potential make_log(double kappa);         // kappa log(1+|x|)
Potential make_const(double c);           // c >= 0

// Radial staircase potential with plateaus a_n and linear ramps of full width
// 2 r_{n+1} at integer radii, r_n = a_n^{-1/alpha}:
//   q = a_1                     on |x| <= r_1
//   q = a_n                     on [n-1+r_n, n-r_{n+1}]
//   ramp a_n -> a_{n+1}         on [n-r_{n+1}, n+r_{n+1}]
// Beyond the configured terms the last value is frozen.
struct CounterexampleSpec {
  std::vector<double> a;  // a_1 .. a_{terms+1}; a_1 > 2^alpha, increasing ratios
  double alpha = 1.0;

  // a_n = 2^{alpha + n^2}: ratios a_{n+1}/a_n = 2^{2n+1} grow without bound.
  static CounterexampleSpec default_sequence(double alpha, int terms);

  std::vector<double> radii() const;  // r_n = a_n^{-1/alpha}
  void validate() const;              // throws ConfigError on a bad sequence
};

Potential make_counterexample(const CounterexampleSpec& spec, int d, double alpha);

// Smallest M >= 1 with M^{-1}(1+q(x)) <= 1+q(y) <= M(1+q(x)) over probe pairs
// with |x-y| <= 1. ("1+q" on both sides; the literal unit-ball comparability
// inequality fails at zeros of q for q = |x|^beta.)
double comparability_constant(const Potential& q, double region_radius,
                              const std::vector<Point>& probe_grid);

// Convenience probe grid: m+1 evenly spaced points on [-R, R] (d = 1).
std::vector<Point> uniform_grid_1d(double region_radius, int m);

// Smallest radius r (on a radial search grid) with q >= 1 for the probed
// |x| >= r; used by diagnostics to place condition-(iii) experiments.
double radius_where_q_exceeds_one(const Potential& q, int d, double r_max = 1e6);

}  // namespace fraclab
