#include "fraclab/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "fraclab/errors.hpp"

namespace fraclab {

Potential make_power(double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("make_power: beta must be > 0");
  char buf[64];
  std::snprintf(buf, sizeof buf, "|x|^%g", beta);
  return Potential{[beta](std::span<const double> x) { return std::pow(norm(x), beta); },
                   GrowthClass{GrowthKind::power, beta}, buf};
}

Potential make_exp(double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("make_exp: beta must be > 0");
  char buf[64];
  std::snprintf(buf, sizeof buf, "exp(%g|x|)", beta);
  return Potential{[beta](std::span<const double> x) { return std::exp(beta * norm(x)); },
                   GrowthClass{GrowthKind::exponential, beta}, buf};
}

Potential make_log(double kappa) {
  if (!(kappa > 0.0)) throw std::invalid_argument("make_log: kappa must be > 0");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g*log(1+|x|)", kappa);
  return Potential{
      [kappa](std::span<const double> x) { return kappa * std::log1p(norm(x)); },
      GrowthClass{GrowthKind::logarithmic, kappa}, buf};
}

Potential make_const(double c) {
  if (c < 0.0) throw std::invalid_argument("make_const: c must be >= 0");
  char buf[64];
  std::snprintf(buf, sizeof buf, "const %g", c);
  return Potential{[c](std::span<const double>) { return c; },
                   GrowthClass{GrowthKind::constant, c}, buf};
}

CounterexampleSpec CounterexampleSpec::default_sequence(double alpha, int terms) {
  if (terms < 2) throw ConfigError("counterexample: need at least 2 terms");
  CounterexampleSpec spec;
  spec.alpha = alpha;
  spec.a.reserve(terms + 1);
  for (int n = 1; n <= terms + 1; ++n)
    spec.a.push_back(std::pow(2.0, alpha + static_cast<double>(n) * n));
  return spec;
}

std::vector<double> CounterexampleSpec::radii() const {
  std::vector<double> r;
  r.reserve(a.size());
  for (double an : a) r.push_back(std::pow(an, -1.0 / alpha));
  return r;
}

void CounterexampleSpec::validate() const {
  if (a.size() < 3) throw ConfigError("counterexample: need a_1..a_3 at least");
  if (!(a[0] > std::pow(2.0, alpha)))
    throw ConfigError("counterexample: requires a_1 > 2^alpha");
  double prev_ratio = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    if (!(a[i + 1] > a[i]))
      throw ConfigError("counterexample: sequence must be strictly increasing");
    const double ratio = a[i + 1] / a[i];
    if (!(ratio > prev_ratio))
      throw ConfigError("counterexample: ratios a_{n+1}/a_n must be strictly increasing");
    prev_ratio = ratio;
  }
  const auto r = radii();
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    if (!(r[i] + r[i + 1] < 1.0))
      throw ConfigError("counterexample: overlapping bands (r_n too large)");
  }
  if (!(r[0] < 0.5)) throw ConfigError("counterexample: r_1 must be < 1/2");
}

Potential make_counterexample(const CounterexampleSpec& spec, int /*d*/, double alpha) {
  if (std::abs(alpha - spec.alpha) > 1e-12)
    throw ConfigError("counterexample: spec alpha does not match model alpha");
  spec.validate();
  const std::vector<double> a = spec.a;
  const std::vector<double> r = spec.radii();
  const int terms = static_cast<int>(a.size()) - 1;  // ramps exist for n=1..terms

  auto eval = [a, r, terms](std::span<const double> x) {
    const double s = norm(x);
    // Ramp around the nearest integer m when |s - m| <= r_{m+1}.
    const long m = std::lround(s);
    if (m >= 1 && m <= terms) {
      const double rm1 = r[static_cast<std::size_t>(m)];  // r_{m+1}
      if (std::abs(s - static_cast<double>(m)) <= rm1) {
        const double am = a[static_cast<std::size_t>(m - 1)];
        const double am1 = a[static_cast<std::size_t>(m)];
        return (am1 - am) / (2.0 * rm1) * (s - static_cast<double>(m) + rm1) + am;
      }
    }
    // Plateau: value a_n on [n-1+r_n, n-r_{n+1}].
    long n = static_cast<long>(std::floor(s)) + 1;
    if (n < 1) n = 1;
    if (n > terms + 1) n = terms + 1;  // frozen beyond the configured range
    return a[static_cast<std::size_t>(n - 1)];
  };
  return Potential{eval, GrowthClass{GrowthKind::counterexample, 0.0},
                   "counterexample staircase"};
}

double comparability_constant(const Potential& q, double region_radius,
                              const std::vector<Point>& probe_grid) {
  double m = 1.0;
  std::vector<double> vals(probe_grid.size());
  for (std::size_t i = 0; i < probe_grid.size(); ++i) vals[i] = q(probe_grid[i]);
  for (std::size_t i = 0; i < probe_grid.size(); ++i) {
    if (norm(probe_grid[i]) > region_radius) continue;
    for (std::size_t j = i + 1; j < probe_grid.size(); ++j) {
      if (norm(probe_grid[j]) > region_radius) continue;
      if (distance(probe_grid[i], probe_grid[j]) > 1.0) continue;
      const double hi = 1.0 + std::max(vals[i], vals[j]);
      const double lo = 1.0 + std::min(vals[i], vals[j]);
      m = std::max(m, hi / lo);
    }
  }
  return m;
}

std::vector<Point> uniform_grid_1d(double region_radius, int m) {
  std::vector<Point> grid;
  grid.reserve(m + 1);
  for (int i = 0; i <= m; ++i)
    grid.push_back(point1(-region_radius + 2.0 * region_radius * i / m));
  return grid;
}

double radius_where_q_exceeds_one(const Potential& q, int d, double r_max) {
  for (double r = 1.0; r <= r_max; r *= 1.5) {
    Point x(d, 0.0);
    x[0] = r;
    bool ok = q(x) >= 1.0;
    // spot-check a couple of larger radii on the same ray
    for (double f : {2.0, 4.0}) {
      x[0] = r * f;
      ok = ok && q(x) >= 1.0;
    }
    if (ok) return r;
  }
  throw ConfigError("potential does not reach q >= 1 within the search range");
}

}  // namespace fraclab
