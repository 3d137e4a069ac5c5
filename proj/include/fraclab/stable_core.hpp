#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fraclab/points.hpp"
#include "fraclab/rng.hpp"

namespace fraclab {

// Rotationally invariant alpha-stable process in R^d with characteristic
// function exp(-t |xi|^alpha), together with the closed-form constants of its
// potential theory:
//   levy_const    A       = 2^a pi^{-d/2} Gamma((d+a)/2) / |Gamma(-a/2)|
//   exit_const    c       = Gamma(d/2) / (2^a Gamma(1+a/2) Gamma((d+a)/2))
//   poisson_const C_{a,d} = Gamma(d/2) pi^{-d/2-1} sin(pi a/2)
struct StableModel {
  int d = 1;
  double alpha = 1.0;
  double levy_const = 0.0;
  double exit_const = 0.0;
  double poisson_const = 0.0;

  // Samplers and quadratures degrade near the endpoints of (0,2); the default
  // working range is [0.3, 1.8]. Passing allow_extreme_alpha=true accepts any
  // alpha in (0,2) and emits a warning on stderr.
  static StableModel make(int d, double alpha, bool allow_extreme_alpha = false);
};

struct BallSpec {
  Point center;
  double radius = 1.0;

  static BallSpec unit(int d);
  static BallSpec at(Point c, double r);
};

// Levy measure density A |x|^{-d-alpha}; x = 0 is a domain error.
double levy_density(const StableModel& m, std::span<const double> x);

// Transition density p(t,x) of the process. Closed form for alpha = 1
// (multivariate Cauchy); otherwise deterministic Fourier inversion of the
// radial integral, to relative tolerance 1e-8 (see transition_density_rel_tol).
// Throws ComputationError with the achieved residual if the quadrature fails.
double transition_density(const StableModel& m, double t, std::span<const double> x);

inline constexpr double transition_density_rel_tol = 1e-8;

// Smallest C >= 1 with C^{-1} B <= p <= C B over the sample set, where
// B(t,x) = min{ t/|x|^{d+alpha}, t^{-d/alpha} } is the two-sided bound shape.
double density_sandwich_check(const StableModel& m,
                              const std::vector<std::pair<double, Point>>& samples);

// E^x tau_B = c (r^2 - |x - center|^2)^{alpha/2}. Defined on the closed ball
// (zero on the boundary); outside it is a domain error.
double mean_exit_time_ball(const StableModel& m, const BallSpec& b,
                           std::span<const double> x);

// Exit density of the ball (Poisson kernel):
//   C_{a,d} ((r^2-|x-c|^2)/(|y-c|^2-r^2))^{a/2} |x-y|^{-d}  for |y-c| > r,
// and 0 on the closed ball. Requires x strictly inside.
double poisson_kernel_ball(const StableModel& m, const BallSpec& b,
                           std::span<const double> x, std::span<const double> y);

// One increment X_h - X_0 of the process, written into out (size d).
// d = 1 uses the Chambers-Mallows-Stuck symmetric sampler; d >= 2 uses a
// Gaussian subordinated by a positive (alpha/2)-stable variable (Kanter).
void sample_increment(const StableModel& m, double h, SplitRng& rng,
                      std::span<double> out);
Point sample_increment(const StableModel& m, double h, SplitRng& rng);

// Positive stable variable S with E exp(-u S) = exp(-u^rho), rho in (0,1).
double sample_positive_stable(double rho, SplitRng& rng);

// Exit point of the ball for the process started at x (strictly inside),
// distributed with density poisson_kernel_ball(m, b, x, .). Radial coordinate
// by exact inverse transform (Beta(a/2, 1-a/2) in r^2/|y-c|^2), direction by
// rejection against the |x-y|^{-d} factor. Throws SamplerError if the
// rejection loop exceeds `cap` iterations.
Point sample_exit_from_ball(const StableModel& m, const BallSpec& b,
                            std::span<const double> x, SplitRng& rng,
                            int cap = 10000);

// Closed-form radial exit CDF for d = 1, alpha = 1 from the center:
// F(s) = 1 - (2/pi) arcsin(r/s), s >= r.
double exit_radius_cdf_cauchy(double r, double s);

}  // namespace fraclab
