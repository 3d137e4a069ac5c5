#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fraclab/potentials.hpp"
#include "fraclab/rng.hpp"
#include "fraclab/stable_core.hpp"

namespace fraclab {

// Time discretization for path functionals. Increments are exact stable
// draws, so the step only controls the quadrature of int q(X_s) ds and the
// grid-time exit detection.
struct PathConfig {
  double step = 1e-3;             // h
  double horizon = 1.0;           // T; for V1 runs this is the tail truncation
  long replicas = 10000;          // N
  double smoothing_radius = 0.0;  // epsilon for kernel estimates; 0 = auto
  double potential_cap = 0.0;     // clamp q at this value; 0 = off
  long max_steps = 0;             // hard cap for exit problems; 0 = 10*horizon/step
  double weight_cutoff = 1e-15;   // stop a path once e_q drops below; 0 = off

  void validate() const;
  long horizon_steps(double t) const;  // round(t/step), at least 1
  long exit_step_cap() const;
};

// Monte Carlo mean with its standard error (sample sd / sqrt(n)), replica
// count and seed provenance. `bias_bound` collects the documented additive
// bounds (weight cutoff, tail truncation, smoothing); `truncated` counts
// replicas stopped at the hard step cap (their partial sums are valid lower
// bounds), `low_stats` flags estimates built from too few contributing paths.
struct MCEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  long n = 0;
  std::uint64_t seed = 0;
  long truncated = 0;
  bool low_stats = false;
  double bias_bound = 0.0;
};

// Streaming (sum, sum of squares, count) triple; merge is associative and
// commutative, so batch order does not matter.
struct ReplicaAccumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  long n = 0;
  long truncated = 0;
  double bias_sum = 0.0;

  void add(double value) {
    sum += value;
    sum_sq += value * value;
    ++n;
  }
  static ReplicaAccumulator merge(const ReplicaAccumulator& a,
                                  const ReplicaAccumulator& b);
  MCEstimate finalize(std::uint64_t seed) const;
};

struct PathPoint {
  double time = 0.0;
  Point position;
};

// Positions at times 0, h, 2h, ..., T (exact increments per step).
std::vector<PathPoint> simulate_path(const StableModel& m, const Point& x0,
                                     const PathConfig& cfg, SplitRng& rng);
std::vector<PathPoint> simulate_path(const StableModel& m, const Point& x0,
                                     const PathConfig& cfg, std::uint64_t seed);

// exp(-sum_k (t_{k+1}-t_k) q(X_{t_k})): left-endpoint quadrature of the
// Feynman-Kac exponent; always in (0, 1] for q >= 0.
double feynman_kac_weight(std::span<const PathPoint> path, const Potential& q,
                          double potential_cap = 0.0);

// T_t 1(x) = E^x e_q(t).
MCEstimate estimate_Tt_one(const StableModel& m, const Potential& q, const Point& x,
                           double t, const PathConfig& cfg, std::uint64_t seed,
                           int jobs = 1);

// Smoothed kernel estimate u(t,x,y) ~ E^x[e_q(t) 1{X_t in B(y,eps)}] / |B(y,eps)|.
struct KernelEstimate {
  MCEstimate est;
  double epsilon = 0.0;
  long hits = 0;
};
KernelEstimate estimate_kernel_u(const StableModel& m, const Potential& q,
                                 const Point& x, const Point& y, double t,
                                 const PathConfig& cfg, std::uint64_t seed,
                                 int jobs = 1);

// v_D(x) = E^x int_0^{tau_D} e_q(t) dt for D a ball; exit detected at grid
// times (the path exits by a jump a.s.).
MCEstimate estimate_vD(const StableModel& m, const Potential& q, const BallSpec& b,
                       const Point& x, const PathConfig& cfg, std::uint64_t seed,
                       int jobs = 1);

// Gauge u_D(x) = E^x e_q(tau_D).
MCEstimate estimate_gauge_uD(const StableModel& m, const Potential& q,
                             const BallSpec& b, const Point& x, const PathConfig& cfg,
                             std::uint64_t seed, int jobs = 1);

// (v_D, u_D) from the same paths; used where the ratio matters.
std::pair<MCEstimate, MCEstimate> estimate_exit_functionals(
    const StableModel& m, const Potential& q, const BallSpec& b, const Point& x,
    const PathConfig& cfg, std::uint64_t seed, int jobs = 1);

// E^x[t < tau_{exterior of closed B(0,r)}; e_q(t)]; the closed ball is
// absorbing at grid times. Requires |x| > r.
MCEstimate estimate_condition_iii(const StableModel& m, const Potential& q, double r,
                                  const Point& x, double t, const PathConfig& cfg,
                                  std::uint64_t seed, int jobs = 1);

// V1(x) = E^x int_0^infty e_q(t) dt, truncated at cfg.horizon. Requires q >= 1
// far out (radial spot check) so the tail is bounded by e^{-horizon}, which is
// added to the bias budget; throws ConfigError if that bound exceeds
// tail_tolerance.
MCEstimate estimate_V_one(const StableModel& m, const Potential& q, const Point& x,
                          const PathConfig& cfg, std::uint64_t seed, int jobs = 1,
                          double tail_tolerance = 1e-6);

double ball_volume(int d, double radius);

}  // namespace fraclab
