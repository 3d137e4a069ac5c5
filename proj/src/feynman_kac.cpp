#include "fraclab/feynman_kac.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "fraclab/errors.hpp"

namespace fraclab {

void PathConfig::validate() const {
  if (!(step > 0.0)) throw ConfigError("paths: step must be positive");
  if (!(horizon > 0.0)) throw ConfigError("paths: horizon must be positive");
  if (step > horizon) throw ConfigError("paths: step must not exceed horizon");
  if (replicas < 1) throw ConfigError("paths: replicas must be >= 1");
  if (smoothing_radius < 0.0) throw ConfigError("paths: epsilon must be >= 0");
  if (max_steps < 0) throw ConfigError("paths: max_steps must be >= 0");
}

long PathConfig::horizon_steps(double t) const {
  return std::max(1L, std::lround(t / step));
}

long PathConfig::exit_step_cap() const {
  if (max_steps > 0) return max_steps;
  return 10 * std::max(1L, std::lround(horizon / step));
}

ReplicaAccumulator ReplicaAccumulator::merge(const ReplicaAccumulator& a,
                                             const ReplicaAccumulator& b) {
  ReplicaAccumulator r;
  r.sum = a.sum + b.sum;
  r.sum_sq = a.sum_sq + b.sum_sq;
  r.n = a.n + b.n;
  r.truncated = a.truncated + b.truncated;
  r.bias_sum = a.bias_sum + b.bias_sum;
  return r;
}

MCEstimate ReplicaAccumulator::finalize(std::uint64_t seed) const {
  MCEstimate e;
  e.n = n;
  e.seed = seed;
  e.truncated = truncated;
  if (n > 0) {
    e.mean = sum / static_cast<double>(n);
    if (n > 1) {
      const double var =
          std::max(0.0, (sum_sq - static_cast<double>(n) * e.mean * e.mean) /
                            static_cast<double>(n - 1));
      e.stderr_ = std::sqrt(var / static_cast<double>(n));
    }
    e.bias_bound = bias_sum / static_cast<double>(n);
  }
  return e;
}

double ball_volume(int d, double radius) {
  const double dd = static_cast<double>(d);
  return std::pow(std::numbers::pi, dd / 2.0) / std::tgamma(dd / 2.0 + 1.0) *
         std::pow(radius, dd);
}

namespace {

struct ReplicaOut {
  double value = 0.0;
  bool truncated = false;
  double bias = 0.0;
};

// Runs fn once per replica with its own split stream and reduces in replica
// order, so the result does not depend on the number of workers.
template <typename Fn>
ReplicaAccumulator run_replicas(long n, std::uint64_t seed, int jobs, Fn&& fn) {
  const SplitRng root(seed);
  if (jobs <= 0) {
    jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs <= 0) jobs = 1;
  }
  jobs = static_cast<int>(std::min<long>(jobs, n));

  std::vector<double> values(static_cast<std::size_t>(n));
  std::vector<unsigned char> truncated(static_cast<std::size_t>(n), 0);
  std::vector<double> bias(static_cast<std::size_t>(n), 0.0);

  auto worker = [&](long lo, long hi) {
    for (long i = lo; i < hi; ++i) {
      SplitRng rng = root.split(static_cast<std::uint64_t>(i));
      ReplicaOut out = fn(i, rng);
      values[static_cast<std::size_t>(i)] = out.value;
      truncated[static_cast<std::size_t>(i)] = out.truncated ? 1 : 0;
      bias[static_cast<std::size_t>(i)] = out.bias;
    }
  };

  if (jobs == 1) {
    worker(0, n);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int t = 0; t < jobs; ++t) {
      const long lo = n * t / jobs;
      const long hi = n * (t + 1) / jobs;
      pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  ReplicaAccumulator acc;
  for (long i = 0; i < n; ++i) {
    acc.add(values[static_cast<std::size_t>(i)]);
    acc.truncated += truncated[static_cast<std::size_t>(i)];
    acc.bias_sum += bias[static_cast<std::size_t>(i)];
  }
  return acc;
}

double clamp_q(double v, double cap) { return cap > 0.0 ? std::min(v, cap) : v; }

}  // namespace

std::vector<PathPoint> simulate_path(const StableModel& m, const Point& x0,
                                     const PathConfig& cfg, SplitRng& rng) {
  cfg.validate();
  const long k = cfg.horizon_steps(cfg.horizon);
  const double h = cfg.horizon / static_cast<double>(k);
  std::vector<PathPoint> path;
  path.reserve(static_cast<std::size_t>(k) + 1);
  Point x = x0;
  path.push_back({0.0, x});
  Point dx(m.d, 0.0);
  for (long i = 1; i <= k; ++i) {
    sample_increment(m, h, rng, dx);
    for (int c = 0; c < m.d; ++c) x[c] += dx[c];
    path.push_back({h * static_cast<double>(i), x});
  }
  return path;
}

std::vector<PathPoint> simulate_path(const StableModel& m, const Point& x0,
                                     const PathConfig& cfg, std::uint64_t seed) {
  SplitRng rng = SplitRng(seed).split(0);
  return simulate_path(m, x0, cfg, rng);
}

double feynman_kac_weight(std::span<const PathPoint> path, const Potential& q,
                          double potential_cap) {
  if (path.empty()) throw std::invalid_argument("feynman_kac_weight: empty path");
  double expo = 0.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const double dt = path[k + 1].time - path[k].time;
    expo += dt * clamp_q(q(path[k].position), potential_cap);
  }
  return std::exp(-expo);
}

MCEstimate estimate_Tt_one(const StableModel& m, const Potential& q, const Point& x,
                           double t, const PathConfig& cfg, std::uint64_t seed,
                           int jobs) {
  cfg.validate();
  if (t > cfg.horizon + 1e-12)
    throw ConfigError("estimate_Tt_one: t exceeds configured horizon");
  const long k = cfg.horizon_steps(t);
  const double h = t / static_cast<double>(k);
  const double cutoff_expo =
      cfg.weight_cutoff > 0.0 ? -std::log(cfg.weight_cutoff) : 0.0;

  auto one = [&](long, SplitRng& rng) {
    ReplicaOut out;
    Point pos = x;
    Point dx(m.d, 0.0);
    double expo = 0.0;
    for (long i = 0; i < k; ++i) {
      expo += h * clamp_q(q(pos), cfg.potential_cap);
      if (cfg.weight_cutoff > 0.0 && expo > cutoff_expo) {
        out.bias = cfg.weight_cutoff;
        break;
      }
      sample_increment(m, h, rng, dx);
      for (int c = 0; c < m.d; ++c) pos[c] += dx[c];
    }
    out.value = std::exp(-expo);
    return out;
  };
  return run_replicas(cfg.replicas, seed, jobs, one).finalize(seed);
}

KernelEstimate estimate_kernel_u(const StableModel& m, const Potential& q,
                                 const Point& x, const Point& y, double t,
                                 const PathConfig& cfg, std::uint64_t seed, int jobs) {
  cfg.validate();
  if (t > cfg.horizon + 1e-12)
    throw ConfigError("estimate_kernel_u: t exceeds configured horizon");
  KernelEstimate ke;
  double eps = cfg.smoothing_radius;
  if (eps <= 0.0) {
    // Size the window for ~100 expected hits under the free kernel.
    Point diff(m.d, 0.0);
    for (int c = 0; c < m.d; ++c) diff[c] = y[c] - x[c];
    double p_free;
    try {
      p_free = transition_density(m, t, diff);
    } catch (const ComputationError&) {
      const double r = norm(diff);
      p_free = std::min(t * std::pow(r, -static_cast<double>(m.d) - m.alpha),
                        std::pow(t, -static_cast<double>(m.d) / m.alpha));
    }
    const double target_vol =
        100.0 / (static_cast<double>(cfg.replicas) * std::max(p_free, 1e-12));
    eps = std::pow(target_vol * std::tgamma(m.d / 2.0 + 1.0), 1.0 / m.d) /
          std::sqrt(std::numbers::pi);
    eps = std::min(eps, 0.5);
  }
  ke.epsilon = eps;
  const double vol = ball_volume(m.d, eps);

  const long k = cfg.horizon_steps(t);
  const double h = t / static_cast<double>(k);
  std::vector<unsigned char> hit(static_cast<std::size_t>(cfg.replicas), 0);

  auto one = [&](long i, SplitRng& rng) {
    ReplicaOut out;
    Point pos = x;
    Point dx(m.d, 0.0);
    double expo = 0.0;
    for (long s = 0; s < k; ++s) {
      expo += h * clamp_q(q(pos), cfg.potential_cap);
      sample_increment(m, h, rng, dx);
      for (int c = 0; c < m.d; ++c) pos[c] += dx[c];
    }
    if (distance(pos, y) <= eps) {
      out.value = std::exp(-expo) / vol;
      hit[static_cast<std::size_t>(i)] = 1;
    }
    return out;
  };
  ReplicaAccumulator acc = run_replicas(cfg.replicas, seed, jobs, one);
  ke.est = acc.finalize(seed);
  long hits = 0;
  for (unsigned char hbit : hit) hits += hbit;
  ke.hits = hits;
  ke.est.low_stats = hits == 0;
  return ke;
}

namespace {

struct ExitFunctionals {
  ReplicaOut v;  // time integral of e_q up to exit
  ReplicaOut u;  // e_q at exit
};

ExitFunctionals exit_replica(const StableModel& m, const Potential& q,
                             const BallSpec& b, const Point& x, const PathConfig& cfg,
                             SplitRng& rng) {
  const double h = cfg.step;
  const long cap = cfg.exit_step_cap();
  const double cutoff = cfg.weight_cutoff;
  ExitFunctionals out;
  Point pos = x;
  Point dx(m.d, 0.0);
  double expo = 0.0;
  double sum = 0.0;
  long k = 0;
  for (;; ++k) {
    if (distance(pos, b.center) >= b.radius) break;  // exit detected at grid time
    if (k >= cap) {
      out.v.truncated = out.u.truncated = true;
      break;
    }
    const double w = std::exp(-expo);
    if (cutoff > 0.0 && w < cutoff) {
      // remaining contribution to v bounded by w * (cap - k) * h
      out.v.bias = w * static_cast<double>(cap - k) * h;
      out.u.bias = w;
      break;
    }
    sum += h * w;
    expo += h * clamp_q(q(pos), cfg.potential_cap);
    sample_increment(m, h, rng, dx);
    for (int c = 0; c < m.d; ++c) pos[c] += dx[c];
  }
  out.v.value = sum;
  out.u.value = std::exp(-expo);
  return out;
}

}  // namespace

std::pair<MCEstimate, MCEstimate> estimate_exit_functionals(
    const StableModel& m, const Potential& q, const BallSpec& b, const Point& x,
    const PathConfig& cfg, std::uint64_t seed, int jobs) {
  cfg.validate();
  if (!(distance(x, b.center) < b.radius))
    throw std::domain_error("estimate_exit_functionals: x must be strictly inside");

  const long n = cfg.replicas;
  std::vector<double> uvals(static_cast<std::size_t>(n));
  std::vector<unsigned char> utrunc(static_cast<std::size_t>(n), 0);
  std::vector<double> ubias(static_cast<std::size_t>(n), 0.0);

  auto one = [&](long i, SplitRng& rng) {
    ExitFunctionals ef = exit_replica(m, q, b, x, cfg, rng);
    uvals[static_cast<std::size_t>(i)] = ef.u.value;
    utrunc[static_cast<std::size_t>(i)] = ef.u.truncated ? 1 : 0;
    ubias[static_cast<std::size_t>(i)] = ef.u.bias;
    return ef.v;
  };
  ReplicaAccumulator vacc = run_replicas(n, seed, jobs, one);

  ReplicaAccumulator uacc;
  for (long i = 0; i < n; ++i) {
    uacc.add(uvals[static_cast<std::size_t>(i)]);
    uacc.truncated += utrunc[static_cast<std::size_t>(i)];
    uacc.bias_sum += ubias[static_cast<std::size_t>(i)];
  }
  return {vacc.finalize(seed), uacc.finalize(seed)};
}

MCEstimate estimate_vD(const StableModel& m, const Potential& q, const BallSpec& b,
                       const Point& x, const PathConfig& cfg, std::uint64_t seed,
                       int jobs) {
  return estimate_exit_functionals(m, q, b, x, cfg, seed, jobs).first;
}

MCEstimate estimate_gauge_uD(const StableModel& m, const Potential& q,
                             const BallSpec& b, const Point& x, const PathConfig& cfg,
                             std::uint64_t seed, int jobs) {
  return estimate_exit_functionals(m, q, b, x, cfg, seed, jobs).second;
}

MCEstimate estimate_condition_iii(const StableModel& m, const Potential& q, double r,
                                  const Point& x, double t, const PathConfig& cfg,
                                  std::uint64_t seed, int jobs) {
  cfg.validate();
  if (!(norm(x) > r))
    throw std::domain_error("estimate_condition_iii: need |x| > r");
  const long k = cfg.horizon_steps(t);
  const double h = t / static_cast<double>(k);

  auto one = [&](long, SplitRng& rng) {
    ReplicaOut out;
    Point pos = x;
    Point dx(m.d, 0.0);
    double expo = 0.0;
    for (long s = 0; s < k; ++s) {
      if (!(norm(pos) > r)) return out;  // absorbed by the closed ball, value 0
      expo += h * clamp_q(q(pos), cfg.potential_cap);
      sample_increment(m, h, rng, dx);
      for (int c = 0; c < m.d; ++c) pos[c] += dx[c];
    }
    if (!(norm(pos) > r)) return out;
    out.value = std::exp(-expo);
    return out;
  };
  return run_replicas(cfg.replicas, seed, jobs, one).finalize(seed);
}

MCEstimate estimate_V_one(const StableModel& m, const Potential& q, const Point& x,
                          const PathConfig& cfg, std::uint64_t seed, int jobs,
                          double tail_tolerance) {
  cfg.validate();
  radius_where_q_exceeds_one(q, m.d);  // precondition: q >= 1 far out
  const double tail_bound = std::exp(-cfg.horizon);
  if (tail_bound > tail_tolerance)
    throw ConfigError("estimate_V_one: horizon too short for the requested tail bound");
  const long k = cfg.horizon_steps(cfg.horizon);
  const double h = cfg.horizon / static_cast<double>(k);
  const double cutoff = cfg.weight_cutoff;

  auto one = [&](long, SplitRng& rng) {
    ReplicaOut out;
    out.bias = tail_bound;
    Point pos = x;
    Point dx(m.d, 0.0);
    double expo = 0.0;
    double sum = 0.0;
    for (long s = 0; s < k; ++s) {
      const double w = std::exp(-expo);
      if (cutoff > 0.0 && w < cutoff) {
        out.bias += w * static_cast<double>(k - s) * h;
        break;
      }
      sum += h * w;
      expo += h * clamp_q(q(pos), cfg.potential_cap);
      sample_increment(m, h, rng, dx);
      for (int c = 0; c < m.d; ++c) pos[c] += dx[c];
    }
    out.value = sum;
    return out;
  };
  return run_replicas(cfg.replicas, seed, jobs, one).finalize(seed);
}

}  // namespace fraclab
