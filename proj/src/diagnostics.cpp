#include "fraclab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>

#include "fraclab/errors.hpp"
#include "fraclab/stats.hpp"

namespace fraclab {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    default: return "inconclusive";
  }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) {
  return SplitRng(seed).split(k).next_u64();
}

namespace {

std::string snapshot(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

}  // namespace

PredicateReport check_eigen_envelope(const StableModel& m, const Potential& q,
                                     const std::vector<double>& probes,
                                     const DiagnosticsConfig& cfg) {
  if (m.d != 1)
    throw ConfigError("check_eigen_envelope: spectral side is d = 1 only");
  PredicateReport rep;
  rep.name = "eigen_envelope";
  rep.threshold = cfg.envelope_dispersion_threshold;
  rep.inputs = snapshot("q=%s alpha=%g L=%g n=%d N=%ld seed=%llu",
                        q.description.c_str(), m.alpha, cfg.grid.half_width,
                        cfg.grid.n, cfg.paths.replicas,
                        static_cast<unsigned long long>(cfg.seed));

  const DiscretizedOperator op = assemble_operator(cfg.grid, m.alpha, q);
  const EigenPair pair = ground_state(op);
  const double sqrt_h = std::sqrt(cfg.grid.spacing());

  double lo = 0, hi = 0, lo_band = 0, hi_band = 0;
  bool first = true;
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const double x = probes[k];
    if (std::abs(x) + 1.0 > cfg.grid.half_width)
      throw ConfigError("check_eigen_envelope: probe ball leaves the grid");
    const int i = cfg.grid.nearest_index(x);
    const double xi = cfg.grid.node(i);
    const double psi = pair.phi(i) / sqrt_h;
    const MCEstimate v =
        estimate_vD(m, q, BallSpec::at(point1(xi), 1.0), point1(xi), cfg.paths,
                    derive_seed(cfg.seed, k), cfg.jobs);
    const double weight = std::pow(1.0 + std::abs(xi), 1.0 + m.alpha);
    const double ratio = psi * weight / v.mean;
    const double v_lo = std::max(v.mean - 3.0 * v.stderr_, 1e-300);
    const double v_hi = v.mean + 3.0 * v.stderr_;
    const double r_hi = psi * weight / v_lo;
    const double r_lo = psi * weight / v_hi;
    rep.evidence.push_back({"probe", xi, v.mean, v.stderr_});
    if (first) {
      lo = hi = ratio;
      lo_band = r_lo;
      hi_band = r_hi;
      first = false;
    } else {
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      lo_band = std::min(lo_band, r_lo);
      hi_band = std::max(hi_band, r_hi);
    }
  }
  rep.statistic = hi / lo;
  const double stat_hi = hi_band / lo_band;          // worst case
  const double stat_lo = std::max(1.0, lo_band / hi_band);  // ... not meaningful below 1
  rep.verdict = rep.statistic <= rep.threshold ? Verdict::pass : Verdict::fail;
  if (stat_lo <= rep.threshold && rep.threshold <= stat_hi &&
      rep.verdict == Verdict::pass) {
    // only downgrade a pass whose band crosses the line
    rep.verdict = Verdict::inconclusive;
    rep.note = "stderr band straddles the dispersion threshold";
  }
  return rep;
}

PredicateReport check_gauge_green_comparability(const StableModel& m,
                                                const std::vector<Potential>& sweep,
                                                const BallSpec& b, double kappa,
                                                const std::vector<Point>& probes,
                                                const DiagnosticsConfig& cfg) {
  if (!(kappa > 0.0 && kappa < 1.0))
    throw ConfigError("check_gauge_green_comparability: kappa must be in (0,1)");
  PredicateReport rep;
  rep.name = "gauge_green_comparability";
  rep.threshold = cfg.gauge_band_threshold;
  rep.inputs = snapshot("r=%g kappa=%g sweep=%zu probes=%zu N=%ld seed=%llu",
                        b.radius, kappa, sweep.size(), probes.size(),
                        cfg.paths.replicas,
                        static_cast<unsigned long long>(cfg.seed));
  double lo = 0, hi = 0, lo_band = 0, hi_band = 0;
  bool first = true;
  for (std::size_t pi = 0; pi < probes.size(); ++pi) {
    if (!(distance(probes[pi], b.center) < kappa * b.radius))
      throw ConfigError("check_gauge_green_comparability: probe outside B(x0, kappa r)");
    for (std::size_t qi = 0; qi < sweep.size(); ++qi) {
      // common random numbers across the potential sweep: seed by probe only
      const auto [v, u] = estimate_exit_functionals(
          m, sweep[qi], b, probes[pi], cfg.paths, derive_seed(cfg.seed, pi), cfg.jobs);
      const double ratio = u.mean / v.mean;
      const double rel = 3.0 * (u.stderr_ / u.mean + v.stderr_ / v.mean);
      rep.evidence.push_back({sweep[qi].description, norm(probes[pi]), ratio,
                              ratio * rel / 3.0});
      const double r_lo = ratio / (1.0 + rel);
      const double r_hi = ratio * (1.0 + rel);
      if (first) {
        lo = hi = ratio;
        lo_band = r_lo;
        hi_band = r_hi;
        first = false;
      } else {
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        lo_band = std::min(lo_band, r_lo);
        hi_band = std::max(hi_band, r_hi);
      }
    }
  }
  rep.statistic = hi / lo;
  rep.verdict = rep.statistic <= rep.threshold ? Verdict::pass : Verdict::fail;
  const double stat_hi = hi_band / lo_band;
  if (rep.verdict == Verdict::pass && stat_hi > rep.threshold) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "stderr band straddles the comparability threshold";
  }
  return rep;
}

PredicateReport check_condition_iii_decay(const StableModel& m, const Potential& q,
                                          const std::vector<double>& radii, double t,
                                          const DiagnosticsConfig& cfg) {
  if (radii.size() < 2)
    throw ConfigError("check_condition_iii_decay: need at least two radii");
  {
    Point probe(m.d, 0.0);
    probe[0] = radii.front();
    if (q(probe) < 1.0)
      throw ConfigError("check_condition_iii_decay: q < 1 at the smallest radius");
  }
  PredicateReport rep;
  rep.name = "condition_iii_decay";
  rep.threshold = -(static_cast<double>(m.d) + m.alpha) + cfg.slope_slack;
  rep.inputs = snapshot("q=%s t=%g radii=%zu N=%ld seed=%llu", q.description.c_str(),
                        t, radii.size(), cfg.paths.replicas,
                        static_cast<unsigned long long>(cfg.seed));

  PathConfig pc = cfg.paths;
  pc.horizon = t;
  pc.step = t / 1000.0;

  std::vector<double> xs, ys, sig;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const double r = radii[k];
    Point x0(m.d, 0.0);
    x0[0] = r + 1.0;
    const MCEstimate e =
        estimate_condition_iii(m, q, r, x0, t, pc, derive_seed(cfg.seed, k), cfg.jobs);
    rep.evidence.push_back({"radius", r, e.mean, e.stderr_});
    if (!(e.mean > 0.0) || 3.0 * e.stderr_ >= e.mean) {
      rep.verdict = Verdict::inconclusive;
      rep.note = "estimate consistent with zero; cannot fit the decay slope";
      return rep;
    }
    xs.push_back(std::log1p(r));
    ys.push_back(std::log(e.mean));
    sig.push_back(e.stderr_ / e.mean);
  }
  const LineFit fit = fit_line(xs, ys, sig);
  rep.statistic = fit.slope;
  rep.verdict = fit.slope <= rep.threshold ? Verdict::pass : Verdict::fail;
  if (std::abs(fit.slope - rep.threshold) <= 3.0 * fit.slope_stderr) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "fitted slope within noise of the threshold";
  }
  return rep;
}

namespace {

PredicateReport threshold_trend_report(const StableModel& m, const Potential& q,
                                       const DiagnosticsConfig& cfg) {
  PredicateReport rep;
  rep.name = "q_over_log_trend";
  rep.threshold = 2.0;  // growth factor across the probe decades
  std::vector<double> g;
  for (double r : cfg.threshold_probe_radii) {
    Point x(m.d, 0.0);
    x[0] = r;
    g.push_back(q(x) / std::log(r));
    rep.evidence.push_back({"radius", r, g.back(), 0.0});
  }
  const double first = g.front(), last = g.back();
  const bool increasing = std::is_sorted(g.begin(), g.end()) && last > first;
  rep.statistic = last / first;
  if (increasing && last >= 2.0 * first)
    rep.verdict = Verdict::pass;
  else if (last <= 1.2 * first)
    rep.verdict = Verdict::fail;
  else
    rep.verdict = Verdict::inconclusive;
  rep.inputs = snapshot("q=%s probes=%zu", q.description.c_str(), g.size());
  return rep;
}

PredicateReport spectral_growth_report(const StableModel& m, const Potential& q,
                                       const DiagnosticsConfig& cfg) {
  PredicateReport rep;
  rep.name = "iu_spectral_ratio";
  rep.threshold = cfg.iu_growth_min;
  const DiscretizedOperator op = assemble_operator(cfg.grid, m.alpha, q);
  const SpectralDecomposition dec = decompose(op);
  const double l = cfg.grid.half_width;
  const double windows[3] = {l / 4.0, 3.0 * l / 8.0, l / 2.0};
  double r[3];
  for (int i = 0; i < 3; ++i) {
    r[i] = iu_ratio_statistic(dec, cfg.iu_time, windows[i]);
    rep.evidence.push_back({"window", windows[i], r[i], 0.0});
  }
  rep.statistic = r[2] / r[0];
  if (r[0] < r[1] && r[1] < r[2] && rep.statistic >= cfg.iu_growth_min)
    rep.verdict = Verdict::fail;  // statistic grows with the window: not IU
  else if (rep.statistic <= cfg.iu_stable_max)
    rep.verdict = Verdict::pass;
  else
    rep.verdict = Verdict::inconclusive;
  rep.inputs = snapshot("q=%s t=%g L=%g n=%d", q.description.c_str(), cfg.iu_time,
                        cfg.grid.half_width, cfg.grid.n);
  return rep;
}

}  // namespace

IuReport iu_verdict(const StableModel& m, const Potential& q,
                    const DiagnosticsConfig& cfg) {
  IuReport report;
  report.overall.name = "iu_verdict";
  report.overall.inputs = snapshot("q=%s d=%d alpha=%g", q.description.c_str(), m.d,
                                   m.alpha);

  if (q.growth.kind == GrowthKind::constant) {
    report.overall.verdict = Verdict::inconclusive;
    report.overall.note =
        "precondition failure: q does not tend to infinity, T_t is not compact";
    return report;
  }

  // (a) analytic threshold trend
  report.subs.push_back(threshold_trend_report(m, q, cfg));

  // (b) condition-(iii) decay at a growth-aware time
  const double dpa = static_cast<double>(m.d) + m.alpha;
  const double r0 = std::max(2.0, radius_where_q_exceeds_one(q, m.d));
  const std::vector<double> radii{r0, 4.0 * r0, 16.0 * r0};
  double t_b = 1.0;
  if (q.growth.kind == GrowthKind::logarithmic && q.growth.param > 0.0) {
    t_b = std::min(1.0, 0.5 * dpa / q.growth.param);
  } else {
    Point far(m.d, 0.0);
    far[0] = radii.back() + 1.0;
    const double q_far = std::max(1.0, q(far));
    t_b = std::min(1.0, 25.0 / q_far);
  }
  DiagnosticsConfig bcfg = cfg;
  bcfg.paths.replicas = cfg.cond3_replicas;
  report.subs.push_back(check_condition_iii_decay(m, q, radii, t_b, bcfg));

  // (c) spectral window growth (d = 1 only; skipped otherwise)
  if (m.d == 1) report.subs.push_back(spectral_growth_report(m, q, cfg));

  bool all_pass = true, all_fail = true;
  for (const auto& s : report.subs) {
    all_pass = all_pass && s.verdict == Verdict::pass;
    all_fail = all_fail && s.verdict == Verdict::fail;
  }
  // (a) votes pass for IU and (b)/(c) likewise; a "fail" on every sub-check
  // means the potential is not IU.
  if (all_pass) {
    report.overall.verdict = Verdict::pass;
    report.overall.statistic = 1.0;
  } else if (all_fail) {
    report.overall.verdict = Verdict::fail;
    report.overall.statistic = 0.0;
  } else {
    report.overall.verdict = Verdict::inconclusive;
    std::string note = "sub-verdicts:";
    for (const auto& s : report.subs) {
      note += " ";
      note += s.name;
      note += "=";
      note += to_string(s.verdict);
    }
    report.overall.note = note;
  }
  return report;
}

std::vector<BootstrapStep> bootstrap_exponents(int d, double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("bootstrap_exponents: alpha out of (0,2)");
  if (d < 1) throw std::invalid_argument("bootstrap_exponents: d must be >= 1");
  const double dd = static_cast<double>(d);
  const double target = dd + alpha;
  std::vector<BootstrapStep> seq;
  seq.push_back({0.0, false, false});
  double gamma = 0.0;
  bool adjusted_once = false;
  while (true) {
    double next = std::min(gamma + alpha, target);
    const bool hit = std::abs(next - dd) < 1e-12;
    seq.push_back({next, hit, false});
    if (std::abs(next - target) < 1e-12) break;
    if (hit) {
      // eq. for the tail integral is unavailable at gamma = d; restart below
      gamma = dd - alpha / 2.0;
      seq.push_back({gamma, false, true});
      adjusted_once = true;
    } else {
      gamma = next;
    }
    if (seq.size() > 64)
      throw std::logic_error("bootstrap_exponents: failed to terminate");
  }
  (void)adjusted_once;
  return seq;
}

int bootstrap_step_count(const std::vector<BootstrapStep>& seq) {
  int steps = 0;
  for (std::size_t i = 1; i < seq.size(); ++i)
    if (!seq[i].adjusted) ++steps;
  return steps;
}

}  // namespace fraclab
