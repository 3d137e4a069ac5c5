#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fraclab/feynman_kac.hpp"
#include "fraclab/potentials.hpp"
#include "fraclab/spectral.hpp"
#include "fraclab/stable_core.hpp"

namespace fraclab {

enum class Verdict { pass, fail, inconclusive };
const char* to_string(Verdict v);

struct EvidenceRow {
  std::string label;
  double x = 0.0;
  double value = 0.0;
  double stderr_ = 0.0;
};

// A theorem turned into a named pass/fail statistic. Verdict is pass iff the
// statistic is within the threshold; inconclusive when the Monte Carlo error
// band straddles the threshold.
struct PredicateReport {
  std::string name;
  std::string inputs;  // snapshot of the driving parameters
  double statistic = 0.0;
  double threshold = 0.0;
  Verdict verdict = Verdict::inconclusive;
  std::string note;
  std::vector<EvidenceRow> evidence;
};

struct DiagnosticsConfig {
  PathConfig paths;
  Grid1D grid{24.0, 959};
  std::uint64_t seed = 1;
  int jobs = 1;

  double envelope_dispersion_threshold = 10.0;
  double gauge_band_threshold = 10.0;
  double slope_slack = 0.3;

  // IU verdict knobs
  long cond3_replicas = 30000;
  double iu_time = 1.0;          // t for the spectral ratio statistic
  double iu_growth_min = 2.0;    // window-growth factor that marks "not IU"
  double iu_stable_max = 1.5;    // window-growth factor still considered stable
  std::vector<double> threshold_probe_radii{1e2, 1e3, 1e4};
};

// Deterministic replica/seed derivation shared by the predicates.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k);

// phi_1(x) (1+|x|)^{1+alpha} / v_{B(x,1)}(x) at the probe points, v by Monte
// Carlo; dispersion max/min against the configured threshold.
PredicateReport check_eigen_envelope(const StableModel& m, const Potential& q,
                                     const std::vector<double>& probes,
                                     const DiagnosticsConfig& cfg);

// u_D / v_D over probes in B(center, kappa r) and over a sweep of potentials;
// the band max/min must stay within the configured threshold (the constants of
// the comparability lemma do not depend on q).
PredicateReport check_gauge_green_comparability(const StableModel& m,
                                                const std::vector<Potential>& sweep,
                                                const BallSpec& b, double kappa,
                                                const std::vector<Point>& probes,
                                                const DiagnosticsConfig& cfg);

// Fits log E^x[t < tau; e_q(t)] against log(1+r); IU-class potentials must
// reach slope <= -(d+alpha) + slack.
PredicateReport check_condition_iii_decay(const StableModel& m, const Potential& q,
                                          const std::vector<double>& radii, double t,
                                          const DiagnosticsConfig& cfg);

// Combined IU verdict: (a) growth of q/log|x| along probe radii, (b) the
// condition-(iii) decay fit at a growth-aware time, (c) the spectral ratio
// statistic over three windows. Pass/fail only when the three sub-verdicts
// agree.
struct IuReport {
  PredicateReport overall;
  std::vector<PredicateReport> subs;
};
IuReport iu_verdict(const StableModel& m, const Potential& q,
                    const DiagnosticsConfig& cfg);

// Exponent bootstrap gamma -> min(gamma + alpha, d + alpha) with the
// d-avoidance restart at d - alpha/2; terminates at d + alpha in at most
// floor(2 + d/alpha) improvement steps.
struct BootstrapStep {
  double gamma = 0.0;
  bool hit_dimension = false;  // this value equals d and must not be reused
  bool adjusted = false;       // restart value inserted by the avoidance rule
};
std::vector<BootstrapStep> bootstrap_exponents(int d, double alpha);
int bootstrap_step_count(const std::vector<BootstrapStep>& seq);

}  // namespace fraclab
