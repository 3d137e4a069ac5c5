#include "fraclab/stable_core.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "fraclab/errors.hpp"
#include "fraclab/quadrature.hpp"

namespace fraclab {

namespace {

constexpr double kPi = std::numbers::pi;

// |Gamma(-a/2)| = (2/a) Gamma(1 - a/2) for a in (0,2).
double abs_gamma_neg_half_alpha(double alpha) {
  return (2.0 / alpha) * std::tgamma(1.0 - alpha / 2.0);
}

}  // namespace

StableModel StableModel::make(int d, double alpha, bool allow_extreme_alpha) {
  if (d < 1) throw std::invalid_argument("StableModel: dimension must be >= 1");
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("StableModel: alpha out of (0,2)");
  if (alpha < 0.3 || alpha > 1.8) {
    if (!allow_extreme_alpha)
      throw std::invalid_argument(
          "StableModel: alpha outside the default working range [0.3, 1.8]; "
          "pass allow_extreme_alpha to override");
    std::fprintf(stderr,
                 "[fraclab] warning: alpha=%g outside [0.3, 1.8]; samplers and "
                 "quadratures may lose accuracy\n",
                 alpha);
  }
  StableModel m;
  m.d = d;
  m.alpha = alpha;
  const double dd = static_cast<double>(d);
  m.levy_const = std::pow(2.0, alpha) * std::pow(kPi, -dd / 2.0) *
                 std::tgamma((dd + alpha) / 2.0) / abs_gamma_neg_half_alpha(alpha);
  m.exit_const = std::tgamma(dd / 2.0) /
                 (std::pow(2.0, alpha) * std::tgamma(1.0 + alpha / 2.0) *
                  std::tgamma((dd + alpha) / 2.0));
  m.poisson_const = std::tgamma(dd / 2.0) * std::pow(kPi, -dd / 2.0 - 1.0) *
                    std::sin(kPi * alpha / 2.0);
  return m;
}

BallSpec BallSpec::unit(int d) { return BallSpec{Point(d, 0.0), 1.0}; }
BallSpec BallSpec::at(Point c, double r) { return BallSpec{std::move(c), r}; }

double levy_density(const StableModel& m, std::span<const double> x) {
  const double r = norm(x);
  if (r == 0.0) throw std::domain_error("levy_density: singular at x = 0");
  return m.levy_const * std::pow(r, -static_cast<double>(m.d) - m.alpha);
}

namespace {

// Density at the origin: (2 pi)^{-d} |S^{d-1}| Gamma(d/alpha)/alpha.
double density_at_origin(int d, double alpha) {
  const double dd = static_cast<double>(d);
  const double sphere = 2.0 * std::pow(kPi, dd / 2.0) / std::tgamma(dd / 2.0);
  return std::pow(2.0 * kPi, -dd) * sphere * std::tgamma(dd / alpha) / alpha;
}

// Large-argument expansion of p(1,r):
//   sum_k (-1)^{k+1}/k! 2^{k a} pi^{-d/2-1} Gamma((d+ka)/2) Gamma(1+ka/2)
//          sin(pi k a / 2) r^{-d-ka}.
// Asymptotic; truncated at the smallest term. The k=1 term is the Levy
// density A r^{-d-alpha}.
double density_series(int d, double alpha, double r, double rel_tol) {
  const double dd = static_cast<double>(d);
  double sum = 0.0;
  double prev_mag = std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 16; ++k) {
    const double ka = k * alpha;
    const double sin_term = std::sin(kPi * ka / 2.0);
    const double log_mag = ka * std::numbers::ln2 - (dd / 2.0 + 1.0) * std::log(kPi) +
                           std::lgamma((dd + ka) / 2.0) + std::lgamma(1.0 + ka / 2.0) -
                           std::lgamma(k + 1.0) - (dd + ka) * std::log(r);
    const double mag = std::exp(log_mag) * std::abs(sin_term);
    if (std::abs(sin_term) < 1e-14) continue;  // term drops out of the series
    if (mag >= prev_mag) {  // asymptotic tail started to grow
      residual = mag;
      break;
    }
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    const double sgn_sin = sin_term >= 0.0 ? 1.0 : -1.0;
    sum += sign * sgn_sin * mag;
    prev_mag = mag;
    residual = mag;
  }
  if (!(sum > 0.0) || residual > rel_tol * sum)
    throw ComputationError("transition density series failed to converge",
                           residual / std::max(sum, 1e-300));
  return sum;
}

// Rotated-contour Fourier inversion for d = 1 and d = 3 (cos / sin kernels).
// The ray s = u e^{i theta} turns the oscillatory integrand into one whose
// modulus decays like exp(-u^a cos(a theta) - r u sin theta).
double density_contour(int d, double alpha, double r, double rel_tol) {
  const double theta = 0.45 * kPi / std::max(1.0, alpha);
  const std::complex<double> eit(std::cos(theta), std::sin(theta));
  const std::complex<double> eiat(std::cos(alpha * theta), std::sin(alpha * theta));
  const double c1 = std::cos(alpha * theta);
  const double c2 = r * std::sin(theta);
  const double scale =
      std::min(std::pow(1.0 / c1, 1.0 / alpha), c2 > 0.0 ? 1.0 / c2 : 1e300);

  auto integrand = [&](double u) -> std::complex<double> {
    const std::complex<double> expo =
        -std::pow(u, alpha) * eiat + std::complex<double>(0.0, r * u) * eit;
    std::complex<double> f = std::exp(expo);
    if (d == 3) f *= u * eit;
    return f;
  };

  const double mag_guess = std::min(density_at_origin(d, alpha),
                                    2.0 * std::pow(r, -static_cast<double>(d) - alpha));
  std::complex<double> val;
  QuadResult qr = integrate_half_line<std::complex<double>>(
      integrand, 0.0, scale, 0.05 * rel_tol * mag_guess, 52, &val);

  double p;
  if (d == 1) {
    p = (eit * val).real() / kPi;
  } else {  // d == 3, one extra e^{i theta} from the measure
    p = (eit * val).imag() / (2.0 * kPi * kPi * r);
  }
  const double achieved = qr.error / std::max(std::abs(p), 1e-300);
  if (!qr.converged || achieved > rel_tol)
    throw ComputationError("transition density quadrature did not reach tolerance",
                           achieved);
  return p;
}

// Real-axis Hankel quadrature for d = 2, chunked at the half-periods of J0.
double density_hankel_d2(double alpha, double r, double rel_tol) {
  const double s_max = std::pow(45.0, 1.0 / alpha);
  const double chunk = kPi / std::max(r, 1.0);
  const long n_chunks = static_cast<long>(s_max / chunk) + 1;
  if (n_chunks > 20000)
    throw ComputationError(
        "transition density (d=2, alpha!=1): oscillation budget exceeded; "
        "|x| t^{-1/alpha} too large for direct quadrature",
        static_cast<double>(n_chunks));
  auto f = [&](double s) {
    return std::exp(-std::pow(s, alpha)) * std::cyl_bessel_j(0.0, s * r) * s;
  };
  const double mag_guess = std::min(density_at_origin(2, alpha),
                                    2.0 * std::pow(r, -2.0 - alpha));
  double total = 0.0, err = 0.0;
  const double tol = 0.05 * rel_tol * mag_guess * 2.0 * kPi / n_chunks;
  for (long k = 0; k < n_chunks; ++k) {
    const double a = k * chunk, b = std::min((k + 1) * chunk, s_max);
    QuadResult qr = integrate(f, a, b, tol);
    total += qr.value;
    err += qr.error;
    if (b >= s_max) break;
  }
  const double p = total / (2.0 * kPi);
  const double achieved = err / (2.0 * kPi) / std::max(std::abs(p), 1e-300);
  if (achieved > rel_tol)
    throw ComputationError("transition density quadrature did not reach tolerance",
                           achieved);
  return p;
}

double density_std(const StableModel& m, double r) {
  // p(1, r) for the standardized process.
  if (m.alpha == 1.0) {
    // Multivariate Cauchy: Gamma((d+1)/2) pi^{-(d+1)/2} (1+r^2)^{-(d+1)/2}.
    const double dd = static_cast<double>(m.d);
    return std::tgamma((dd + 1.0) / 2.0) * std::pow(kPi, -(dd + 1.0) / 2.0) *
           std::pow(1.0 + r * r, -(dd + 1.0) / 2.0);
  }
  if (r == 0.0) return density_at_origin(m.d, m.alpha);
  if (std::pow(r, m.alpha) >= 100.0)
    return density_series(m.d, m.alpha, r, transition_density_rel_tol);
  if (m.d == 1 || m.d == 3)
    return density_contour(m.d, m.alpha, r, transition_density_rel_tol);
  if (m.d == 2) return density_hankel_d2(m.alpha, r, transition_density_rel_tol);
  throw std::invalid_argument(
      "transition_density: d > 3 supported only for alpha = 1");
}

}  // namespace

double transition_density(const StableModel& m, double t, std::span<const double> x) {
  if (!(t > 0.0)) throw std::domain_error("transition_density: t must be positive");
  const double scale = std::pow(t, -1.0 / m.alpha);
  const double r = norm(x) * scale;
  return std::pow(t, -static_cast<double>(m.d) / m.alpha) * density_std(m, r);
}

double density_sandwich_check(const StableModel& m,
                              const std::vector<std::pair<double, Point>>& samples) {
  double c = 1.0;
  const double dpa = static_cast<double>(m.d) + m.alpha;
  for (const auto& [t, x] : samples) {
    if (!(t > 0.0))
      throw std::domain_error("density_sandwich_check: t must be positive");
    const double p = transition_density(m, t, x);
    const double r = norm(x);
    const double bound =
        std::min(t / std::pow(r, dpa), std::pow(t, -static_cast<double>(m.d) / m.alpha));
    c = std::max(c, std::max(p / bound, bound / p));
  }
  return c;
}

double mean_exit_time_ball(const StableModel& m, const BallSpec& b,
                           std::span<const double> x) {
  const double rho = distance(x, b.center);
  if (rho > b.radius)
    throw std::domain_error("mean_exit_time_ball: point outside the closed ball");
  const double gap = std::max(b.radius * b.radius - rho * rho, 0.0);
  return m.exit_const * std::pow(gap, m.alpha / 2.0);
}

double poisson_kernel_ball(const StableModel& m, const BallSpec& b,
                           std::span<const double> x, std::span<const double> y) {
  const double rho = distance(x, b.center);
  if (!(rho < b.radius))
    throw std::domain_error("poisson_kernel_ball: x must be strictly inside");
  const double ry = distance(y, b.center);
  if (ry <= b.radius) return 0.0;
  const double num = b.radius * b.radius - rho * rho;
  const double den = ry * ry - b.radius * b.radius;
  return m.poisson_const * std::pow(num / den, m.alpha / 2.0) *
         std::pow(distance(x, y), -static_cast<double>(m.d));
}

double sample_positive_stable(double rho, SplitRng& rng) {
  // Kanter's representation: S = [sin(rho V)/ sin(V)^{1/rho}]
  //                              * [sin((1-rho) V)/W]^{(1-rho)/rho},
  // V uniform on (0,pi), W standard exponential; E exp(-uS) = exp(-u^rho).
  const double v = kPi * rng.uniform();
  const double w = rng.exponential();
  const double s = std::sin(v);
  return std::sin(rho * v) * std::pow(s, -1.0 / rho) *
         std::pow(std::sin((1.0 - rho) * v) / w, (1.0 - rho) / rho);
}

void sample_increment(const StableModel& m, double h, SplitRng& rng,
                      std::span<double> out) {
  if (!(h > 0.0)) throw std::domain_error("sample_increment: h must be positive");
  if (m.d == 1) {
    // Chambers-Mallows-Stuck, symmetric case; characteristic function
    // exp(-|xi|^alpha) at unit time.
    const double u = kPi * (rng.uniform() - 0.5);
    const double w = rng.exponential();
    double x;
    if (m.alpha == 1.0) {
      x = std::tan(u);
    } else {
      x = std::sin(m.alpha * u) * std::pow(std::cos(u), -1.0 / m.alpha) *
          std::pow(std::cos((1.0 - m.alpha) * u) / w, (1.0 - m.alpha) / m.alpha);
    }
    out[0] = std::pow(h, 1.0 / m.alpha) * x;
    return;
  }
  // Subordinated construction: X_h = B_{S_h} with B a Brownian motion with
  // E exp(i xi . B_s) = exp(-s |xi|^2) and S an (alpha/2)-stable subordinator.
  const double s1 = sample_positive_stable(m.alpha / 2.0, rng);
  const double sh = std::pow(h, 2.0 / m.alpha) * s1;
  const double factor = std::sqrt(2.0 * sh);
  for (int i = 0; i < m.d; ++i) out[i] = factor * rng.normal();
}

Point sample_increment(const StableModel& m, double h, SplitRng& rng) {
  Point p(m.d, 0.0);
  sample_increment(m, h, rng, p);
  return p;
}

namespace {

// Beta(a, b) with a + b = 1 via Johnk's method in log space.
double johnk_beta(double a, double b, SplitRng& rng, int cap) {
  for (int i = 0; i < cap; ++i) {
    const double lx = std::log(rng.uniform()) / a;
    const double ly = std::log(rng.uniform()) / b;
    const double mx = std::max(lx, ly);
    const double lsum = mx + std::log(std::exp(lx - mx) + std::exp(ly - mx));
    if (lsum <= 0.0) return std::exp(lx - lsum);
  }
  throw SamplerError("johnk_beta: rejection cap exceeded");
}

}  // namespace

Point sample_exit_from_ball(const StableModel& m, const BallSpec& b,
                            std::span<const double> x, SplitRng& rng, int cap) {
  const double rho = distance(x, b.center);
  if (!(rho < b.radius))
    throw std::domain_error("sample_exit_from_ball: x must be strictly inside");
  const double a = m.alpha / 2.0;
  Point y(m.d, 0.0);
  for (int iter = 0; iter < cap; ++iter) {
    // Radial coordinate: v = (radius/|y-c|)^2 is Beta(a, 1-a).
    const double v = johnk_beta(a, 1.0 - a, rng, cap);
    const double s = b.radius / std::sqrt(v);
    if (!(s > b.radius) || !std::isfinite(s)) continue;
    if (m.d == 1) {
      y[0] = b.center[0] + (rng.uniform() < 0.5 ? -s : s);
    } else {
      double nn = 0.0;
      for (int i = 0; i < m.d; ++i) {
        y[i] = rng.normal();
        nn += y[i] * y[i];
      }
      nn = std::sqrt(nn);
      if (nn == 0.0) continue;
      for (int i = 0; i < m.d; ++i) y[i] = b.center[i] + s * y[i] / nn;
    }
    // Accept against the anisotropic factor |x-y|^{-d}; the bound uses
    // |x-y| >= s (1 - rho/radius).
    const double p_acc = std::pow(
        s * (b.radius - rho) / (b.radius * distance(x, y)), static_cast<double>(m.d));
    if (rng.uniform() <= p_acc) return y;
  }
  throw SamplerError("sample_exit_from_ball: rejection cap exceeded");
}

double exit_radius_cdf_cauchy(double r, double s) {
  if (s <= r) return 0.0;
  return 1.0 - (2.0 / kPi) * std::asin(r / s);
}

}  // namespace fraclab
