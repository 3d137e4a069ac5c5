#include "fraclab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fraclab/errors.hpp"
#include "fraclab/stable_core.hpp"

namespace fraclab {

std::vector<double> Grid1D::nodes() const {
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = node(i);
  return xs;
}

int Grid1D::nearest_index(double x) const {
  const double pos = (x + half_width) / spacing() - 1.0;
  int i = static_cast<int>(std::lround(pos));
  return std::clamp(i, 0, n - 1);
}

void Grid1D::validate() const {
  if (n < 3) throw ConfigError("grid: need at least 3 interior nodes");
  if (!(half_width > 0.0)) throw ConfigError("grid: half-width must be positive");
}

namespace {

// Antiderivatives of the kernel z^{-1-alpha} on (0, infinity).
double kernel_mass(double a, double b, double alpha) {  // int z^{-1-alpha}
  return (std::pow(a, -alpha) - std::pow(b, -alpha)) / alpha;
}
double kernel_first_moment(double a, double b, double alpha) {  // int z^{-alpha}
  if (alpha == 1.0) return std::log(b / a);
  return (std::pow(b, 1.0 - alpha) - std::pow(a, 1.0 - alpha)) / (1.0 - alpha);
}

// Exact integrals of the halves of the hat centered at c with width h.
double hat_left(double c, double h, double alpha) {
  return (kernel_first_moment(c - h, c, alpha) -
          (c - h) * kernel_mass(c - h, c, alpha)) /
         h;
}
double hat_right(double c, double h, double alpha) {
  return ((c + h) * kernel_mass(c, c + h, alpha) -
          kernel_first_moment(c, c + h, alpha)) /
         h;
}

struct NonlocalWeights {
  std::vector<double> w;  // w[j], j = 1..n (pair weight at distance j h)
  double tail = 0.0;      // kernel mass beyond (n + 1/2) h
  double total = 0.0;     // sum of w + tail
};

NonlocalWeights nonlocal_weights(int n, double h, double alpha) {
  const double a1 = StableModel::make(1, alpha, true).levy_const;
  NonlocalWeights nw;
  nw.w.assign(static_cast<std::size_t>(n) + 1, 0.0);
  const int j_near = std::min(8, n);
  nw.w[1] = a1 * (std::pow(h, -alpha) / (2.0 - alpha) + hat_right(h, h, alpha));
  for (int j = 2; j < j_near; ++j)
    nw.w[static_cast<std::size_t>(j)] =
        a1 * (hat_left(j * h, h, alpha) + hat_right(j * h, h, alpha));
  if (j_near >= 2) {
    nw.w[static_cast<std::size_t>(j_near)] =
        a1 * (hat_left(j_near * h, h, alpha) +
              kernel_mass(j_near * h, (j_near + 0.5) * h, alpha));
  }
  for (int j = j_near + 1; j <= n; ++j)
    nw.w[static_cast<std::size_t>(j)] = a1 * h * std::pow(j * h, -1.0 - alpha);
  nw.tail = a1 * std::pow((n + 0.5) * h, -alpha) / alpha;
  double s = 0.0;
  for (int j = 1; j <= n; ++j) s += nw.w[static_cast<std::size_t>(j)];
  nw.total = s + nw.tail;
  return nw;
}

}  // namespace

DiscretizedOperator assemble_operator(const Grid1D& grid, double alpha,
                                      const Potential& q) {
  grid.validate();
  if (!(alpha > 0.0 && alpha < 2.0))
    throw ConfigError("assemble_operator: alpha out of (0,2)");
  const int n = grid.n;
  const double h = grid.spacing();
  const NonlocalWeights nw = nonlocal_weights(n, h, alpha);

  DiscretizedOperator op;
  op.grid = grid;
  op.alpha = alpha;
  op.potential_id = q.description;
  op.H = Eigen::MatrixXd::Zero(n, n);
  op.q_values = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    Point xi{grid.node(i)};
    const double qv = q(xi);
    if (!(qv >= 0.0))
      throw ConfigError("assemble_operator: potential must be nonnegative");
    op.q_values(i) = qv;
    op.H(i, i) = 2.0 * nw.total + qv;
    for (int j = 1; j <= n; ++j) {
      const double w = nw.w[static_cast<std::size_t>(j)];
      if (i - j >= 0) op.H(i, i - j) = -w;
      if (i + j < n) op.H(i, i + j) = -w;
    }
  }
  return op;
}

double exterior_killing_rate(const DiscretizedOperator& op, int i) {
  return op.H.row(i).sum() - op.q_values(i);
}

EigenPair ground_state(const DiscretizedOperator& op, double tol, int max_iter) {
  const int n = static_cast<int>(op.H.rows());
  Eigen::LDLT<Eigen::MatrixXd> ldlt(op.H);
  if (ldlt.info() != Eigen::Success)
    throw SolverError("ground_state: factorization failed", {});
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  v.normalize();
  std::vector<double> history;
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd w = ldlt.solve(v);
    w.normalize();
    const Eigen::VectorXd hw = op.H * w;
    lambda = w.dot(hw);
    const double resid = (hw - lambda * w).norm();
    history.push_back(resid);
    v = w;
    if (resid <= tol * std::abs(lambda)) {
      if (v.sum() < 0.0) v = -v;
      return EigenPair{lambda, v, resid};
    }
  }
  throw SolverError("ground_state: inverse iteration did not converge",
                    std::move(history));
}

SpectralDecomposition decompose(const DiscretizedOperator& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.H);
  if (es.info() != Eigen::Success)
    throw SolverError("decompose: eigensolver failed", {});
  return SpectralDecomposition{es.eigenvalues(), es.eigenvectors(), op.grid};
}

SpectralKernel spectral_kernel_u(const SpectralDecomposition& dec, double t, int k,
                                 double trunc_tol) {
  const int n = static_cast<int>(dec.lambdas.size());
  if (k < 1 || k > n) throw ConfigError("spectral_kernel_u: k out of range");
  if (!(t > 0.0)) throw ConfigError("spectral_kernel_u: t must be positive");
  SpectralKernel sk;
  sk.truncation_bound =
      k < n ? static_cast<double>(k) * std::exp(-dec.lambdas(k) * t) : 0.0;
  if (sk.truncation_bound > trunc_tol)
    throw ConfigError("spectral_kernel_u: truncation bound above tolerance; increase k");
  const double h = dec.grid.spacing();
  Eigen::MatrixXd a = dec.modes.leftCols(k);
  for (int m = 0; m < k; ++m) a.col(m) *= std::exp(-dec.lambdas(m) * t / 2.0);
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, n);
  u.selfadjointView<Eigen::Lower>().rankUpdate(a, 1.0 / h);
  sk.u = u.selfadjointView<Eigen::Lower>();
  return sk;
}

double tt_one_spectral(const SpectralDecomposition& dec, double t, int node_index) {
  const int n = static_cast<int>(dec.lambdas.size());
  double s = 0.0;
  for (int m = 0; m < n; ++m) {
    const double mass = dec.modes.col(m).sum();
    s += std::exp(-dec.lambdas(m) * t) * dec.modes(node_index, m) * mass;
  }
  return s;
}

double iu_ratio_statistic(const SpectralDecomposition& dec, double t,
                          double window_radius) {
  const int n = static_cast<int>(dec.lambdas.size());
  std::vector<int> idx;
  for (int i = 0; i < n; ++i)
    if (std::abs(dec.grid.node(i)) <= window_radius) idx.push_back(i);
  if (idx.empty()) throw ConfigError("iu_ratio_statistic: empty window");

  Eigen::VectorXd phi1 = dec.modes.col(0);
  if (phi1.sum() < 0.0) phi1 = -phi1;
  // u(t,.,.) restricted to the window, all modes; the spacing factor cancels
  // in u / (phi1 phi1).
  const int w = static_cast<int>(idx.size());
  Eigen::MatrixXd sub(w, n);
  for (int r = 0; r < w; ++r) sub.row(r) = dec.modes.row(idx[static_cast<std::size_t>(r)]);
  for (int m = 0; m < n; ++m) sub.col(m) *= std::exp(-dec.lambdas(m) * t / 2.0);
  Eigen::MatrixXd uw = sub * sub.transpose();

  double stat = 0.0;
  for (int r = 0; r < w; ++r)
    for (int c = 0; c < w; ++c) {
      const double denom = phi1(idx[static_cast<std::size_t>(r)]) *
                           phi1(idx[static_cast<std::size_t>(c)]);
      if (denom > 0.0) stat = std::max(stat, uw(r, c) / denom);
    }
  return stat;
}

Eigen::VectorXd qgreen_mass(const DiscretizedOperator& op) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(op.H);
  if (ldlt.info() != Eigen::Success)
    throw SolverError("qgreen_mass: factorization failed", {});
  return ldlt.solve(Eigen::VectorXd::Ones(op.H.rows()));
}

EnvelopeProfile envelope_ratio_profile(const EigenPair& pair, const Grid1D& grid,
                                       const Potential& q, double alpha,
                                       double window_radius) {
  if (window_radius > 0.5 * grid.half_width + 1e-12)
    throw ConfigError(
        "envelope_ratio_profile: window touches the truncation boundary "
        "(R must be <= L/2)");
  EnvelopeProfile prof;
  const double sqrt_h = std::sqrt(grid.spacing());
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.node(i);
    if (std::abs(x) > window_radius) continue;
    Point xp{x};
    const double psi = pair.phi(i) / sqrt_h;
    prof.x.push_back(x);
    prof.rho.push_back(psi * (1.0 + q(xp)) * std::pow(1.0 + std::abs(x), 1.0 + alpha));
  }
  if (prof.rho.empty())
    throw ConfigError("envelope_ratio_profile: no nodes in the window");
  const auto [lo, hi] = std::minmax_element(prof.rho.begin(), prof.rho.end());
  prof.dispersion = *hi / *lo;
  return prof;
}

}  // namespace fraclab
