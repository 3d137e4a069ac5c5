#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fraclab/potentials.hpp"

namespace fraclab {

// Uniform grid of n interior nodes on (-L, L), spacing 2L/(n+1); the function
// is extended by zero outside [-L, L] (exterior Dirichlet truncation).
struct Grid1D {
  double half_width = 16.0;
  int n = 1023;

  double spacing() const { return 2.0 * half_width / (n + 1); }
  double node(int i) const { return -half_width + (i + 1) * spacing(); }
  std::vector<double> nodes() const;
  // Index of the node closest to x.
  int nearest_index(double x) const;
  void validate() const;
};

// Dense symmetric discretization H of (-Delta)^{alpha/2} + q on the grid.
// The nonlocal part uses the pair form sum_j W_j (2u_i - u_{i-j} - u_{i+j})
// with weights from the Levy density A |z|^{-1-alpha}:
//   * cell (0,h): quadratic model G(z) ~ G(h) (z/h)^2 for the second
//     difference, integrated exactly (the piecewise-linear model is not
//     integrable against the kernel for alpha >= 1);
//   * cells out to 8h: exact integrals of hat functions against the kernel;
//   * far field: node-centered midpoint rule;
//   * beyond the grid: exact tail integral, charged to the diagonal
//     (killing on the exterior).
struct DiscretizedOperator {
  Eigen::MatrixXd H;
  Eigen::VectorXd q_values;  // q at the nodes (the diagonal's potential part)
  Grid1D grid;
  double alpha = 1.0;
  std::string potential_id;
};

DiscretizedOperator assemble_operator(const Grid1D& grid, double alpha,
                                      const Potential& q);

// Killing rate to the exterior at node i; equals the i-th row sum of H minus
// q(x_i) by construction.
double exterior_killing_rate(const DiscretizedOperator& op, int i);

struct EigenPair {
  double lambda = 0.0;
  Eigen::VectorXd phi;  // l2-normalized, strictly positive
  double residual = 0.0;
};

// Smallest eigenpair by inverse power iteration (shift 0, LDLT factorization,
// all-ones start). Converges when ||H phi - lambda phi|| <= tol * lambda.
// Throws SolverError with the residual history on non-convergence.
EigenPair ground_state(const DiscretizedOperator& op, double tol = 1e-8,
                       int max_iter = 200);

// Full spectrum; modes are l2-orthonormal columns, eigenvalues ascending.
struct SpectralDecomposition {
  Eigen::VectorXd lambdas;
  Eigen::MatrixXd modes;
  Grid1D grid;
};
SpectralDecomposition decompose(const DiscretizedOperator& op);

// Kernel u(t, x_i, x_j) = sum_{m<k} e^{-lambda_m t} phi_m(x_i) phi_m(x_j) / h.
// truncation_bound = k e^{-lambda_{k+1} t} (zero when k = n). Throws when the
// bound exceeds trunc_tol.
struct SpectralKernel {
  Eigen::MatrixXd u;
  double truncation_bound = 0.0;
};
SpectralKernel spectral_kernel_u(const SpectralDecomposition& dec, double t, int k,
                                 double trunc_tol = std::numeric_limits<double>::infinity());

// T_t 1(x_i) = sum_m e^{-lambda_m t} phi_m(x_i) * (h sum_j phi_m(x_j)/h ...)
// evaluated on the grid (all modes).
double tt_one_spectral(const SpectralDecomposition& dec, double t, int node_index);

// sup over the window of u(t,x,y) / (phi_1(x) phi_1(y)); the kernel-side IU
// statistic.
double iu_ratio_statistic(const SpectralDecomposition& dec, double t,
                          double window_radius);

// Solves H v = 1: the q-Green mass v_D of the truncated interval, a
// deterministic oracle for the Monte Carlo estimators in d = 1.
Eigen::VectorXd qgreen_mass(const DiscretizedOperator& op);

// rho(x_i) = phi_1(x_i) (1 + q(x_i)) (1 + |x_i|)^{1+alpha} over |x| <= R,
// with phi_1 in L^2 normalization (phi / sqrt h). The dispersion max/min is
// the envelope statistic.
struct EnvelopeProfile {
  std::vector<double> x;
  std::vector<double> rho;
  double dispersion = 0.0;
};
EnvelopeProfile envelope_ratio_profile(const EigenPair& pair, const Grid1D& grid,
                                       const Potential& q, double alpha,
                                       double window_radius);

}  // namespace fraclab
