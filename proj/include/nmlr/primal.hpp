#pragma once

#include "nmlr/linalg.hpp"

#include <vector>

namespace nmlr {

// Proximal-gradient settings for the nuclear-norm regression objective
//   f(B) = 0.5 * ||Y - X B||_F^2 + lambda * ||B||_*.
struct PgConfig {
  int max_iter = 20000;
  double tol = 1e-10;           // relative objective change between iterates
  bool use_acceleration = true; // FISTA momentum; plain ISTA otherwise
};

struct PrimalSolution {
  Matrix B;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  // Objective value after each iteration. Plain descent keeps it nonincreasing;
  // with acceleration only the running minimum is.
  std::vector<double> objective_history;
};

// Minimizes f from B = 0 with fixed step 1/||X||_2^2. Iterates are outputs of
// singular value thresholding, so singular values killed by the prox are
// exactly zero in the returned B. Non-convergence is reported via the flag,
// not an exception.
PrimalSolution solve_primal(const Matrix& X, const Matrix& Y, double lambda,
                            const PgConfig& config = {});

// Same solver started from B0 (used by sweep harnesses to walk a lambda grid).
PrimalSolution solve_primal_from(const Matrix& X, const Matrix& Y, double lambda,
                                 const Matrix& B0, const PgConfig& config = {});

double primal_objective(const Matrix& X, const Matrix& Y, const Matrix& B, double lambda);

// Dual objective on the normalized scale, a minimization:
//   d(C) = (lambda^2 / 2) * ||C - Y/lambda||_F^2 - 0.5 * ||Y||_F^2,
// feasible set { C : ||X^T C||_2 <= 1 }. At optimality d(C*) = -f(B*).
double dual_objective(const Matrix& Y, const Matrix& C, double lambda);

// primal + dual objective; nonnegative for primal/dual feasible pairs and
// zero at the optimum.
double duality_gap(const Matrix& X, const Matrix& Y, const Matrix& B, const Matrix& C,
                   double lambda);

// Dual point induced by a primal candidate through the optimality system:
// C = (Y - X B)/lambda. Feasible only when B is (near-)optimal.
Matrix dual_certificate(const Matrix& X, const Matrix& Y, const Matrix& B, double lambda);

// Residuals of the optimality system for a candidate pair (B, C), C on the
// normalized scale. All three vanish at an exact saddle point.
struct KktReport {
  double dual_norm_excess = 0.0;          // max(0, ||X^T C||_2 - 1)
  double subgradient_alignment_gap = 0.0; // | <X^T C, B> - ||B||_* |
  double residual_feasibility = 0.0;      // ||Y - X B - lambda C||_F
};

KktReport kkt_residuals(const Matrix& X, const Matrix& Y, const Matrix& B, const Matrix& C,
                        double lambda);

}  // namespace nmlr
