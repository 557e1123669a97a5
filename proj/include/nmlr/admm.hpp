#pragma once

#include "nmlr/linalg.hpp"

#include <vector>

namespace nmlr {

// ADMM settings for the constrained dual
//   min 0.5 * ||Ct - Y||_F^2  s.t.  ||X^T Ct||_2 <= lambda
// solved on the unnormalized scale Ct = lambda * C.
struct AdmmConfig {
  double sigma = 1.0;    // augmented Lagrangian penalty, > 0
  double tau = 1.618;    // relaxation step, in (0, (1+sqrt(5))/2)
  int max_iter = 5000;
  double tol = 1e-8;     // residual tolerance, scaled by (1 + ||Y||_F)
  void validate() const;
};

struct DualSolution {
  Matrix C;  // normalized dual point Ct/lambda, n x q
  Matrix B;  // recovered primal coefficients (final multiplier), p x q
  int iterations = 0;
  bool converged = false;
  double primal_residual = 0.0;  // ||X^T Ct - E||_F at exit (solver scale)
  double dual_residual = 0.0;    // sigma * ||X (E - E_prev)||_F at exit
  double gap = 0.0;              // duality gap of the reported (B, C) pair
  // max(primal, dual) residual after each iteration, for trend checks
  std::vector<double> residual_history;
};

// Splitting: E carries the spectral-ball constraint, Z the multiplier.
//   Ct <- (I + sigma X X^T)^{-1} (sigma X E - X Z + Y)   (LLT factored once)
//   E  <- project_spectral_ball(X^T Ct + Z/sigma, lambda)
//   Z  <- Z + tau * sigma * (X^T Ct - E)
// started from Ct = Y, E = X^T Ct, Z = 0, which makes every
// lambda >= ||X^T Y||_2 an immediate fixed point. Non-convergence is reported
// via the flag; the state reached is still returned.
DualSolution solve_dual(const Matrix& X, const Matrix& Y, double lambda,
                        const AdmmConfig& config = {});

// The primal coefficients carried by a dual solve (the multiplier block).
const Matrix& recover_primal(const DualSolution& solution);

}  // namespace nmlr
