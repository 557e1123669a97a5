#include "nmlr/admm.hpp"
#include "nmlr/primal.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace nmlr {

void AdmmConfig::validate() const {
  constexpr double tau_sup = 1.6180339887498949;  // (1 + sqrt(5)) / 2
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("AdmmConfig: sigma must be positive");
  if (!(tau > 0.0) || !(tau < tau_sup))
    throw std::invalid_argument("AdmmConfig: tau must lie in (0, (1+sqrt(5))/2)");
  if (max_iter < 1)
    throw std::invalid_argument("AdmmConfig: max_iter must be >= 1");
  if (!(tol > 0.0))
    throw std::invalid_argument("AdmmConfig: tol must be positive");
}

DualSolution solve_dual(const Matrix& X, const Matrix& Y, double lambda,
                        const AdmmConfig& config) {
  config.validate();
  require_finite(X, "solve_dual: X");
  require_finite(Y, "solve_dual: Y");
  if (X.rows() != Y.rows())
    throw std::invalid_argument("solve_dual: X and Y row counts differ");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("solve_dual: lambda must be positive");

  const double sigma = config.sigma;
  const double stop = config.tol * (1.0 + Y.norm());

  Matrix A = sigma * (X * X.transpose());
  A.diagonal().array() += 1.0;
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success)
    throw SolverError("solve_dual: factorization of I + sigma X X^T failed");

  Matrix Ct = Y;
  Matrix E = X.transpose() * Ct;
  Matrix Z = Matrix::Zero(X.cols(), Y.cols());

  DualSolution out;
  out.residual_history.reserve(static_cast<size_t>(config.max_iter));

  for (int k = 1; k <= config.max_iter; ++k) {
    Ct = llt.solve(X * (sigma * E - Z) + Y);
    const Matrix XtCt = X.transpose() * Ct;
    Matrix E_next = project_spectral_ball(XtCt + Z / sigma, lambda);
    Z += config.tau * sigma * (XtCt - E_next);

    out.primal_residual = (XtCt - E_next).norm();
    out.dual_residual = sigma * (X * (E_next - E)).norm();
    E.swap(E_next);

    const double res = std::max(out.primal_residual, out.dual_residual);
    out.residual_history.push_back(res);
    out.iterations = k;
    if (res <= stop) {
      out.converged = true;
      break;
    }
  }

  out.C = Ct / lambda;
  out.B = std::move(Z);
  out.gap = duality_gap(X, Y, out.B, out.C, lambda);
  return out;
}

const Matrix& recover_primal(const DualSolution& solution) {
  return solution.B;
}

}  // namespace nmlr
