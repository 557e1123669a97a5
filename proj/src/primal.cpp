#include "nmlr/primal.hpp"

#include <cmath>

namespace nmlr {

namespace {

void check_problem(const Matrix& X, const Matrix& Y, double lambda) {
  require_finite(X, "solve_primal: X");
  require_finite(Y, "solve_primal: Y");
  if (X.rows() != Y.rows())
    throw std::invalid_argument("solve_primal: X and Y row counts differ");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("solve_primal: lambda must be positive");
}

void check_config(const PgConfig& cfg) {
  if (cfg.max_iter < 1)
    throw std::invalid_argument("solve_primal: max_iter must be >= 1");
  if (!(cfg.tol > 0.0))
    throw std::invalid_argument("solve_primal: tol must be positive");
}

PrimalSolution run(const Matrix& X, const Matrix& Y, double lambda, const Matrix& B0,
                   const PgConfig& cfg) {
  check_problem(X, Y, lambda);
  check_config(cfg);
  if (B0.rows() != X.cols() || B0.cols() != Y.cols())
    throw std::invalid_argument("solve_primal: B0 has wrong shape");

  const double L = spectral_norm(X) * spectral_norm(X);
  PrimalSolution out;
  if (L <= 0.0) {  // X = 0: the penalty alone decides, minimizer is 0
    out.B = Matrix::Zero(X.cols(), Y.cols());
    out.objective = 0.5 * Y.squaredNorm();
    out.converged = true;
    return out;
  }
  const double step = 1.0 / L;

  const Matrix XtX = X.transpose() * X;
  const Matrix XtY = X.transpose() * Y;

  Matrix B = B0;
  Matrix B_prev = B;
  Matrix W = B;  // extrapolated point
  double t = 1.0;
  double f_prev = primal_objective(X, Y, B, lambda);
  out.objective_history.reserve(64);
  int quiet = 0;  // consecutive iterations satisfying the change criterion

  for (int k = 1; k <= cfg.max_iter; ++k) {
    B_prev.swap(B);
    B = svt(W - step * (XtX * W - XtY), lambda * step);

    // A prox-gradient fixed point is optimal exactly; stop without waiting for
    // the change counter (covers lambda >= lambda_max, where B stays 0).
    if ((B - B_prev).squaredNorm() == 0.0 && (W - B_prev).squaredNorm() == 0.0) {
      out.objective_history.push_back(primal_objective(X, Y, B, lambda));
      out.iterations = k;
      out.converged = true;
      f_prev = out.objective_history.back();
      break;
    }

    if (cfg.use_acceleration) {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      W = B + ((t - 1.0) / t_next) * (B - B_prev);
      t = t_next;
    } else {
      W = B;
    }

    const double f = primal_objective(X, Y, B, lambda);
    out.objective_history.push_back(f);
    out.iterations = k;
    // The momentum sequence makes the objective ripple; a single small change
    // can be a ripple crest, so ask for three in a row.
    quiet = std::abs(f_prev - f) <= cfg.tol * (1.0 + std::abs(f)) ? quiet + 1 : 0;
    f_prev = f;
    if (quiet >= 3) {
      out.converged = true;
      break;
    }
  }

  out.B = std::move(B);
  out.objective = f_prev;
  return out;
}

}  // namespace

PrimalSolution solve_primal(const Matrix& X, const Matrix& Y, double lambda,
                            const PgConfig& config) {
  return run(X, Y, lambda, Matrix::Zero(X.cols(), Y.cols()), config);
}

PrimalSolution solve_primal_from(const Matrix& X, const Matrix& Y, double lambda,
                                 const Matrix& B0, const PgConfig& config) {
  require_finite(B0, "solve_primal: B0");
  return run(X, Y, lambda, B0, config);
}

double primal_objective(const Matrix& X, const Matrix& Y, const Matrix& B, double lambda) {
  return 0.5 * (Y - X * B).squaredNorm() + lambda * nuclear_norm(B);
}

double dual_objective(const Matrix& Y, const Matrix& C, double lambda) {
  return 0.5 * lambda * lambda * (C - Y / lambda).squaredNorm() - 0.5 * Y.squaredNorm();
}

double duality_gap(const Matrix& X, const Matrix& Y, const Matrix& B, const Matrix& C,
                   double lambda) {
  return primal_objective(X, Y, B, lambda) + dual_objective(Y, C, lambda);
}

Matrix dual_certificate(const Matrix& X, const Matrix& Y, const Matrix& B, double lambda) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("dual_certificate: lambda must be positive");
  return (Y - X * B) / lambda;
}

KktReport kkt_residuals(const Matrix& X, const Matrix& Y, const Matrix& B, const Matrix& C,
                        double lambda) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("kkt_residuals: lambda must be positive");
  KktReport r;
  const Matrix XtC = X.transpose() * C;
  r.dual_norm_excess = std::max(0.0, spectral_norm(XtC) - 1.0);
  r.subgradient_alignment_gap = std::abs(XtC.cwiseProduct(B).sum() - nuclear_norm(B));
  r.residual_feasibility = (Y - X * B - lambda * C).norm();
  return r;
}

}  // namespace nmlr
