#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace nmlr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Raised when a numeric routine cannot produce a result (factorization failure,
// iteration-limit overrun where the caller asked for convergence).
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thin SVD, M = U * diag(sv) * V^T with r = min(rows, cols) columns.
// sv is nonincreasing and nonnegative; U, V have orthonormal columns.
struct SvdResult {
  Matrix U;
  Vector sv;
  Matrix V;
};

// Throws std::invalid_argument if M is empty or has non-finite entries.
// All public entry points below funnel matrices through this check.
void require_finite(const Matrix& M, const char* what);

SvdResult svd(const Matrix& M);

double spectral_norm(const Matrix& M);
double nuclear_norm(const Matrix& M);
double frobenius_norm(const Matrix& M);

// Frobenius-nearest matrix with spectral norm <= radius: singular values of M
// clipped at radius, basis unchanged. radius >= 0 required; radius = 0 gives 0.
Matrix project_spectral_ball(const Matrix& M, double radius);

// Singular value soft-thresholding: prox of threshold * ||.||_* at M.
// threshold >= 0 required; threshold = 0 returns M (reconstructed).
Matrix svt(const Matrix& M, double threshold);

// Number of singular values above tol * sv(0); zero matrix has rank 0.
// tol must be positive.
Index rank_eps(const Matrix& M, double tol = 1e-8);

}  // namespace nmlr
