#include "nmlr/linalg.hpp"

#include <Eigen/SVD>

#include <string>

namespace nmlr {

void require_finite(const Matrix& M, const char* what) {
  if (M.size() == 0)
    throw std::invalid_argument(std::string(what) + ": empty matrix");
  if (!M.allFinite())
    throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

SvdResult svd(const Matrix& M) {
  require_finite(M, "svd");
  // BDCSVD defers to Jacobi below its blocking threshold, so small inputs get
  // the more accurate path automatically.
  Eigen::BDCSVD<Matrix> dec(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success)
    throw SolverError("svd: decomposition failed");
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

double spectral_norm(const Matrix& M) {
  return svd(M).sv(0);
}

double nuclear_norm(const Matrix& M) {
  return svd(M).sv.sum();
}

double frobenius_norm(const Matrix& M) {
  require_finite(M, "frobenius_norm");
  return M.norm();
}

Matrix project_spectral_ball(const Matrix& M, double radius) {
  if (!(radius >= 0.0))
    throw std::invalid_argument("project_spectral_ball: radius must be >= 0");
  SvdResult d = svd(M);
  if (d.sv(0) <= radius) return M;
  Vector clipped = d.sv.cwiseMin(radius);
  return d.U * clipped.asDiagonal() * d.V.transpose();
}

Matrix svt(const Matrix& M, double threshold) {
  if (!(threshold >= 0.0))
    throw std::invalid_argument("svt: threshold must be >= 0");
  SvdResult d = svd(M);
  Vector shrunk = (d.sv.array() - threshold).max(0.0);
  return d.U * shrunk.asDiagonal() * d.V.transpose();
}

Index rank_eps(const Matrix& M, double tol) {
  if (!(tol > 0.0))
    throw std::invalid_argument("rank_eps: tol must be positive");
  Vector sv = svd(M).sv;
  if (sv(0) <= 0.0) return 0;
  const double cutoff = tol * sv(0);
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++r;
  return r;
}

}  // namespace nmlr
