#pragma once

#include "nmlr/admm.hpp"
#include "nmlr/linalg.hpp"
#include "nmlr/primal.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace nmlr {

// Smallest penalty at which the regression coefficients vanish, ||X^T Y||_2.
double lambda_max(const Matrix& X, const Matrix& Y);

// A solved (or closed-form) dual point at a reference penalty lambda0,
// normalized scale: ||X^T C0||_2 <= 1 up to solver noise. solver_tol feeds a
// safety margin subtracted from every rule inequality; the closed-form
// reference at lambda_max is exact and carries zero.
struct ReferenceSolution {
  enum class Source { admm, primal_kkt, closed_form_lambda_max };
  double lambda0 = 0.0;
  Matrix C0;
  Source source = Source::admm;
  double solver_tol = 0.0;
  double lambda_max = 0.0;  // ||X^T Y||_2 cached when the reference was built
};

ReferenceSolution reference_at_lambda_max(const Matrix& X, const Matrix& Y);
ReferenceSolution reference_from_admm(const Matrix& X, const Matrix& Y, double lambda0,
                                      const AdmmConfig& config = {});
ReferenceSolution reference_from_primal(const Matrix& X, const Matrix& Y, double lambda0,
                                        const PgConfig& config = {});

// V1 = Y/lambda0 - C0, the dual projection residual. Only defined for
// references strictly below lambda_max (above it the residual is zero and the
// variational geometry degenerates); rejected otherwise.
Matrix v1(const ReferenceSolution& ref, const Matrix& Y);

// V2 = Y/lambda - C0 for 0 < lambda <= lambda0.
Matrix v2(double lambda, const ReferenceSolution& ref, const Matrix& Y);

// V3 = V2 - (<V1,V2>/||V1||_F^2) V1, the component of V2 orthogonal to V1.
Matrix v3(double lambda, const ReferenceSolution& ref, const Matrix& Y);

enum class RuleKind { psr, psri, psrfn, psrplus };

const char* rule_name(RuleKind rule);
std::optional<RuleKind> rule_from_name(std::string_view name);

// Margin enforced on every strict singular-value inequality, on top of
// 10 * ReferenceSolution::solver_tol.
inline constexpr double kEpsStrict = 1e-9;

// Penalties above the returned value (and below lambda0) are certified to have
// rank(B*) < index. `index` is the 1-based singular value index. psr's closed
// form always produces a value; it may equal or exceed lambda0, meaning no
// penalty below lambda0 is certified at that index. The bisection-based rules
// return nullopt in that situation instead. bisect_tol <= 0 selects the
// default width 1e-6 * lambda0.
double psr_threshold(int index, const ReferenceSolution& ref, const Matrix& X,
                     const Matrix& Y);
std::optional<double> psri_threshold(int index, const ReferenceSolution& ref, const Matrix& X,
                                     const Matrix& Y, double bisect_tol = 0.0);
std::optional<double> psrfn_threshold(int index, const ReferenceSolution& ref, const Matrix& X,
                                      const Matrix& Y, double bisect_tol = 0.0);
std::optional<double> psrplus_threshold(int index, const ReferenceSolution& ref,
                                        const Matrix& X, const Matrix& Y,
                                        double bisect_tol = 0.0);

// rank(B*(l)) <= rank_bound certified for every l with lo < l <= hi.
struct CertifiedInterval {
  double lo = 0.0;
  double hi = 0.0;
  int rank_bound = 0;
};

struct RuleCertificate {
  RuleKind rule = RuleKind::psr;
  double lambda0 = 0.0;
  // thresholds[i-1] belongs to singular index i; nullopt = no certificate.
  std::vector<std::optional<double>> thresholds;
  std::vector<bool> clamped;  // lowered by the nonincreasing envelope
  // Disjoint, hi strictly decreasing, all within (0, lambda0].
  std::vector<CertifiedInterval> intervals;
  bool monotone_scan = true;  // grid pre-pass saw a clean false-to-true pattern

  std::optional<int> bound_at(double lambda) const;
};

RuleCertificate rule_certificate(RuleKind rule, const ReferenceSolution& ref, const Matrix& X,
                                 const Matrix& Y, double bisect_tol = 0.0);

// Ball guaranteed to contain the exact dual solution C*(lambda), built from
// the reference at lambda0. Requires 0 < lambda < lambda0; the psri/psrplus
// balls additionally need lambda0 < lambda_max.
struct EstimateBall {
  Matrix center;
  double radius = 0.0;
};

EstimateBall estimate_ball(RuleKind rule, double lambda, const ReferenceSolution& ref,
                           const Matrix& Y);

}  // namespace nmlr
