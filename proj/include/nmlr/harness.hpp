#pragma once

#include "nmlr/instance.hpp"
#include "nmlr/rules.hpp"

#include <array>
#include <iosfwd>
#include <string>

namespace nmlr {

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// Joint certificate/oracle sweep along a geometric penalty grid over
// (1e-3 lambda_max, lambda_max]. Certificates come from one reference at
// lambda0 = lambda0_frac * lambda_max; the oracle rank at each grid point
// comes from the primal solver, walked from large penalties down with warm
// starts. A certificate claim the oracle contradicts counts as a violation.
struct SweepOptions {
  double lambda0_frac = 0.5;
  int grid = 50;
  AdmmConfig admm;       // reference solve
  PgConfig oracle;       // per-point primal solves
  double rank_tol = 1e-8;
};

struct SweepRow {
  double lambda = 0.0;
  std::array<std::optional<int>, 4> bounds;  // indexed by RuleKind order
  Index oracle_rank = 0;
  double duality_gap = 0.0;
};

struct SweepReport {
  double lambda_max = 0.0;
  double lambda0 = 0.0;
  std::vector<SweepRow> rows;  // ascending lambda
  int violations = 0;
  int monotone_breaks = 0;  // oracle rank increased with lambda; informational
};

SweepReport sweep_verify(const Matrix& X, const Matrix& Y, const SweepOptions& opts = {});

void write_sweep_csv(const SweepReport& report, std::ostream& out);

void write_certificate_csv(const std::vector<RuleCertificate>& certs, std::ostream& out);

// Regression-recovery harness: treats `image` (entries in [0, 1]) as the
// coefficient matrix, draws X (n x rows(image)) and noise from `seed`, forms
// Y = X B + noise, and reports the dual solver's recovered coefficients plus
// the mean squared error against the original.
struct RecoveryOptions {
  Index n = 128;
  double noise_std = 0.01;
  double lambda = 0.0;  // required, > 0
  std::uint64_t seed = 0;
  AdmmConfig admm;
};

struct RecoveryResult {
  Matrix recovered;
  double mse = 0.0;
  int iterations = 0;
  bool converged = false;
  double seconds = 0.0;  // dual solve time
  double lambda = 0.0;
};

RecoveryResult recover_image(const Matrix& image, const RecoveryOptions& opts);

}  // namespace nmlr
