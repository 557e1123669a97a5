#include "nmlr/harness.hpp"

#include "nmlr/random.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ostream>

namespace nmlr {

std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "?";
  return std::string(buf, ptr);
}

SweepReport sweep_verify(const Matrix& X, const Matrix& Y, const SweepOptions& opts) {
  if (!(opts.lambda0_frac > 0.0) || opts.lambda0_frac > 1.0)
    throw std::invalid_argument("sweep_verify: lambda0_frac must lie in (0, 1]");
  if (opts.grid < 1) throw std::invalid_argument("sweep_verify: grid must be >= 1");

  SweepReport report;
  report.lambda_max = lambda_max(X, Y);
  if (!(report.lambda_max > 0.0)) return report;  // B* = 0 everywhere, nothing to check
  report.lambda0 = opts.lambda0_frac * report.lambda_max;

  const bool at_top = opts.lambda0_frac == 1.0;
  ReferenceSolution ref = at_top ? reference_at_lambda_max(X, Y)
                                 : reference_from_admm(X, Y, report.lambda0, opts.admm);

  std::array<std::optional<RuleCertificate>, 4> certs;
  certs[static_cast<size_t>(RuleKind::psr)] = rule_certificate(RuleKind::psr, ref, X, Y);
  certs[static_cast<size_t>(RuleKind::psrfn)] = rule_certificate(RuleKind::psrfn, ref, X, Y);
  if (!at_top) {
    certs[static_cast<size_t>(RuleKind::psri)] = rule_certificate(RuleKind::psri, ref, X, Y);
    certs[static_cast<size_t>(RuleKind::psrplus)] =
        rule_certificate(RuleKind::psrplus, ref, X, Y);
  }

  // Descending grid with lambda_max on top; the warm start rides down the path.
  const double ratio = std::pow(1e-3, 1.0 / opts.grid);
  std::vector<double> lambdas(static_cast<size_t>(opts.grid));
  for (int j = 0; j < opts.grid; ++j) lambdas[static_cast<size_t>(j)] =
      report.lambda_max * std::pow(ratio, j);

  Matrix B = Matrix::Zero(X.cols(), Y.cols());
  report.rows.resize(lambdas.size());
  for (size_t j = 0; j < lambdas.size(); ++j) {
    const double lambda = lambdas[j];
    PrimalSolution sol = solve_primal_from(X, Y, lambda, B, opts.oracle);
    if (!sol.converged)
      throw SolverError("sweep_verify: primal oracle did not converge at lambda = " +
                        format_double(lambda));
    B = sol.B;

    SweepRow row;
    row.lambda = lambda;
    row.oracle_rank = B.isZero(0.0) ? 0 : rank_eps(B, opts.rank_tol);
    Matrix C = dual_certificate(X, Y, B, lambda);
    const double excess = spectral_norm(X.transpose() * C);
    if (excess > 1.0) C /= excess;  // rescale into the feasible set for a valid gap
    row.duality_gap = duality_gap(X, Y, B, C, lambda);
    for (size_t rk = 0; rk < certs.size(); ++rk) {
      if (!certs[rk]) continue;
      row.bounds[rk] = certs[rk]->bound_at(lambda);
      if (row.bounds[rk] && row.oracle_rank > *row.bounds[rk]) ++report.violations;
    }
    report.rows[lambdas.size() - 1 - j] = row;  // store ascending
  }

  for (size_t j = 0; j + 1 < report.rows.size(); ++j)
    if (report.rows[j + 1].oracle_rank > report.rows[j].oracle_rank) ++report.monotone_breaks;
  return report;
}

void write_sweep_csv(const SweepReport& report, std::ostream& out) {
  out << "lambda,psr_bound,psri_bound,psrfn_bound,psrplus_bound,oracle_rank,duality_gap\n";
  const std::array<RuleKind, 4> order = {RuleKind::psr, RuleKind::psri, RuleKind::psrfn,
                                         RuleKind::psrplus};
  for (const SweepRow& row : report.rows) {
    out << format_double(row.lambda);
    for (RuleKind rk : order) {
      out << ',';
      const auto& b = row.bounds[static_cast<size_t>(rk)];
      if (b) out << *b;
    }
    out << ',' << row.oracle_rank << ',' << format_double(row.duality_gap) << '\n';
  }
}

void write_certificate_csv(const std::vector<RuleCertificate>& certs, std::ostream& out) {
  out << "rule,index,threshold,interval_lo,interval_hi,rank_bound,flags\n";
  for (const RuleCertificate& cert : certs) {
    for (size_t i = 0; i < cert.thresholds.size(); ++i) {
      out << rule_name(cert.rule) << ',' << (i + 1) << ',';
      if (cert.thresholds[i]) out << format_double(*cert.thresholds[i]);
      out << ',';
      const CertifiedInterval* iv = nullptr;
      for (const CertifiedInterval& cand : cert.intervals)
        if (cand.rank_bound == static_cast<int>(i)) iv = &cand;
      if (iv)
        out << format_double(iv->lo) << ',' << format_double(iv->hi) << ',' << iv->rank_bound;
      else
        out << ",,";
      out << ',';
      if (cert.clamped[i]) out << "clamped";
      if (!cert.monotone_scan) out << (cert.clamped[i] ? ";nonmonotone" : "nonmonotone");
      out << '\n';
    }
  }
}

RecoveryResult recover_image(const Matrix& image, const RecoveryOptions& opts) {
  require_finite(image, "recover_image: image");
  if (!(opts.lambda > 0.0))
    throw std::invalid_argument("recover_image: lambda must be positive");
  if (opts.n < 1) throw std::invalid_argument("recover_image: n must be >= 1");
  if (!(opts.noise_std >= 0.0))
    throw std::invalid_argument("recover_image: noise_std must be >= 0");

  const Index p = image.rows();
  const Index q = image.cols();
  NormalSampler rng(opts.seed);
  Matrix X(opts.n, p);
  for (Index i = 0; i < opts.n; ++i)
    for (Index j = 0; j < p; ++j) X(i, j) = rng();
  Matrix Y = X * image;
  if (opts.noise_std > 0.0) {
    for (Index i = 0; i < opts.n; ++i)
      for (Index j = 0; j < q; ++j) Y(i, j) += opts.noise_std * rng();
  }

  const auto start = std::chrono::steady_clock::now();
  DualSolution sol = solve_dual(X, Y, opts.lambda, opts.admm);
  const auto stop = std::chrono::steady_clock::now();

  RecoveryResult out;
  out.recovered = recover_primal(sol);
  out.mse = (image - out.recovered).squaredNorm() / static_cast<double>(p * q);
  out.iterations = sol.iterations;
  out.converged = sol.converged;
  out.seconds = std::chrono::duration<double>(stop - start).count();
  out.lambda = opts.lambda;
  return out;
}

}  // namespace nmlr
