#include "nmlr/rules.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace nmlr {

namespace {

constexpr int kGridPoints = 64;
constexpr double kGridFloorFrac = 1e-6;
constexpr double kFeasSlack = 1e-6;  // tolerated overshoot of ||X^T C0||_2 over 1

Vector singular_values(const Matrix& M) {
  return Eigen::BDCSVD<Matrix>(M).singularValues();
}

// Everything the four rules share for one (reference, X, Y) triple.
struct Context {
  double lambda0 = 0.0;
  double lmax = 0.0;
  double xnorm = 0.0;
  double yfro = 0.0;
  double K = 0.0;      // ||X||_2 ||Y||_F, Lipschitz bound on sigma_i drift
  double guard = 0.0;  // eps_strict + 10 * solver_tol
  Matrix XtC0, XtY;
  Vector sv0;      // singular values of X^T C0
  Vector sv_xty;   // singular values of X^T Y
  bool general = false;  // lambda0 < lambda_max: V1 exists
  Matrix XtYperp;
  double yperp_fro = 0.0;
  Index r() const { return sv0.size(); }
  double mu(double lambda) const { return 1.0 / lambda - 1.0 / lambda0; }
};

void check_reference(const ReferenceSolution& ref, const Matrix& Y) {
  if (!(ref.lambda0 > 0.0) || !std::isfinite(ref.lambda0))
    throw std::invalid_argument("ReferenceSolution: lambda0 must be positive");
  require_finite(ref.C0, "ReferenceSolution: C0");
  if (ref.C0.rows() != Y.rows() || ref.C0.cols() != Y.cols())
    throw std::invalid_argument("ReferenceSolution: C0 shape does not match Y");
}

Context make_context(const ReferenceSolution& ref, const Matrix& X, const Matrix& Y) {
  check_reference(ref, Y);
  require_finite(X, "rules: X");
  if (X.rows() != Y.rows())
    throw std::invalid_argument("rules: X and Y row counts differ");

  Context ctx;
  ctx.lambda0 = ref.lambda0;
  ctx.xnorm = spectral_norm(X);
  ctx.yfro = Y.norm();
  ctx.K = ctx.xnorm * ctx.yfro;
  ctx.XtY = X.transpose() * Y;
  ctx.sv_xty = singular_values(ctx.XtY);
  ctx.lmax = ctx.sv_xty(0);
  ctx.XtC0 = X.transpose() * ref.C0;
  ctx.sv0 = singular_values(ctx.XtC0);
  if (ctx.sv0(0) > 1.0 + kFeasSlack)
    throw std::invalid_argument("ReferenceSolution: C0 is not dual feasible");
  ctx.guard = kEpsStrict + 10.0 * ref.solver_tol;

  if (ref.source != ReferenceSolution::Source::closed_form_lambda_max &&
      ref.lambda0 < ctx.lmax) {
    Matrix V1 = Y / ref.lambda0 - ref.C0;
    const double v1sq = V1.squaredNorm();
    if (v1sq > 0.0) {
      ctx.general = true;
      Matrix Yperp = Y - (V1.cwiseProduct(Y).sum() / v1sq) * V1;
      ctx.yperp_fro = Yperp.norm();
      ctx.XtYperp = X.transpose() * Yperp;
    }
  }
  return ctx;
}

double default_bisect_tol(double lambda0) { return 1e-6 * lambda0; }

// One rule evaluated at one lambda: per-index scores against a shared bound.
// A certificate at index i holds when score[i-1] <= bound.
struct RuleEval {
  std::function<Vector(double)> scores;
  std::function<double(double)> bound;
};

RuleEval psri_eval(const Context& ctx) {
  Vector sv0 = ctx.sv0;
  const double rate = ctx.xnorm * ctx.yperp_fro;
  const double cap = 1.0 - ctx.guard;
  const Context* c = &ctx;
  return {[sv0](double) { return sv0; },
          [c, rate, cap](double lambda) { return cap - rate * c->mu(lambda); }};
}

RuleEval psrfn_eval(const Context& ctx) {
  const Context* c = &ctx;
  const double cap = 1.0 - ctx.guard;
  return {[c](double lambda) {
            return singular_values(c->XtC0 + 0.5 * c->mu(lambda) * c->XtY);
          },
          [c, cap](double lambda) { return cap - 0.5 * c->K * c->mu(lambda); }};
}

RuleEval psrplus_eval(const Context& ctx) {
  const Context* c = &ctx;
  const double cap = 1.0 - ctx.guard;
  const double rate = 0.5 * ctx.xnorm * ctx.yperp_fro;
  return {[c](double lambda) {
            return singular_values(c->XtC0 + 0.5 * c->mu(lambda) * c->XtYperp);
          },
          [c, rate, cap](double lambda) { return cap - rate * c->mu(lambda); }};
}

struct ScanResult {
  std::vector<std::optional<double>> thr;
  bool monotone = true;
};

// Geometric grid pre-pass over (kGridFloorFrac * lambda0, lambda0 - btol],
// largest false-to-true crossing per index, then bisection down to width btol.
// The certified side (right end of the final bracket) is returned, so reported
// thresholds never understate the true one by more than btol.
ScanResult scan_thresholds(const RuleEval& eval, Index r, double lambda0, double btol) {
  ScanResult out;
  out.thr.assign(static_cast<size_t>(r), std::nullopt);

  const double lo = kGridFloorFrac * lambda0;
  const double hi = std::max(lambda0 - btol, lo);
  std::vector<double> grid(kGridPoints);
  for (int j = 0; j < kGridPoints; ++j)
    grid[j] = lo * std::pow(hi / lo, static_cast<double>(j) / (kGridPoints - 1));
  grid.back() = hi;

  std::vector<std::vector<char>> ok(kGridPoints);
  for (int j = 0; j < kGridPoints; ++j) {
    const Vector s = eval.scores(grid[j]);
    const double b = eval.bound(grid[j]);
    ok[j].resize(static_cast<size_t>(r));
    for (Index i = 0; i < r; ++i) ok[j][static_cast<size_t>(i)] = s(i) <= b;
  }

  auto certified_at = [&](double lambda, Index i) {
    return eval.scores(lambda)(i) <= eval.bound(lambda);
  };

  for (Index i = 0; i < r; ++i) {
    const size_t ii = static_cast<size_t>(i);
    for (int j = 0; j + 1 < kGridPoints; ++j)
      if (ok[j][ii] && !ok[j + 1][ii]) out.monotone = false;
    if (!ok[kGridPoints - 1][ii]) continue;  // fails even just below lambda0

    int cross = -1;
    for (int j = kGridPoints - 2; j >= 0; --j) {
      if (!ok[j][ii]) {
        cross = j;
        break;
      }
    }
    if (cross < 0) {  // certified over the whole scanned range
      out.thr[ii] = grid.front();
      continue;
    }
    double a = grid[cross], b = grid[cross + 1];
    while (b - a > btol) {
      const double m = 0.5 * (a + b);
      if (m <= a || m >= b) break;
      (certified_at(m, i) ? b : a) = m;
    }
    out.thr[ii] = b;
  }
  return out;
}

double psr_closed_form(const Context& ctx, double sig) {
  const double denom = ctx.lambda0 * (1.0 - ctx.guard - sig) + ctx.K;
  if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
  return ctx.lambda0 * ctx.K / denom;
}

// Fixed-point form of the fresh-normal rule when C0 = Y/lambda0 exactly
// (lambda0 >= lambda_max); sig here is a singular value of X^T Y.
double psrfn_closed_form(const Context& ctx, double sig) {
  const double denom = 2.0 * ctx.lambda0 * (1.0 - ctx.guard) - sig + ctx.K;
  if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
  return ctx.lambda0 * (sig + ctx.K) / denom;
}

void require_general(const Context& ctx, const char* rule) {
  if (!ctx.general)
    throw std::invalid_argument(std::string(rule) +
                                ": requires a reference with lambda0 < lambda_max");
}

void check_index(int index, const Context& ctx) {
  if (index < 1 || index > ctx.r())
    throw std::invalid_argument("rule threshold: index out of range");
}

double effective_btol(double bisect_tol, double lambda0) {
  if (bisect_tol < 0.0 || !std::isfinite(bisect_tol))
    throw std::invalid_argument("rule threshold: bisect_tol must be finite and >= 0");
  if (bisect_tol == 0.0) return default_bisect_tol(lambda0);
  if (bisect_tol >= lambda0)
    throw std::invalid_argument("rule threshold: bisect_tol must be below lambda0");
  return bisect_tol;
}

ScanResult thresholds_for(RuleKind rule, const Context& ctx, double btol) {
  ScanResult out;
  const Index r = ctx.r();
  switch (rule) {
    case RuleKind::psr:
      out.thr.reserve(static_cast<size_t>(r));
      for (Index i = 0; i < r; ++i) out.thr.emplace_back(psr_closed_form(ctx, ctx.sv0(i)));
      return out;
    case RuleKind::psrfn:
      if (!ctx.general) {
        out.thr.reserve(static_cast<size_t>(r));
        for (Index i = 0; i < r; ++i)
          out.thr.emplace_back(psrfn_closed_form(ctx, ctx.sv_xty(i)));
        return out;
      }
      return scan_thresholds(psrfn_eval(ctx), r, ctx.lambda0, btol);
    case RuleKind::psri:
      require_general(ctx, "psri");
      return scan_thresholds(psri_eval(ctx), r, ctx.lambda0, btol);
    case RuleKind::psrplus:
      require_general(ctx, "psrplus");
      return scan_thresholds(psrplus_eval(ctx), r, ctx.lambda0, btol);
  }
  throw std::invalid_argument("rule threshold: unknown rule");
}

}  // namespace

double lambda_max(const Matrix& X, const Matrix& Y) {
  require_finite(X, "lambda_max: X");
  require_finite(Y, "lambda_max: Y");
  if (X.rows() != Y.rows())
    throw std::invalid_argument("lambda_max: X and Y row counts differ");
  return spectral_norm(X.transpose() * Y);
}

ReferenceSolution reference_at_lambda_max(const Matrix& X, const Matrix& Y) {
  const double lm = lambda_max(X, Y);
  if (!(lm > 0.0))
    throw std::invalid_argument("reference_at_lambda_max: X^T Y is zero");
  ReferenceSolution ref;
  ref.lambda0 = lm;
  ref.C0 = Y / lm;
  ref.source = ReferenceSolution::Source::closed_form_lambda_max;
  ref.solver_tol = 0.0;
  ref.lambda_max = lm;
  return ref;
}

ReferenceSolution reference_from_admm(const Matrix& X, const Matrix& Y, double lambda0,
                                      const AdmmConfig& config) {
  DualSolution sol = solve_dual(X, Y, lambda0, config);
  if (!sol.converged)
    throw SolverError("reference_from_admm: dual solver did not converge");
  ReferenceSolution ref;
  ref.lambda0 = lambda0;
  ref.C0 = std::move(sol.C);
  ref.source = ReferenceSolution::Source::admm;
  ref.solver_tol = config.tol;
  ref.lambda_max = lambda_max(X, Y);
  return ref;
}

ReferenceSolution reference_from_primal(const Matrix& X, const Matrix& Y, double lambda0,
                                        const PgConfig& config) {
  PrimalSolution sol = solve_primal(X, Y, lambda0, config);
  if (!sol.converged)
    throw SolverError("reference_from_primal: primal solver did not converge");
  ReferenceSolution ref;
  ref.lambda0 = lambda0;
  ref.C0 = dual_certificate(X, Y, sol.B, lambda0);
  ref.source = ReferenceSolution::Source::primal_kkt;
  ref.solver_tol = config.tol;
  ref.lambda_max = lambda_max(X, Y);
  return ref;
}

Matrix v1(const ReferenceSolution& ref, const Matrix& Y) {
  check_reference(ref, Y);
  if (ref.source == ReferenceSolution::Source::closed_form_lambda_max)
    throw std::invalid_argument("v1: undefined at lambda0 = lambda_max");
  if (ref.lambda_max > 0.0 && ref.lambda0 >= ref.lambda_max)
    throw std::invalid_argument("v1: requires lambda0 < lambda_max");
  Matrix V1 = Y / ref.lambda0 - ref.C0;
  if (V1.squaredNorm() == 0.0)
    throw std::invalid_argument("v1: reference dual point is feasible for Y/lambda0");
  return V1;
}

Matrix v2(double lambda, const ReferenceSolution& ref, const Matrix& Y) {
  check_reference(ref, Y);
  if (!(lambda > 0.0) || lambda > ref.lambda0)
    throw std::invalid_argument("v2: lambda must lie in (0, lambda0]");
  return Y / lambda - ref.C0;
}

Matrix v3(double lambda, const ReferenceSolution& ref, const Matrix& Y) {
  Matrix V1 = v1(ref, Y);
  Matrix V2 = v2(lambda, ref, Y);
  const double v1sq = V1.squaredNorm();
  return V2 - (V1.cwiseProduct(V2).sum() / v1sq) * V1;
}

const char* rule_name(RuleKind rule) {
  switch (rule) {
    case RuleKind::psr: return "psr";
    case RuleKind::psri: return "psri";
    case RuleKind::psrfn: return "psrfn";
    case RuleKind::psrplus: return "psrplus";
  }
  return "?";
}

std::optional<RuleKind> rule_from_name(std::string_view name) {
  if (name == "psr") return RuleKind::psr;
  if (name == "psri") return RuleKind::psri;
  if (name == "psrfn") return RuleKind::psrfn;
  if (name == "psrplus" || name == "psr+") return RuleKind::psrplus;
  return std::nullopt;
}

double psr_threshold(int index, const ReferenceSolution& ref, const Matrix& X,
                     const Matrix& Y) {
  Context ctx = make_context(ref, X, Y);
  check_index(index, ctx);
  return psr_closed_form(ctx, ctx.sv0(index - 1));
}

namespace {

std::optional<double> one_threshold(RuleKind rule, int index, const ReferenceSolution& ref,
                                    const Matrix& X, const Matrix& Y, double bisect_tol) {
  Context ctx = make_context(ref, X, Y);
  check_index(index, ctx);
  const double btol = effective_btol(bisect_tol, ctx.lambda0);
  ScanResult scan = thresholds_for(rule, ctx, btol);
  return scan.thr[static_cast<size_t>(index - 1)];
}

}  // namespace

std::optional<double> psri_threshold(int index, const ReferenceSolution& ref, const Matrix& X,
                                     const Matrix& Y, double bisect_tol) {
  return one_threshold(RuleKind::psri, index, ref, X, Y, bisect_tol);
}

std::optional<double> psrfn_threshold(int index, const ReferenceSolution& ref, const Matrix& X,
                                      const Matrix& Y, double bisect_tol) {
  return one_threshold(RuleKind::psrfn, index, ref, X, Y, bisect_tol);
}

std::optional<double> psrplus_threshold(int index, const ReferenceSolution& ref,
                                        const Matrix& X, const Matrix& Y, double bisect_tol) {
  return one_threshold(RuleKind::psrplus, index, ref, X, Y, bisect_tol);
}

std::optional<int> RuleCertificate::bound_at(double lambda) const {
  for (const CertifiedInterval& iv : intervals)
    if (iv.lo < lambda && lambda <= iv.hi) return iv.rank_bound;
  return std::nullopt;
}

RuleCertificate rule_certificate(RuleKind rule, const ReferenceSolution& ref, const Matrix& X,
                                 const Matrix& Y, double bisect_tol) {
  Context ctx = make_context(ref, X, Y);
  const double btol = effective_btol(bisect_tol, ctx.lambda0);
  ScanResult scan = thresholds_for(rule, ctx, btol);

  RuleCertificate cert;
  cert.rule = rule;
  cert.lambda0 = ctx.lambda0;
  cert.thresholds = std::move(scan.thr);
  cert.monotone_scan = scan.monotone;
  cert.clamped.assign(cert.thresholds.size(), false);

  // Nonincreasing envelope: certifying rank < i at some lambda also certifies
  // rank < i' for every i' > i, so a larger-index threshold never exceeds a
  // smaller-index one.
  double run_min = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < cert.thresholds.size(); ++i) {
    if (!cert.thresholds[i]) continue;
    if (*cert.thresholds[i] > run_min) {
      cert.thresholds[i] = run_min;
      cert.clamped[i] = true;
    }
    run_min = *cert.thresholds[i];
  }

  double hi = ctx.lambda0;
  for (size_t i = 0; i < cert.thresholds.size(); ++i) {
    if (!cert.thresholds[i]) continue;
    const double t = std::min(*cert.thresholds[i], hi);
    if (t < hi) {
      cert.intervals.push_back({t, hi, static_cast<int>(i)});
      hi = t;
    }
  }
  return cert;
}

EstimateBall estimate_ball(RuleKind rule, double lambda, const ReferenceSolution& ref,
                           const Matrix& Y) {
  check_reference(ref, Y);
  if (!(lambda > 0.0) || !(lambda < ref.lambda0))
    throw std::invalid_argument("estimate_ball: lambda must lie in (0, lambda0)");
  const double mu = 1.0 / lambda - 1.0 / ref.lambda0;
  EstimateBall ball;
  switch (rule) {
    case RuleKind::psr:
      ball.center = ref.C0;
      ball.radius = mu * Y.norm();
      return ball;
    case RuleKind::psrfn:
      ball.center = ref.C0 + 0.5 * mu * Y;
      ball.radius = 0.5 * mu * Y.norm();
      return ball;
    case RuleKind::psri: {
      Matrix V3 = v3(lambda, ref, Y);
      ball.center = ref.C0;
      ball.radius = V3.norm();
      return ball;
    }
    case RuleKind::psrplus: {
      Matrix V3 = v3(lambda, ref, Y);
      ball.radius = 0.5 * V3.norm();
      ball.center = ref.C0 + 0.5 * V3;
      return ball;
    }
  }
  throw std::invalid_argument("estimate_ball: unknown rule");
}

}  // namespace nmlr
