#include "nmlr/harness.hpp"
#include "nmlr/matrix_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace nmlr;

Matrix load(const std::string& path) { return read_matrix_csv(path); }

// Sends report CSVs to a file or, for "-", to stdout.
void emit(const std::string& out_path, const std::string& text) {
  if (out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw ParseError(out_path + ": cannot open for writing");
  out << text;
}

std::vector<RuleKind> parse_rules(const std::vector<std::string>& names, bool general) {
  if (names.empty()) {
    if (general)
      return {RuleKind::psr, RuleKind::psri, RuleKind::psrfn, RuleKind::psrplus};
    return {RuleKind::psr, RuleKind::psrfn};
  }
  std::vector<RuleKind> rules;
  for (const std::string& name : names) {
    const auto rk = rule_from_name(name);
    if (!rk) throw std::invalid_argument("unknown rule '" + name + "'");
    rules.push_back(*rk);
  }
  return rules;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nuclear-norm regression: dual solver, primal oracle, penalty screening"};
  app.require_subcommand(1);
  int rc = 0;

  std::string x_path, y_path, image_path, out_path = "-";
  std::string out_x, out_y, out_b, out_c;
  double lambda = 0.0, lambda0_frac = 1.0, verify_frac = 0.5, noise_std = 0.01;
  double tol = 0.0, sigma = 1.0, tau = 1.618;
  int max_iter = 0, grid = 50;
  std::uint64_t seed = 0;
  long n = 100, p = 200, q = 50, rank = 0;
  std::vector<std::string> rule_names;

  auto* cmd_lambda_max = app.add_subcommand("lambda-max", "print ||X^T Y||_2");
  cmd_lambda_max->add_option("--x", x_path, "design matrix CSV")->required();
  cmd_lambda_max->add_option("--y", y_path, "response matrix CSV")->required();
  cmd_lambda_max->callback([&] {
    std::cout << format_double(lambda_max(load(x_path), load(y_path))) << "\n";
  });

  auto* cmd_dual = app.add_subcommand("solve-dual", "ADMM on the constrained dual");
  cmd_dual->add_option("--x", x_path)->required();
  cmd_dual->add_option("--y", y_path)->required();
  cmd_dual->add_option("--lambda", lambda, "penalty > 0")->required();
  cmd_dual->add_option("--tol", tol, "residual tolerance (default 1e-8)");
  cmd_dual->add_option("--max-iter", max_iter, "iteration cap (default 5000)");
  cmd_dual->add_option("--sigma", sigma, "penalty parameter (default 1)");
  cmd_dual->add_option("--tau", tau, "relaxation step (default 1.618)");
  cmd_dual->add_option("--out-b", out_b, "write recovered coefficients CSV");
  cmd_dual->add_option("--out-c", out_c, "write normalized dual point CSV");
  cmd_dual->callback([&] {
    AdmmConfig cfg;
    cfg.sigma = sigma;
    cfg.tau = tau;
    if (tol > 0.0) cfg.tol = tol;
    if (max_iter > 0) cfg.max_iter = max_iter;
    const DualSolution sol = solve_dual(load(x_path), load(y_path), lambda, cfg);
    if (!out_b.empty()) write_matrix_csv(sol.B, out_b);
    if (!out_c.empty()) write_matrix_csv(sol.C, out_c);
    std::cout << "lambda=" << format_double(lambda) << " iterations=" << sol.iterations
              << " converged=" << (sol.converged ? 1 : 0)
              << " primal_residual=" << format_double(sol.primal_residual)
              << " dual_residual=" << format_double(sol.dual_residual)
              << " gap=" << format_double(sol.gap) << "\n";
    if (!sol.converged) {
      std::cerr << "error: dual solver did not converge\n";
      rc = 3;
    }
  });

  auto* cmd_primal = app.add_subcommand("solve-primal", "proximal gradient on the primal");
  cmd_primal->add_option("--x", x_path)->required();
  cmd_primal->add_option("--y", y_path)->required();
  cmd_primal->add_option("--lambda", lambda, "penalty > 0")->required();
  cmd_primal->add_option("--tol", tol, "relative objective tolerance (default 1e-10)");
  cmd_primal->add_option("--max-iter", max_iter, "iteration cap (default 20000)");
  cmd_primal->add_option("--out", out_path, "coefficients CSV ('-' for stdout)");
  cmd_primal->callback([&] {
    PgConfig cfg;
    if (tol > 0.0) cfg.tol = tol;
    if (max_iter > 0) cfg.max_iter = max_iter;
    const Matrix X = load(x_path);
    const Matrix Y = load(y_path);
    const PrimalSolution sol = solve_primal(X, Y, lambda, cfg);
    std::ostringstream body;
    for (Index i = 0; i < sol.B.rows(); ++i) {
      for (Index j = 0; j < sol.B.cols(); ++j) {
        if (j) body << ',';
        body << format_double(sol.B(i, j));
      }
      body << '\n';
    }
    emit(out_path, body.str());
    std::cerr << "lambda=" << format_double(lambda) << " iterations=" << sol.iterations
              << " converged=" << (sol.converged ? 1 : 0)
              << " objective=" << format_double(sol.objective)
              << " rank=" << rank_eps(sol.B) << "\n";
    if (!sol.converged) rc = 3;
  });

  auto* cmd_rules = app.add_subcommand("rules", "certified rank thresholds and intervals");
  cmd_rules->add_option("--x", x_path)->required();
  cmd_rules->add_option("--y", y_path)->required();
  cmd_rules->add_option("--lambda0-frac", lambda0_frac,
                        "reference penalty as a fraction of lambda_max (default 1)");
  cmd_rules->add_option("--rules", rule_names, "subset of psr,psri,psrfn,psrplus")
      ->delimiter(',');
  cmd_rules->add_option("--tol", tol, "reference solver tolerance (default 1e-8)");
  cmd_rules->add_option("--max-iter", max_iter, "reference solver iteration cap");
  cmd_rules->add_option("--out", out_path, "certificate CSV ('-' for stdout)");
  cmd_rules->callback([&] {
    if (!(lambda0_frac > 0.0) || lambda0_frac > 1.0)
      throw std::invalid_argument("--lambda0-frac must lie in (0, 1]");
    const Matrix X = load(x_path);
    const Matrix Y = load(y_path);
    const double lmax = lambda_max(X, Y);
    if (!(lmax > 0.0)) {  // coefficients vanish for every penalty; nothing to certify
      emit(out_path, "rule,index,threshold,interval_lo,interval_hi,rank_bound,flags\n");
      return;
    }
    const bool at_top = lambda0_frac == 1.0;
    const std::vector<RuleKind> rules = parse_rules(rule_names, !at_top);
    AdmmConfig cfg;
    if (tol > 0.0) cfg.tol = tol;
    if (max_iter > 0) cfg.max_iter = max_iter;
    const ReferenceSolution ref =
        at_top ? reference_at_lambda_max(X, Y)
               : reference_from_admm(X, Y, lambda0_frac * lmax, cfg);
    std::vector<RuleCertificate> certs;
    for (RuleKind rk : rules) certs.push_back(rule_certificate(rk, ref, X, Y));
    std::ostringstream body;
    write_certificate_csv(certs, body);
    emit(out_path, body.str());
  });

  auto* cmd_verify = app.add_subcommand("verify",
                                        "sweep certificates against the primal oracle");
  cmd_verify->add_option("--x", x_path)->required();
  cmd_verify->add_option("--y", y_path)->required();
  cmd_verify->add_option("--lambda0-frac", verify_frac, "reference fraction (default 0.5)");
  cmd_verify->add_option("--grid", grid, "penalty grid size (default 50)");
  cmd_verify->add_option("--tol", tol, "reference solver tolerance (default 1e-8)");
  cmd_verify->add_option("--max-iter", max_iter, "reference solver iteration cap");
  cmd_verify->add_option("--out", out_path, "sweep CSV ('-' for stdout)");
  cmd_verify->callback([&] {
    SweepOptions opts;
    opts.lambda0_frac = verify_frac;
    opts.grid = grid;
    if (tol > 0.0) opts.admm.tol = tol;
    if (max_iter > 0) opts.admm.max_iter = max_iter;
    const SweepReport report = sweep_verify(load(x_path), load(y_path), opts);
    std::ostringstream body;
    write_sweep_csv(report, body);
    emit(out_path, body.str());
    std::cerr << "rows=" << report.rows.size() << " violations=" << report.violations
              << " monotone_breaks=" << report.monotone_breaks << "\n";
    if (report.violations > 0) rc = 4;
  });

  auto* cmd_sim = app.add_subcommand("simulate", "write a synthetic instance as CSV");
  cmd_sim->add_option("--n", n, "rows of X (default 100)");
  cmd_sim->add_option("--p", p, "columns of X (default 200)");
  cmd_sim->add_option("--q", q, "columns of Y (default 50)");
  cmd_sim->add_option("--rank", rank, "true rank of B, 0 = dense (default 0)");
  cmd_sim->add_option("--noise-std", noise_std, "noise standard deviation (default 0.01)");
  cmd_sim->add_option("--seed", seed, "generator seed (default 0)");
  cmd_sim->add_option("--out-x", out_x, "X CSV path")->required();
  cmd_sim->add_option("--out-y", out_y, "Y CSV path")->required();
  cmd_sim->add_option("--out-b", out_b, "ground-truth B CSV path");
  cmd_sim->callback([&] {
    InstanceSpec spec;
    spec.n = n;
    spec.p = p;
    spec.q = q;
    spec.true_rank = rank;
    spec.noise_std = noise_std;
    spec.seed = seed;
    const Instance inst = generate_instance(spec);
    write_matrix_csv(inst.X, out_x);
    write_matrix_csv(inst.Y, out_y);
    if (!out_b.empty()) write_matrix_csv(inst.B, out_b);
  });

  auto* cmd_img = app.add_subcommand("recover-image",
                                     "low-rank image recovery through the dual solver");
  cmd_img->add_option("--image", image_path, "input PGM (P2 or P5)")->required();
  cmd_img->add_option("--n", n, "design rows (default 128)");
  cmd_img->add_option("--lambda", lambda, "penalty > 0")->required();
  cmd_img->add_option("--noise-std", noise_std, "noise standard deviation (default 0.01)");
  cmd_img->add_option("--seed", seed, "generator seed (default 0)");
  cmd_img->add_option("--tol", tol, "solver tolerance (default 1e-8)");
  cmd_img->add_option("--max-iter", max_iter, "iteration cap (default 5000)");
  cmd_img->add_option("--out", out_b, "recovered image PGM path");
  cmd_img->callback([&] {
    RecoveryOptions opts;
    opts.n = n;
    opts.noise_std = noise_std;
    opts.lambda = lambda;
    opts.seed = seed;
    if (tol > 0.0) opts.admm.tol = tol;
    if (max_iter > 0) opts.admm.max_iter = max_iter;
    const RecoveryResult res = recover_image(read_pgm(image_path), opts);
    if (!out_b.empty()) write_pgm(res.recovered, out_b);
    std::cout << "lambda=" << format_double(res.lambda) << " iterations=" << res.iterations
              << " converged=" << (res.converged ? 1 : 0)
              << " mse=" << format_double(res.mse)
              << " seconds=" << format_double(res.seconds) << "\n";
    if (!res.converged) {
      std::cerr << "error: dual solver did not converge\n";
      rc = 3;
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
