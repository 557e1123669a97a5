#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nmlr/admm.hpp"
#include "nmlr/instance.hpp"
#include "nmlr/primal.hpp"
#include "nmlr/random.hpp"
#include "nmlr/rules.hpp"

#include <cmath>

using namespace nmlr;

namespace {

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  NormalSampler rng(seed);
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) M(i, j) = rng();
  return M;
}

Matrix diag2(double a, double b) {
  Matrix M = Matrix::Zero(2, 2);
  M(0, 0) = a;
  M(1, 1) = b;
  return M;
}

}  // namespace

TEST_CASE("AdmmConfig: validation") {
  AdmmConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.tau = 1.7;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.tau = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.sigma = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.max_iter = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("solve_dual: input validation") {
  const Matrix X = random_matrix(6, 4, 1);
  const Matrix Y = random_matrix(5, 3, 2);
  CHECK_THROWS_AS(solve_dual(X, Y, 1.0), std::invalid_argument);  // row mismatch
  const Matrix Y2 = random_matrix(6, 3, 3);
  CHECK_THROWS_AS(solve_dual(X, Y2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_dual(X, Y2, -2.0), std::invalid_argument);
}

TEST_CASE("solve_dual: lambda above lambda_max is an immediate fixed point") {
  for (std::uint64_t seed = 4; seed < 8; ++seed) {
    const Matrix X = random_matrix(10, 8, seed);
    const Matrix Y = random_matrix(10, 4, seed + 40);
    const double lambda = 1.1 * lambda_max(X, Y);
    const DualSolution sol = solve_dual(X, Y, lambda);
    CHECK(sol.converged);
    CHECK(sol.iterations == 1);
    CHECK((sol.C - Y / lambda).norm() <= 1e-10 * (1.0 + Y.norm()));
    CHECK(sol.B.norm() <= 1e-10);
  }
}

TEST_CASE("solve_dual: diagonal toy, feasible and clipped regimes") {
  const Matrix X = Matrix::Identity(2, 2);
  const Matrix Y = diag2(2.0, 1.0);

  const DualSolution easy = solve_dual(X, Y, 3.0);
  CHECK(easy.converged);
  CHECK((easy.C - Y / 3.0).norm() <= 1e-10);
  CHECK(easy.B.norm() <= 1e-10);

  AdmmConfig tight;
  tight.tol = 1e-10;
  const DualSolution sol = solve_dual(X, Y, 0.5, tight);
  REQUIRE(sol.converged);
  CHECK((sol.B - diag2(1.5, 0.5)).norm() <= 1e-6);
  CHECK((sol.C - diag2(1.0, 1.0)).norm() <= 1e-6);
  CHECK(std::abs(sol.gap) <= 1e-6);
}

TEST_CASE("solve_dual: agrees with the primal oracle on random instances") {
  AdmmConfig admm;
  admm.tol = 1e-9;
  PgConfig sharp;
  sharp.tol = 1e-13;
  for (std::uint64_t seed = 10; seed < 14; ++seed) {
    InstanceSpec spec;
    spec.n = 16;
    spec.p = 20;
    spec.q = 8;
    spec.true_rank = 3;
    spec.seed = seed;
    const Instance inst = generate_instance(spec);
    const double lambda = 0.3 * lambda_max(inst.X, inst.Y);

    const DualSolution dual = solve_dual(inst.X, inst.Y, lambda, admm);
    REQUIRE(dual.converged);
    const PrimalSolution primal = solve_primal(inst.X, inst.Y, lambda, sharp);
    REQUIRE(primal.converged);

    CHECK((dual.B - primal.B).norm() <= 1e-4 * (1.0 + primal.B.norm()));

    // Dual feasibility (with solver slack) and strong duality.
    CHECK(spectral_norm(inst.X.transpose() * dual.C) <= 1.0 + 1e-6);
    const double p = primal_objective(inst.X, inst.Y, dual.B, lambda);
    const double d = dual_objective(inst.Y, dual.C, lambda);
    CHECK(std::abs(p + d) <= 1e-5 * (1.0 + std::abs(p)));

    const KktReport kkt = kkt_residuals(inst.X, inst.Y, dual.B, dual.C, lambda);
    const double scale = 1.0 + inst.Y.norm();
    CHECK(kkt.dual_norm_excess <= 1e-5 * scale);
    CHECK(kkt.subgradient_alignment_gap <= 1e-5 * scale);
    CHECK(kkt.residual_feasibility <= 1e-5 * scale);
  }
}

TEST_CASE("solve_dual: residual trend halves over doublings") {
  const Matrix X = random_matrix(15, 18, 20);
  const Matrix Y = random_matrix(15, 6, 21);
  const double lambda = 0.4 * lambda_max(X, Y);
  const DualSolution sol = solve_dual(X, Y, lambda);
  REQUIRE(sol.converged);
  REQUIRE(sol.residual_history.size() == static_cast<size_t>(sol.iterations));
  for (size_t k = 4; 2 * k < sol.residual_history.size(); k *= 2)
    CHECK(sol.residual_history[2 * k - 1] <= sol.residual_history[k - 1]);
  CHECK(sol.primal_residual >= 0.0);
  CHECK(sol.dual_residual >= 0.0);
}

TEST_CASE("solve_dual: rank-deficient design caps the recovered rank") {
  // X = L R with inner dimension 5 < min(n, p).
  const Matrix X = random_matrix(14, 5, 30) * random_matrix(5, 12, 31);
  const Matrix Y = random_matrix(14, 7, 32);
  const double lambda = 0.5 * lambda_max(X, Y);
  AdmmConfig tight;
  tight.tol = 1e-10;
  const DualSolution sol = solve_dual(X, Y, lambda, tight);
  REQUIRE(sol.converged);
  CHECK(rank_eps(X) == 5);
  CHECK(rank_eps(sol.B) <= 5);
}

TEST_CASE("solve_dual: converges across admissible relaxation steps") {
  const Matrix X = random_matrix(12, 10, 40);
  const Matrix Y = random_matrix(12, 5, 41);
  const double lambda = 0.35 * lambda_max(X, Y);
  for (double tau : {0.5, 1.0, 1.6}) {
    AdmmConfig cfg;
    cfg.tau = tau;
    const DualSolution sol = solve_dual(X, Y, lambda, cfg);
    CHECK(sol.converged);
    CHECK(spectral_norm(X.transpose() * sol.C) <= 1.0 + 1e-6);
  }
}

TEST_CASE("solve_dual: non-convergence is flagged with state intact") {
  const Matrix X = random_matrix(12, 10, 50);
  const Matrix Y = random_matrix(12, 5, 51);
  AdmmConfig cfg;
  cfg.max_iter = 3;
  const DualSolution sol = solve_dual(X, Y, 0.2 * lambda_max(X, Y), cfg);
  CHECK_FALSE(sol.converged);
  CHECK(sol.iterations == 3);
  CHECK(sol.C.rows() == 12);
  CHECK(sol.B.rows() == 10);
  CHECK(&recover_primal(sol) == &sol.B);
}
