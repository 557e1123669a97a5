#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nmlr/linalg.hpp"
#include "nmlr/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

using namespace nmlr;

namespace {

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  NormalSampler rng(seed);
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) M(i, j) = rng();
  return M;
}

// Independent singular values: square roots of the eigenvalues of M^T M,
// computed by a symmetric eigensolver rather than an SVD.
Vector sv_via_gram(const Matrix& M) {
  const Matrix G = M.transpose() * M;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(G);
  Vector ev = eig.eigenvalues();  // ascending
  Vector sv(ev.size());
  for (Index i = 0; i < ev.size(); ++i)
    sv(i) = std::sqrt(std::max(0.0, ev(ev.size() - 1 - i)));
  return sv;
}

double specnorm_via_power(const Matrix& M, std::uint64_t seed) {
  const Matrix G = M.transpose() * M;
  Vector v = random_matrix(G.rows(), 1, seed).col(0);
  v.normalize();
  double value = 0.0;
  for (int k = 0; k < 20000; ++k) {
    Vector w = G * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    value = norm;
  }
  return std::sqrt(value);
}

// Dense two-stage scan for the minimizer of `cost` over [lo, hi].
double scan_minimize(double lo, double hi, const std::function<double(double)>& cost) {
  const int steps = 20000;
  auto best_on = [&](double a, double b) {
    double best_x = a, best_f = cost(a);
    for (int k = 1; k <= steps; ++k) {
      const double x = a + (b - a) * k / steps;
      const double f = cost(x);
      if (f < best_f) {
        best_f = f;
        best_x = x;
      }
    }
    return best_x;
  };
  const double coarse = best_on(lo, hi);
  const double w = (hi - lo) / steps;
  return best_on(std::max(lo, coarse - 2 * w), std::min(hi, coarse + 2 * w));
}

// Spectral-ball projection by brute force in the singular basis of M.
Matrix project_oracle(const Matrix& M, double radius) {
  SvdResult d = svd(M);
  Vector s(d.sv.size());
  for (Index i = 0; i < d.sv.size(); ++i) {
    const double target = d.sv(i);
    s(i) = scan_minimize(0.0, radius, [&](double x) {
      const double diff = x - target;
      return diff * diff;
    });
  }
  return d.U * s.asDiagonal() * d.V.transpose();
}

// Nuclear-norm prox by brute force in the singular basis of M.
Matrix svt_oracle(const Matrix& M, double t) {
  SvdResult d = svd(M);
  Vector s(d.sv.size());
  for (Index i = 0; i < d.sv.size(); ++i) {
    const double target = d.sv(i);
    s(i) = scan_minimize(0.0, target + t + 1.0, [&](double x) {
      const double diff = x - target;
      return 0.5 * diff * diff + t * x;
    });
  }
  return d.U * s.asDiagonal() * d.V.transpose();
}

Matrix diag2(double a, double b) {
  Matrix M = Matrix::Zero(2, 2);
  M(0, 0) = a;
  M(1, 1) = b;
  return M;
}

}  // namespace

TEST_CASE("svd: frozen examples") {
  SvdResult d = svd(diag2(2.0, 1.0));
  CHECK(d.sv(0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(d.sv(1) == doctest::Approx(1.0).epsilon(1e-12));

  Vector sz = svd(Matrix::Zero(3, 2)).sv;
  CHECK(sz(0) == 0.0);
  CHECK(sz(1) == 0.0);
}

TEST_CASE("svd: matches gram-matrix eigenvalues on random input") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Matrix M = random_matrix(5, 3, seed);
    const Vector got = svd(M).sv;
    const Vector want = sv_via_gram(M);
    REQUIRE(got.size() == want.size());
    for (Index i = 0; i < got.size(); ++i) CHECK(got(i) == doctest::Approx(want(i)).epsilon(1e-8));
  }
}

TEST_CASE("svd: factor invariants") {
  for (std::uint64_t seed = 10; seed < 13; ++seed) {
    const Matrix M = random_matrix(6, 4, seed);
    SvdResult d = svd(M);
    for (Index i = 0; i + 1 < d.sv.size(); ++i) CHECK(d.sv(i) >= d.sv(i + 1));
    CHECK(d.sv.minCoeff() >= 0.0);
    const Matrix R = d.U * d.sv.asDiagonal() * d.V.transpose();
    CHECK((R - M).norm() <= 1e-10 * M.norm());
    CHECK((d.U.transpose() * d.U - Matrix::Identity(4, 4)).norm() <= 1e-12);
    CHECK((d.V.transpose() * d.V - Matrix::Identity(4, 4)).norm() <= 1e-12);
  }
}

TEST_CASE("svd: rejects non-finite and empty input") {
  Matrix M = Matrix::Zero(2, 2);
  M(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(svd(M), std::invalid_argument);
  M(0, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(svd(M), std::invalid_argument);
  CHECK_THROWS_AS(svd(Matrix()), std::invalid_argument);
}

TEST_CASE("spectral_norm: examples and power-iteration oracle") {
  CHECK(spectral_norm(diag2(3.0, 1.0)) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(spectral_norm(Matrix::Identity(4, 4)) == doctest::Approx(1.0).epsilon(1e-12));
  for (std::uint64_t seed = 20; seed < 24; ++seed) {
    const Matrix M = random_matrix(4, 6, seed);
    CHECK(spectral_norm(M) ==
          doctest::Approx(specnorm_via_power(M, seed + 100)).epsilon(1e-8));
  }
}

TEST_CASE("nuclear_norm: examples and gram oracle") {
  CHECK(nuclear_norm(diag2(3.0, 1.0)) == doctest::Approx(4.0).epsilon(1e-12));

  Vector u = random_matrix(5, 1, 31).col(0).normalized();
  Vector v = random_matrix(4, 1, 32).col(0).normalized();
  const Matrix rank1 = u * v.transpose();
  CHECK(nuclear_norm(rank1) == doctest::Approx(1.0).epsilon(1e-10));

  for (std::uint64_t seed = 40; seed < 44; ++seed) {
    const Matrix M = random_matrix(4, 4, seed);
    CHECK(nuclear_norm(M) == doctest::Approx(sv_via_gram(M).sum()).epsilon(1e-8));
  }
}

TEST_CASE("frobenius_norm: examples and singular-value identity") {
  CHECK(frobenius_norm(diag2(3.0, 4.0)) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(frobenius_norm(Matrix::Zero(3, 3)) == 0.0);
  for (std::uint64_t seed = 50; seed < 53; ++seed) {
    const Matrix M = random_matrix(5, 4, seed);
    CHECK(frobenius_norm(M) == doctest::Approx(svd(M).sv.norm()).epsilon(1e-10));
  }
}

TEST_CASE("norm ordering: spectral <= frobenius <= nuclear") {
  for (std::uint64_t seed = 60; seed < 80; ++seed) {
    const Matrix M = random_matrix(5, 4, seed);
    const double sp = spectral_norm(M), fr = frobenius_norm(M), nu = nuclear_norm(M);
    CHECK(sp <= fr + 1e-10);
    CHECK(fr <= nu + 1e-10);
  }
}

TEST_CASE("project_spectral_ball: examples and dense-search oracle") {
  const Matrix P = project_spectral_ball(diag2(3.0, 1.0), 2.0);
  CHECK((P - diag2(2.0, 1.0)).norm() <= 1e-12);

  const Matrix Inside = 0.3 * Matrix::Identity(3, 3);
  CHECK((project_spectral_ball(Inside, 1.0) - Inside).norm() == 0.0);

  for (std::uint64_t seed = 90; seed < 93; ++seed) {
    const Matrix M = random_matrix(3, 3, seed);
    const Matrix got = project_spectral_ball(M, 1.0);
    const Matrix want = project_oracle(M, 1.0);
    CHECK((got - want).norm() <= 1e-6);
    CHECK(spectral_norm(got) <= 1.0 + 1e-12);
  }

  CHECK_THROWS_AS(project_spectral_ball(diag2(1, 1), -0.5), std::invalid_argument);
  CHECK(project_spectral_ball(diag2(1, 1), 0.0).norm() == 0.0);
}

TEST_CASE("svt: examples and dense-search oracle") {
  CHECK((svt(diag2(3.0, 1.0), 1.0) - diag2(2.0, 0.0)).norm() <= 1e-12);
  const Matrix M0 = random_matrix(4, 3, 101);
  CHECK((svt(M0, 0.0) - M0).norm() <= 1e-12 * M0.norm());

  for (std::uint64_t seed = 110; seed < 113; ++seed) {
    const Matrix M = random_matrix(4, 3, seed);
    const Matrix got = svt(M, 0.7);
    const Matrix want = svt_oracle(M, 0.7);
    CHECK((got - want).norm() <= 1e-6);
  }

  // Prox optimality: the candidate beats nearby perturbations.
  const Matrix M = random_matrix(4, 3, 120);
  const double t = 0.9;
  const Matrix N = svt(M, t);
  const double f_star = 0.5 * (N - M).squaredNorm() + t * nuclear_norm(N);
  for (std::uint64_t seed = 121; seed < 126; ++seed) {
    const Matrix D = 0.05 * random_matrix(4, 3, seed);
    const Matrix cand = N + D;
    const double f = 0.5 * (cand - M).squaredNorm() + t * nuclear_norm(cand);
    CHECK(f >= f_star - 1e-10);
  }
  CHECK_THROWS_AS(svt(M, -1.0), std::invalid_argument);
}

TEST_CASE("rank_eps: examples") {
  const Matrix L = random_matrix(5, 2, 130);
  const Matrix R = random_matrix(2, 7, 131);
  CHECK(rank_eps(L * R) == 2);
  CHECK(rank_eps(Matrix::Zero(3, 4)) == 0);
  CHECK(rank_eps(Matrix::Identity(4, 4)) == 4);

  Matrix near = diag2(1.0, 1e-12);
  CHECK(rank_eps(near) == 1);          // below the relative cutoff
  CHECK(rank_eps(near, 1e-13) == 2);   // tighter tolerance sees it
  CHECK_THROWS_AS(rank_eps(near, 0.0), std::invalid_argument);
}

TEST_CASE("projection properties: nonexpansive, idempotent, firm, ray") {
  int trials = 0;
  for (std::uint64_t seed = 500; seed < 700; ++seed) {
    NormalSampler rng(seed);
    const Index rows = 3 + static_cast<Index>(seed % 3);
    const Index cols = 3 + static_cast<Index>((seed / 3) % 3);
    const Matrix A = random_matrix(rows, cols, seed * 3 + 1);
    const Matrix B = random_matrix(rows, cols, seed * 3 + 2);
    const double radius = 0.2 + std::abs(rng());

    const Matrix PA = project_spectral_ball(A, radius);
    const Matrix PB = project_spectral_ball(B, radius);

    CHECK((PA - PB).norm() <= (A - B).norm() + 1e-10);
    CHECK((project_spectral_ball(PA, radius) - PA).norm() <= 1e-10);

    const double inner = (PA - PB).cwiseProduct(A - B).sum();
    CHECK(inner >= (PA - PB).squaredNorm() - 1e-10);

    for (double t : {0.0, 0.5, 1.0, 2.0, 10.0}) {
      const Matrix ray = PA + t * (A - PA);
      CHECK((project_spectral_ball(ray, radius) - PA).norm() <= 1e-8);
    }
    ++trials;
  }
  CHECK(trials == 200);
}

TEST_CASE("singular value inequalities: sums and products") {
  for (std::uint64_t seed = 800; seed < 850; ++seed) {
    const Index p = 5, q = 4;
    const Matrix P = random_matrix(p, q, seed * 7 + 1);
    const Matrix Q = random_matrix(p, q, seed * 7 + 2);
    const Vector sp = svd(P).sv;
    const Vector sq = svd(Q).sv;
    const Vector ssum = svd(P + Q).sv;
    const Vector sprod = svd(P * Q.transpose()).sv;
    const Index l = std::min(p, q);
    for (Index i = 1; i <= l; ++i)
      for (Index j = 1; i + j - 1 <= l; ++j) {
        CHECK(sp(i - 1) + sq(j - 1) - ssum(i + j - 2) >= -1e-10);
        CHECK(sp(i - 1) * sq(j - 1) - sprod(i + j - 2) >= -1e-10);
      }
  }
}
