#include <doctest.h>

#include <random>

#include "lqr.hpp"
#include "support/oracles.hpp"

using namespace voikit;

namespace {

LinearGaussianModel scalar_model(double A, double B, int N) {
  MatrixXd one = MatrixXd::Identity(1, 1);
  MatrixXd a(1, 1), b(1, 1);
  a << A;
  b << B;
  return LinearGaussianModel::stationary(a, b, one, one, one, VectorXd::Zero(1), one, N);
}

}  // namespace

TEST_CASE("scalar Riccati, N = 0: hand values") {
  LinearGaussianModel md = scalar_model(1, 1, 0);
  CostWeights costs = CostWeights::stationary(MatrixXd::Identity(1, 1),
                                              MatrixXd::Identity(1, 1), 1.0, 1.0, 0);
  RiccatiSolution ric = riccati_backward(md, costs);
  CHECK(ric.S[1](0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ric.S[0](0, 0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(ric.L[0](0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(ric.S[2].norm() == 0.0);       // S(N+2) = 0 convention
  CHECK(ric.Gamma[1].norm() == 0.0);   // hence Gamma(N+1) = 0
  CHECK(ric.theta[0] == 1.0);

  SUBCASE("eta examples") {
    VectorXd x(1), u(1);
    x << 1.0;
    u << 0.0;
    CHECK(stage_cost_eta(x, u, 0, ric) == doctest::Approx(0.5).epsilon(1e-15));
    x << 0.0;
    u << 1.0;
    CHECK(stage_cost_eta(x, u, 0, ric) == doctest::Approx(2.0).epsilon(1e-15));
    x << 0.7;
    u = -ric.L[0] * x;
    CHECK(stage_cost_eta(x, u, 0, ric) == doctest::Approx(0.0));
  }
}

TEST_CASE("zero terminal weight, N = 0: S(0) = Q(0)") {
  LinearGaussianModel md = scalar_model(1.3, 0.7, 0);
  MatrixXd q(1, 1), r(1, 1);
  q << 2.5;
  r << 1.0;
  CostWeights costs = CostWeights::stationary(q, MatrixXd::Zero(1, 1), r, 1.0, 1.0, 0);
  RiccatiSolution ric = riccati_backward(md, costs);
  CHECK(ric.S[0](0, 0) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("B = 0: no-control limit") {
  const int N = 5;
  LinearGaussianModel md = scalar_model(1.1, 0.0, N);
  CostWeights costs = CostWeights::stationary(MatrixXd::Identity(1, 1),
                                              MatrixXd::Identity(1, 1), 1.0, 1.0, N);
  RiccatiSolution ric = riccati_backward(md, costs);
  double expect = 1.0;  // S = sum of A^T ... A products of Q
  for (int k = N; k >= 0; --k) expect = 1.0 + 1.1 * 1.1 * expect;
  CHECK(ric.S[0](0, 0) == doctest::Approx(expect).epsilon(1e-12));
  for (int k = 0; k <= N; ++k) {
    CHECK(ric.L[k].norm() == 0.0);
    CHECK(ric.Gamma[k].norm() == 0.0);
  }
}

TEST_CASE("stationary scalar N = 200 converges to the bisection root") {
  LinearGaussianModel md = scalar_model(1, 1, 200);
  CostWeights costs = CostWeights::stationary(MatrixXd::Identity(1, 1),
                                              MatrixXd::Identity(1, 1), 1.0, 1.0, 200);
  RiccatiSolution ric = riccati_backward(md, costs);
  double root = oracles::scalar_dare_root(1, 1, 1, 1);
  CHECK(std::abs(ric.S[0](0, 0) - root) < 1e-9);
}

TEST_CASE("Gamma identity and positive semidefiniteness on random models") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> dist;
  for (int rep = 0; rep < 25; ++rep) {
    int n = 1 + static_cast<int>(rng() % 3);
    int m = 1 + static_cast<int>(rng() % 2);
    int N = 1 + static_cast<int>(rng() % 5);
    auto randmat = [&](int r, int c) {
      MatrixXd mm(r, c);
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) mm(i, j) = dist(rng);
      return mm;
    };
    MatrixXd A = randmat(n, n), B = randmat(n, m), C = randmat(1, n);
    MatrixXd qroot = randmat(n, n);
    MatrixXd Q = qroot * qroot.transpose();
    MatrixXd rroot = randmat(m, m);
    MatrixXd R = rroot * rroot.transpose() + 0.2 * MatrixXd::Identity(m, m);
    LinearGaussianModel md = LinearGaussianModel::stationary(
        A, B, C, MatrixXd::Identity(n, n), MatrixXd::Identity(1, 1), VectorXd::Zero(n),
        MatrixXd::Identity(n, n), N);
    CostWeights costs = CostWeights::stationary(Q, R, 1.0, 0.5, N);
    costs.ell[N] = 2.0;  // exercise per-stage ell
    RiccatiSolution ric = riccati_backward(md, costs);

    CHECK(ric.theta[0] == doctest::Approx(0.5));
    CHECK(ric.theta[N] == doctest::Approx(1.0));
    for (int k = 0; k <= N; ++k) {
      // Gamma(k) = L(k)^T Huu(k) L(k)
      MatrixXd alt = ric.L[k].transpose() * ric.Huu[k] * ric.L[k];
      CHECK((ric.Gamma[k] - alt).cwiseAbs().maxCoeff() < 1e-10 *
                std::max(1.0, ric.Gamma[k].cwiseAbs().maxCoeff()));
      CHECK(is_positive_semidefinite(ric.Gamma[k], 1e-9));
      CHECK(is_positive_semidefinite(ric.S[k], 1e-9));
    }
  }
}
