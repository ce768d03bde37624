#pragma once

#include "model.hpp"

namespace voikit {

// Backward Riccati pass results.
//
// Index conventions (one past the usual LQR ranges, to serve the
// value-of-information recursion):
//   S(k)     for k = 0..N+2, with S(N+1) = Q(N+1) and S(N+2) = 0
//   L(k)     for k = 0..N
//   Gamma(k) for k = 0..N+1, with
//       Gamma(j) = A(j)^T S(j+1) B(j) (B(j)^T S(j+1) B(j) + R(j))^-1
//                  B(j)^T S(j+1) A(j)
//   and Gamma(N+1) = 0 as a consequence of S(N+2) = 0. The VoI formulas
//   consume Gamma at argument k+1.
//   theta(k) = ell(k) * lambda for k = 0..N
//   Huu(k)   = B(k)^T S(k+1) B(k) + R(k) for k = 0..N (the input-space
//   curvature used by the equivalent stage cost eta).
struct RiccatiSolution {
  std::vector<MatrixXd> S;
  std::vector<MatrixXd> L;
  std::vector<MatrixXd> Gamma;
  std::vector<MatrixXd> Huu;
  std::vector<double> theta;

  int horizon() const { return static_cast<int>(theta.size()) - 1; }
};

RiccatiSolution riccati_backward(const LinearGaussianModel& model,
                                 const CostWeights& costs);

// Equivalent per-stage regulation cost
//   eta(k) = (u + L(k) x)^T Huu(k) (u + L(k) x),  k in [0, N].
// The convention eta(N+1) = 0 is the caller's responsibility.
double stage_cost_eta(const VectorXd& x, const VectorXd& u, int k,
                      const RiccatiSolution& ric);

}  // namespace voikit
