#include "lqr.hpp"

namespace voikit {

RiccatiSolution riccati_backward(const LinearGaussianModel& md, const CostWeights& costs) {
  const int N = md.N;
  RiccatiSolution r;
  r.S.resize(N + 3);
  r.L.resize(N + 1);
  r.Gamma.resize(N + 2);
  r.Huu.resize(N + 1);
  r.theta.resize(N + 1);

  r.S[N + 2] = MatrixXd::Zero(md.n, md.n);
  r.S[N + 1] = costs.Q[N + 1];

  for (int k = N; k >= 0; --k) {
    const MatrixXd& A = md.A[k];
    const MatrixXd& B = md.B[k];
    MatrixXd BtS = B.transpose() * r.S[k + 1];  // m x n
    MatrixXd H = BtS * B + costs.R[k];
    symmetrize(H);
    Eigen::LLT<MatrixXd> llt(H);
    if (llt.info() != Eigen::Success)
      throw NumericalError("Riccati factorization of B'S(k+1)B + R failed at stage " +
                           std::to_string(k));
    MatrixXd BtSA = BtS * A;           // m x n
    r.L[k] = llt.solve(BtSA);          // (B'SB+R)^-1 B'SA
    r.Huu[k] = H;
    r.S[k] = costs.Q[k] + A.transpose() * r.S[k + 1] * A - BtSA.transpose() * r.L[k];
    symmetrize(r.S[k]);
    r.Gamma[k] = BtSA.transpose() * llt.solve(BtSA);
    symmetrize(r.Gamma[k]);
    r.theta[k] = costs.ell[k] * costs.lambda;
  }
  r.Gamma[N + 1] = MatrixXd::Zero(md.n, md.n);
  return r;
}

double stage_cost_eta(const VectorXd& x, const VectorXd& u, int k,
                      const RiccatiSolution& ric) {
  if (k < 0 || k > ric.horizon())
    throw ArgError("stage_cost_eta: stage " + std::to_string(k) + " out of range");
  VectorXd d = u + ric.L[k] * x;
  return d.dot(ric.Huu[k] * d);
}

}  // namespace voikit
