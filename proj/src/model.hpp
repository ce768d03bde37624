#pragma once

#include <optional>
#include <string>
#include <vector>

#include "common.hpp"

namespace voikit {

// Time-varying linear-Gaussian plant and sensor over a finite horizon.
// Decisions happen at stages 0..N; the state x(N+1) exists only for the
// terminal cost. Per-stage matrices are stored for every stage; the
// stationary shorthand in the config format replicates one matrix set.
//
//   x(k+1) = A(k) x(k) + B(k) u(k) + w(k),   w(k) ~ N(0, W(k))
//   y(k)   = C(k) x(k) + v(k),               v(k) ~ N(0, V(k))
//   x(0)   ~ N(m0, M0)
struct LinearGaussianModel {
  int n = 0;  // state dimension
  int m = 0;  // input dimension
  int p = 0;  // output dimension
  int N = 0;  // horizon: decision stages 0..N

  std::vector<MatrixXd> A, B, C, W, V;  // one entry per stage 0..N
  VectorXd m0;
  MatrixXd M0;

  static LinearGaussianModel stationary(const MatrixXd& A, const MatrixXd& B,
                                        const MatrixXd& C, const MatrixXd& W,
                                        const MatrixXd& V, const VectorXd& m0,
                                        const MatrixXd& M0, int N);
};

// Quadratic stage weights and the rate-regulation tradeoff multiplier.
// Q has stages 0..N+1 (terminal weight included), R and ell 0..N.
struct CostWeights {
  std::vector<MatrixXd> Q;
  std::vector<MatrixXd> R;
  std::vector<double> ell;
  double lambda = 1.0;

  static CostWeights stationary(const MatrixXd& Q, const MatrixXd& R, double ell,
                                double lambda, int N);
  static CostWeights stationary(const MatrixXd& Q, const MatrixXd& Qterm,
                                const MatrixXd& R, double ell, double lambda, int N);
};

// Channel output: either the transmitted encoder estimate or the
// erasure symbol. z(0) is always an erasure.
struct ChannelSymbol {
  std::optional<VectorXd> payload;

  bool erasure() const { return !payload.has_value(); }
  static ChannelSymbol erased() { return {}; }
  static ChannelSymbol of(const VectorXd& x) { return {x}; }
};

// Channel input-output relation: the payload sent at stage k (if
// sigma = 1) is delivered as z(k+1); otherwise z(k+1) is an erasure.
inline ChannelSymbol channel_step(bool sigma, const VectorXd& payload) {
  return sigma ? ChannelSymbol::of(payload) : ChannelSymbol::erased();
}

using ValidationReport = std::vector<std::string>;

// Checks dimensions, symmetry and definiteness of every per-stage
// matrix. Symmetric inputs with asymmetry below 1e-12 are symmetrized
// in place (so the call is idempotent); larger asymmetries are
// reported. Returns the list of violated invariants; empty means valid.
ValidationReport validate_model(LinearGaussianModel& model, CostWeights& costs);

// Throwing wrapper used by sessions: raises ValidationError with the
// report attached when the report is non-empty.
void require_valid(LinearGaussianModel& model, CostWeights& costs);

}  // namespace voikit
