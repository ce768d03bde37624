#include "support/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace oracles {

std::vector<MatrixXd> kalman_covariances(const std::vector<MatrixXd>& A,
                                         const std::vector<MatrixXd>& C,
                                         const std::vector<MatrixXd>& W,
                                         const std::vector<MatrixXd>& V,
                                         const MatrixXd& M0, int N) {
  const int n = static_cast<int>(M0.rows());
  std::vector<MatrixXd> O(N + 1);
  MatrixXd I = MatrixXd::Identity(n, n);
  MatrixXd P = M0;
  for (int k = 0; k <= N; ++k) {
    if (k > 0) P = A[k - 1] * O[k - 1] * A[k - 1].transpose() + W[k - 1];
    MatrixXd Sinn = C[k] * P * C[k].transpose() + V[k];
    MatrixXd K = P * C[k].transpose() * Sinn.inverse();
    O[k] = (I - K * C[k]) * P;
    O[k] = 0.5 * (O[k] + O[k].transpose());
  }
  return O;
}

double scalar_dare_root(double a, double b, double q, double r) {
  auto f = [&](double s) {
    return q + a * a * s - a * a * b * b * s * s / (b * b * s + r) - s;
  };
  double lo = 0.0, hi = std::max(1.0, q);
  while (f(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e12) throw std::runtime_error("dare bisection: no bracket");
  }
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void ScalarDpOracle::solve() {
  // Riccati (scalar, from scratch)
  S.assign(N + 3, 0.0);
  L.assign(N + 1, 0.0);
  Gamma.assign(N + 2, 0.0);
  theta.assign(N + 1, ell * lambda);
  S[N + 1] = qterm;
  for (int k = N; k >= 0; --k) {
    double h = b * b * S[k + 1] + r;
    L[k] = b * S[k + 1] * a / h;
    S[k] = q + a * a * S[k + 1] - a * S[k + 1] * b * L[k];
  }
  for (int j = 0; j <= N; ++j) {
    double h = b * b * S[j + 1] + r;
    Gamma[j] = a * S[j + 1] * b * b * S[j + 1] * a / h;
  }
  Gamma[N + 1] = 0.0;

  // encoder covariance schedule (scalar information filter)
  O.assign(N + 1, 0.0);
  K.assign(N + 1, 0.0);
  Theta.assign(N + 1, 0.0);
  Kov.assign(N + 1, 0.0);
  O[0] = 1.0 / (1.0 / m0var + c * c / v);
  K[0] = O[0] * c / v;
  Theta[0] = c * c * m0var + v;
  Kov[0] = K[0] * K[0] * Theta[0];
  for (int k = 0; k < N; ++k) {
    double P = a * a * O[k] + w;
    O[k + 1] = 1.0 / (1.0 / P + c * c / v);
    K[k + 1] = O[k + 1] * c / v;
    Theta[k + 1] = c * c * P + v;
    Kov[k + 1] = K[k + 1] * K[k + 1] * Theta[k + 1];
  }

  if (!(grid_bound > 0.0)) throw std::runtime_error("oracle grid_bound unset");
  grid_.resize(grid_points);
  int half = (grid_points - 1) / 2;
  double step = grid_bound / half;
  for (int i = 0; i < grid_points; ++i) grid_[i] = (i - half) * step;

  value_.assign(N + 2, std::vector<double>(grid_points, 0.0));
  voi_.assign(N + 1, std::vector<double>(grid_points, 0.0));
  rho_.assign(N + 1, std::vector<double>(grid_points, 0.0));

  for (int k = N; k >= 0; --k) {
    double g1 = Gamma[k + 1];
    std::vector<double> nodes, wts;
    double e_reset = 0.0;
    if (k < N) {
      double sig = std::sqrt(Kov[k + 1]);
      nodes.resize(integration_points);
      wts.resize(integration_points);
      double span = 8.0 * sig;
      double wsum = 0.0;
      for (int i = 0; i < integration_points; ++i) {
        double x = -span + 2.0 * span * i / (integration_points - 1);
        nodes[i] = x;
        wts[i] = std::exp(-0.5 * x * x / (sig * sig));
        wsum += wts[i];
      }
      for (double& wt : wts) wt /= wsum;
      for (int i = 0; i < integration_points; ++i)
        e_reset += wts[i] * interp(value_[k + 1], nodes[i]);
    }
    for (int gi = 0; gi < grid_points; ++gi) {
      double e = grid_[gi];
      double quad = a * e * g1 * a * e;
      double e_hold = 0.0;
      if (k < N) {
        for (size_t i = 0; i < nodes.size(); ++i)
          e_hold += wts[i] * interp(value_[k + 1], a * e + nodes[i]);
      }
      double v1 = theta[k] + e_reset;
      double v0 = quad + e_hold;
      value_[k][gi] = std::min(v0, v1);
      voi_[k][gi] = v0 - v1;
      rho_[k][gi] = e_hold - e_reset;
    }
  }
}

double ScalarDpOracle::interp(const std::vector<double>& vals, double x) const {
  int d = grid_points;
  int half = (d - 1) / 2;
  double step = grid_bound / half;
  double t = x / step + half;
  if (t <= 0.0) return vals[0];
  if (t >= d - 1) return vals[d - 1];
  int i = static_cast<int>(t);
  double f = t - i;
  return (1.0 - f) * vals[i] + f * vals[i + 1];
}

double ScalarDpOracle::voi_at(int k, double e) const { return interp(voi_[k], e); }
double ScalarDpOracle::rho_at(int k, double e) const { return interp(rho_[k], e); }
double ScalarDpOracle::value_at(int k, double e) const { return interp(value_[k], e); }

double one_sided_iota_stage1(double a, double kov0, double kov1, double c, int points) {
  double s0 = std::sqrt(kov0), s1 = std::sqrt(kov1);
  double lo0 = -8.0 * s0, hi0 = std::min(c, 8.0 * s0);
  double lo1 = -8.0 * s1, hi1 = 8.0 * s1;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < points; ++i) {
    double e0 = lo0 + (hi0 - lo0) * i / (points - 1);
    double w0 = std::exp(-0.5 * e0 * e0 / (kov0));
    for (int j = 0; j < points; ++j) {
      double xi = lo1 + (hi1 - lo1) * j / (points - 1);
      double e1 = a * e0 + xi;
      if (e1 > c) continue;  // sigma(1) = 0 requires no transmission
      double wgt = w0 * std::exp(-0.5 * xi * xi / kov1);
      num += wgt * e1;
      den += wgt;
    }
  }
  return a * num / den;
}

}  // namespace oracles
