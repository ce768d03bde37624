#pragma once

#include <memory>

#include "estimator.hpp"
#include "lqr.hpp"
#include "model.hpp"

namespace voikit {

struct GridSpec {
  int points = 201;              // per dimension, must be odd
  double bound_multiplier = 6.0; // bounds as a multiple of the mismatch scale
  int max_dim = 2;               // guard for the O(N d^n s) table cost
  std::vector<double> bounds;    // optional explicit per-dimension half-widths
};

struct QuadratureSpec {
  int nodes = 9;  // per dimension, symmetric
};

// Symmetric mismatch grid: per dimension an odd number of equispaced
// breakpoints (j - half) * step, j = 0..points-1, so the grid is exactly
// invariant under e -> -e.
struct MismatchGrid {
  std::vector<int> points;
  VectorXd step;
  VectorXd bound;
  VectorXd scale;  // reference mismatch standard deviation per dimension

  int dims() const { return static_cast<int>(points.size()); }
  long total_nodes() const;
  double coord(int dim, int idx) const {
    return (idx - (points[dim] - 1) / 2) * step[dim];
  }
  VectorXd node(long flat) const;
  long flatten(const std::vector<int>& idx) const;
  long mirror(long flat) const;
};

// Reference per-dimension mismatch scale: standard deviation envelope of
// the never-transmit mismatch recursion Sigma(k+1) = A Sigma A^T + Kov
// over the horizon (for stable dynamics this approaches the stationary
// covariance; for marginally stable or unstable dynamics it covers the
// worst accumulation any scheduler can produce).
VectorXd mismatch_scale(const LinearGaussianModel& model, const EncoderGains& gains);

MismatchGrid build_grid(const LinearGaussianModel& model, const EncoderGains& gains,
                        const GridSpec& spec);

// Symmetric Gauss-Hermite rule rescaled for the standard normal:
// E[f(Z)] ~= sum_i weights[i] f(nodes[i]), Z ~ N(0,1). Nodes are exactly
// symmetric (built from the positive half) and weights sum to one.
struct GaussQuadrature {
  VectorXd nodes;
  VectorXd weights;
};

GaussQuadrature gauss_hermite(int s);

// Per-stage value function, value of information and continuation gap
// sampled on the mismatch grid.
//
// The backward recursion drops policy-independent constants, keeping
// exactly the sigma-dependent parts of the encoder value function:
//   V_k|sigma=1 = theta(k) + E[V_{k+1}(xi)]
//   V_k|sigma=0 = (A e)^T Gamma(k+1) (A e) + E[V_{k+1}(A e + xi)]
//   V_k         = min(...),   V_{N+1} == 0
//   VoI_k(e)    = V_k|0 - V_k|1
//   rho_k(e)    = E[V_{k+1}(A e + xi)] - E[V_{k+1}(xi)]
// with xi ~ N(0, Kov(k+1)) the mismatch innovation. Symmetry in e is
// bit-exact: values are computed on canonical nodes and mirrored.
class VoiTable {
 public:
  MismatchGrid grid;
  int quad_nodes = 0;
  int N = 0;
  std::vector<VectorXd> value;  // stage k = 0..N, flattened grid
  std::vector<VectorXd> voi;
  std::vector<VectorXd> rho;

  double lookup_voi(int k, const VectorXd& e) const;
  double lookup_value(int k, const VectorXd& e) const;  // V_{N+1} == 0
  double lookup_rho(int k, const VectorXd& e) const;
};

VoiTable build_voi_table(const LinearGaussianModel& model, const CostWeights& costs,
                         const RiccatiSolution& ric, const EncoderGains& gains,
                         const GridSpec& grid_spec, const QuadratureSpec& quad_spec);

double voi_lookup(const VoiTable& table, int k, const VectorXd& e);
double rho_extract(const VoiTable& table, int k, const VectorXd& e);

// Closed-form quadratic approximation
//   VoI+_k(e) = e^T A(k)^T Gamma(k+1) A(k) e - theta(k).
double voi_quadratic(const VectorXd& e, int k, const RiccatiSolution& ric,
                     const LinearGaussianModel& model);

}  // namespace voikit
