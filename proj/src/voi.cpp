#include "voi.hpp"

#include <algorithm>
#include <future>
#include <thread>

namespace voikit {

long MismatchGrid::total_nodes() const {
  long t = 1;
  for (int d : points) t *= d;
  return t;
}

VectorXd MismatchGrid::node(long flat) const {
  VectorXd e(dims());
  for (int dim = dims() - 1; dim >= 0; --dim) {
    int idx = static_cast<int>(flat % points[dim]);
    flat /= points[dim];
    e[dim] = coord(dim, idx);
  }
  return e;
}

long MismatchGrid::flatten(const std::vector<int>& idx) const {
  long flat = 0;
  for (int dim = 0; dim < dims(); ++dim) flat = flat * points[dim] + idx[dim];
  return flat;
}

long MismatchGrid::mirror(long flat) const {
  long out = 0;
  std::vector<int> idx(dims());
  for (int dim = dims() - 1; dim >= 0; --dim) {
    idx[dim] = static_cast<int>(flat % points[dim]);
    flat /= points[dim];
  }
  for (int dim = 0; dim < dims(); ++dim)
    out = out * points[dim] + (points[dim] - 1 - idx[dim]);
  return out;
}

VectorXd mismatch_scale(const LinearGaussianModel& md, const EncoderGains& gains) {
  MatrixXd sigma = gains.Kov[0];
  VectorXd scale = sigma.diagonal().cwiseMax(0.0);
  for (int k = 0; k + 1 <= md.N; ++k) {
    sigma = md.A[k] * sigma * md.A[k].transpose() + gains.Kov[k + 1];
    symmetrize(sigma);
    scale = scale.cwiseMax(sigma.diagonal());
  }
  scale = scale.cwiseSqrt();
  // Degenerate (noise-free) dimensions still need a nonzero grid width.
  double top = scale.maxCoeff();
  if (top <= 0.0) top = 1.0;
  for (int i = 0; i < scale.size(); ++i)
    if (scale[i] <= 0.0) scale[i] = top;
  return scale;
}

MismatchGrid build_grid(const LinearGaussianModel& md, const EncoderGains& gains,
                        const GridSpec& spec) {
  if (md.n > spec.max_dim)
    throw ValidationError(
        "exact VoI table limited to " + std::to_string(spec.max_dim) +
        " mismatch dimensions (model has " + std::to_string(md.n) +
        "); use the quadratic approximation VoI+ instead");
  if (spec.points < 3 || spec.points % 2 == 0)
    throw ValidationError("grid points per dimension must be odd and at least 3 "
                          "so the grid is symmetric");
  if (!spec.bounds.empty() && static_cast<int>(spec.bounds.size()) != md.n)
    throw ValidationError("grid bounds must have one entry per state dimension");

  MismatchGrid g;
  g.points.assign(md.n, spec.points);
  g.scale = mismatch_scale(md, gains);
  g.bound.resize(md.n);
  g.step.resize(md.n);
  int half = (spec.points - 1) / 2;
  for (int i = 0; i < md.n; ++i) {
    double b = spec.bounds.empty() ? spec.bound_multiplier * g.scale[i] : spec.bounds[i];
    if (!(b > 0.0)) throw ValidationError("grid bounds must be positive");
    g.bound[i] = b;
    g.step[i] = b / half;
  }
  return g;
}

GaussQuadrature gauss_hermite(int s) {
  if (s < 1) throw ArgError("quadrature nodes must be positive");
  // Golub-Welsch on the tridiagonal Jacobi matrix of the Hermite
  // recurrence: eigenvalues are the nodes, squared first eigenvector
  // components the weights. Stable for node counts in the thousands.
  VectorXd diag = VectorXd::Zero(s);
  VectorXd sub(std::max(0, s - 1));
  for (int j = 1; j < s; ++j) sub[j - 1] = std::sqrt(j / 2.0);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success)
    throw NumericalError("Gauss-Hermite eigenvalue computation failed");

  GaussQuadrature q;
  q.nodes.resize(s);
  q.weights.resize(s);
  for (int i = 0; i < s; ++i) {
    q.nodes[i] = std::sqrt(2.0) * es.eigenvalues()[i];  // rescale to N(0,1)
    double v0 = es.eigenvectors()(0, i);
    q.weights[i] = v0 * v0;
  }
  // enforce exact symmetry: mirror the halves, pin the center at zero
  for (int i = 0; i < s / 2; ++i) {
    double node = 0.5 * (q.nodes[s - 1 - i] - q.nodes[i]);
    q.nodes[s - 1 - i] = node;
    q.nodes[i] = -node;
    double w = 0.5 * (q.weights[i] + q.weights[s - 1 - i]);
    q.weights[i] = q.weights[s - 1 - i] = w;
  }
  if (s % 2 == 1) q.nodes[s / 2] = 0.0;
  q.weights /= q.weights.sum();
  return q;
}

namespace {

// Multilinear interpolation with clamped extrapolation; exact at nodes.
double interpolate(const MismatchGrid& g, const VectorXd& values, const VectorXd& q) {
  const int n = g.dims();
  int cell[4];
  double frac[4];
  if (n > 4) throw ArgError("grid interpolation supports up to 4 dimensions");
  for (int dim = 0; dim < n; ++dim) {
    int d = g.points[dim];
    int half = (d - 1) / 2;
    double t = q[dim] / g.step[dim] + half;
    double snapped = std::round(t);
    if (std::abs(t - snapped) < 1e-9) t = snapped;  // queries at nodes stay exact
    if (t <= 0.0) {
      cell[dim] = 0;
      frac[dim] = 0.0;
    } else if (t >= d - 1) {
      cell[dim] = d - 2;
      frac[dim] = 1.0;
    } else {
      cell[dim] = static_cast<int>(t);
      frac[dim] = t - cell[dim];
    }
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << n); ++corner) {
    double wgt = 1.0;
    long flat = 0;
    for (int dim = 0; dim < n; ++dim) {
      int hi = (corner >> dim) & 1;
      wgt *= hi ? frac[dim] : 1.0 - frac[dim];
      flat = flat * g.points[dim] + cell[dim] + hi;
    }
    if (wgt != 0.0) acc += wgt * values[flat];
  }
  return acc;
}

// Tensor-product quadrature for xi ~ N(0, Kov): nodes F * z over the
// nonsingular directions of Kov, symmetric as a set.
struct NoiseQuadrature {
  std::vector<VectorXd> nodes;
  std::vector<double> weights;
};

NoiseQuadrature noise_quadrature(const MatrixXd& kov, const GaussQuadrature& q1) {
  MatrixXd f = psd_factor(kov);
  const int r = static_cast<int>(f.cols());
  const int s = static_cast<int>(q1.nodes.size());
  NoiseQuadrature nq;
  long total = 1;
  for (int i = 0; i < r; ++i) total *= s;
  nq.nodes.reserve(total);
  nq.weights.reserve(total);
  if (r == 0) {
    nq.nodes.push_back(VectorXd::Zero(kov.rows()));
    nq.weights.push_back(1.0);
    return nq;
  }
  std::vector<int> idx(r, 0);
  VectorXd z(r);
  for (long t = 0; t < total; ++t) {
    double wgt = 1.0;
    long rem = t;
    for (int i = r - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(rem % s);
      rem /= s;
      z[i] = q1.nodes[idx[i]];
      wgt *= q1.weights[idx[i]];
    }
    nq.nodes.push_back(f * z);
    nq.weights.push_back(wgt);
  }
  return nq;
}

void for_each_parallel(long count, const std::function<void(long, long)>& body) {
  unsigned threads = std::thread::hardware_concurrency();
  if (threads <= 1 || count < 4096) {
    body(0, count);
    return;
  }
  long chunk = (count + threads - 1) / threads;
  std::vector<std::future<void>> futs;
  for (long lo = 0; lo < count; lo += chunk) {
    long hi = std::min(count, lo + chunk);
    futs.push_back(std::async(std::launch::async, body, lo, hi));
  }
  for (auto& f : futs) f.get();
}

}  // namespace

VoiTable build_voi_table(const LinearGaussianModel& md, const CostWeights& costs,
                         const RiccatiSolution& ric, const EncoderGains& gains,
                         const GridSpec& grid_spec, const QuadratureSpec& quad_spec) {
  VoiTable t;
  t.grid = build_grid(md, gains, grid_spec);
  t.quad_nodes = quad_spec.nodes;
  t.N = md.N;
  const long nodes = t.grid.total_nodes();
  t.value.assign(md.N + 1, VectorXd::Zero(nodes));
  t.voi.assign(md.N + 1, VectorXd::Zero(nodes));
  t.rho.assign(md.N + 1, VectorXd::Zero(nodes));

  GaussQuadrature q1 = gauss_hermite(quad_spec.nodes);
  VectorXd next = VectorXd::Zero(nodes);  // V_{k+1}, starts as V_{N+1} == 0

  for (int k = md.N; k >= 0; --k) {
    MatrixXd M = md.A[k].transpose() * ric.Gamma[k + 1] * md.A[k];
    symmetrize(M);
    double theta = ric.theta[k];

    NoiseQuadrature nq;
    double e_reset = 0.0;  // E[V_{k+1}(xi)]
    bool terminal = (k == md.N);
    if (!terminal) {
      nq = noise_quadrature(gains.Kov[k + 1], q1);
      CompensatedSum acc;
      for (size_t j = 0; j < nq.nodes.size(); ++j)
        acc.add(nq.weights[j] * interpolate(t.grid, next, nq.nodes[j]));
      e_reset = acc.value();
    }

    VectorXd& vk = t.value[k];
    VectorXd& voik = t.voi[k];
    VectorXd& rhok = t.rho[k];
    const MismatchGrid& grid = t.grid;

    for_each_parallel(nodes, [&](long lo, long hi) {
      for (long flat = lo; flat < hi; ++flat) {
        long mir = grid.mirror(flat);
        if (mir < flat) continue;  // canonical representative computes both
        VectorXd e = grid.node(flat);
        double quad = e.dot(M * e);
        double e_hold = 0.0;  // E[V_{k+1}(A e + xi)]
        if (!terminal) {
          VectorXd ae = md.A[k] * e;
          CompensatedSum acc;
          for (size_t j = 0; j < nq.nodes.size(); ++j)
            acc.add(nq.weights[j] * interpolate(grid, next, ae + nq.nodes[j]));
          e_hold = acc.value();
        }
        double v_tx = theta + e_reset;
        double v_hold = quad + e_hold;
        vk[flat] = std::min(v_tx, v_hold);
        voik[flat] = v_hold - v_tx;
        rhok[flat] = e_hold - e_reset;
        if (mir != flat) {
          vk[mir] = vk[flat];
          voik[mir] = voik[flat];
          rhok[mir] = rhok[flat];
        }
      }
    });
    next = vk;
  }
  return t;
}

double VoiTable::lookup_voi(int k, const VectorXd& e) const {
  if (k < 0 || k > N) throw ArgError("voi_lookup: stage out of range");
  return interpolate(grid, voi[k], e);
}

double VoiTable::lookup_value(int k, const VectorXd& e) const {
  if (k < 0 || k > N + 1) throw ArgError("value lookup: stage out of range");
  if (k == N + 1) return 0.0;
  return interpolate(grid, value[k], e);
}

double VoiTable::lookup_rho(int k, const VectorXd& e) const {
  if (k < 0 || k > N) throw ArgError("rho_extract: stage out of range");
  return interpolate(grid, rho[k], e);
}

double voi_lookup(const VoiTable& table, int k, const VectorXd& e) {
  return table.lookup_voi(k, e);
}

double rho_extract(const VoiTable& table, int k, const VectorXd& e) {
  return table.lookup_rho(k, e);
}

double voi_quadratic(const VectorXd& e, int k, const RiccatiSolution& ric,
                     const LinearGaussianModel& md) {
  if (k < 0 || k > md.N) throw ArgError("voi_quadratic: stage out of range");
  VectorXd ae = md.A[k] * e;
  return ae.dot(ric.Gamma[k + 1] * ae) - ric.theta[k];
}

}  // namespace voikit
