#include "estimator.hpp"

namespace voikit {

namespace {

MatrixXd inverse_spd(const MatrixXd& m, const char* what) {
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw NumericalError(std::string("singular matrix in ") + what);
  return llt.solve(MatrixXd::Identity(m.rows(), m.cols()));
}

}  // namespace

MatrixXd information_form_cov_step(const MatrixXd& O_prev, int k_next,
                                   const LinearGaussianModel& md) {
  const int k = k_next - 1;
  MatrixXd P = md.A[k] * O_prev * md.A[k].transpose() + md.W[k];
  symmetrize(P);
  MatrixXd info = inverse_spd(P, "information-form prediction") +
                  md.C[k_next].transpose() * inverse_spd(md.V[k_next], "V") * md.C[k_next];
  symmetrize(info);
  MatrixXd O = inverse_spd(info, "information matrix");
  symmetrize(O);
  return O;
}

EncoderGains compute_encoder_gains(const LinearGaussianModel& md) {
  const int N = md.N;
  EncoderGains g;
  g.O.resize(N + 1);
  g.K.resize(N + 1);
  g.Theta.resize(N + 1);
  g.Kov.resize(N + 1);

  MatrixXd Vinv0 = inverse_spd(md.V[0], "V(0)");
  MatrixXd info0 = inverse_spd(md.M0, "M0") + md.C[0].transpose() * Vinv0 * md.C[0];
  symmetrize(info0);
  g.O[0] = inverse_spd(info0, "initial information matrix");
  symmetrize(g.O[0]);
  g.K[0] = g.O[0] * md.C[0].transpose() * Vinv0;
  g.Theta[0] = md.C[0] * md.M0 * md.C[0].transpose() + md.V[0];
  symmetrize(g.Theta[0]);
  g.Kov[0] = g.K[0] * g.Theta[0] * g.K[0].transpose();
  symmetrize(g.Kov[0]);

  for (int k = 0; k < N; ++k) {
    MatrixXd P = md.A[k] * g.O[k] * md.A[k].transpose() + md.W[k];
    symmetrize(P);
    g.O[k + 1] = information_form_cov_step(g.O[k], k + 1, md);
    g.K[k + 1] = g.O[k + 1] * md.C[k + 1].transpose() * inverse_spd(md.V[k + 1], "V");
    g.Theta[k + 1] = md.C[k + 1] * P * md.C[k + 1].transpose() + md.V[k + 1];
    symmetrize(g.Theta[k + 1]);
    g.Kov[k + 1] = g.K[k + 1] * g.Theta[k + 1] * g.K[k + 1].transpose();
    symmetrize(g.Kov[k + 1]);
  }
  return g;
}

EncoderState encoder_init(const LinearGaussianModel& md, const EncoderGains& gains,
                          const VectorXd& y0) {
  EncoderState s;
  s.O = gains.O[0];
  s.K = gains.K[0];
  s.xcheck = md.m0 + s.K * (y0 - md.C[0] * md.m0);
  return s;
}

EncoderState encoder_update(const EncoderState& state, const VectorXd& y,
                            const VectorXd& u_prev, int k, const LinearGaussianModel& md,
                            const EncoderGains& gains) {
  if (k < 1 || k > md.N) throw ArgError("encoder_update: stage out of range");
  EncoderState s;
  s.O = gains.O[k];
  s.K = gains.K[k];
  VectorXd pred = md.A[k - 1] * state.xcheck + md.B[k - 1] * u_prev;
  s.xcheck = pred + s.K * (y - md.C[k] * pred);
  return s;
}

DecoderState decoder_init(const LinearGaussianModel& md) {
  return {md.m0, md.M0};
}

DecoderState decoder_update_equilibrium(const DecoderState& state, const VectorXd& u_prev,
                                        const ChannelSymbol& received, int k,
                                        const LinearGaussianModel& md,
                                        const MatrixXd& O_prev,
                                        bool payload_is_mismatch) {
  if (k < 1 || k > md.N + 1) throw ArgError("decoder_update: stage out of range");
  const MatrixXd& A = md.A[k - 1];
  DecoderState s;
  s.xhat = A * state.xhat + md.B[k - 1] * u_prev;
  s.E = A * state.E * A.transpose() + md.W[k - 1];
  if (!received.erasure()) {
    if (payload_is_mismatch)
      s.xhat += A * *received.payload;
    else
      s.xhat += A * (*received.payload - state.xhat);
    s.E -= A * (state.E - O_prev) * A.transpose();
  }
  symmetrize(s.E);
  return s;
}

std::vector<DecoderState> replay_decoder(const LinearGaussianModel& md,
                                         const EncoderGains& gains,
                                         const std::vector<int>& sigmas,
                                         const std::vector<VectorXd>& payloads,
                                         const std::vector<VectorXd>& us) {
  if (sigmas.size() != payloads.size() || sigmas.size() != us.size())
    throw ArgError("replay_decoder: history lengths differ");
  std::vector<DecoderState> states;
  states.reserve(sigmas.size() + 1);
  states.push_back(decoder_init(md));
  for (size_t k = 0; k < sigmas.size(); ++k) {
    ChannelSymbol z = channel_step(sigmas[k] != 0, payloads[k]);
    states.push_back(decoder_update_equilibrium(states.back(), us[k], z,
                                                static_cast<int>(k) + 1, md,
                                                gains.O[k]));
  }
  return states;
}

// --- particle cloud ---------------------------------------------------

double MismatchParticleCloud::ess() const {
  double s2 = weights.squaredNorm();
  return s2 > 0.0 ? 1.0 / s2 : 0.0;
}

VectorXd MismatchParticleCloud::mean() const {
  return particles * weights;
}

MatrixXd MismatchParticleCloud::covariance() const {
  VectorXd mu = mean();
  MatrixXd centered = particles.colwise() - mu;
  MatrixXd cov = centered * weights.asDiagonal() * centered.transpose();
  symmetrize(cov);
  return cov;
}

namespace {

MatrixXd gaussian_samples(const MatrixXd& cov, int count, std::mt19937_64& rng) {
  MatrixXd f = psd_factor(cov);
  std::normal_distribution<double> dist;
  MatrixXd z(f.cols(), count);
  for (int j = 0; j < count; ++j)
    for (int i = 0; i < f.cols(); ++i) z(i, j) = dist(rng);
  return f * z;
}

void normalize_weights(VectorXd& w) {
  double s = w.sum();
  if (!(s > 0.0))
    throw NumericalError(
        "particle conditioning annihilated all weights (degenerate cloud); "
        "increase the particle count");
  w /= s;
}

MismatchParticleCloud systematic_resample(const MismatchParticleCloud& cloud,
                                          std::mt19937_64& rng) {
  const int P = cloud.count();
  MismatchParticleCloud out;
  out.stage = cloud.stage;
  out.particles.resize(cloud.particles.rows(), P);
  out.weights = VectorXd::Constant(P, 1.0 / P);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double u = u01(rng) / P;
  double cum = cloud.weights[0];
  int i = 0;
  for (int j = 0; j < P; ++j) {
    double target = u + static_cast<double>(j) / P;
    while (cum < target && i + 1 < P) cum += cloud.weights[++i];
    out.particles.col(j) = cloud.particles.col(i);
  }
  return out;
}

}  // namespace

MismatchParticleCloud init_mismatch_cloud(const LinearGaussianModel& md,
                                          const EncoderGains& gains, int particle_count,
                                          std::mt19937_64& rng) {
  if (particle_count < 2) throw ArgError("particle count must be at least 2");
  MismatchParticleCloud c;
  c.stage = 0;
  c.particles = gaussian_samples(gains.Kov[0], particle_count, rng);
  if (c.particles.rows() == 0) c.particles = MatrixXd::Zero(md.n, particle_count);
  c.weights = VectorXd::Constant(particle_count, 1.0 / particle_count);
  return c;
}

ResidualEstimate particle_residuals(const MismatchParticleCloud& cloud,
                                    const MismatchPolicy& policy, int k,
                                    const LinearGaussianModel& md) {
  const int P = cloud.count();
  const MatrixXd& A = md.A[k];
  VectorXd w0 = cloud.weights;
  for (int j = 0; j < P; ++j)
    if (policy(k, cloud.particles.col(j))) w0[j] = 0.0;
  double mass = w0.sum();

  ResidualEstimate r;
  r.iota = VectorXd::Zero(md.n);
  r.Xi = MatrixXd::Zero(md.n, md.n);
  r.iota_se = VectorXd::Zero(md.n);
  r.ess_no_tx = 0.0;
  if (mass <= 0.0) return r;  // never conditioned on sigma = 0 in practice

  VectorXd wn = w0 / mass;
  VectorXd mu0 = cloud.particles * wn;
  MatrixXd centered = cloud.particles.colwise() - mu0;
  MatrixXd cov0 = centered * wn.asDiagonal() * centered.transpose();
  symmetrize(cov0);

  r.iota = A * mu0;
  r.Xi = A * (cloud.covariance() - cov0) * A.transpose();
  symmetrize(r.Xi);
  r.ess_no_tx = 1.0 / wn.squaredNorm();
  // componentwise SE of the restricted mean, mapped through A
  VectorXd var_mean = (A * cov0 * A.transpose()).diagonal() / std::max(1.0, r.ess_no_tx);
  r.iota_se = var_mean.cwiseMax(0.0).cwiseSqrt();
  return r;
}

MismatchParticleCloud cloud_advance(const MismatchParticleCloud& cloud,
                                    const MismatchPolicy& policy, int k,
                                    bool sigma_observed, const LinearGaussianModel& md,
                                    const EncoderGains& gains, std::mt19937_64& rng) {
  if (k >= md.N) throw ArgError("cloud_advance: no stage beyond the horizon");
  const int P = cloud.count();
  MismatchParticleCloud next;
  next.stage = k + 1;

  MatrixXd xi = gaussian_samples(gains.Kov[k + 1], P, rng);
  if (xi.rows() == 0) xi = MatrixXd::Zero(md.n, P);

  if (sigma_observed) {
    // Transmission reveals xcheck(k): the mismatch restarts at xi(k+1).
    next.particles = xi;
    next.weights = VectorXd::Constant(P, 1.0 / P);
    return next;
  }

  VectorXd w = cloud.weights;
  for (int j = 0; j < P; ++j)
    if (policy(k, cloud.particles.col(j))) w[j] = 0.0;
  normalize_weights(w);

  MismatchParticleCloud conditioned;
  conditioned.stage = k;
  conditioned.particles = cloud.particles;
  conditioned.weights = w;
  if (conditioned.ess() < 0.5 * P) conditioned = systematic_resample(conditioned, rng);

  next.particles = md.A[k] * conditioned.particles + xi;
  next.weights = conditioned.weights;
  return next;
}

}  // namespace voikit
