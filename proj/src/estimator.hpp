#pragma once

#include <functional>
#include <random>

#include "lqr.hpp"
#include "model.hpp"

namespace voikit {

// Deterministic covariance schedule of the encoder-side Kalman filter,
// shared by the decoder (which can replay it from the model alone) and
// by the value-of-information recursion.
//
// For k = 0..N:
//   O(k)     conditional covariance at the encoder (information form)
//   K(k)     Kalman gain O(k) C(k)^T V(k)^-1
//   Theta(k) innovation covariance; Theta(0) = C M0 C^T + V(0),
//            Theta(k+1) = C (A O(k) A^T + W) C^T + V(k+1)
//   Kov(k)   mismatch innovation covariance K(k) Theta(k) K(k)^T; this
//            is the covariance of xi(k), the jump the estimation
//            mismatch takes when the encoder absorbs measurement y(k).
struct EncoderGains {
  std::vector<MatrixXd> O;
  std::vector<MatrixXd> K;
  std::vector<MatrixXd> Theta;
  std::vector<MatrixXd> Kov;
};

EncoderGains compute_encoder_gains(const LinearGaussianModel& model);

// Encoder-side filter state at some stage k: the minimum mean-square
// error estimate and its covariance/gain.
struct EncoderState {
  VectorXd xcheck;
  MatrixXd O;
  MatrixXd K;
};

// Stage-0 posterior from the first measurement.
EncoderState encoder_init(const LinearGaussianModel& model, const EncoderGains& gains,
                          const VectorXd& y0);

// Advances the stage-(k-1) posterior to the stage-k posterior given the
// new measurement y(k) and the previous input u(k-1). The covariance
// follows the information-form recursion.
EncoderState encoder_update(const EncoderState& state, const VectorXd& y,
                            const VectorXd& u_prev, int k,
                            const LinearGaussianModel& model, const EncoderGains& gains);

// One step of the information-form covariance recursion, exposed for the
// oracle-equivalence tests: O(k) -> O(k+1) using stage-k transition
// matrices and stage-(k+1) sensor matrices.
MatrixXd information_form_cov_step(const MatrixXd& O_prev, int k_next,
                                   const LinearGaussianModel& model);

// Decoder-side state at stage k under the equilibrium (linear)
// estimator: x(0) prior mean with covariance M0, then
//   xhat(k+1) = A xhat(k) + B u(k) + sigma(k) A (xcheck(k) - xhat(k))
//   E(k+1)    = A E(k) A^T + W(k) - sigma(k) A (E(k) - O(k)) A^T
struct DecoderState {
  VectorXd xhat;
  MatrixXd E;
};

DecoderState decoder_init(const LinearGaussianModel& model);

// Advances the decoder from stage k-1 to stage k. `received` is the
// channel output z(k): a payload carries the encoder estimate
// xcheck(k-1) sent at the previous stage, or — under the equivalent
// mismatch wire format — the mismatch etilde(k-1) itself, in which case
// the correction A etilde is applied directly. O_prev is O(k-1).
DecoderState decoder_update_equilibrium(const DecoderState& state, const VectorXd& u_prev,
                                        const ChannelSymbol& received, int k,
                                        const LinearGaussianModel& model,
                                        const MatrixXd& O_prev,
                                        bool payload_is_mismatch = false);

// Rebuilds the decoder state sequence from a recorded history. The
// encoder holds everything the decoder knows, so this replica is
// bit-identical to the decoder's own states.
// sigmas/us have one entry per stage 0..K-1; payloads[k] is the estimate
// sent at stage k (ignored when sigmas[k] = 0). Returns states 0..K.
std::vector<DecoderState> replay_decoder(const LinearGaussianModel& model,
                                         const EncoderGains& gains,
                                         const std::vector<int>& sigmas,
                                         const std::vector<VectorXd>& payloads,
                                         const std::vector<VectorXd>& us);

// --- signaling residuals for fixed mismatch schedulers ---------------

// Transmission predicate sigma = g(k, etilde) of a fixed deterministic
// mismatch-threshold policy.
using MismatchPolicy = std::function<bool(int, const VectorXd&)>;

// Weighted particle approximation of the conditional law of the
// estimation mismatch etilde(k) given the decoder's information.
struct MismatchParticleCloud {
  MatrixXd particles;  // n x P
  VectorXd weights;    // nonnegative, sums to 1
  int stage = 0;

  int count() const { return static_cast<int>(particles.cols()); }
  double ess() const;
  VectorXd mean() const;
  MatrixXd covariance() const;
};

// Cloud at stage 0: etilde(0) = xi(0) ~ N(0, Kov(0)).
MismatchParticleCloud init_mismatch_cloud(const LinearGaussianModel& model,
                                          const EncoderGains& gains, int particle_count,
                                          std::mt19937_64& rng);

struct ResidualEstimate {
  VectorXd iota;     // A(k) E[etilde(k) | no transmission]
  MatrixXd Xi;       // A(k) (Cov[etilde] - Cov[etilde | no transmission]) A(k)^T
  VectorXd iota_se;  // componentwise standard error of iota
  double ess_no_tx;  // effective sample size in the no-transmit region
};

// Signaling residuals of the stage-k decoder update, estimated from the
// cloud restricted to the scheduler's no-transmit region. The encoder
// error has zero conditional mean, so E[ehat|.] = E[etilde|.].
ResidualEstimate particle_residuals(const MismatchParticleCloud& cloud,
                                    const MismatchPolicy& policy, int k,
                                    const LinearGaussianModel& model);

// Conditions the cloud on the observed sigma(k) and propagates it to
// stage k+1 through etilde(k+1) = (1 - sigma) A etilde(k) + xi(k+1).
// A transmission reveals the mismatch, so the cloud collapses to fresh
// xi(k+1) samples. Resamples systematically when the effective sample
// size drops below half the particle count. Throws when conditioning
// annihilates every weight (advice: increase the particle count).
MismatchParticleCloud cloud_advance(const MismatchParticleCloud& cloud,
                                    const MismatchPolicy& policy, int k,
                                    bool sigma_observed, const LinearGaussianModel& model,
                                    const EncoderGains& gains, std::mt19937_64& rng);

}  // namespace voikit
