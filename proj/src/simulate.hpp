#pragma once

#include <optional>

#include "policy.hpp"

namespace voikit {

// Validated inputs shared by every rollout of one experiment, plus the
// noise factorizations fixed once so policy comparisons share noise
// paths bit-exactly.
struct SimInputs {
  const LinearGaussianModel& model;
  const CostWeights& costs;
  const RiccatiSolution& ric;
  const EncoderGains& gains;
  std::vector<MatrixXd> sqrtW;  // lower Cholesky factors per stage
  std::vector<MatrixXd> sqrtV;
  MatrixXd sqrtM0;

  SimInputs(const LinearGaussianModel& model, const CostWeights& costs,
            const RiccatiSolution& ric, const EncoderGains& gains);
};

// All randomness of one rollout, drawn up front in a fixed order so the
// noise path depends on the seed only, never on the policy.
struct NoiseDraws {
  VectorXd x0;
  std::vector<VectorXd> w;  // stages 0..N
  std::vector<VectorXd> v;  // stages 0..N
};

NoiseDraws draw_noise(const SimInputs& in, uint64_t seed);

struct StageRecord {
  VectorXd x, y, u, xcheck, xhat, etilde;
  int sigma = 0;
  ChannelSymbol z;   // what the decoder consumed at this stage
  double voi = 0.0;  // decision statistic (NaN for non-VoI schedulers)
  // verbose diagnostics
  MatrixXd O, E;
  std::optional<VectorXd> iota;
};

struct SimulationTrace {
  int N = 0;
  std::vector<StageRecord> stages;  // 0..N
  VectorXd x_terminal;
  double R_emp = 0.0;    // (N+1)^-1 sum ell(k) sigma(k)
  double J_emp = 0.0;    // (N+1)^-1 (sum x'Qx through N+1 + sum u'Ru)
  double Phi_emp = 0.0;  // lambda R_emp + J_emp
  double Psi_emp = 0.0;  // sum theta(k) sigma(k) + eta(k), unnormalized
  int transmissions = 0;
};

struct RolloutOptions {
  bool record_stages = true;
  bool verbose = false;    // keep O and E in the stage records
  bool particles = false;  // run the mismatch particle filter for iota
  int particle_count = 10000;
  // Wire format: transmit the mismatch etilde(k) instead of the estimate
  // xcheck(k). Equivalent in effect (the decoder reconstructs the same
  // correction); only the z column of the trace changes.
  bool mismatch_payload = false;
};

// One closed-loop realization. Slot order at stage k: the decoder
// consumes z(k) and forms xhat(k); the input u(k) = control(k, xhat) is
// applied; the encoder absorbs y(k), updates xcheck(k) and its decoder
// replica, computes etilde(k) and decides sigma(k); the payload sent at
// k is delivered at k+1; the plant then advances with w(k).
SimulationTrace rollout(const SimInputs& in, const Scheduler& sched,
                        const Controller& ctrl, uint64_t seed,
                        const RolloutOptions& opts = {});

struct PolicySpec {
  std::string name;
  Scheduler scheduler;
  Controller controller;
};

struct PolicyStats {
  std::string name;
  MeanSe R, J, Phi, Psi;
  double mean_transmissions = 0.0;
  std::vector<double> phi_per_seed;  // in seed order, for paired analysis
};

struct PairedDiff {
  std::string a, b;
  MeanSe dR, dJ, dPhi, dPsi;
  double t_phi = 0.0;  // dPhi mean / dPhi se
};

struct MonteCarloSummary {
  std::vector<PolicyStats> policies;
  std::vector<PairedDiff> pairs;
  uint64_t base_seed = 0;
  int n_seeds = 0;
};

// Evaluates every policy on the identical seed list base_seed + i
// (common random numbers). Paired-difference standard errors come from
// per-seed differences. Rollouts run in parallel; reductions happen in
// seed order with compensated summation.
MonteCarloSummary monte_carlo(const SimInputs& in, const std::vector<PolicySpec>& policies,
                              int n_seeds, uint64_t base_seed);

struct ThresholdCandidate {
  std::vector<double> lo, hi;  // per stage
  double phi_mean = 0.0, phi_se = 0.0;
};

struct ThresholdSearchResult {
  std::vector<ThresholdCandidate> landscape;
  ThresholdCandidate best;
  double voi_phi_mean = 0.0, voi_phi_se = 0.0;
  double gap_mean = 0.0;  // Phi(voi policy) - Phi(best), paired
  double gap_se = 0.0;
};

// Desk-scale corroboration of global optimality: exhaustively evaluates
// every per-stage symmetric threshold from `grid_values` (plus optional
// asymmetric candidates) on a scalar model with N <= 3, under common
// random numbers, and reports the gap of the VoI policy against the
// landscape minimum. Controller is certainty equivalent throughout.
ThresholdSearchResult brute_force_threshold_search(
    const SimInputs& in, const Scheduler& voi_policy,
    const std::vector<double>& grid_values,
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& asymmetric,
    int n_seeds, uint64_t base_seed);

struct DualEffectReport {
  int n_seeds = 0;
  int seeds_with_sigma_diff = 0;
  double max_etilde_diff = 0.0;
  double max_state_diff = 0.0;  // between the two controllers' plants
};

// Runs the same seeds under two controllers and reports whether the
// transmission pattern and mismatch path depend on the control law.
// Mismatch-only schedulers show none (no dual effect at equilibrium);
// state-dependent schedulers generally do.
DualEffectReport dual_effect_probe(const SimInputs& in, const Scheduler& sched,
                                   const Controller& a, const Controller& b,
                                   int n_seeds, uint64_t base_seed);

}  // namespace voikit
