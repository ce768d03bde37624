#include "simulate.hpp"

#include <algorithm>
#include <future>
#include <thread>

namespace voikit {

namespace {

MatrixXd lower_cholesky(const MatrixXd& m, const char* what) {
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw NumericalError(std::string("Cholesky factorization failed for ") + what);
  return llt.matrixL();
}

}  // namespace

SimInputs::SimInputs(const LinearGaussianModel& model_, const CostWeights& costs_,
                     const RiccatiSolution& ric_, const EncoderGains& gains_)
    : model(model_), costs(costs_), ric(ric_), gains(gains_) {
  sqrtW.reserve(model.N + 1);
  sqrtV.reserve(model.N + 1);
  for (int k = 0; k <= model.N; ++k) {
    sqrtW.push_back(lower_cholesky(model.W[k], "W"));
    sqrtV.push_back(lower_cholesky(model.V[k], "V"));
  }
  sqrtM0 = lower_cholesky(model.M0, "M0");
}

NoiseDraws draw_noise(const SimInputs& in, uint64_t seed) {
  const auto& md = in.model;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  auto stdvec = [&](int size) {
    VectorXd z(size);
    for (int i = 0; i < size; ++i) z[i] = dist(rng);
    return z;
  };
  NoiseDraws d;
  d.x0 = md.m0 + in.sqrtM0 * stdvec(md.n);
  d.w.reserve(md.N + 1);
  d.v.reserve(md.N + 1);
  for (int k = 0; k <= md.N; ++k) d.w.push_back(in.sqrtW[k] * stdvec(md.n));
  for (int k = 0; k <= md.N; ++k) d.v.push_back(in.sqrtV[k] * stdvec(md.p));
  return d;
}

SimulationTrace rollout(const SimInputs& in, const Scheduler& sched,
                        const Controller& ctrl, uint64_t seed,
                        const RolloutOptions& opts) {
  const auto& md = in.model;
  const int N = md.N;
  NoiseDraws noise = draw_noise(in, seed);

  SimulationTrace tr;
  tr.N = N;
  if (opts.record_stages) tr.stages.resize(N + 1);

  bool particles_on =
      opts.record_stages && opts.verbose && opts.particles && is_mismatch_only(sched);
  std::mt19937_64 particle_rng(seed ^ 0x9E3779B97F4A7C15ull);
  MismatchParticleCloud cloud;
  MismatchPolicy mismatch_policy;
  if (particles_on) {
    cloud = init_mismatch_cloud(md, in.gains, opts.particle_count, particle_rng);
    mismatch_policy = [&sched](int k, const VectorXd& e) {
      return schedule(sched, k, e) != 0;
    };
  }

  CompensatedSum jx, ju, rr, psi;
  VectorXd x = noise.x0;
  DecoderState dec = decoder_init(md);       // the actuator-side decoder
  DecoderState replica = decoder_init(md);   // the encoder's copy of it
  EncoderState enc;
  VectorXd u_prev = VectorXd::Zero(md.m);
  int sigma_prev = 0;
  VectorXd payload_prev;

  for (int k = 0; k <= N; ++k) {
    // 1. decoder consumes z(k)
    ChannelSymbol z = (k == 0) ? ChannelSymbol::erased()
                               : channel_step(sigma_prev != 0, payload_prev);
    if (k > 0) {
      dec = decoder_update_equilibrium(dec, u_prev, z, k, md, in.gains.O[k - 1],
                                       opts.mismatch_payload);
      replica = decoder_update_equilibrium(replica, u_prev, z, k, md, in.gains.O[k - 1],
                                           opts.mismatch_payload);
    }

    // 2. control from the decoder estimate
    VectorXd u = control(ctrl, k, dec.xhat);

    // 3. encoder absorbs y(k), forms the mismatch, decides sigma(k)
    VectorXd y = md.C[k] * x + noise.v[k];
    enc = (k == 0) ? encoder_init(md, in.gains, y)
                   : encoder_update(enc, y, u_prev, k, md, in.gains);
    VectorXd etilde = enc.xcheck - replica.xhat;
    int sigma = schedule_full(sched, k, etilde, x);

    // costs at stage k
    jx.add(x.dot(in.costs.Q[k] * x));
    ju.add(u.dot(in.costs.R[k] * u));
    rr.add(in.costs.ell[k] * sigma);
    psi.add(in.ric.theta[k] * sigma + stage_cost_eta(x, u, k, in.ric));
    tr.transmissions += sigma;

    if (opts.record_stages) {
      StageRecord& rec = tr.stages[k];
      rec.x = x;
      rec.y = y;
      rec.u = u;
      rec.xcheck = enc.xcheck;
      rec.xhat = dec.xhat;
      rec.etilde = etilde;
      rec.sigma = sigma;
      rec.z = z;
      rec.voi = decision_value(sched, k, etilde);
      if (opts.verbose) {
        rec.O = enc.O;
        rec.E = dec.E;
        if (particles_on) {
          rec.iota = particle_residuals(cloud, mismatch_policy, k, md).iota;
          if (k < N)
            cloud = cloud_advance(cloud, mismatch_policy, k, sigma != 0, md, in.gains,
                                  particle_rng);
        }
      }
    }

    // 4. channel enqueue and plant transition
    payload_prev = opts.mismatch_payload ? etilde : enc.xcheck;
    sigma_prev = sigma;
    u_prev = u;
    x = md.A[k] * x + md.B[k] * u + noise.w[k];
  }

  tr.x_terminal = x;
  jx.add(x.dot(in.costs.Q[N + 1] * x));

  double denom = static_cast<double>(N + 1);
  tr.R_emp = rr.value() / denom;
  tr.J_emp = (jx.value() + ju.value()) / denom;
  tr.Phi_emp = in.costs.lambda * tr.R_emp + tr.J_emp;
  tr.Psi_emp = psi.value();
  return tr;
}

namespace {

void parallel_for(int count, const std::function<void(int)>& body) {
  unsigned threads = std::min<unsigned>(std::thread::hardware_concurrency(), 16);
  if (threads <= 1 || count < 32) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::future<void>> futs;
  int chunk = (count + static_cast<int>(threads) - 1) / static_cast<int>(threads);
  for (int lo = 0; lo < count; lo += chunk) {
    int hi = std::min(count, lo + chunk);
    futs.push_back(std::async(std::launch::async, [lo, hi, &body] {
      for (int i = lo; i < hi; ++i) body(i);
    }));
  }
  for (auto& f : futs) f.get();
}

MeanSe paired_mean_se(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return mean_se(d);
}

}  // namespace

MonteCarloSummary monte_carlo(const SimInputs& in, const std::vector<PolicySpec>& policies,
                              int n_seeds, uint64_t base_seed) {
  if (policies.empty()) throw ArgError("monte_carlo: empty policy list");
  if (n_seeds < 2) throw ArgError("monte_carlo: need at least 2 seeds");

  MonteCarloSummary out;
  out.base_seed = base_seed;
  out.n_seeds = n_seeds;

  struct PerSeed {
    std::vector<double> R, J, Phi, Psi;
    std::vector<double> tx;
  };
  std::vector<PerSeed> data(policies.size());
  RolloutOptions light;
  light.record_stages = false;

  for (size_t p = 0; p < policies.size(); ++p) {
    PerSeed& d = data[p];
    d.R.resize(n_seeds);
    d.J.resize(n_seeds);
    d.Phi.resize(n_seeds);
    d.Psi.resize(n_seeds);
    d.tx.resize(n_seeds);
    const PolicySpec& spec = policies[p];
    parallel_for(n_seeds, [&](int i) {
      SimulationTrace tr =
          rollout(in, spec.scheduler, spec.controller, base_seed + i, light);
      d.R[i] = tr.R_emp;
      d.J[i] = tr.J_emp;
      d.Phi[i] = tr.Phi_emp;
      d.Psi[i] = tr.Psi_emp;
      d.tx[i] = tr.transmissions;
    });
  }

  for (size_t p = 0; p < policies.size(); ++p) {
    PolicyStats st;
    st.name = policies[p].name;
    st.R = mean_se(data[p].R);
    st.J = mean_se(data[p].J);
    st.Phi = mean_se(data[p].Phi);
    st.Psi = mean_se(data[p].Psi);
    st.mean_transmissions = mean_se(data[p].tx).mean;
    st.phi_per_seed = data[p].Phi;
    out.policies.push_back(std::move(st));
  }
  for (size_t a = 0; a < policies.size(); ++a) {
    for (size_t b = a + 1; b < policies.size(); ++b) {
      PairedDiff pd;
      pd.a = policies[a].name;
      pd.b = policies[b].name;
      pd.dR = paired_mean_se(data[a].R, data[b].R);
      pd.dJ = paired_mean_se(data[a].J, data[b].J);
      pd.dPhi = paired_mean_se(data[a].Phi, data[b].Phi);
      pd.dPsi = paired_mean_se(data[a].Psi, data[b].Psi);
      pd.t_phi = pd.dPhi.se > 0.0 ? pd.dPhi.mean / pd.dPhi.se : 0.0;
      out.pairs.push_back(std::move(pd));
    }
  }
  return out;
}

// --- brute-force threshold search -------------------------------------

namespace {

// Flattened scalar model constants for the tight search kernel.
struct ScalarModel {
  int N;
  std::vector<double> a, b, c, K, L, ell, Q, R, theta, Huu, Lgain;
  double lambda, m0, Qterm;
};

ScalarModel flatten_scalar(const SimInputs& in) {
  const auto& md = in.model;
  if (md.n != 1 || md.m != 1 || md.p != 1)
    throw ArgError("brute-force threshold search needs a scalar model");
  ScalarModel s;
  s.N = md.N;
  for (int k = 0; k <= md.N; ++k) {
    s.a.push_back(md.A[k](0, 0));
    s.b.push_back(md.B[k](0, 0));
    s.c.push_back(md.C[k](0, 0));
    s.K.push_back(in.gains.K[k](0, 0));
    s.L.push_back(in.ric.L[k](0, 0));
    s.ell.push_back(in.costs.ell[k]);
    s.Q.push_back(in.costs.Q[k](0, 0));
    s.R.push_back(in.costs.R[k](0, 0));
    s.theta.push_back(in.ric.theta[k]);
    s.Huu.push_back(in.ric.Huu[k](0, 0));
  }
  s.lambda = in.costs.lambda;
  s.m0 = md.m0[0];
  s.Qterm = in.costs.Q[md.N + 1](0, 0);
  return s;
}

// Scalar closed-loop rollout with the same slot semantics as rollout().
// The decision callback sees (k, etilde); noise comes pregenerated so
// every candidate policy shares paths.
template <typename Decide>
double scalar_phi(const ScalarModel& s, const NoiseDraws& noise, Decide&& decide) {
  double x = noise.x0[0];
  double xh = s.m0;
  double xc = 0.0;
  double u_prev = 0.0;
  int sigma_prev = 0;
  double payload = 0.0;
  double jx = 0.0, ju = 0.0, rr = 0.0;
  for (int k = 0; k <= s.N; ++k) {
    if (k > 0) {
      double pred = s.a[k - 1] * xh + s.b[k - 1] * u_prev;
      xh = sigma_prev ? pred + s.a[k - 1] * (payload - xh) : pred;
    }
    double u = -s.L[k] * xh;
    double y = s.c[k] * x + noise.v[k][0];
    if (k == 0) {
      xc = s.m0 + s.K[0] * (y - s.c[0] * s.m0);
    } else {
      double pred = s.a[k - 1] * xc + s.b[k - 1] * u_prev;
      xc = pred + s.K[k] * (y - s.c[k] * pred);
    }
    double etilde = xc - xh;
    int sigma = decide(k, etilde) ? 1 : 0;
    jx += s.Q[k] * x * x;
    ju += s.R[k] * u * u;
    rr += s.ell[k] * sigma;
    payload = xc;
    sigma_prev = sigma;
    u_prev = u;
    x = s.a[k] * x + s.b[k] * u + noise.w[k][0];
  }
  jx += s.Qterm * x * x;
  double denom = static_cast<double>(s.N + 1);
  return s.lambda * (rr / denom) + (jx + ju) / denom;
}

}  // namespace

ThresholdSearchResult brute_force_threshold_search(
    const SimInputs& in, const Scheduler& voi_policy,
    const std::vector<double>& grid_values,
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& asymmetric,
    int n_seeds, uint64_t base_seed) {
  const auto& md = in.model;
  if (md.N > 3) throw ArgError("brute-force threshold search supports N <= 3");
  if (grid_values.empty()) throw ArgError("empty threshold grid");
  ScalarModel sm = flatten_scalar(in);
  const int stages = md.N + 1;

  long combos = 1;
  for (int k = 0; k < stages; ++k) {
    combos *= static_cast<long>(grid_values.size());
    if (combos > 2'000'000L)
      throw ArgError("threshold grid too large for the configured budget");
  }

  std::vector<NoiseDraws> noise(n_seeds);
  parallel_for(n_seeds, [&](int i) { noise[i] = draw_noise(in, base_seed + i); });

  // Candidate list: all symmetric per-stage combinations, then the
  // caller's asymmetric intervals.
  std::vector<ThresholdCandidate> cands;
  cands.reserve(combos + asymmetric.size());
  for (long t = 0; t < combos; ++t) {
    ThresholdCandidate c;
    long rem = t;
    c.lo.resize(stages);
    c.hi.resize(stages);
    for (int k = stages - 1; k >= 0; --k) {
      double v = grid_values[rem % grid_values.size()];
      rem /= static_cast<long>(grid_values.size());
      c.lo[k] = -v;
      c.hi[k] = v;
    }
    cands.push_back(std::move(c));
  }
  for (const auto& [lo, hi] : asymmetric) {
    if (static_cast<int>(lo.size()) != stages || static_cast<int>(hi.size()) != stages)
      throw ArgError("asymmetric candidate has wrong stage count");
    ThresholdCandidate c;
    c.lo = lo;
    c.hi = hi;
    cands.push_back(std::move(c));
  }

  std::vector<double> means(cands.size());
  std::vector<double> ses(cands.size());
  parallel_for(static_cast<int>(cands.size()), [&](int ci) {
    const ThresholdCandidate& c = cands[ci];
    std::vector<double> phis(n_seeds);
    for (int i = 0; i < n_seeds; ++i) {
      phis[i] = scalar_phi(sm, noise[i], [&](int k, double e) {
        return e < c.lo[k] || e > c.hi[k];
      });
    }
    MeanSe ms = mean_se(phis);
    means[ci] = ms.mean;
    ses[ci] = ms.se;
  });

  ThresholdSearchResult out;
  size_t best = 0;
  for (size_t ci = 0; ci < cands.size(); ++ci) {
    cands[ci].phi_mean = means[ci];
    cands[ci].phi_se = ses[ci];
    if (means[ci] < means[best]) best = ci;
  }
  out.best = cands[best];

  std::vector<double> voi_phis(n_seeds), best_phis(n_seeds);
  VectorXd e1(1);
  for (int i = 0; i < n_seeds; ++i) {
    voi_phis[i] = scalar_phi(sm, noise[i], [&](int k, double e) {
      e1[0] = e;
      return schedule(voi_policy, k, e1) != 0;
    });
    best_phis[i] = scalar_phi(sm, noise[i], [&](int k, double e) {
      return e < out.best.lo[k] || e > out.best.hi[k];
    });
  }
  MeanSe voi_ms = mean_se(voi_phis);
  out.voi_phi_mean = voi_ms.mean;
  out.voi_phi_se = voi_ms.se;
  MeanSe gap = paired_mean_se(voi_phis, best_phis);
  out.gap_mean = gap.mean;
  out.gap_se = gap.se;
  out.landscape = std::move(cands);
  return out;
}

DualEffectReport dual_effect_probe(const SimInputs& in, const Scheduler& sched,
                                   const Controller& a, const Controller& b,
                                   int n_seeds, uint64_t base_seed) {
  DualEffectReport rep;
  rep.n_seeds = n_seeds;
  RolloutOptions opts;
  for (int i = 0; i < n_seeds; ++i) {
    SimulationTrace ta = rollout(in, sched, a, base_seed + i, opts);
    SimulationTrace tb = rollout(in, sched, b, base_seed + i, opts);
    bool sigma_diff = false;
    for (int k = 0; k <= in.model.N; ++k) {
      if (ta.stages[k].sigma != tb.stages[k].sigma) sigma_diff = true;
      rep.max_etilde_diff = std::max(
          rep.max_etilde_diff,
          (ta.stages[k].etilde - tb.stages[k].etilde).cwiseAbs().maxCoeff());
      rep.max_state_diff = std::max(
          rep.max_state_diff, (ta.stages[k].x - tb.stages[k].x).cwiseAbs().maxCoeff());
    }
    if (sigma_diff) ++rep.seeds_with_sigma_diff;
  }
  return rep;
}

}  // namespace voikit
