#pragma once

#include <memory>
#include <variant>

#include "voi.hpp"

namespace voikit {

// Scheduler variants. All decide sigma in {0,1} from the stage and the
// estimation mismatch; StateThresholdSched additionally reads the true
// state and exists for the dual-effect contrast experiment.
struct VoiExactSched {
  std::shared_ptr<const VoiTable> table;
};

struct VoiQuadraticSched {
  // Precomputed M(k) = A(k)^T Gamma(k+1) A(k) and theta(k), k = 0..N.
  std::vector<MatrixXd> M;
  std::vector<double> theta;
};

struct PeriodicSched {
  int period = 1;
  int phase = 0;  // transmit iff k mod period == phase
};

struct ThresholdSched {
  // Scalar mismatch: transmit iff etilde outside [lo(k), hi(k)].
  // Vector mismatch: transmit iff etilde^T M etilde >= 1 (ellipsoid).
  std::vector<double> lo, hi;  // per stage, or single entry (stationary)
  MatrixXd ellipsoid;          // used when rows() > 0

  double lo_at(int k) const { return lo.size() == 1 ? lo[0] : lo[k]; }
  double hi_at(int k) const { return hi.size() == 1 ? hi[0] : hi[k]; }
};

struct StateThresholdSched {
  int index = 0;
  double c = 0.0;  // transmit iff x[index] > c
};

struct RandomizedSched {
  double prob = 0.5;  // parseable, rejected when scheduled
};

using Scheduler = std::variant<VoiExactSched, VoiQuadraticSched, PeriodicSched,
                               ThresholdSched, StateThresholdSched, RandomizedSched>;

VoiQuadraticSched make_voi_quadratic_sched(const LinearGaussianModel& model,
                                           const RiccatiSolution& ric);

// True when the decision depends on the mismatch (and stage) only, so
// two rollouts with common noise but different controllers produce
// identical transmission patterns.
bool is_mismatch_only(const Scheduler& s);

// Transmission decision from the mismatch. Throws on RandomizedSched
// (deterministic policies attain the global optimum; randomization
// cannot improve the loss) and on StateThresholdSched (needs the state;
// use schedule_full).
int schedule(const Scheduler& s, int k, const VectorXd& e_tilde);

// Engine-side decision that also sees the true state.
int schedule_full(const Scheduler& s, int k, const VectorXd& e_tilde, const VectorXd& x);

// The scheduler's decision statistic when it has one: the exact or
// quadratic VoI value; NaN for the other variants.
double decision_value(const Scheduler& s, int k, const VectorXd& e_tilde);

// Controller variants.
struct CertaintyEquivalentCtrl {
  std::shared_ptr<const RiccatiSolution> ric;
};

struct CustomLinearCtrl {
  std::vector<MatrixXd> gains;  // per stage, or single entry (stationary)

  const MatrixXd& at(int k) const { return gains.size() == 1 ? gains[0] : gains[k]; }
};

using Controller = std::variant<CertaintyEquivalentCtrl, CustomLinearCtrl>;

// u(k) = -L(k) xhat (certainty equivalent) or -G(k) xhat (custom).
VectorXd control(const Controller& c, int k, const VectorXd& xhat);

}  // namespace voikit
