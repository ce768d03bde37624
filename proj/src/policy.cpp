#include "policy.hpp"

#include <limits>

namespace voikit {

VoiQuadraticSched make_voi_quadratic_sched(const LinearGaussianModel& md,
                                           const RiccatiSolution& ric) {
  VoiQuadraticSched s;
  s.M.resize(md.N + 1);
  s.theta = ric.theta;
  for (int k = 0; k <= md.N; ++k) {
    s.M[k] = md.A[k].transpose() * ric.Gamma[k + 1] * md.A[k];
    symmetrize(s.M[k]);
  }
  return s;
}

bool is_mismatch_only(const Scheduler& s) {
  return !std::holds_alternative<StateThresholdSched>(s) &&
         !std::holds_alternative<RandomizedSched>(s);
}

namespace {

struct ScheduleVisitor {
  int k;
  const VectorXd& e;

  int operator()(const VoiExactSched& s) const {
    return s.table->lookup_voi(k, e) >= 0.0 ? 1 : 0;
  }
  int operator()(const VoiQuadraticSched& s) const {
    return e.dot(s.M[k] * e) - s.theta[k] >= 0.0 ? 1 : 0;
  }
  int operator()(const PeriodicSched& s) const {
    if (s.period < 1) throw ValidationError("periodic scheduler needs period >= 1");
    int ph = ((s.phase % s.period) + s.period) % s.period;
    return k % s.period == ph ? 1 : 0;
  }
  int operator()(const ThresholdSched& s) const {
    if (s.ellipsoid.rows() > 0) return e.dot(s.ellipsoid * e) >= 1.0 ? 1 : 0;
    if (e.size() != 1)
      throw ValidationError("interval threshold scheduler needs a scalar mismatch");
    double v = e[0];
    return (v < s.lo_at(k) || v > s.hi_at(k)) ? 1 : 0;
  }
  int operator()(const StateThresholdSched&) const {
    throw ValidationError("state-threshold scheduler needs the plant state; "
                          "it is only usable inside the simulation engine");
  }
  int operator()(const RandomizedSched&) const {
    throw ValidationError(
        "randomized scheduling policies are rejected: deterministic scheduling "
        "and control policies attain the global optimum of the rate-regulation "
        "tradeoff, so randomization cannot improve the loss");
  }
};

}  // namespace

int schedule(const Scheduler& s, int k, const VectorXd& e_tilde) {
  return std::visit(ScheduleVisitor{k, e_tilde}, s);
}

int schedule_full(const Scheduler& s, int k, const VectorXd& e_tilde, const VectorXd& x) {
  if (const auto* st = std::get_if<StateThresholdSched>(&s)) {
    if (st->index < 0 || st->index >= x.size())
      throw ValidationError("state-threshold scheduler index out of range");
    return x[st->index] > st->c ? 1 : 0;
  }
  return schedule(s, k, e_tilde);
}

double decision_value(const Scheduler& s, int k, const VectorXd& e_tilde) {
  if (const auto* ex = std::get_if<VoiExactSched>(&s)) return ex->table->lookup_voi(k, e_tilde);
  if (const auto* q = std::get_if<VoiQuadraticSched>(&s))
    return e_tilde.dot(q->M[k] * e_tilde) - q->theta[k];
  return std::numeric_limits<double>::quiet_NaN();
}

VectorXd control(const Controller& c, int k, const VectorXd& xhat) {
  if (const auto* ce = std::get_if<CertaintyEquivalentCtrl>(&c))
    return -(ce->ric->L[k] * xhat);
  const auto& gains = std::get<CustomLinearCtrl>(c);
  return -(gains.at(k) * xhat);
}

}  // namespace voikit
