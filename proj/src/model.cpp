#include "model.hpp"

#include <sstream>

namespace voikit {

namespace {

constexpr double kSymmetryTol = 1e-12;

std::string dim_str(const MatrixXd& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

void check_stage_matrix(ValidationReport& report, const char* name, int k,
                        const MatrixXd& m, int rows, int cols) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << name << "(" << k << ") has shape " << dim_str(m) << ", expected " << rows
       << "x" << cols;
    report.push_back(os.str());
  } else if (!m.allFinite()) {
    std::ostringstream os;
    os << name << "(" << k << ") contains non-finite entries";
    report.push_back(os.str());
  }
}

// Symmetrizes in place when the asymmetry is negligible; reports it
// otherwise. Returns true when the matrix ended up symmetric.
bool settle_symmetry(ValidationReport& report, const char* name, int k, MatrixXd& m) {
  double asym = max_asymmetry(m);
  if (asym <= kSymmetryTol) {
    if (asym > 0.0) symmetrize(m);
    return true;
  }
  std::ostringstream os;
  os << name << "(" << k << ") not symmetric (max asymmetry " << asym << ")";
  report.push_back(os.str());
  return false;
}

void check_pd(ValidationReport& report, const char* name, int k, const MatrixXd& m) {
  if (!is_positive_definite(m)) {
    std::ostringstream os;
    os << name << "(" << k << ") not positive definite";
    report.push_back(os.str());
  }
}

}  // namespace

LinearGaussianModel LinearGaussianModel::stationary(const MatrixXd& A, const MatrixXd& B,
                                                    const MatrixXd& C, const MatrixXd& W,
                                                    const MatrixXd& V, const VectorXd& m0,
                                                    const MatrixXd& M0, int N) {
  LinearGaussianModel md;
  md.n = static_cast<int>(A.rows());
  md.m = static_cast<int>(B.cols());
  md.p = static_cast<int>(C.rows());
  md.N = N;
  md.A.assign(N + 1, A);
  md.B.assign(N + 1, B);
  md.C.assign(N + 1, C);
  md.W.assign(N + 1, W);
  md.V.assign(N + 1, V);
  md.m0 = m0;
  md.M0 = M0;
  return md;
}

CostWeights CostWeights::stationary(const MatrixXd& Q, const MatrixXd& R, double ell,
                                    double lambda, int N) {
  return stationary(Q, Q, R, ell, lambda, N);
}

CostWeights CostWeights::stationary(const MatrixXd& Q, const MatrixXd& Qterm,
                                    const MatrixXd& R, double ell, double lambda, int N) {
  CostWeights c;
  c.Q.assign(N + 1, Q);
  c.Q.push_back(Qterm);
  c.R.assign(N + 1, R);
  c.ell.assign(N + 1, ell);
  c.lambda = lambda;
  return c;
}

ValidationReport validate_model(LinearGaussianModel& md, CostWeights& costs) {
  ValidationReport report;
  const int N = md.N;

  if (N < 0) report.push_back("horizon must be nonnegative");
  if (md.n <= 0 || md.m <= 0 || md.p <= 0)
    report.push_back("dimensions n, m, p must be positive");
  if (!report.empty()) return report;

  auto check_count = [&](const char* name, size_t have, size_t want) {
    if (have != want) {
      std::ostringstream os;
      os << name << " has " << have << " stage entries, expected " << want;
      report.push_back(os.str());
    }
  };
  check_count("A", md.A.size(), N + 1);
  check_count("B", md.B.size(), N + 1);
  check_count("C", md.C.size(), N + 1);
  check_count("W", md.W.size(), N + 1);
  check_count("V", md.V.size(), N + 1);
  check_count("Q", costs.Q.size(), N + 2);
  check_count("R", costs.R.size(), N + 1);
  check_count("ell", costs.ell.size(), N + 1);
  if (!report.empty()) return report;

  for (int k = 0; k <= N; ++k) {
    check_stage_matrix(report, "A", k, md.A[k], md.n, md.n);
    check_stage_matrix(report, "B", k, md.B[k], md.n, md.m);
    check_stage_matrix(report, "C", k, md.C[k], md.p, md.n);
    check_stage_matrix(report, "W", k, md.W[k], md.n, md.n);
    check_stage_matrix(report, "V", k, md.V[k], md.p, md.p);
    check_stage_matrix(report, "Q", k, costs.Q[k], md.n, md.n);
    check_stage_matrix(report, "R", k, costs.R[k], md.m, md.m);
  }
  check_stage_matrix(report, "Q", N + 1, costs.Q[N + 1], md.n, md.n);
  if (static_cast<int>(md.m0.size()) != md.n)
    report.push_back("m0 has size " + std::to_string(md.m0.size()) + ", expected " +
                     std::to_string(md.n));
  check_stage_matrix(report, "M0", 0, md.M0, md.n, md.n);
  if (!report.empty()) return report;

  for (int k = 0; k <= N; ++k) {
    if (settle_symmetry(report, "W", k, md.W[k])) check_pd(report, "W", k, md.W[k]);
    if (settle_symmetry(report, "V", k, md.V[k])) check_pd(report, "V", k, md.V[k]);
    if (settle_symmetry(report, "R", k, costs.R[k])) check_pd(report, "R", k, costs.R[k]);
    if (settle_symmetry(report, "Q", k, costs.Q[k]) &&
        !is_positive_semidefinite(costs.Q[k])) {
      report.push_back("Q(" + std::to_string(k) + ") not positive semidefinite");
    }
    if (costs.ell[k] < 0.0)
      report.push_back("ell(" + std::to_string(k) + ") negative");
  }
  if (settle_symmetry(report, "Q", N + 1, costs.Q[N + 1]) &&
      !is_positive_semidefinite(costs.Q[N + 1])) {
    report.push_back("Q(" + std::to_string(N + 1) + ") not positive semidefinite");
  }
  if (settle_symmetry(report, "M0", 0, md.M0)) check_pd(report, "M0", 0, md.M0);
  if (!(costs.lambda > 0.0)) report.push_back("lambda must be positive");

  return report;
}

void require_valid(LinearGaussianModel& model, CostWeights& costs) {
  ValidationReport report = validate_model(model, costs);
  if (!report.empty()) {
    std::string what = "invalid model/costs:";
    for (const auto& r : report) what += "\n  - " + r;
    throw ValidationError(what, report);
  }
}

}  // namespace voikit
