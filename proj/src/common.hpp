#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace voikit {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Error codes mirror voikit_status in the public C header.
class Error : public std::runtime_error {
 public:
  Error(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(2, what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what, std::vector<std::string> issues = {})
      : Error(3, what), issues_(std::move(issues)) {}
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

class ArgError : public Error {
 public:
  explicit ArgError(const std::string& what) : Error(4, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(5, what) {}
};

inline void symmetrize(MatrixXd& m) { m = ((m + m.transpose()) * 0.5).eval(); }

inline double max_asymmetry(const MatrixXd& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

// Cholesky-based positive definiteness probe.
inline bool is_positive_definite(const MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  if (!m.allFinite()) return false;
  Eigen::LLT<MatrixXd> llt(m);
  return llt.info() == Eigen::Success;
}

// Positive semidefiniteness probe. Uses the spectrum rather than LDLT:
// pivoted LDLT is unreliable exactly on the rank-deficient matrices this
// guards (Q weights, Gamma).
inline bool is_positive_semidefinite(const MatrixXd& m, double tol = 1e-12) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  if (!m.allFinite()) return false;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return false;
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return es.eigenvalues().minCoeff() >= -tol * scale;
}

// Factor of a PSD matrix: returns F (n x r) with F F^T ~= S, dropping
// directions with eigenvalues below rel_tol * max eigenvalue. Safe for
// singular covariances (e.g. rank-deficient mismatch innovations).
inline MatrixXd psd_factor(const MatrixXd& s, double rel_tol = 1e-13) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(s);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  const VectorXd& ev = es.eigenvalues();
  double emax = std::max(0.0, ev.maxCoeff());
  std::vector<int> keep;
  for (int i = 0; i < ev.size(); ++i)
    if (ev[i] > rel_tol * emax && ev[i] > 0.0) keep.push_back(i);
  MatrixXd f(s.rows(), static_cast<int>(keep.size()));
  for (size_t j = 0; j < keep.size(); ++j)
    f.col(static_cast<int>(j)) = es.eigenvectors().col(keep[j]) * std::sqrt(ev[keep[j]]);
  return f;
}

// Neumaier compensated summation; reduction order is fixed by the caller.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

// Mean and standard error of a sample, compensated and in index order.
inline MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe r;
  if (xs.empty()) return r;
  CompensatedSum s;
  for (double x : xs) s.add(x);
  r.mean = s.value() / static_cast<double>(xs.size());
  if (xs.size() < 2) return r;
  CompensatedSum q;
  for (double x : xs) q.add((x - r.mean) * (x - r.mean));
  double var = q.value() / static_cast<double>(xs.size() - 1);
  r.se = std::sqrt(std::max(0.0, var) / static_cast<double>(xs.size()));
  return r;
}

}  // namespace voikit
