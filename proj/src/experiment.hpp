#pragma once

#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "simulate.hpp"

namespace voikit {

using nlohmann::json;

// Serializable scheduler description; turned into a runtime Scheduler by
// Experiment::make_scheduler (which builds the VoI table on demand).
struct SchedulerSpec {
  std::string kind = "voi-quadratic";
  int period = 1;
  int phase = 0;
  std::vector<double> lo, hi;  // threshold intervals (1 entry = stationary)
  MatrixXd ellipsoid;
  int index = 0;
  double c = 0.0;
  double prob = 0.5;
};

struct ControllerSpec {
  std::string kind = "certainty-equivalent";
  std::vector<MatrixXd> gains;  // custom-linear (1 entry = stationary)
  double scale = 1.0;           // custom-linear shorthand: gains = scale * L(k)
  bool has_gains = false;
};

struct NamedPolicySpec {
  std::string name;
  SchedulerSpec scheduler;
  ControllerSpec controller;
};

struct SeedSpec {
  uint64_t base = 1;
  int count = 100;
};

struct ExperimentConfig {
  LinearGaussianModel model;
  CostWeights costs;
  SchedulerSpec scheduler;
  ControllerSpec controller;
  std::vector<NamedPolicySpec> policies;
  GridSpec grid;
  QuadratureSpec quadrature;
  SeedSpec seeds;
  int particles = 10000;
  std::vector<double> sweep_lambdas;
  std::string payload_format = "estimate";  // or "mismatch": send etilde instead
  std::string output = "out";
};

// Structural parsing; shape and type errors raise IoError ("unreadable
// config"). Semantic validation lives in validate_model / open_experiment.
ExperimentConfig parse_config(const json& doc);
ExperimentConfig load_config(const std::string& path);
json resolved_config_json(const ExperimentConfig& cfg);

json validation_report_json(const ValidationReport& report);

// A validated experiment: symmetrized model and costs, Riccati pass,
// encoder covariance schedule, simulation inputs, and a lazily built
// VoI table. Pinned in memory (SimInputs keeps references).
class Experiment {
 public:
  ExperimentConfig cfg;
  RiccatiSolution ric;
  EncoderGains gains;
  std::unique_ptr<SimInputs> sim;

  Experiment() = default;
  Experiment(const Experiment&) = delete;             // sim references cfg
  Experiment& operator=(const Experiment&) = delete;

  static std::unique_ptr<Experiment> open(const ExperimentConfig& cfg);

  const std::shared_ptr<const VoiTable>& table() const;  // built on first use

  Scheduler make_scheduler(const SchedulerSpec& spec) const;
  Controller make_controller(const ControllerSpec& spec) const;
  std::vector<PolicySpec> make_policies() const;  // from cfg.policies

 private:
  mutable std::shared_ptr<const VoiTable> table_;
};

// --- artifact serialization ------------------------------------------

std::string riccati_csv(const Experiment& ex);
json riccati_json(const Experiment& ex);

std::string voi_table_csv(const VoiTable& t);
json voi_table_meta_json(const VoiTable& t);

std::string trace_csv(const SimulationTrace& tr, const LinearGaussianModel& model,
                      bool verbose);

json compare_summary_json(const MonteCarloSummary& mc);

// Rate-regulation tradeoff curve: evaluates the config's scheduler and
// controller at each lambda with the config's seeds, one CSV row per
// lambda with mean and standard error of R, J, Phi.
std::string sweep_lambda_csv(const ExperimentConfig& base,
                             const std::vector<double>& lambdas, int seed_count);

}  // namespace voikit
