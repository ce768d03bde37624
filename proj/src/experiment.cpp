#include "experiment.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace voikit {

namespace {

std::string g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

[[noreturn]] void bad(const std::string& what) { throw IoError("config: " + what); }

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) bad(where + " must be a number");
  return j.get<double>();
}

MatrixXd parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    bad(where + " must be a matrix (array of row arrays)");
  size_t rows = j.size(), cols = j[0].size();
  if (cols == 0) bad(where + " has empty rows");
  MatrixXd m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) bad(where + " rows are ragged");
    for (size_t c = 0; c < cols; ++c)
      m(static_cast<int>(r), static_cast<int>(c)) =
          as_number(j[r][c], where + " entry");
  }
  return m;
}

// Stationary shorthand: a single matrix stands for every stage.
std::vector<MatrixXd> parse_stage_matrices(const json& j, int count,
                                           const std::string& where) {
  if (!j.is_array() || j.empty()) bad(where + " must be a matrix or list of matrices");
  if (j[0].is_array() && !j[0].empty() && j[0][0].is_array()) {
    if (static_cast<int>(j.size()) != count)
      bad(where + " per-stage list has " + std::to_string(j.size()) +
          " entries, expected " + std::to_string(count));
    std::vector<MatrixXd> out;
    out.reserve(count);
    for (const auto& jm : j) out.push_back(parse_matrix(jm, where));
    return out;
  }
  return std::vector<MatrixXd>(count, parse_matrix(j, where));
}

VectorXd parse_vector(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j[0].is_number())
    bad(where + " must be a flat array of numbers");
  VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = as_number(j[i], where);
  return v;
}

json matrix_to_json(const MatrixXd& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json stage_matrices_to_json(const std::vector<MatrixXd>& ms) {
  bool stationary = true;
  for (size_t k = 1; k < ms.size(); ++k)
    if (ms[k].rows() != ms[0].rows() || ms[k].cols() != ms[0].cols() ||
        !(ms[k].array() == ms[0].array()).all()) {
      stationary = false;
      break;
    }
  if (stationary) return matrix_to_json(ms[0]);
  json list = json::array();
  for (const auto& m : ms) list.push_back(matrix_to_json(m));
  return list;
}

json vector_to_json(const VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

SchedulerSpec parse_scheduler(const json& j) {
  SchedulerSpec s;
  if (!j.is_object() || !j.contains("kind")) bad("scheduler needs a \"kind\"");
  s.kind = j.at("kind").get<std::string>();
  if (s.kind == "periodic") {
    s.period = j.value("period", 1);
    s.phase = j.value("phase", 0);
  } else if (s.kind == "threshold") {
    if (j.contains("ellipsoid")) {
      s.ellipsoid = parse_matrix(j.at("ellipsoid"), "scheduler.ellipsoid");
    } else if (j.contains("interval")) {
      const auto& iv = j.at("interval");
      if (!iv.is_array() || iv.size() != 2) bad("scheduler.interval must be [lo, hi]");
      s.lo = {as_number(iv[0], "interval lo")};
      s.hi = {as_number(iv[1], "interval hi")};
    } else if (j.contains("intervals")) {
      for (const auto& iv : j.at("intervals")) {
        if (!iv.is_array() || iv.size() != 2)
          bad("scheduler.intervals entries must be [lo, hi]");
        s.lo.push_back(as_number(iv[0], "interval lo"));
        s.hi.push_back(as_number(iv[1], "interval hi"));
      }
      if (s.lo.empty()) bad("scheduler.intervals is empty");
    } else {
      bad("threshold scheduler needs interval, intervals or ellipsoid");
    }
  } else if (s.kind == "state-threshold") {
    s.index = j.value("index", 0);
    s.c = j.value("c", 0.0);
  } else if (s.kind == "randomized") {
    s.prob = j.value("prob", 0.5);
  } else if (s.kind != "voi-exact" && s.kind != "voi-quadratic") {
    bad("unknown scheduler kind \"" + s.kind + "\"");
  }
  return s;
}

json scheduler_to_json(const SchedulerSpec& s) {
  json j{{"kind", s.kind}};
  if (s.kind == "periodic") {
    j["period"] = s.period;
    j["phase"] = s.phase;
  } else if (s.kind == "threshold") {
    if (s.ellipsoid.rows() > 0) {
      j["ellipsoid"] = matrix_to_json(s.ellipsoid);
    } else if (s.lo.size() == 1) {
      j["interval"] = json::array({s.lo[0], s.hi[0]});
    } else {
      json ivs = json::array();
      for (size_t k = 0; k < s.lo.size(); ++k)
        ivs.push_back(json::array({s.lo[k], s.hi[k]}));
      j["intervals"] = std::move(ivs);
    }
  } else if (s.kind == "state-threshold") {
    j["index"] = s.index;
    j["c"] = s.c;
  } else if (s.kind == "randomized") {
    j["prob"] = s.prob;
  }
  return j;
}

ControllerSpec parse_controller(const json& j) {
  ControllerSpec c;
  if (!j.is_object() || !j.contains("kind")) bad("controller needs a \"kind\"");
  c.kind = j.at("kind").get<std::string>();
  if (c.kind == "custom-linear") {
    if (j.contains("gains")) {
      c.has_gains = true;
      const auto& g = j.at("gains");
      if (g.is_array() && !g.empty() && g[0].is_array() && !g[0].empty() &&
          g[0][0].is_array()) {
        for (const auto& gm : g) c.gains.push_back(parse_matrix(gm, "controller.gains"));
      } else {
        c.gains = {parse_matrix(g, "controller.gains")};
      }
    } else {
      c.scale = j.value("scale", 1.0);
    }
  } else if (c.kind != "certainty-equivalent") {
    bad("unknown controller kind \"" + c.kind + "\"");
  }
  return c;
}

json controller_to_json(const ControllerSpec& c) {
  json j{{"kind", c.kind}};
  if (c.kind == "custom-linear") {
    if (c.has_gains)
      j["gains"] = stage_matrices_to_json(c.gains);
    else
      j["scale"] = c.scale;
  }
  return j;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) bad("top level must be an object");
  for (const char* key : {"horizon", "model", "costs"})
    if (!doc.contains(key)) bad(std::string("missing top-level key \"") + key + "\"");

  ExperimentConfig cfg;
  if (!doc.at("horizon").is_number_integer()) bad("horizon must be an integer");
  int N = doc.at("horizon").get<int>();
  if (N < 0) bad("horizon must be nonnegative");

  const json& jm = doc.at("model");
  for (const char* key : {"A", "B", "C", "W", "V", "m0", "M0"})
    if (!jm.contains(key)) bad(std::string("model is missing \"") + key + "\"");
  LinearGaussianModel& md = cfg.model;
  md.N = N;
  md.A = parse_stage_matrices(jm.at("A"), N + 1, "model.A");
  md.B = parse_stage_matrices(jm.at("B"), N + 1, "model.B");
  md.C = parse_stage_matrices(jm.at("C"), N + 1, "model.C");
  md.W = parse_stage_matrices(jm.at("W"), N + 1, "model.W");
  md.V = parse_stage_matrices(jm.at("V"), N + 1, "model.V");
  md.m0 = parse_vector(jm.at("m0"), "model.m0");
  md.M0 = parse_matrix(jm.at("M0"), "model.M0");
  md.n = static_cast<int>(md.A[0].rows());
  md.m = static_cast<int>(md.B[0].cols());
  md.p = static_cast<int>(md.C[0].rows());

  const json& jc = doc.at("costs");
  for (const char* key : {"Q", "R", "ell", "lambda"})
    if (!jc.contains(key)) bad(std::string("costs is missing \"") + key + "\"");
  // Q covers stages 0..N+1; the stationary shorthand replicates one
  // matrix across all of them. A per-stage list may carry all N+2
  // entries, or the N+1 running weights with Q_terminal alongside.
  // Q_terminal, when present, overrides the last entry either way.
  const json& jq = jc.at("Q");
  bool q_per_stage = jq.is_array() && !jq.empty() && jq[0].is_array() &&
                     !jq[0].empty() && jq[0][0].is_array();
  if (q_per_stage && static_cast<int>(jq.size()) == N + 1 && jc.contains("Q_terminal")) {
    cfg.costs.Q = parse_stage_matrices(jq, N + 1, "costs.Q");
    cfg.costs.Q.push_back(parse_matrix(jc.at("Q_terminal"), "costs.Q_terminal"));
  } else {
    cfg.costs.Q = parse_stage_matrices(jq, N + 2, "costs.Q");
    if (jc.contains("Q_terminal"))
      cfg.costs.Q[N + 1] = parse_matrix(jc.at("Q_terminal"), "costs.Q_terminal");
  }
  cfg.costs.R = parse_stage_matrices(jc.at("R"), N + 1, "costs.R");
  const json& jell = jc.at("ell");
  if (jell.is_number()) {
    cfg.costs.ell.assign(N + 1, jell.get<double>());
  } else if (jell.is_array()) {
    if (static_cast<int>(jell.size()) != N + 1)
      bad("costs.ell list must have horizon+1 entries");
    for (const auto& e : jell) cfg.costs.ell.push_back(as_number(e, "costs.ell"));
  } else {
    bad("costs.ell must be a number or list");
  }
  cfg.costs.lambda = as_number(jc.at("lambda"), "costs.lambda");

  if (doc.contains("scheduler")) cfg.scheduler = parse_scheduler(doc.at("scheduler"));
  if (doc.contains("controller")) cfg.controller = parse_controller(doc.at("controller"));
  if (doc.contains("policies")) {
    for (const auto& jp : doc.at("policies")) {
      NamedPolicySpec p;
      if (!jp.contains("name")) bad("policy entries need a \"name\"");
      p.name = jp.at("name").get<std::string>();
      p.scheduler = jp.contains("scheduler") ? parse_scheduler(jp.at("scheduler"))
                                             : cfg.scheduler;
      p.controller = jp.contains("controller") ? parse_controller(jp.at("controller"))
                                               : cfg.controller;
      cfg.policies.push_back(std::move(p));
    }
  }
  if (doc.contains("grid")) {
    const json& jg = doc.at("grid");
    cfg.grid.points = jg.value("points", cfg.grid.points);
    cfg.grid.bound_multiplier = jg.value("bound_multiplier", cfg.grid.bound_multiplier);
    cfg.grid.max_dim = jg.value("max_dim", cfg.grid.max_dim);
    if (jg.contains("bounds"))
      for (const auto& b : jg.at("bounds"))
        cfg.grid.bounds.push_back(as_number(b, "grid.bounds"));
  }
  if (doc.contains("quadrature"))
    cfg.quadrature.nodes = doc.at("quadrature").value("nodes", cfg.quadrature.nodes);
  if (doc.contains("seeds")) {
    const json& js = doc.at("seeds");
    cfg.seeds.base = js.value("base", cfg.seeds.base);
    cfg.seeds.count = js.value("count", cfg.seeds.count);
  }
  cfg.particles = doc.value("particles", cfg.particles);
  if (doc.contains("channel")) {
    cfg.payload_format = doc.at("channel").value("payload", cfg.payload_format);
    if (cfg.payload_format != "estimate" && cfg.payload_format != "mismatch")
      bad("channel.payload must be \"estimate\" or \"mismatch\"");
  }
  if (doc.contains("sweep") && doc.at("sweep").contains("lambdas"))
    for (const auto& l : doc.at("sweep").at("lambdas"))
      cfg.sweep_lambdas.push_back(as_number(l, "sweep.lambdas"));
  cfg.output = doc.value("output", cfg.output);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::exception& e) {
    throw IoError("cannot parse config " + path + ": " + e.what());
  }
  return parse_config(doc);
}

json resolved_config_json(const ExperimentConfig& cfg) {
  json j;
  j["horizon"] = cfg.model.N;
  j["model"] = {{"A", stage_matrices_to_json(cfg.model.A)},
                {"B", stage_matrices_to_json(cfg.model.B)},
                {"C", stage_matrices_to_json(cfg.model.C)},
                {"W", stage_matrices_to_json(cfg.model.W)},
                {"V", stage_matrices_to_json(cfg.model.V)},
                {"m0", vector_to_json(cfg.model.m0)},
                {"M0", matrix_to_json(cfg.model.M0)}};
  json ell;
  bool ell_stationary = true;
  for (double e : cfg.costs.ell) ell_stationary &= (e == cfg.costs.ell[0]);
  if (ell_stationary)
    ell = cfg.costs.ell[0];
  else
    ell = cfg.costs.ell;
  // Q is serialized over stages 0..N, with the terminal weight explicit.
  std::vector<MatrixXd> q_run(cfg.costs.Q.begin(), cfg.costs.Q.end() - 1);
  j["costs"] = {{"Q", stage_matrices_to_json(q_run)},
                {"Q_terminal", matrix_to_json(cfg.costs.Q.back())},
                {"R", stage_matrices_to_json(cfg.costs.R)},
                {"ell", ell},
                {"lambda", cfg.costs.lambda}};
  j["scheduler"] = scheduler_to_json(cfg.scheduler);
  j["controller"] = controller_to_json(cfg.controller);
  if (!cfg.policies.empty()) {
    json ps = json::array();
    for (const auto& p : cfg.policies)
      ps.push_back({{"name", p.name},
                    {"scheduler", scheduler_to_json(p.scheduler)},
                    {"controller", controller_to_json(p.controller)}});
    j["policies"] = std::move(ps);
  }
  j["grid"] = {{"points", cfg.grid.points},
               {"bound_multiplier", cfg.grid.bound_multiplier},
               {"max_dim", cfg.grid.max_dim}};
  if (!cfg.grid.bounds.empty()) j["grid"]["bounds"] = cfg.grid.bounds;
  j["quadrature"] = {{"nodes", cfg.quadrature.nodes}};
  j["seeds"] = {{"base", cfg.seeds.base}, {"count", cfg.seeds.count}};
  j["particles"] = cfg.particles;
  j["channel"] = {{"payload", cfg.payload_format}};
  if (!cfg.sweep_lambdas.empty()) j["sweep"] = {{"lambdas", cfg.sweep_lambdas}};
  j["output"] = cfg.output;
  return j;
}

json validation_report_json(const ValidationReport& report) {
  json j;
  j["valid"] = report.empty();
  j["violations"] = report;
  return j;
}

// --- experiment --------------------------------------------------------

std::unique_ptr<Experiment> Experiment::open(const ExperimentConfig& cfg_in) {
  auto ex = std::make_unique<Experiment>();
  ex->cfg = cfg_in;
  require_valid(ex->cfg.model, ex->cfg.costs);
  ex->ric = riccati_backward(ex->cfg.model, ex->cfg.costs);
  ex->gains = compute_encoder_gains(ex->cfg.model);
  ex->sim = std::make_unique<SimInputs>(ex->cfg.model, ex->cfg.costs, ex->ric, ex->gains);
  return ex;
}

const std::shared_ptr<const VoiTable>& Experiment::table() const {
  if (!table_) {
    table_ = std::make_shared<const VoiTable>(build_voi_table(
        cfg.model, cfg.costs, ric, gains, cfg.grid, cfg.quadrature));
  }
  return table_;
}

Scheduler Experiment::make_scheduler(const SchedulerSpec& spec) const {
  if (spec.kind == "voi-exact") return VoiExactSched{table()};
  if (spec.kind == "voi-quadratic") return make_voi_quadratic_sched(cfg.model, ric);
  if (spec.kind == "periodic") {
    if (spec.period < 1) throw ValidationError("periodic scheduler needs period >= 1");
    return PeriodicSched{spec.period, spec.phase};
  }
  if (spec.kind == "threshold") {
    ThresholdSched t;
    t.lo = spec.lo;
    t.hi = spec.hi;
    t.ellipsoid = spec.ellipsoid;
    if (t.ellipsoid.rows() == 0) {
      if (t.lo.size() != 1 && static_cast<int>(t.lo.size()) != cfg.model.N + 1)
        throw ValidationError("threshold intervals must be stationary or per stage");
      for (size_t k = 0; k < t.lo.size(); ++k)
        if (!(t.lo[k] <= t.hi[k]))
          throw ValidationError("threshold interval has lo > hi");
    }
    return t;
  }
  if (spec.kind == "state-threshold") return StateThresholdSched{spec.index, spec.c};
  if (spec.kind == "randomized") return RandomizedSched{spec.prob};
  throw ValidationError("unknown scheduler kind \"" + spec.kind + "\"");
}

Controller Experiment::make_controller(const ControllerSpec& spec) const {
  if (spec.kind == "certainty-equivalent")
    return CertaintyEquivalentCtrl{std::make_shared<RiccatiSolution>(ric)};
  if (spec.kind == "custom-linear") {
    CustomLinearCtrl c;
    if (spec.has_gains) {
      c.gains = spec.gains;
      if (c.gains.size() != 1 && static_cast<int>(c.gains.size()) != cfg.model.N + 1)
        throw ValidationError("custom-linear gains must be stationary or per stage");
      for (const auto& g : c.gains)
        if (g.rows() != cfg.model.m || g.cols() != cfg.model.n)
          throw ValidationError("custom-linear gain has wrong shape");
    } else {
      c.gains.reserve(cfg.model.N + 1);
      for (int k = 0; k <= cfg.model.N; ++k) c.gains.push_back(spec.scale * ric.L[k]);
    }
    return c;
  }
  throw ValidationError("unknown controller kind \"" + spec.kind + "\"");
}

std::vector<PolicySpec> Experiment::make_policies() const {
  if (cfg.policies.empty())
    throw ValidationError("compare needs a non-empty \"policies\" list in the config");
  std::vector<PolicySpec> out;
  for (const auto& p : cfg.policies)
    out.push_back({p.name, make_scheduler(p.scheduler), make_controller(p.controller)});
  return out;
}

// --- artifact serialization ------------------------------------------

namespace {

void csv_matrix_cells(std::string& row, const char* name, const MatrixXd* m, int rows,
                      int cols, bool header) {
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      row += ',';
      if (header) {
        row += name;
        row += '_' + std::to_string(r) + std::to_string(c);
      } else if (m) {
        row += g17((*m)(r, c));
      }
    }
}

}  // namespace

std::string riccati_csv(const Experiment& ex) {
  const auto& md = ex.cfg.model;
  const auto& r = ex.ric;
  std::string out;
  std::string head = "k";
  csv_matrix_cells(head, "S", nullptr, md.n, md.n, true);
  csv_matrix_cells(head, "L", nullptr, md.m, md.n, true);
  csv_matrix_cells(head, "Gamma", nullptr, md.n, md.n, true);
  head += ",theta";
  out += head + "\n";
  for (int k = 0; k <= md.N + 2; ++k) {
    std::string row = std::to_string(k);
    csv_matrix_cells(row, "S", &r.S[k], md.n, md.n, false);
    csv_matrix_cells(row, "L", k <= md.N ? &r.L[k] : nullptr, md.m, md.n, false);
    csv_matrix_cells(row, "Gamma", k <= md.N + 1 ? &r.Gamma[k] : nullptr, md.n, md.n,
                     false);
    row += ',';
    if (k <= md.N) row += g17(r.theta[k]);
    out += row + "\n";
  }
  return out;
}

json riccati_json(const Experiment& ex) {
  const auto& r = ex.ric;
  json j;
  j["n"] = ex.cfg.model.n;
  j["m"] = ex.cfg.model.m;
  j["horizon"] = ex.cfg.model.N;
  json S = json::array(), L = json::array(), G = json::array();
  for (const auto& s : r.S) S.push_back(matrix_to_json(s));
  for (const auto& l : r.L) L.push_back(matrix_to_json(l));
  for (const auto& g : r.Gamma) G.push_back(matrix_to_json(g));
  j["S"] = std::move(S);
  j["L"] = std::move(L);
  j["Gamma"] = std::move(G);
  j["theta"] = r.theta;
  return j;
}

std::string voi_table_csv(const VoiTable& t) {
  std::string out = "k";
  for (int d = 0; d < t.grid.dims(); ++d) out += ",e_" + std::to_string(d);
  out += ",V,VoI,rho\n";
  const long nodes = t.grid.total_nodes();
  for (int k = 0; k <= t.N; ++k) {
    for (long f = 0; f < nodes; ++f) {
      VectorXd e = t.grid.node(f);
      std::string row = std::to_string(k);
      for (int d = 0; d < e.size(); ++d) row += ',' + g17(e[d]);
      row += ',' + g17(t.value[k][f]);
      row += ',' + g17(t.voi[k][f]);
      row += ',' + g17(t.rho[k][f]);
      out += row + "\n";
    }
  }
  return out;
}

json voi_table_meta_json(const VoiTable& t) {
  json j;
  j["stages"] = t.N + 1;
  j["grid"] = {{"points", t.grid.points},
               {"step", std::vector<double>(t.grid.step.data(),
                                            t.grid.step.data() + t.grid.step.size())},
               {"bound", std::vector<double>(t.grid.bound.data(),
                                             t.grid.bound.data() + t.grid.bound.size())},
               {"scale", std::vector<double>(t.grid.scale.data(),
                                             t.grid.scale.data() + t.grid.scale.size())}};
  j["quadrature"] = {{"nodes", t.quad_nodes}};
  json rho_range = json::array();
  for (int k = 0; k <= t.N; ++k)
    rho_range.push_back({{"stage", k},
                         {"min", t.rho[k].minCoeff()},
                         {"max", t.rho[k].maxCoeff()}});
  j["rho_range"] = std::move(rho_range);  // measured, not asserted
  return j;
}

std::string trace_csv(const SimulationTrace& tr, const LinearGaussianModel& md,
                      bool verbose) {
  std::string out = "k";
  auto vec_cols = [&out](const char* name, int count) {
    for (int i = 0; i < count; ++i) out += ',' + std::string(name) + '_' + std::to_string(i);
  };
  vec_cols("x", md.n);
  vec_cols("y", md.p);
  vec_cols("u", md.m);
  out += ",sigma,z_flag";
  vec_cols("z", md.n);
  vec_cols("xcheck", md.n);
  vec_cols("xhat", md.n);
  vec_cols("etilde", md.n);
  out += ",voi";
  if (verbose) {
    for (int r = 0; r < md.n; ++r)
      for (int c = 0; c < md.n; ++c) out += ",O_" + std::to_string(r) + std::to_string(c);
    for (int r = 0; r < md.n; ++r)
      for (int c = 0; c < md.n; ++c) out += ",E_" + std::to_string(r) + std::to_string(c);
    vec_cols("iota", md.n);
  }
  out += "\n";

  auto put_vec = [](std::string& row, const VectorXd& v) {
    for (int i = 0; i < v.size(); ++i) row += ',' + g17(v[i]);
  };
  auto put_empty = [](std::string& row, int count) {
    for (int i = 0; i < count; ++i) row += ',';
  };

  for (int k = 0; k <= tr.N; ++k) {
    const StageRecord& r = tr.stages[k];
    std::string row = std::to_string(k);
    put_vec(row, r.x);
    put_vec(row, r.y);
    put_vec(row, r.u);
    row += ',' + std::to_string(r.sigma);
    row += ',' + std::to_string(r.z.erasure() ? 0 : 1);
    if (r.z.erasure())
      put_empty(row, md.n);
    else
      put_vec(row, *r.z.payload);
    put_vec(row, r.xcheck);
    put_vec(row, r.xhat);
    put_vec(row, r.etilde);
    row += ',';
    if (std::isfinite(r.voi)) row += g17(r.voi);
    if (verbose) {
      for (int a = 0; a < md.n; ++a)
        for (int b = 0; b < md.n; ++b) row += ',' + g17(r.O(a, b));
      for (int a = 0; a < md.n; ++a)
        for (int b = 0; b < md.n; ++b) row += ',' + g17(r.E(a, b));
      if (r.iota)
        put_vec(row, *r.iota);
      else
        put_empty(row, md.n);
    }
    out += row + "\n";
  }
  // terminal state row: only x is defined
  std::string row = std::to_string(tr.N + 1);
  put_vec(row, tr.x_terminal);
  int rest = md.p + md.m + 2 + md.n + md.n + md.n + md.n + 1;
  if (verbose) rest += 2 * md.n * md.n + md.n;
  put_empty(row, rest);
  out += row + "\n";
  return out;
}

json compare_summary_json(const MonteCarloSummary& mc) {
  json j;
  j["seeds"] = {{"base", mc.base_seed},
                {"count", mc.n_seeds},
                {"rule", "seed_i = base + i"}};
  json pols = json::array();
  auto stat = [](const MeanSe& s) { return json{{"mean", s.mean}, {"se", s.se}}; };
  for (const auto& p : mc.policies)
    pols.push_back({{"name", p.name},
                    {"R", stat(p.R)},
                    {"J", stat(p.J)},
                    {"Phi", stat(p.Phi)},
                    {"Psi", stat(p.Psi)},
                    {"mean_transmissions", p.mean_transmissions}});
  j["policies"] = std::move(pols);
  json pairs = json::array();
  for (const auto& d : mc.pairs)
    pairs.push_back({{"a", d.a},
                     {"b", d.b},
                     {"dR", stat(d.dR)},
                     {"dJ", stat(d.dJ)},
                     {"dPhi", stat(d.dPhi)},
                     {"dPsi", stat(d.dPsi)},
                     {"t_phi", d.t_phi}});
  j["paired_differences"] = std::move(pairs);
  return j;
}

std::string sweep_lambda_csv(const ExperimentConfig& base,
                             const std::vector<double>& lambdas, int seed_count) {
  if (lambdas.empty()) throw ArgError("sweep needs at least one lambda");
  std::string out = "lambda,R_mean,R_se,J_mean,J_se,Phi_mean,Phi_se,mean_transmissions\n";
  for (double lam : lambdas) {
    ExperimentConfig cfg = base;
    cfg.costs.lambda = lam;
    auto ex = Experiment::open(cfg);
    std::vector<PolicySpec> pol{{"sweep", ex->make_scheduler(cfg.scheduler),
                                 ex->make_controller(cfg.controller)}};
    MonteCarloSummary mc = monte_carlo(*ex->sim, pol, seed_count, cfg.seeds.base);
    const PolicyStats& s = mc.policies[0];
    out += g17(lam) + ',' + g17(s.R.mean) + ',' + g17(s.R.se) + ',' + g17(s.J.mean) +
           ',' + g17(s.J.se) + ',' + g17(s.Phi.mean) + ',' + g17(s.Phi.se) + ',' +
           g17(s.mean_transmissions) + "\n";
  }
  return out;
}

}  // namespace voikit
