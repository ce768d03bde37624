#include "voikit/voikit.h"

#include <cstring>
#include <new>

#include "experiment.hpp"

using namespace voikit;

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

voikit_status fail(int code, const std::string& msg) {
  g_last_error = msg;
  return static_cast<voikit_status>(code);
}

// Runs the body under the C boundary: exceptions become status codes.
template <typename Fn>
voikit_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::bad_alloc&) {
    return fail(VOIKIT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(VOIKIT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(VOIKIT_ERR_INTERNAL, "unknown error");
  }
}

}  // namespace

struct voikit_config {
  ExperimentConfig cfg;
};

struct voikit_session {
  std::unique_ptr<Experiment> ex;
};

struct voikit_voi_table {
  std::shared_ptr<const VoiTable> table;
};

extern "C" {

const char* voikit_version(void) { return "0.1.0"; }

const char* voikit_last_error(void) { return g_last_error.c_str(); }

void voikit_string_free(char* s) { delete[] s; }

voikit_status voikit_config_load(const char* path, voikit_config** out) {
  return guarded([&]() -> voikit_status {
    if (!path || !out) return fail(VOIKIT_ERR_ARG, "null argument");
    auto* cfg = new voikit_config{load_config(path)};
    *out = cfg;
    return VOIKIT_OK;
  });
}

voikit_status voikit_config_parse(const char* json_text, voikit_config** out) {
  return guarded([&]() -> voikit_status {
    if (!json_text || !out) return fail(VOIKIT_ERR_ARG, "null argument");
    json doc;
    try {
      doc = json::parse(json_text);
    } catch (const json::exception& e) {
      return fail(VOIKIT_ERR_IO, std::string("cannot parse config: ") + e.what());
    }
    *out = new voikit_config{parse_config(doc)};
    return VOIKIT_OK;
  });
}

void voikit_config_free(voikit_config* cfg) { delete cfg; }

voikit_status voikit_config_resolved_json(const voikit_config* cfg, char** out) {
  return guarded([&]() -> voikit_status {
    if (!cfg || !out) return fail(VOIKIT_ERR_ARG, "null argument");
    *out = dup_string(resolved_config_json(cfg->cfg).dump(2));
    return VOIKIT_OK;
  });
}

voikit_status voikit_validate(const voikit_config* cfg, char** report_json) {
  return guarded([&]() -> voikit_status {
    if (!cfg) return fail(VOIKIT_ERR_ARG, "null argument");
    ExperimentConfig copy = cfg->cfg;
    ValidationReport report = validate_model(copy.model, copy.costs);
    if (report_json) *report_json = dup_string(validation_report_json(report).dump(2));
    if (!report.empty()) {
      std::string msg = "invalid model/costs:";
      for (const auto& r : report) msg += "\n  - " + r;
      return fail(VOIKIT_ERR_INVALID, msg);
    }
    return VOIKIT_OK;
  });
}

voikit_status voikit_session_open(const voikit_config* cfg, voikit_session** out) {
  return guarded([&]() -> voikit_status {
    if (!cfg || !out) return fail(VOIKIT_ERR_ARG, "null argument");
    *out = new voikit_session{Experiment::open(cfg->cfg)};
    return VOIKIT_OK;
  });
}

void voikit_session_close(voikit_session* s) { delete s; }

voikit_status voikit_riccati_csv(const voikit_session* s, char** out) {
  return guarded([&]() -> voikit_status {
    if (!s || !out) return fail(VOIKIT_ERR_ARG, "null argument");
    *out = dup_string(riccati_csv(*s->ex));
    return VOIKIT_OK;
  });
}

voikit_status voikit_riccati_json(const voikit_session* s, char** out) {
  return guarded([&]() -> voikit_status {
    if (!s || !out) return fail(VOIKIT_ERR_ARG, "null argument");
    *out = dup_string(riccati_json(*s->ex).dump(2));
    return VOIKIT_OK;
  });
}

voikit_status voikit_voi_table_build(const voikit_session* s, voikit_voi_table** out) {
  return guarded([&]() -> voikit_status {
    if (!s || !out) return fail(VOIKIT_ERR_ARG, "null argument");
    *out = new voikit_voi_table{s->ex->table()};
    return VOIKIT_OK;
  });
}

void voikit_voi_table_free(voikit_voi_table* t) { delete t; }

voikit_status voikit_voi_table_lookup(const voikit_voi_table* t, int stage,
                                      const double* e, size_t n, double* out) {
  return guarded([&]() -> voikit_status {
    if (!t || !e || !out) return fail(VOIKIT_ERR_ARG, "null argument");
    if (static_cast<int>(n) != t->table->grid.dims())
      return fail(VOIKIT_ERR_ARG, "mismatch vector has wrong dimension");
    VectorXd ev = Eigen::Map<const VectorXd>(e, static_cast<int>(n));
    *out = t->table->lookup_voi(stage, ev);
    return VOIKIT_OK;
  });
}

voikit_status voikit_voi_table_csv(const voikit_voi_table* t, char** out) {
  return guarded([&]() -> voikit_status {
    if (!t || !out) return fail(VOIKIT_ERR_ARG, "null argument");
    *out = dup_string(voi_table_csv(*t->table));
    return VOIKIT_OK;
  });
}

voikit_status voikit_voi_table_meta_json(const voikit_voi_table* t, char** out) {
  return guarded([&]() -> voikit_status {
    if (!t || !out) return fail(VOIKIT_ERR_ARG, "null argument");
    *out = dup_string(voi_table_meta_json(*t->table).dump(2));
    return VOIKIT_OK;
  });
}

voikit_status voikit_voi_quadratic(const voikit_session* s, int stage, const double* e,
                                   size_t n, double* out) {
  return guarded([&]() -> voikit_status {
    if (!s || !e || !out) return fail(VOIKIT_ERR_ARG, "null argument");
    if (static_cast<int>(n) != s->ex->cfg.model.n)
      return fail(VOIKIT_ERR_ARG, "mismatch vector has wrong dimension");
    VectorXd ev = Eigen::Map<const VectorXd>(e, static_cast<int>(n));
    *out = voi_quadratic(ev, stage, s->ex->ric, s->ex->cfg.model);
    return VOIKIT_OK;
  });
}

voikit_status voikit_simulate_csv(const voikit_session* s, uint64_t seed, int verbose,
                                  char** trace_out) {
  return guarded([&]() -> voikit_status {
    if (!s || !trace_out) return fail(VOIKIT_ERR_ARG, "null argument");
    const Experiment& ex = *s->ex;
    Scheduler sched = ex.make_scheduler(ex.cfg.scheduler);
    Controller ctrl = ex.make_controller(ex.cfg.controller);
    RolloutOptions opts;
    opts.verbose = verbose != 0;
    opts.particles = verbose != 0;
    opts.particle_count = ex.cfg.particles;
    opts.mismatch_payload = ex.cfg.payload_format == "mismatch";
    SimulationTrace tr = rollout(*ex.sim, sched, ctrl, seed, opts);
    *trace_out = dup_string(trace_csv(tr, ex.cfg.model, opts.verbose));
    return VOIKIT_OK;
  });
}

voikit_status voikit_compare_json(const voikit_session* s, int seed_count,
                                  char** summary_json) {
  return guarded([&]() -> voikit_status {
    if (!s || !summary_json) return fail(VOIKIT_ERR_ARG, "null argument");
    const Experiment& ex = *s->ex;
    int count = seed_count > 0 ? seed_count : ex.cfg.seeds.count;
    MonteCarloSummary mc =
        monte_carlo(*ex.sim, ex.make_policies(), count, ex.cfg.seeds.base);
    *summary_json = dup_string(compare_summary_json(mc).dump(2));
    return VOIKIT_OK;
  });
}

voikit_status voikit_sweep_csv(const voikit_config* cfg, const double* lambdas,
                               size_t count, int seed_count, char** csv) {
  return guarded([&]() -> voikit_status {
    if (!cfg || !csv) return fail(VOIKIT_ERR_ARG, "null argument");
    std::vector<double> ls;
    if (lambdas && count > 0)
      ls.assign(lambdas, lambdas + count);
    else
      ls = cfg->cfg.sweep_lambdas;
    if (ls.empty())
      return fail(VOIKIT_ERR_ARG, "sweep needs lambdas (argument or config sweep.lambdas)");
    int seeds = seed_count > 0 ? seed_count : cfg->cfg.seeds.count;
    *csv = dup_string(sweep_lambda_csv(cfg->cfg, ls, seeds));
    return VOIKIT_OK;
  });
}

}  // extern "C"
