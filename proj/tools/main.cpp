// voikit command-line front end. Links only the public C API.
//
// Exit codes: 0 success, 2 unreadable config, 3 invariant violations,
// 1 anything else.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "voikit/voikit.h"

namespace fs = std::filesystem;

namespace {

int map_exit(voikit_status st) {
  switch (st) {
    case VOIKIT_OK:
      return 0;
    case VOIKIT_ERR_IO:
      return 2;
    case VOIKIT_ERR_INVALID:
      return 3;
    default:
      return 1;
  }
}

[[noreturn]] void die(voikit_status st) {
  std::cerr << "voikit: " << voikit_last_error() << "\n";
  std::exit(map_exit(st));
}

void check(voikit_status st) {
  if (st != VOIKIT_OK) die(st);
}

struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { voikit_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    std::cerr << "voikit: cannot write " << path << "\n";
    std::exit(1);
  }
  f << content;
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  int seeds = 0;  // 0 = use config
  bool verbose = false;
};

// Every run leaves the resolved config next to its outputs so it can be
// regenerated bit-exactly.
fs::path prepare_out_dir(const CommonArgs& args, voikit_config* cfg) {
  fs::path out = args.out_dir;
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) {
    std::cerr << "voikit: cannot create output directory " << out << "\n";
    std::exit(1);
  }
  OwnedString resolved;
  check(voikit_config_resolved_json(cfg, &resolved.ptr));
  write_file(out / "resolved_config.json", resolved.str());
  return out;
}

void write_seed_ledger(const fs::path& out, uint64_t base, int count) {
  std::ostringstream os;
  os << "{\n  \"base\": " << base << ",\n  \"count\": " << count
     << ",\n  \"rule\": \"seed_i = base + i\"\n}\n";
  write_file(out / "seeds.json", os.str());
}

// Seed defaults live in the config; the CLI only needs them for the
// ledger, so read them back out of the resolved document.
void resolved_seeds(voikit_config* cfg, uint64_t& base, int& count) {
  OwnedString resolved;
  check(voikit_config_resolved_json(cfg, &resolved.ptr));
  auto doc = nlohmann::json::parse(resolved.str());
  base = doc.at("seeds").value("base", static_cast<uint64_t>(1));
  count = doc.at("seeds").value("count", 100);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"voikit - value-of-information scheduling and control toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  uint64_t seed = 0;
  std::string lambdas_arg;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", args.config_path, "experiment config (JSON)")
        ->required();
    cmd->add_option("--out", args.out_dir, "output directory")->default_val("out");
    cmd->add_option("--seeds", args.seeds, "override the config's seed count");
    cmd->add_flag("--verbose", args.verbose, "verbose outputs");
  };

  CLI::App* c_validate = app.add_subcommand("validate", "check model and cost invariants");
  CLI::App* c_riccati = app.add_subcommand("riccati", "dump S, L, Gamma, theta per stage");
  CLI::App* c_voi = app.add_subcommand("voi-table", "build and dump the exact VoI table");
  CLI::App* c_sim = app.add_subcommand("simulate", "single closed-loop rollout");
  CLI::App* c_cmp = app.add_subcommand("compare", "Monte Carlo policy comparison");
  CLI::App* c_sweep = app.add_subcommand("sweep", "rate-regulation tradeoff across lambda");
  for (CLI::App* c : {c_validate, c_riccati, c_voi, c_sim, c_cmp, c_sweep})
    add_common(c);
  CLI::Option* seed_opt =
      c_sim->add_option("--seed", seed, "seed for this rollout (default: config seeds.base)");
  c_sweep->add_option("--lambdas", lambdas_arg,
                      "comma-separated lambda list (default: config sweep.lambdas)");

  CLI11_PARSE(app, argc, argv);

  voikit_config* cfg = nullptr;
  check(voikit_config_load(args.config_path.c_str(), &cfg));

  uint64_t seed_base = 1;
  int seed_count = 100;
  resolved_seeds(cfg, seed_base, seed_count);
  if (args.seeds > 0) seed_count = args.seeds;

  if (app.got_subcommand(c_validate)) {
    OwnedString report;
    voikit_status st = voikit_validate(cfg, &report.ptr);
    fs::path out = prepare_out_dir(args, cfg);
    write_file(out / "validation.json", report.str());
    std::cout << report.str() << "\n";
    if (st != VOIKIT_OK) {
      std::cerr << "voikit: " << voikit_last_error() << "\n";
      voikit_config_free(cfg);
      return map_exit(st);
    }
    std::cout << "valid\n";
    voikit_config_free(cfg);
    return 0;
  }

  if (app.got_subcommand(c_sweep)) {
    std::vector<double> lambdas;
    if (!lambdas_arg.empty()) {
      std::stringstream ss(lambdas_arg);
      std::string tok;
      while (std::getline(ss, tok, ',')) lambdas.push_back(std::stod(tok));
    }
    OwnedString csv;
    check(voikit_sweep_csv(cfg, lambdas.empty() ? nullptr : lambdas.data(),
                           lambdas.size(), seed_count, &csv.ptr));
    fs::path out = prepare_out_dir(args, cfg);
    write_file(out / "sweep.csv", csv.str());
    write_seed_ledger(out, seed_base, seed_count);
    std::cout << "wrote " << (out / "sweep.csv").string() << "\n";
    voikit_config_free(cfg);
    return 0;
  }

  voikit_session* session = nullptr;
  check(voikit_session_open(cfg, &session));

  int rc = 0;
  if (app.got_subcommand(c_riccati)) {
    OwnedString csv, js;
    check(voikit_riccati_csv(session, &csv.ptr));
    check(voikit_riccati_json(session, &js.ptr));
    fs::path out = prepare_out_dir(args, cfg);
    write_file(out / "riccati.csv", csv.str());
    write_file(out / "riccati.json", js.str());
    std::cout << "wrote " << (out / "riccati.csv").string() << "\n";
  } else if (app.got_subcommand(c_voi)) {
    voikit_voi_table* table = nullptr;
    check(voikit_voi_table_build(session, &table));
    OwnedString csv, meta;
    check(voikit_voi_table_csv(table, &csv.ptr));
    check(voikit_voi_table_meta_json(table, &meta.ptr));
    voikit_voi_table_free(table);
    fs::path out = prepare_out_dir(args, cfg);
    write_file(out / "voi_table.csv", csv.str());
    write_file(out / "voi_table.json", meta.str());
    std::cout << "wrote " << (out / "voi_table.csv").string() << "\n";
  } else if (app.got_subcommand(c_sim)) {
    if (seed_opt->count() == 0) seed = seed_base;
    OwnedString csv;
    check(voikit_simulate_csv(session, seed, args.verbose ? 1 : 0, &csv.ptr));
    fs::path out = prepare_out_dir(args, cfg);
    write_file(out / "trace.csv", csv.str());
    write_seed_ledger(out, seed, 1);
    std::cout << "wrote " << (out / "trace.csv").string() << "\n";
  } else if (app.got_subcommand(c_cmp)) {
    OwnedString js;
    check(voikit_compare_json(session, seed_count, &js.ptr));
    fs::path out = prepare_out_dir(args, cfg);
    write_file(out / "summary.json", js.str());
    write_seed_ledger(out, seed_base, seed_count);
    std::cout << js.str() << "\n";
  }

  voikit_session_close(session);
  voikit_config_free(cfg);
  return rc;
}
