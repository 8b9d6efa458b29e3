// ivph command line: estimate / simulate / bootstrap over the C API.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ivph/ivph.h"

namespace {

int fail(ivph_status st) {
  std::fprintf(stderr, "error: %s\n", ivph_last_error());
  return static_cast<int>(st);
}

struct ConfigHandle {
  ivph_config* cfg = nullptr;
  ConfigHandle() { ivph_config_create(&cfg); }
  ~ConfigHandle() { ivph_config_free(cfg); }
};

int set_or_fail(ivph_config* cfg, const std::string& key, const std::string& value, int& rc) {
  ivph_status st = ivph_config_set(cfg, key.c_str(), value.c_str());
  if (st != IVPH_OK) rc = fail(st);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ivph: instrumental-variable proportional hazards estimation under censoring"};
  app.require_subcommand(1);

  std::string config_path, input, output, design = "discrete-bernoulli";
  std::string seed = "1", u_bar, t_bar, tau, kernel, bw_method, bw_value, solver_mode, level;
  std::string dump_phi, dump_proxies, dump_cdf, col_y, col_delta, col_x, col_w, col_z, z_dummies;
  long long n = 500, reps = 100, B = 200;
  int censoring = 20, threads = 0;
  bool coverage = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "flat key=value config file");
    cmd->add_option("--output", output, "report path prefix (.csv/.txt appended)");
    cmd->add_option("--seed", seed, "master RNG seed");
    cmd->add_option("--u-bar", u_bar, "rank cap in (0,1)");
    cmd->add_option("--t-bar", t_bar, "time cap (default: largest uncensored duration)");
    cmd->add_option("--tau", tau, "generated-censoring support width");
    cmd->add_option("--kernel", kernel, "kernel family: epanechnikov | order4");
    cmd->add_option("--bandwidth-method", bw_method, "fixed | rule-of-thumb | plug-in");
    cmd->add_option("--bandwidth", bw_value, "fixed bandwidth value");
    cmd->add_option("--solver", solver_mode, "auto | triangular | general");
    cmd->add_option("--level", level, "confidence level");
    cmd->add_option("--threads", threads, "worker threads (also env IVPH_THREADS)");
  };
  auto add_input = [&](CLI::App* cmd) {
    cmd->add_option("--input", input, "input CSV with header")->required();
    cmd->add_option("--col-y", col_y, "duration column name");
    cmd->add_option("--col-delta", col_delta, "event indicator column name");
    cmd->add_option("--col-x", col_x, "covariate column name");
    cmd->add_option("--col-w", col_w, "instrument column name");
    cmd->add_option("--col-z", col_z, "treatment level column name");
    cmd->add_option("--z-dummies", z_dummies, "semicolon-separated treatment dummy columns");
    cmd->add_option("--dump-phi", dump_phi, "diagnostic CSV of the quantile map");
    cmd->add_option("--dump-proxies", dump_proxies, "diagnostic CSV of the generated proxies");
    cmd->add_option("--dump-cdf", dump_cdf, "diagnostic CSV prefix for the fitted sub-CDFs");
  };

  CLI::App* estimate = app.add_subcommand("estimate", "three-step estimate with bootstrap CIs");
  add_input(estimate);
  add_common(estimate);
  estimate->add_option("--bootstrap,--B", B, "bootstrap resamples");

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo design comparison");
  add_common(simulate);
  simulate->add_option("--design", design,
                       "continuous-beta | continuous-uniform | discrete-bernoulli");
  simulate->add_option("--censoring", censoring, "censoring level: 20 | 40");
  simulate->add_option("--n", n, "sample size per replication");
  simulate->add_option("--reps,--N", reps, "number of replications");
  simulate->add_flag("--coverage", coverage, "warp-speed CP95 column");

  CLI::App* bootstrap = app.add_subcommand("bootstrap", "bootstrap sd / CI for one dataset");
  add_input(bootstrap);
  add_common(bootstrap);
  bootstrap->add_option("--B", B, "bootstrap resamples");

  CLI11_PARSE(app, argc, argv);

  ConfigHandle handle;
  if (handle.cfg == nullptr) return static_cast<int>(IVPH_ERROR_INTERNAL);
  int rc = 0;
  if (!config_path.empty()) {
    ivph_status st = ivph_config_load_file(handle.cfg, config_path.c_str());
    if (st != IVPH_OK) return fail(st);
  }

  if (threads == 0) {
    const char* env = std::getenv("IVPH_THREADS");
    if (env != nullptr) threads = std::atoi(env);
  }

  // CLI flags override config-file keys.
  auto set_if = [&](const std::string& key, const std::string& value) {
    if (!value.empty() && rc == 0) set_or_fail(handle.cfg, key, value, rc);
  };
  set_if("output", output);
  set_if("seed", seed);
  set_if("u_bar", u_bar);
  set_if("t_bar", t_bar);
  set_if("tau", tau);
  set_if("kernel.family", kernel);
  set_if("bandwidth.method", bw_method);
  set_if("bandwidth.value", bw_value);
  set_if("solver.mode", solver_mode);
  set_if("level", level);
  set_if("columns.y", col_y);
  set_if("columns.delta", col_delta);
  set_if("columns.x", col_x);
  set_if("columns.w", col_w);
  set_if("columns.z", col_z);
  set_if("columns.z_dummies", z_dummies);
  set_if("dump.phi", dump_phi);
  set_if("dump.proxies", dump_proxies);
  set_if("dump.cdf", dump_cdf);
  if (threads > 0 && rc == 0) set_or_fail(handle.cfg, "threads", std::to_string(threads), rc);
  if (rc != 0) return rc;

  ivph_result* result = nullptr;
  ivph_status st = IVPH_OK;

  if (app.got_subcommand(estimate) || app.got_subcommand(bootstrap)) {
    if (set_or_fail(handle.cfg, "B", std::to_string(B), rc) != 0) return rc;
    ivph_dataset* data = nullptr;
    st = ivph_dataset_read_csv(input.c_str(), handle.cfg, &data);
    if (st != IVPH_OK) return fail(st);
    st = app.got_subcommand(estimate) ? ivph_estimate(data, handle.cfg, &result)
                                      : ivph_bootstrap(data, handle.cfg, &result);
    ivph_dataset_free(data);
  } else {
    set_if("design", design);
    if (rc == 0) set_or_fail(handle.cfg, "censoring", std::to_string(censoring), rc);
    if (rc == 0) set_or_fail(handle.cfg, "n", std::to_string(n), rc);
    if (rc == 0) set_or_fail(handle.cfg, "reps", std::to_string(reps), rc);
    if (rc == 0 && coverage) set_or_fail(handle.cfg, "coverage", "1", rc);
    if (rc != 0) return rc;
    st = ivph_simulate(handle.cfg, &result);
  }
  if (st != IVPH_OK) return fail(st);

  std::fputs(ivph_result_text(result), stdout);
  ivph_result_free(result);
  return 0;
}
