#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "ivph/cli_io.hpp"
#include "ivph/rng.hpp"
#include "ivph/errors.hpp"

using namespace ivph;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(std::string name, const std::string& contents = "") : path(std::move(name)) {
    if (!contents.empty()) {
      std::ofstream out(path);
      out << contents;
    }
  }
  ~TempFile() { std::remove(path.c_str()); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("read a well-formed csv") {
  TempFile f("t_ok.csv",
             "y,delta,z,x,w\n"
             "1.5,1,0,0.2,0\n"
             "2.5,0,1,0.4,1\n"
             "0.5,1,0,-0.1,1\n");
  Dataset d = read_dataset(f.path, ColumnMapping{});
  CHECK(d.n() == 3);
  CHECK(d.n_levels() == 2);
  CHECK(d.obs[1].z_index == 1);
  CHECK(d.obs[2].w_index == 1);
  CHECK(d.z_codebook[0] == std::vector<int>{0});
  CHECK(d.z_codebook[1] == std::vector<int>{1});
}

TEST_CASE("csv errors carry line numbers") {
  TempFile bad_delta("t_delta.csv", "y,delta,z,x,w\n1,1,0,0,0\n2,2,1,0,1\n");
  try {
    read_dataset(bad_delta.path, ColumnMapping{});
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }

  TempFile missing("t_missing.csv", "y,delta,z,x,w\n1,1,0,,0\n");
  try {
    read_dataset(missing.path, ColumnMapping{});
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }

  TempFile ragged("t_ragged.csv", "y,delta,z,x,w\n1,1,0,0\n");
  CHECK_THROWS_AS(read_dataset(ragged.path, ColumnMapping{}), ParseError);

  TempFile empty("t_empty.csv", "");
  std::ofstream(empty.path).close();
  CHECK_THROWS_AS(read_dataset(empty.path, ColumnMapping{}), EmptyFileError);

  TempFile headeronly("t_header.csv", "y,delta,z,x,w\n");
  CHECK_THROWS_AS(read_dataset(headeronly.path, ColumnMapping{}), EmptyFileError);

  CHECK_THROWS_AS(read_dataset("no_such_file_here.csv", ColumnMapping{}), Error);
}

TEST_CASE("level cardinalities must match between treatment and instrument") {
  TempFile f("t_levels.csv",
             "y,delta,z,x,w\n"
             "1,1,0,0,0\n"
             "2,1,1,0,1\n"
             "3,1,2,0,1\n");
  CHECK_THROWS_AS(read_dataset(f.path, ColumnMapping{}), SchemaError);
}

TEST_CASE("level labels order numerically when numeric") {
  TempFile f("t_numlevels.csv",
             "y,delta,z,x,w\n"
             "1,1,10,0,10\n"
             "2,1,2,0,2\n");
  Dataset d = read_dataset(f.path, ColumnMapping{});
  CHECK(d.z_labels == std::vector<std::string>{"2", "10"});
}

TEST_CASE("treatment dummy columns") {
  TempFile f("t_dummies.csv",
             "y,delta,z1,z2,x,w\n"
             "1,1,0,0,0.1,0\n"
             "2,1,1,0,0.2,1\n"
             "3,0,0,1,0.3,2\n");
  ColumnMapping m;
  m.z_dummies = {"z1", "z2"};
  Dataset d = read_dataset(f.path, m);
  CHECK(d.n_levels() == 3);
  CHECK(d.d_z() == 2);
  CHECK(d.z_codebook[0] == std::vector<int>{0, 0});
}

TEST_CASE("dataset csv round trip") {
  Dataset d = generate_design(design_by_name("discrete-bernoulli"), 50, 20, 3);
  TempFile f("t_roundtrip_data.csv");
  write_dataset_csv(d, f.path);
  Dataset back = read_dataset(f.path, ColumnMapping{});
  REQUIRE(back.n() == d.n());
  for (std::size_t i = 0; i < d.n(); ++i) {
    CHECK(back.obs[i].y == d.obs[i].y);
    CHECK(back.obs[i].delta == d.obs[i].delta);
    CHECK(back.obs[i].z_index == d.obs[i].z_index);
    CHECK(back.obs[i].x == d.obs[i].x);
  }
}

TEST_CASE("config parsing, overrides and validation") {
  TempFile f("t_cfg.txt",
             "# comment\n"
             "u_bar = 0.8\n"
             "bandwidth.method = plug-in\n"
             "seed = 77\n");
  RunConfig cfg = parse_config_file(f.path);
  CHECK(cfg.estimator.u_bar == 0.8);
  CHECK(cfg.estimator.bandwidth.method == BandwidthMethod::plug_in);
  CHECK(cfg.seed == 77);

  apply_config_key(cfg, "kernel.family", "order4");
  CHECK_NOTHROW(apply_config_key(cfg, "kernel.order", "4"));
  CHECK_THROWS_AS(apply_config_key(cfg, "kernel.order", "2"), ConfigError);
  CHECK_THROWS_AS(apply_config_key(cfg, "no.such.key", "1"), ConfigError);
  CHECK_THROWS_AS(apply_config_key(cfg, "u_bar", "abc"), ConfigError);

  RunConfig bad;
  bad.estimator.u_bar = 1.2;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  RunConfig bad2;
  bad2.censoring = 35;
  CHECK_THROWS_AS(bad2.validate(), ConfigError);
}

TEST_CASE("estimate report round trip is lossless") {
  EstimateReport rep;
  rep.rows.push_back({"proposed", "z=1", 0.91234567890123456, 0.327, 0.269, 1.551});
  rep.rows.push_back({"naive", "x", -0.136, 0.04, -0.215, -0.058});
  rep.audit["seed"] = "7";
  TempFile csv("t_estrep.csv"), txt("t_estrep.txt");
  write_estimate_report(rep, csv.path, txt.path);
  EstimateReport back = parse_estimate_report(csv.path);
  REQUIRE(back.rows.size() == rep.rows.size());
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    CHECK(back.rows[i].estimator == rep.rows[i].estimator);
    CHECK(back.rows[i].component == rep.rows[i].component);
    CHECK(back.rows[i].estimate == rep.rows[i].estimate);
    CHECK(back.rows[i].sd == rep.rows[i].sd);
    CHECK(back.rows[i].ci_lower == rep.rows[i].ci_lower);
    CHECK(back.rows[i].ci_upper == rep.rows[i].ci_upper);
  }
  CHECK(back.audit.at("seed") == "7");
}

TEST_CASE("simulation report round trip is lossless") {
  MonteCarloOptions opts;
  opts.seed = 2;
  opts.coverage = true;
  opts.failure_budget = 0.5;  // tiny smoke run
  SimReport rep = run_monte_carlo(design_by_name("discrete-bernoulli"), 200, 20, 8, opts);
  TempFile csv("t_simrep.csv"), txt("t_simrep.txt");
  write_sim_report(rep, csv.path, txt.path);
  SimReport back = parse_sim_report(csv.path);
  CHECK(back.design == rep.design);
  CHECK(back.censoring == rep.censoring);
  CHECK(back.n == rep.n);
  CHECK(back.proposed.bias == rep.proposed.bias);
  CHECK(back.proposed.sd == rep.proposed.sd);
  CHECK(back.proposed.mse == rep.proposed.mse);
  CHECK(back.proposed.rmse == rep.proposed.rmse);
  CHECK(back.proposed.cp95 == rep.proposed.cp95);
  CHECK(back.naive.bias == rep.naive.bias);
  CHECK(back.has_cp95);

  const std::string header = slurp(csv.path).substr(0, 60);
  CHECK(header.find("design,censoring,n,reps,failed,estimator,component,bias") == 0);
}

TEST_CASE("run_estimate end to end on a generated one-sided dataset") {
  Dataset d = generate_design(design_by_name("discrete-bernoulli"), 2000, 20, 11);
  TempFile data("t_estimate_data.csv");
  write_dataset_csv(d, data.path);

  RunConfig cfg;
  cfg.input_path = data.path;
  cfg.output_path = "t_estimate_out";
  cfg.seed = 13;
  cfg.bootstrap_resamples = 30;
  EstimateReport rep = run_estimate(cfg);

  const EstimateReportRow* prop_z = nullptr;
  for (const auto& row : rep.rows)
    if (row.estimator == "proposed" && row.component == "z=1") prop_z = &row;
  REQUIRE(prop_z != nullptr);
  CHECK(std::fabs(prop_z->estimate - 0.7) < 0.2);
  CHECK(prop_z->sd > 0.0);
  CHECK(prop_z->ci_lower < prop_z->estimate);
  CHECK(rep.audit.at("solver") == "triangular");

  // Same config and seed: byte-identical report files.
  const std::string first = slurp("t_estimate_out.csv");
  run_estimate(cfg);
  CHECK(slurp("t_estimate_out.csv") == first);
  CHECK(slurp("t_estimate_out.csv").find("# seed=13") != std::string::npos);

  std::remove("t_estimate_out.csv");
  std::remove("t_estimate_out.txt");
}

TEST_CASE("three-arm dataset with structural zeros flows through estimation") {
  // Synthetic stand-in shaped like a three-group assignment experiment:
  // treatment level l > 0 occurs only under assignment w = l, durations are
  // censored administratively at 26, and the covariate lives on an age-like
  // scale. Exercises L = 3 detection, reference dummy coding and the
  // u_bar / t_bar overrides end to end.
  SplitRng rng(61);
  const std::size_t n = 900;
  Dataset d;
  d.z_codebook = {{0, 0}, {1, 0}, {0, 1}};
  d.z_labels = {"0", "1", "2"};
  d.w_labels = {"0", "1", "2"};
  for (std::size_t i = 0; i < n; ++i) {
    const double wu = rng.uniform();
    const int w = wu < 0.5 ? 0 : (wu < 0.78 ? 1 : 2);
    int z = 0;
    if (w == 1 && rng.uniform() < 0.8) z = 1;
    if (w == 2 && rng.uniform() < 0.65) z = 2;
    const double x = 20.0 + 35.0 * rng.uniform();
    const double u = rng.uniform();
    const double rate = std::exp(0.5 * (z == 1) + 0.4 * (z == 2) + 0.01 * (x - 37.0)) / 8.0;
    const double t = -std::log(1.0 - u) / rate;
    const double c = std::min(26.0, rng.exponential(0.02));
    d.obs.push_back(Observation{std::min(t, c), t <= c ? 1 : 0, z, x, w});
  }
  d.validate();

  auto perm = detect_triangular(d, 0.0);
  REQUIRE(perm.has_value());

  TempFile data("t_l3_data.csv");
  write_dataset_csv(d, data.path);
  RunConfig cfg;
  cfg.input_path = data.path;
  cfg.output_path = "";
  cfg.seed = 9;
  cfg.bootstrap_resamples = 10;
  apply_config_key(cfg, "u_bar", "0.5");
  apply_config_key(cfg, "t_bar", "26");
  EstimateReport rep = run_estimate_on(d, cfg);
  REQUIRE(rep.rows.size() == 6);  // two estimators, three components
  for (const auto& row : rep.rows) {
    CHECK(std::isfinite(row.estimate));
    CHECK(std::isfinite(row.sd));
  }
  CHECK(rep.audit.at("solver") == "triangular");
  CHECK(rep.audit.at("levels") == "3");
}

TEST_CASE("run_simulate writes the report files") {
  RunConfig cfg;
  cfg.design = "discrete-bernoulli";
  cfg.censoring = 20;
  cfg.n = 200;
  cfg.reps = 5;
  cfg.seed = 21;
  cfg.output_path = "t_sim_out";
  SimReport rep = run_simulate(cfg);
  CHECK(rep.reps_used + rep.failed == 5);
  CHECK(slurp("t_sim_out.csv").find("design,censoring") == 0);
  CHECK(!slurp("t_sim_out.txt").empty());
  std::remove("t_sim_out.csv");
  std::remove("t_sim_out.txt");

  RunConfig bad = cfg;
  bad.design = "unknown-design";
  CHECK_THROWS_AS(run_simulate(bad), ConfigError);
}

TEST_CASE("run_bootstrap writes a proposed-only report") {
  Dataset d = generate_design(design_by_name("discrete-bernoulli"), 400, 20, 23);
  TempFile data("t_boot_data.csv");
  write_dataset_csv(d, data.path);
  RunConfig cfg;
  cfg.input_path = data.path;
  cfg.output_path = "t_boot_out";
  cfg.bootstrap_resamples = 20;
  cfg.seed = 5;
  EstimateReport rep = run_bootstrap(cfg);
  CHECK(rep.rows.size() == 2);
  for (const auto& row : rep.rows) CHECK(row.estimator == "proposed");
  std::remove("t_boot_out.csv");
  std::remove("t_boot_out.txt");
}

TEST_CASE("atomic writes leave no temp files behind") {
  EstimateReport rep;
  rep.rows.push_back({"proposed", "x", 1.0, 0.5, 0.0, 2.0});
  write_estimate_report(rep, "t_atomic.csv", "t_atomic.txt");
  std::ifstream tmp("t_atomic.csv.tmp");
  CHECK_FALSE(tmp.good());
  std::remove("t_atomic.csv");
  std::remove("t_atomic.txt");
}
