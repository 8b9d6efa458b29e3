#include "ivph/cli_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "ivph/errors.hpp"
#include "ivph/mathutil.hpp"
#include "ivph/rng.hpp"

namespace ivph {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

double parse_double(const std::string& s, std::size_t line, const std::string& col) {
  if (s.empty()) throw ParseError(line, "missing value in column '" + col + "'");
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "cannot parse '" + s + "' in column '" + col + "' as a number");
  }
}

//! Order level labels numerically when every label parses as a number.
std::vector<std::string> ordered_levels(std::vector<std::string> labels) {
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  bool numeric = true;
  std::vector<std::pair<double, std::string>> keyed;
  for (const auto& s : labels) {
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      keyed.emplace_back(v, s);
    } catch (const std::exception&) {
      numeric = false;
      break;
    }
  }
  if (numeric) {
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = keyed[i].second;
  }
  return labels;
}

void atomic_write(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorCategory::data, "cannot open " + tmp + " for writing");
    out << contents;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw Error(ErrorCategory::data, "cannot rename " + tmp + " to " + path);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt3(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%8.3f", v);
  return buf;
}

}  // namespace

Dataset read_dataset(const std::string& path, const ColumnMapping& mapping) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::data, "cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw EmptyFileError(path + " is empty");
  const std::vector<std::string> cols = split_csv(header);

  auto col_index = [&](const std::string& name) {
    auto it = std::find(cols.begin(), cols.end(), name);
    if (it == cols.end()) throw SchemaError("column '" + name + "' not found in " + path);
    return static_cast<std::size_t>(it - cols.begin());
  };

  const bool use_dummies = !mapping.z_dummies.empty();
  const std::size_t iy = col_index(mapping.y);
  const std::size_t idelta = col_index(mapping.delta);
  const std::size_t ix = col_index(mapping.x);
  const std::size_t iw = col_index(mapping.w);
  std::vector<std::size_t> iz;
  if (use_dummies) {
    for (const auto& c : mapping.z_dummies) iz.push_back(col_index(c));
  } else {
    iz.push_back(col_index(mapping.z_level));
  }

  struct RawRow {
    double y;
    int delta;
    double x;
    std::string z_key;
    std::string w_key;
  };
  std::vector<RawRow> raw;
  std::vector<std::string> z_keys, w_keys;

  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> f = split_csv(line);
    if (f.size() != cols.size())
      throw ParseError(lineno, "expected " + std::to_string(cols.size()) + " fields, got " +
                                   std::to_string(f.size()));
    RawRow r;
    r.y = parse_double(f[iy], lineno, mapping.y);
    const double dv = parse_double(f[idelta], lineno, mapping.delta);
    if (dv != 0.0 && dv != 1.0)
      throw ParseError(lineno, "event indicator must be 0 or 1, got '" + f[idelta] + "'");
    r.delta = static_cast<int>(dv);
    r.x = parse_double(f[ix], lineno, mapping.x);
    if (!(std::isfinite(r.y)) || r.y < 0.0)
      throw ParseError(lineno, "duration must be finite and >= 0");
    if (use_dummies) {
      std::string key;
      for (std::size_t j = 0; j < iz.size(); ++j) {
        const double b = parse_double(f[iz[j]], lineno, mapping.z_dummies[j]);
        if (b != 0.0 && b != 1.0) throw ParseError(lineno, "treatment dummies must be 0 or 1");
        key += b == 1.0 ? '1' : '0';
      }
      r.z_key = key;
    } else {
      if (f[iz[0]].empty()) throw ParseError(lineno, "missing value in column '" + mapping.z_level + "'");
      r.z_key = f[iz[0]];
    }
    if (f[iw].empty()) throw ParseError(lineno, "missing value in column '" + mapping.w + "'");
    r.w_key = f[iw];
    z_keys.push_back(r.z_key);
    w_keys.push_back(r.w_key);
    raw.push_back(std::move(r));
  }
  if (raw.empty()) throw EmptyFileError(path + " has a header but no rows");

  const std::vector<std::string> z_levels = ordered_levels(z_keys);
  const std::vector<std::string> w_levels = ordered_levels(w_keys);
  if (z_levels.size() != w_levels.size())
    throw SchemaError("treatment has " + std::to_string(z_levels.size()) + " levels but instrument has " +
                      std::to_string(w_levels.size()) +
                      "; the model requires the instrument to have the same number of modalities");

  Dataset d;
  d.z_labels = z_levels;
  d.w_labels = w_levels;
  const std::size_t L = z_levels.size();
  if (use_dummies) {
    for (const auto& lab : z_levels) {
      std::vector<int> dummy;
      for (char c : lab) dummy.push_back(c == '1' ? 1 : 0);
      d.z_codebook.push_back(std::move(dummy));
    }
  } else {
    // Reference coding: first level maps to the zero vector.
    for (std::size_t l = 0; l < L; ++l) {
      std::vector<int> dummy(L - 1, 0);
      if (l > 0) dummy[l - 1] = 1;
      d.z_codebook.push_back(std::move(dummy));
    }
  }

  auto level_of = [](const std::vector<std::string>& levels, const std::string& key) {
    return static_cast<int>(std::find(levels.begin(), levels.end(), key) - levels.begin());
  };
  d.obs.reserve(raw.size());
  for (const RawRow& r : raw)
    d.obs.push_back(
        Observation{r.y, r.delta, level_of(z_levels, r.z_key), r.x, level_of(w_levels, r.w_key)});
  d.validate();
  return d;
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::string out = "y,delta,z,x,w\n";
  for (const Observation& o : data.obs) {
    out += fmt(o.y);
    out += ",";
    out += std::to_string(o.delta);
    out += ",";
    out += data.z_labels[static_cast<std::size_t>(o.z_index)];
    out += ",";
    out += fmt(o.x);
    out += ",";
    out += data.w_labels[static_cast<std::size_t>(o.w_index)];
    out += "\n";
  }
  atomic_write(path, out);
}

void RunConfig::validate() const {
  estimator.validate();
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("level must lie in (0,1)");
  if (failure_budget < 0.0 || failure_budget > 1.0)
    throw ConfigError("failure_budget must lie in [0,1]");
  if (bootstrap_resamples < 2) throw ConfigError("bootstrap resamples must be >= 2");
  if (censoring != 20 && censoring != 40) throw ConfigError("censoring must be 20 or 40");
  if (reps < 1) throw ConfigError("reps must be >= 1");
  if (n < 1) throw ConfigError("n must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (!columns.z_dummies.empty() && !columns.z_level.empty() && columns.z_level != "z")
    throw ConfigError("give either a z level column or z dummy columns, not both");
}

namespace {

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
  try {
    return static_cast<std::uint64_t>(std::stoull(v));
  } catch (const std::exception&) {
    throw ConfigError("cannot parse '" + v + "' for key " + key);
  }
}

double parse_cfg_double(const std::string& v, const std::string& key) {
  try {
    return std::stod(v);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse '" + v + "' for key " + key);
  }
}

int parse_cfg_int(const std::string& v, const std::string& key) {
  try {
    return std::stoi(v);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse '" + v + "' for key " + key);
  }
}

}  // namespace

void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "input") cfg.input_path = value;
  else if (key == "output") cfg.output_path = value;
  else if (key == "columns.y") cfg.columns.y = value;
  else if (key == "columns.delta") cfg.columns.delta = value;
  else if (key == "columns.x") cfg.columns.x = value;
  else if (key == "columns.w") cfg.columns.w = value;
  else if (key == "columns.z") cfg.columns.z_level = value;
  else if (key == "columns.z_dummies") {
    cfg.columns.z_dummies.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ';')) {
      item = trim(item);
      if (!item.empty()) cfg.columns.z_dummies.push_back(item);
    }
  } else if (key == "kernel.family") {
    cfg.estimator.kernel_family = value;
    KernelSpec::from_name(value);
  } else if (key == "kernel.order") {
    const int order = parse_cfg_int(value, key);
    const int actual = KernelSpec::from_name(cfg.estimator.kernel_family).order();
    if (order != actual)
      throw ConfigError("kernel.order " + value + " does not match family '" +
                        cfg.estimator.kernel_family + "' (order " + std::to_string(actual) + ")");
  } else if (key == "kernel.tilde_family") {
    cfg.estimator.kernel_tilde_family = value;
    KernelSpec::from_name(value);
  } else if (key == "bandwidth.method") {
    if (value == "fixed") cfg.estimator.bandwidth.method = BandwidthMethod::fixed;
    else if (value == "rule-of-thumb") cfg.estimator.bandwidth.method = BandwidthMethod::rule_of_thumb;
    else if (value == "plug-in") cfg.estimator.bandwidth.method = BandwidthMethod::plug_in;
    else throw ConfigError("unknown bandwidth.method: " + value);
  } else if (key == "bandwidth.value") {
    cfg.estimator.bandwidth.fixed_value = parse_cfg_double(value, key);
    if (!(cfg.estimator.bandwidth.fixed_value > 0.0))
      throw ConfigError("bandwidth.value must be positive");
  } else if (key == "bandwidth.scope") {
    if (value == "instrument") cfg.estimator.bandwidth.scope = BandwidthScope::instrument_cell;
    else if (value == "treatment") cfg.estimator.bandwidth.scope = BandwidthScope::treatment_cell;
    else throw ConfigError("unknown bandwidth.scope: " + value);
  } else if (key == "bandwidth.min_neighbors") {
    cfg.estimator.bandwidth.min_neighbors = parse_cfg_int(value, key);
  } else if (key == "epsilon") cfg.estimator.epsilon = parse_cfg_double(value, key);
  else if (key == "u_bar") cfg.estimator.u_bar = parse_cfg_double(value, key);
  else if (key == "t_bar") cfg.estimator.t_bar = parse_cfg_double(value, key);
  else if (key == "tau") cfg.estimator.tau = parse_cfg_double(value, key);
  else if (key == "solver.mode") {
    if (value == "auto") cfg.estimator.solver_mode = SolverMode::automatic;
    else if (value == "triangular") cfg.estimator.solver_mode = SolverMode::triangular;
    else if (value == "general") cfg.estimator.solver_mode = SolverMode::general;
    else throw ConfigError("unknown solver.mode: " + value);
  } else if (key == "solver.grid") cfg.estimator.grid_size = parse_cfg_int(value, key);
  else if (key == "solver.restarts") cfg.estimator.restarts = parse_cfg_int(value, key);
  else if (key == "solver.triangular_tol")
    cfg.estimator.triangular_tol = parse_cfg_double(value, key);
  else if (key == "saturation.policy") {
    if (value == "drop") cfg.estimator.on_saturation = SaturationPolicy::drop_with_count;
    else if (value == "error") cfg.estimator.on_saturation = SaturationPolicy::error;
    else throw ConfigError("unknown saturation.policy: " + value);
  } else if (key == "saturation.max_drop")
    cfg.estimator.max_drop_fraction = parse_cfg_double(value, key);
  else if (key == "proxy.replicates") cfg.estimator.proxy_replicates = parse_cfg_int(value, key);
  else if (key == "seed") cfg.seed = parse_u64(value, key);
  else if (key == "B") cfg.bootstrap_resamples = parse_cfg_int(value, key);
  else if (key == "level") cfg.level = parse_cfg_double(value, key);
  else if (key == "design") cfg.design = value;
  else if (key == "censoring") cfg.censoring = parse_cfg_int(value, key);
  else if (key == "n") cfg.n = static_cast<std::size_t>(parse_cfg_int(value, key));
  else if (key == "reps" || key == "N") cfg.reps = parse_cfg_int(value, key);
  else if (key == "coverage") cfg.coverage = (value == "1" || value == "true" || value == "yes");
  else if (key == "failure_budget") cfg.failure_budget = parse_cfg_double(value, key);
  else if (key == "threads") cfg.threads = parse_cfg_int(value, key);
  else if (key == "dump.phi") cfg.dump_phi = value;
  else if (key == "dump.proxies") cfg.dump_proxies = value;
  else if (key == "dump.cdf") cfg.dump_cdf = value;
  else throw ConfigError("unknown config key: " + key);
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  RunConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + " is not key=value: " + t);
    apply_config_key(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return cfg;
}

std::string render_estimate_text(const EstimateReport& report) {
  std::string txt = "estimator   component        est       sd    ci_lo    ci_hi\n";
  for (const auto& r : report.rows) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-10s  %-10s %s %s %s %s\n", r.estimator.c_str(),
                  r.component.c_str(), fmt3(r.estimate).c_str(), fmt3(r.sd).c_str(),
                  fmt3(r.ci_lower).c_str(), fmt3(r.ci_upper).c_str());
    txt += buf;
  }
  txt += "\n";
  for (const auto& [k, v] : report.audit) txt += "# " + k + "=" + v + "\n";
  return txt;
}

void write_estimate_report(const EstimateReport& report, const std::string& csv_path,
                           const std::string& text_path) {
  std::string csv;
  for (const auto& [k, v] : report.audit) csv += "# " + k + "=" + v + "\n";
  csv += "estimator,component,estimate,sd,ci_lower,ci_upper\n";
  for (const auto& r : report.rows)
    csv += r.estimator + "," + r.component + "," + fmt(r.estimate) + "," + fmt(r.sd) + "," +
           fmt(r.ci_lower) + "," + fmt(r.ci_upper) + "\n";
  atomic_write(csv_path, csv);
  atomic_write(text_path, render_estimate_text(report));
}

EstimateReport parse_estimate_report(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw Error(ErrorCategory::data, "cannot open " + csv_path);
  EstimateReport report;
  std::string line;
  bool header_seen = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const std::size_t eq = t.find('=');
      if (eq != std::string::npos)
        report.audit[trim(t.substr(1, eq - 1))] = trim(t.substr(eq + 1));
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto f = split_csv(t);
    if (f.size() != 6) throw ParseError(lineno, "expected 6 fields in estimate report");
    EstimateReportRow r;
    r.estimator = f[0];
    r.component = f[1];
    r.estimate = parse_double(f[2], lineno, "estimate");
    r.sd = parse_double(f[3], lineno, "sd");
    r.ci_lower = parse_double(f[4], lineno, "ci_lower");
    r.ci_upper = parse_double(f[5], lineno, "ci_upper");
    report.rows.push_back(std::move(r));
  }
  return report;
}

namespace {

std::string sim_metric_rows(const SimReport& rep, const std::string& estimator,
                            const SimMetrics& m, bool with_cp) {
  std::string out;
  for (std::size_t c = 0; c < rep.components.size(); ++c) {
    out += rep.design + "," + std::to_string(rep.censoring) + "," + std::to_string(rep.n) + "," +
           std::to_string(rep.reps_used) + "," + std::to_string(rep.failed) + "," + estimator +
           "," + rep.components[c] + "," + fmt(m.bias[c]) + "," + fmt(m.sd[c]) + "," +
           fmt(m.mse[c]) + "," + fmt(m.rmse) + ",";
    if (with_cp && !m.cp95.empty()) out += fmt(m.cp95[c]);
    out += "\n";
  }
  return out;
}

}  // namespace

std::string render_sim_text(const SimReport& report) {
  std::string txt;
  txt += "design=" + report.design + " censoring=" + std::to_string(report.censoring) + "%" +
         " n=" + std::to_string(report.n) + " reps=" + std::to_string(report.reps_used) +
         " failed=" + std::to_string(report.failed) + "\n";
  txt += "estimator   comp      bias       sd      mse     rmse     cp95\n";
  auto text_rows = [&](const std::string& name, const SimMetrics& m, bool with_cp) {
    for (std::size_t c = 0; c < report.components.size(); ++c) {
      char buf[200];
      std::string cp = with_cp && !m.cp95.empty() ? fmt3(m.cp95[c]) : "       -";
      std::snprintf(buf, sizeof(buf), "%-10s  %-4s %s %s %s %s %s\n", name.c_str(),
                    report.components[c].c_str(), fmt3(m.bias[c]).c_str(), fmt3(m.sd[c]).c_str(),
                    fmt3(m.mse[c]).c_str(), fmt3(m.rmse).c_str(), cp.c_str());
      txt += buf;
    }
  };
  if (!report.proposed.bias.empty()) text_rows("proposed", report.proposed, report.has_cp95);
  if (!report.naive.bias.empty()) text_rows("naive", report.naive, false);
  return txt;
}

void write_sim_report(const SimReport& report, const std::string& csv_path,
                      const std::string& text_path) {
  std::string csv = "design,censoring,n,reps,failed,estimator,component,bias,sd,mse,rmse,cp95\n";
  if (!report.proposed.bias.empty())
    csv += sim_metric_rows(report, "proposed", report.proposed, report.has_cp95);
  if (!report.naive.bias.empty()) csv += sim_metric_rows(report, "naive", report.naive, false);
  atomic_write(csv_path, csv);
  atomic_write(text_path, render_sim_text(report));
}

SimReport parse_sim_report(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw Error(ErrorCategory::data, "cannot open " + csv_path);
  SimReport rep;
  std::string line;
  bool header_seen = false;
  std::size_t lineno = 0;
  bool meta_set = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto f = split_csv(t);
    if (f.size() != 12) throw ParseError(lineno, "expected 12 fields in simulation report");
    if (!meta_set) {
      rep.design = f[0];
      rep.censoring = parse_cfg_int(f[1], "censoring");
      rep.n = static_cast<std::size_t>(parse_cfg_int(f[2], "n"));
      rep.reps_used = parse_cfg_int(f[3], "reps");
      rep.failed = parse_cfg_int(f[4], "failed");
      rep.reps_requested = rep.reps_used + rep.failed;
      meta_set = true;
    }
    SimMetrics& m = f[5] == "proposed" ? rep.proposed : rep.naive;
    if (std::find(rep.components.begin(), rep.components.end(), f[6]) == rep.components.end() &&
        f[5] == "proposed")
      rep.components.push_back(f[6]);
    m.bias.push_back(parse_double(f[7], lineno, "bias"));
    m.sd.push_back(parse_double(f[8], lineno, "sd"));
    m.mse.push_back(parse_double(f[9], lineno, "mse"));
    m.rmse = parse_double(f[10], lineno, "rmse");
    if (!f[11].empty()) {
      m.cp95.push_back(parse_double(f[11], lineno, "cp95"));
      rep.has_cp95 = true;
    }
  }
  if (!header_seen) throw EmptyFileError(csv_path + " has no rows");
  return rep;
}

namespace {

std::vector<std::string> component_names(const Dataset& data) {
  std::vector<std::string> names;
  // One dummy per non-reference level under reference coding; otherwise one
  // name per dummy column position.
  const int dz = data.d_z();
  for (int j = 0; j < dz; ++j) {
    std::string label = "z" + std::to_string(j + 1);
    for (int l = 0; l < data.n_levels(); ++l) {
      const auto& dummy = data.z_codebook[static_cast<std::size_t>(l)];
      bool is_unit = dummy[static_cast<std::size_t>(j)] == 1;
      for (int jj = 0; is_unit && jj < dz; ++jj)
        if (jj != j && dummy[static_cast<std::size_t>(jj)] != 0) is_unit = false;
      if (is_unit) {
        label = "z=" + data.z_labels[static_cast<std::size_t>(l)];
        break;
      }
    }
    names.push_back(label);
  }
  names.push_back("x");
  return names;
}

EstimateReport make_report(const Dataset& data, const std::vector<double>& prop_beta,
                           const std::vector<double>& prop_sd,
                           const std::vector<double>* naive_beta,
                           const std::vector<double>* naive_sd, double level) {
  EstimateReport report;
  const std::vector<std::string> names = component_names(data);
  CiReport prop_ci = normal_ci(prop_beta, prop_sd, level);
  for (std::size_t c = 0; c < names.size(); ++c)
    report.rows.push_back(EstimateReportRow{"proposed", names[c], prop_beta[c], prop_sd[c],
                                            prop_ci.lower[c], prop_ci.upper[c]});
  if (naive_beta != nullptr && naive_sd != nullptr) {
    CiReport naive_ci = normal_ci(*naive_beta, *naive_sd, level);
    for (std::size_t c = 0; c < names.size(); ++c)
      report.rows.push_back(EstimateReportRow{"naive", names[c], (*naive_beta)[c], (*naive_sd)[c],
                                              naive_ci.lower[c], naive_ci.upper[c]});
  }
  return report;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += " ";
    s += fmt(v[i]);
  }
  return s;
}

//! Naive-estimator bootstrap: resample rows, refit the partial likelihood.
std::vector<double> naive_bootstrap_sd(const Dataset& data, const RunConfig& cfg) {
  std::vector<std::vector<double>> draws;
  int failed = 0;
  for (int b = 0; b < cfg.bootstrap_resamples; ++b) {
    try {
      SplitRng idx_rng(cfg.seed, 0xa1feu, static_cast<std::uint64_t>(b));
      std::vector<std::size_t> rows(data.n());
      for (std::size_t i = 0; i < data.n(); ++i) rows[i] = idx_rng.index(data.n());
      draws.push_back(naive_cox(data.subset(rows), cfg.estimator.cox).beta);
    } catch (const Error&) {
      ++failed;
    }
  }
  if (failed > 0.1 * cfg.bootstrap_resamples || draws.size() < 2)
    throw FailureBudgetError("naive bootstrap: too many failed resamples");
  std::vector<double> sd(static_cast<std::size_t>(data.d_v()));
  for (std::size_t c = 0; c < sd.size(); ++c) {
    std::vector<double> comp;
    comp.reserve(draws.size());
    for (const auto& dr : draws) comp.push_back(dr[c]);
    sd[c] = sample_sd(comp);
  }
  return sd;
}

}  // namespace

EstimateReport run_estimate(const RunConfig& cfg) {
  cfg.validate();
  return run_estimate_on(read_dataset(cfg.input_path, cfg.columns), cfg);
}

EstimateReport run_estimate_on(const Dataset& input, const RunConfig& cfg) {
  cfg.validate();
  auto data = std::make_shared<Dataset>(input);

  QuantileMap map = build_quantile_map(data, cfg.estimator);
  EstimateResult prop = estimate_with_map(*data, map, cfg.estimator,
                                          detail::derive_seed(cfg.seed, 0x9cU));
  CoxFit naive = naive_cox(*data, cfg.estimator.cox);

  BootstrapOptions bopts;
  bopts.resamples = cfg.bootstrap_resamples;
  bopts.seed = cfg.seed;
  bopts.threads = cfg.threads;
  bopts.failure_budget = cfg.failure_budget;
  BootstrapSd bsd = bootstrap_sd(*data, cfg.estimator, bopts);
  std::vector<double> nsd = naive_bootstrap_sd(*data, cfg);

  EstimateReport report =
      make_report(*data, prop.fit.beta, bsd.sd, &naive.beta, &nsd, cfg.level);
  report.audit["seed"] = std::to_string(cfg.seed);
  report.audit["n"] = std::to_string(data->n());
  report.audit["levels"] = std::to_string(data->n_levels());
  report.audit["u_bar"] = fmt(cfg.estimator.u_bar);
  report.audit["t_bar"] = fmt(prop.audit.t_bar);
  report.audit["solver"] =
      prop.audit.solver_mode == SolverMode::triangular ? "triangular" : "general";
  report.audit["bandwidths"] = join_doubles(prop.audit.bandwidths);
  report.audit["saturation_dropped"] = std::to_string(prop.audit.dropped_saturated);
  report.audit["bootstrap_resamples"] = std::to_string(bsd.used);
  report.audit["bootstrap_failed"] = std::to_string(bsd.failed);
  if (prop.audit.rank_warning) report.audit["rank_warning"] = "1";

  if (!cfg.output_path.empty())
    write_estimate_report(report, cfg.output_path + ".csv", cfg.output_path + ".txt");

  if (!cfg.dump_phi.empty()) {
    std::vector<double> xs;
    xs.reserve(data->n());
    for (const auto& o : data->obs) xs.push_back(o.x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    write_phi_csv(map, xs, cfg.dump_phi);
  }
  if (!cfg.dump_proxies.empty()) {
    ProxyConfig pcfg;
    pcfg.u_bar = cfg.estimator.u_bar;
    pcfg.tau = cfg.estimator.tau;
    pcfg.seed = detail::derive_seed(cfg.seed, 0x9cU);
    pcfg.on_saturation = cfg.estimator.on_saturation;
    pcfg.max_drop_fraction = cfg.estimator.max_drop_fraction;
    write_proxies_csv(make_proxies(*data, map, pcfg), cfg.dump_proxies);
  }
  if (!cfg.dump_cdf.empty()) {
    std::vector<double> xs;
    xs.reserve(data->n());
    for (const auto& o : data->obs) xs.push_back(o.x);
    const double x_med = quantile(std::move(xs), 0.5);
    const CellCdfBundle bundle = map.factory().build(x_med);
    for (int l = 0; l < bundle.levels; ++l)
      for (int k = 0; k < bundle.levels; ++k)
        write_cdf_csv(bundle.at(l, k),
                      cfg.dump_cdf + ".z" + std::to_string(l) + "w" + std::to_string(k) + ".csv");
  }
  return report;
}

SimReport run_simulate(const RunConfig& cfg) {
  cfg.validate();
  const SimDesign design = design_by_name(cfg.design);
  MonteCarloOptions opts;
  opts.seed = cfg.seed;
  opts.threads = cfg.threads;
  opts.coverage = cfg.coverage;
  opts.failure_budget = cfg.failure_budget;
  opts.level = cfg.level;
  opts.estimator = cfg.estimator;
  SimReport report = run_monte_carlo(design, cfg.n, cfg.censoring, cfg.reps, opts);
  if (!cfg.output_path.empty())
    write_sim_report(report, cfg.output_path + ".csv", cfg.output_path + ".txt");
  return report;
}

EstimateReport run_bootstrap(const RunConfig& cfg) {
  cfg.validate();
  return run_bootstrap_on(read_dataset(cfg.input_path, cfg.columns), cfg);
}

EstimateReport run_bootstrap_on(const Dataset& input, const RunConfig& cfg) {
  cfg.validate();
  auto data = std::make_shared<Dataset>(input);
  EstimateResult prop =
      estimate_proposed(data, cfg.estimator, detail::derive_seed(cfg.seed, 0x9cU));
  BootstrapOptions bopts;
  bopts.resamples = cfg.bootstrap_resamples;
  bopts.seed = cfg.seed;
  bopts.threads = cfg.threads;
  bopts.failure_budget = cfg.failure_budget;
  BootstrapSd bsd = bootstrap_sd(*data, cfg.estimator, bopts);
  EstimateReport report = make_report(*data, prop.fit.beta, bsd.sd, nullptr, nullptr, cfg.level);
  report.audit["seed"] = std::to_string(cfg.seed);
  report.audit["bootstrap_resamples"] = std::to_string(bsd.used);
  report.audit["bootstrap_failed"] = std::to_string(bsd.failed);
  if (!cfg.output_path.empty())
    write_estimate_report(report, cfg.output_path + ".csv", cfg.output_path + ".txt");
  return report;
}

}  // namespace ivph
