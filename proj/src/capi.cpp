#include "ivph/ivph.h"

#include <map>
#include <memory>
#include <string>

#include "ivph/cli_io.hpp"
#include "ivph/errors.hpp"

namespace {

thread_local std::string g_last_error;

ivph_status to_status(const ivph::Error& e) {
  switch (e.category()) {
    case ivph::ErrorCategory::config: return IVPH_ERROR_CONFIG;
    case ivph::ErrorCategory::data: return IVPH_ERROR_DATA;
    case ivph::ErrorCategory::numeric: return IVPH_ERROR_NUMERIC;
    default: return IVPH_ERROR_INTERNAL;
  }
}

template <typename Fn>
ivph_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return IVPH_OK;
  } catch (const ivph::Error& e) {
    g_last_error = e.what();
    return to_status(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return IVPH_ERROR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return IVPH_ERROR_INTERNAL;
  }
}

}  // namespace

struct ivph_config {
  ivph::RunConfig cfg;
};

struct ivph_dataset {
  std::shared_ptr<const ivph::Dataset> data;
};

struct ivph_result {
  std::map<std::string, double> scalars;
  std::string text;
  size_t dim = 0;
};

namespace {

void fill_estimate_result(const ivph::EstimateReport& report, ivph_result& out) {
  std::map<std::string, size_t> next_index;
  for (const auto& row : report.rows) {
    const size_t c = next_index[row.estimator]++;
    const std::string base = row.estimator + ".";
    out.scalars[base + "beta." + std::to_string(c)] = row.estimate;
    out.scalars[base + "sd." + std::to_string(c)] = row.sd;
    out.scalars[base + "ci_lower." + std::to_string(c)] = row.ci_lower;
    out.scalars[base + "ci_upper." + std::to_string(c)] = row.ci_upper;
    out.dim = std::max(out.dim, next_index[row.estimator]);
  }
  out.text = ivph::render_estimate_text(report);
}

void fill_sim_result(const ivph::SimReport& report, ivph_result& out) {
  auto fill = [&](const std::string& name, const ivph::SimMetrics& m) {
    if (m.bias.empty()) return;
    for (size_t c = 0; c < m.bias.size(); ++c) {
      out.scalars[name + ".bias." + std::to_string(c)] = m.bias[c];
      out.scalars[name + ".sd." + std::to_string(c)] = m.sd[c];
      out.scalars[name + ".mse." + std::to_string(c)] = m.mse[c];
      if (c < m.cp95.size()) out.scalars[name + ".cp95." + std::to_string(c)] = m.cp95[c];
    }
    out.scalars[name + ".rmse"] = m.rmse;
    out.dim = std::max(out.dim, m.bias.size());
  };
  fill("proposed", report.proposed);
  fill("naive", report.naive);
  out.scalars["reps_used"] = static_cast<double>(report.reps_used);
  out.scalars["failed"] = static_cast<double>(report.failed);
  out.text = ivph::render_sim_text(report);
}

}  // namespace

extern "C" {

const char* ivph_version(void) { return "0.1.0"; }

const char* ivph_last_error(void) { return g_last_error.c_str(); }

ivph_status ivph_config_create(ivph_config** out) {
  if (out == nullptr) return IVPH_ERROR_ARGUMENT;
  return guarded([&] { *out = new ivph_config(); });
}

void ivph_config_free(ivph_config* cfg) { delete cfg; }

ivph_status ivph_config_set(ivph_config* cfg, const char* key, const char* value) {
  if (cfg == nullptr || key == nullptr || value == nullptr) return IVPH_ERROR_ARGUMENT;
  return guarded([&] { ivph::apply_config_key(cfg->cfg, key, value); });
}

ivph_status ivph_config_load_file(ivph_config* cfg, const char* path) {
  if (cfg == nullptr || path == nullptr) return IVPH_ERROR_ARGUMENT;
  return guarded([&] { cfg->cfg = ivph::parse_config_file(path); });
}

ivph_status ivph_dataset_read_csv(const char* path, const ivph_config* cfg, ivph_dataset** out) {
  if (path == nullptr || out == nullptr) return IVPH_ERROR_ARGUMENT;
  return guarded([&] {
    const ivph::ColumnMapping mapping =
        cfg != nullptr ? cfg->cfg.columns : ivph::ColumnMapping{};
    auto data = std::make_shared<ivph::Dataset>(ivph::read_dataset(path, mapping));
    *out = new ivph_dataset{std::move(data)};
  });
}

void ivph_dataset_free(ivph_dataset* data) { delete data; }

ivph_status ivph_dataset_n_rows(const ivph_dataset* data, size_t* out) {
  if (data == nullptr || out == nullptr) return IVPH_ERROR_ARGUMENT;
  *out = data->data->n();
  return IVPH_OK;
}

ivph_status ivph_dataset_n_levels(const ivph_dataset* data, int* out) {
  if (data == nullptr || out == nullptr) return IVPH_ERROR_ARGUMENT;
  *out = data->data->n_levels();
  return IVPH_OK;
}

ivph_status ivph_estimate(const ivph_dataset* data, const ivph_config* cfg, ivph_result** out) {
  if (data == nullptr || cfg == nullptr || out == nullptr) return IVPH_ERROR_ARGUMENT;
  return guarded([&] {
    ivph::RunConfig run = cfg->cfg;
    run.command = "estimate";
    ivph::EstimateReport report = ivph::run_estimate_on(*data->data, run);
    auto result = std::make_unique<ivph_result>();
    fill_estimate_result(report, *result);
    *out = result.release();
  });
}

ivph_status ivph_simulate(const ivph_config* cfg, ivph_result** out) {
  if (cfg == nullptr || out == nullptr) return IVPH_ERROR_ARGUMENT;
  return guarded([&] {
    ivph::RunConfig run = cfg->cfg;
    run.command = "simulate";
    ivph::SimReport report = ivph::run_simulate(run);
    auto result = std::make_unique<ivph_result>();
    fill_sim_result(report, *result);
    *out = result.release();
  });
}

ivph_status ivph_bootstrap(const ivph_dataset* data, const ivph_config* cfg, ivph_result** out) {
  if (data == nullptr || cfg == nullptr || out == nullptr) return IVPH_ERROR_ARGUMENT;
  return guarded([&] {
    ivph::RunConfig run = cfg->cfg;
    run.command = "bootstrap";
    ivph::EstimateReport report = ivph::run_bootstrap_on(*data->data, run);
    auto result = std::make_unique<ivph_result>();
    fill_estimate_result(report, *result);
    *out = result.release();
  });
}

void ivph_result_free(ivph_result* result) { delete result; }

ivph_status ivph_result_get(const ivph_result* result, const char* key, double* out) {
  if (result == nullptr || key == nullptr || out == nullptr) return IVPH_ERROR_ARGUMENT;
  auto it = result->scalars.find(key);
  if (it == result->scalars.end()) {
    g_last_error = std::string("no such result key: ") + key;
    return IVPH_ERROR_ARGUMENT;
  }
  *out = it->second;
  return IVPH_OK;
}

ivph_status ivph_result_dim(const ivph_result* result, size_t* out) {
  if (result == nullptr || out == nullptr) return IVPH_ERROR_ARGUMENT;
  *out = result->dim;
  return IVPH_OK;
}

const char* ivph_result_text(const ivph_result* result) {
  return result != nullptr ? result->text.c_str() : "";
}

}  // extern "C"
