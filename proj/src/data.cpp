#include "ivph/data.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ivph/errors.hpp"

namespace ivph {

std::vector<double> Dataset::v_row(std::size_t i) const {
  const Observation& o = obs[i];
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(d_v()));
  for (int b : z_codebook[static_cast<std::size_t>(o.z_index)]) v.push_back(static_cast<double>(b));
  v.push_back(o.x);
  return v;
}

std::vector<std::vector<std::size_t>> Dataset::cell_counts() const {
  std::vector<std::vector<std::size_t>> counts(
      static_cast<std::size_t>(n_levels()),
      std::vector<std::size_t>(static_cast<std::size_t>(n_levels()), 0));
  for (const Observation& o : obs)
    counts[static_cast<std::size_t>(o.z_index)][static_cast<std::size_t>(o.w_index)]++;
  return counts;
}

double Dataset::max_uncensored_y() const {
  double t = 0.0;
  for (const Observation& o : obs)
    if (o.delta == 1) t = std::max(t, o.y);
  return t;
}

void Dataset::validate() const {
  if (obs.empty()) throw SchemaError("dataset has no rows");
  const int L = n_levels();
  if (L < 1) throw SchemaError("empty treatment codebook");
  if (static_cast<int>(w_labels.size()) != L)
    throw SchemaError("treatment and instrument must have the same number of levels (got " +
                      std::to_string(L) + " vs " + std::to_string(w_labels.size()) + ")");
  std::set<std::vector<int>> dummies;
  for (const auto& d : z_codebook) {
    if (static_cast<int>(d.size()) != d_z()) throw SchemaError("ragged treatment codebook");
    for (int b : d)
      if (b != 0 && b != 1) throw SchemaError("treatment dummies must be 0/1");
    if (!dummies.insert(d).second) throw SchemaError("duplicate treatment dummy vector");
  }
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const Observation& o = obs[i];
    if (!std::isfinite(o.y) || o.y < 0.0)
      throw SchemaError("row " + std::to_string(i) + ": duration must be finite and >= 0");
    if (o.delta != 0 && o.delta != 1)
      throw SchemaError("row " + std::to_string(i) + ": event indicator must be 0 or 1");
    if (o.z_index < 0 || o.z_index >= L || o.w_index < 0 || o.w_index >= L)
      throw SchemaError("row " + std::to_string(i) + ": level index out of range");
    if (!std::isfinite(o.x)) throw SchemaError("row " + std::to_string(i) + ": covariate not finite");
  }
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Dataset out;
  out.z_codebook = z_codebook;
  out.z_labels = z_labels;
  out.w_labels = w_labels;
  out.obs.reserve(rows.size());
  for (std::size_t r : rows) out.obs.push_back(obs[r]);
  return out;
}

Dataset make_binary_dataset(std::vector<double> y, std::vector<int> delta, std::vector<int> z,
                            std::vector<double> x, std::vector<int> w) {
  Dataset d;
  d.z_codebook = {{0}, {1}};
  d.z_labels = {"0", "1"};
  d.w_labels = {"0", "1"};
  const std::size_t n = y.size();
  d.obs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.obs[i] = Observation{y[i], delta[i], z[i], x[i], w[i]};
  }
  d.validate();
  return d;
}

}  // namespace ivph
