#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ivph {

//! One censored observation: duration, event indicator, treatment level,
//! scalar covariate and instrument level. Levels are 0-based indices into
//! the dataset codebooks.
struct Observation {
  double y = 0.0;
  int delta = 0;
  int z_index = 0;
  double x = 0.0;
  int w_index = 0;
};

struct Dataset {
  std::vector<Observation> obs;
  // Treatment level -> dummy vector in {0,1}^{d_z}. Level 0 is the reference
  // (all-zero) level under default coding.
  std::vector<std::vector<int>> z_codebook;
  std::vector<std::string> z_labels;
  std::vector<std::string> w_labels;

  std::size_t n() const { return obs.size(); }
  int n_levels() const { return static_cast<int>(z_codebook.size()); }
  int d_z() const { return z_codebook.empty() ? 0 : static_cast<int>(z_codebook[0].size()); }
  int d_v() const { return d_z() + 1; }

  //! Design vector (z dummies, x) for row i.
  std::vector<double> v_row(std::size_t i) const;

  //! Joint level counts, counts[z][w].
  std::vector<std::vector<std::size_t>> cell_counts() const;

  //! Largest uncensored duration (the default time cap); 0 if none.
  double max_uncensored_y() const;

  //! Throws SchemaError / ConfigError on violated invariants.
  void validate() const;

  //! Row subset (with repetition allowed); codebooks are shared.
  Dataset subset(const std::vector<std::size_t>& rows) const;
};

//! Dataset with 0/1 treatment and instrument columns and default codebooks;
//! the building block used by simulation and tests.
Dataset make_binary_dataset(std::vector<double> y, std::vector<int> delta, std::vector<int> z,
                            std::vector<double> x, std::vector<int> w);

}  // namespace ivph
