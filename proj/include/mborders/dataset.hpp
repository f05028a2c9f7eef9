#ifndef MBORDERS_DATASET_HPP
#define MBORDERS_DATASET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mborders/errors.hpp"

namespace mborders {

// Labeled feature vectors. Text form on disk: one sample per line, d
// whitespace-separated feature reals followed by one integer class label;
// `#` starts a comment line.
struct Dataset {
  std::vector<std::vector<double>> features;
  std::vector<int> labels;
  int n_classes = 0;

  std::size_t size() const { return features.size(); }
  std::size_t dim() const { return features.empty() ? 0 : features.front().size(); }
};

// Throws Error{IoError, RaggedRow, NonIntegerLabel, EmptyFile}.
Dataset read_data(const std::string& path);

// Reals written with 17 significant digits so a round-trip re-reads equal.
void write_data(const Dataset& data, const std::string& path);

// Geometric threshold ladder: count cut points between lo and hi.
struct ThresholdSpec {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
};

// Cut point k (1-based) is lo * (hi/lo)^(k / count); the last equals hi.
std::vector<double> geometric_thresholds(const ThresholdSpec& spec);

// Discretized-continuum generator: features uniform on [0,1]^d, a positive
// latent field geometric in the mean feature, multiplicative log-normal
// noise, class = number of thresholds below the noisy field value. The
// latent exponent overshoots the ladder so the top class is populated even
// at sigma = 0. Deterministic per seed; regenerates on an unlucky draw that
// leaves a class empty (bounded retries) when n >= 50 * n_classes.
// Throws Error{ThresholdSpecInvalid, ClassStarvation}.
Dataset synth_continuum(std::size_t n, std::size_t d, int n_classes,
                        const ThresholdSpec& thresholds, double sigma,
                        std::uint64_t seed);

// The noiseless latent field value for a feature vector, exposed so a
// generated sample's class can be recomputed independently of the labels.
double latent_field(const std::vector<double>& x, const ThresholdSpec& spec);

}  // namespace mborders

#endif
