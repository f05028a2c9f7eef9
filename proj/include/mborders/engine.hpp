#ifndef MBORDERS_ENGINE_HPP
#define MBORDERS_ENGINE_HPP

#include <vector>

#include "mborders/composer.hpp"

namespace mborders {

// Outcome of classifying one point. A full distribution over the absolute
// classes is produced only when the whole model is a single-level partition
// node over leaves; every other shape reports the winning class and the
// product of per-node winner probabilities along the descent path.
struct ClassificationResult {
  int predicted_class = -1;
  double winner_probability = 1.0;
  bool has_distribution = false;
  std::vector<double> distribution;  // indexed by absolute class
};

struct BatchCounters {
  std::size_t binary_evaluations = 0;
};

// True when the model reports a full distribution (single-level partition
// node whose children are all leaves).
bool is_single_level(const TrainedMultiModel& model);

// Throws Error{DimensionMismatch}.
ClassificationResult classify_point(const TrainedMultiModel& model,
                                    const std::vector<double>& x);
ClassificationResult classify_point(const TrainedMultiModel& model,
                                    const std::vector<double>& x,
                                    BatchCounters& counters);

std::vector<ClassificationResult> classify_batch(
    const TrainedMultiModel& model, const std::vector<std::vector<double>>& points,
    BatchCounters& counters);

}  // namespace mborders

#endif
