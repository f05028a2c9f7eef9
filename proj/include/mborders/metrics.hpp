#ifndef MBORDERS_METRICS_HPP
#define MBORDERS_METRICS_HPP

#include <string>
#include <vector>

#include "mborders/errors.hpp"

namespace mborders {

// Table of agreement between true and predicted labels plus the summary
// statistics derived from it. The uncertainty coefficient is the mutual
// information between the label sequences normalized by the entropy of the
// true-class marginal (natural log, 0 log 0 = 0).
struct MetricsReport {
  double accuracy = 0.0;
  double uncertainty_coefficient = 0.0;
  double pearson_correlation = 0.0;
  std::vector<std::vector<long>> confusion;  // [true][predicted]
  bool degenerate_uncertainty = false;       // single true class
  bool degenerate_correlation = false;       // a constant sequence

  std::string text_block() const;
  std::string record_line() const;
};

// Throws Error{LengthMismatch, LabelOutOfRange}.
MetricsReport compute_metrics(const std::vector<int>& true_labels,
                              const std::vector<int>& predicted_labels,
                              int n_classes);

}  // namespace mborders

#endif
