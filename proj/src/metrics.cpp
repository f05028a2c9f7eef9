#include "mborders/metrics.hpp"

#include <cmath>
#include <cstdio>

namespace mborders {

MetricsReport compute_metrics(const std::vector<int>& true_labels,
                              const std::vector<int>& predicted_labels,
                              int n_classes) {
  if (true_labels.size() != predicted_labels.size() || true_labels.empty())
    throw Error(ErrorCode::LengthMismatch,
                "label sequences must have equal non-zero length (" +
                    std::to_string(true_labels.size()) + " vs " +
                    std::to_string(predicted_labels.size()) + ")");

  const std::size_t n = true_labels.size();
  const std::size_t k = static_cast<std::size_t>(n_classes);
  MetricsReport report;
  report.confusion.assign(k, std::vector<long>(k, 0));

  for (std::size_t i = 0; i < n; ++i) {
    const int t = true_labels[i], p = predicted_labels[i];
    if (t < 0 || t >= n_classes || p < 0 || p >= n_classes)
      throw Error(ErrorCode::LabelOutOfRange,
                  "label pair (" + std::to_string(t) + ", " + std::to_string(p) +
                      ") outside [0, " + std::to_string(n_classes) + ")");
    ++report.confusion[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
  }

  long diag = 0;
  for (std::size_t c = 0; c < k; ++c) diag += report.confusion[c][c];
  report.accuracy = static_cast<double>(diag) / static_cast<double>(n);

  // Marginals.
  std::vector<double> pt(k, 0.0), pp(k, 0.0);
  for (std::size_t t = 0; t < k; ++t)
    for (std::size_t p = 0; p < k; ++p) {
      const double joint = static_cast<double>(report.confusion[t][p]) / n;
      pt[t] += joint;
      pp[p] += joint;
    }

  double h_true = 0.0;
  for (double q : pt)
    if (q > 0.0) h_true -= q * std::log(q);

  if (h_true == 0.0) {
    // A single true class: degenerate by definition.
    report.degenerate_uncertainty = true;
    bool constant_equal = true;
    for (std::size_t i = 0; i < n; ++i)
      if (predicted_labels[i] != true_labels[0]) { constant_equal = false; break; }
    report.uncertainty_coefficient = constant_equal ? 1.0 : 0.0;
  } else {
    double mi = 0.0;
    for (std::size_t t = 0; t < k; ++t)
      for (std::size_t p = 0; p < k; ++p) {
        const double joint = static_cast<double>(report.confusion[t][p]) / n;
        if (joint > 0.0) mi += joint * std::log(joint / (pt[t] * pp[p]));
      }
    report.uncertainty_coefficient = mi / h_true;
    // Round-off can nudge the ratio a hair outside [0, 1].
    if (report.uncertainty_coefficient < 0.0) report.uncertainty_coefficient = 0.0;
    if (report.uncertainty_coefficient > 1.0) report.uncertainty_coefficient = 1.0;
  }

  // Pearson correlation of the integer label sequences.
  double mean_t = 0.0, mean_p = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_t += true_labels[i];
    mean_p += predicted_labels[i];
  }
  mean_t /= static_cast<double>(n);
  mean_p /= static_cast<double>(n);
  double cov = 0.0, var_t = 0.0, var_p = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = true_labels[i] - mean_t;
    const double dp = predicted_labels[i] - mean_p;
    cov += dt * dp;
    var_t += dt * dt;
    var_p += dp * dp;
  }
  if (var_t == 0.0 || var_p == 0.0) {
    report.degenerate_correlation = true;
    report.pearson_correlation = 0.0;
  } else {
    report.pearson_correlation = cov / std::sqrt(var_t * var_p);
  }
  return report;
}

std::string MetricsReport::text_block() const {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "accuracy                %.6f\n", accuracy);
  out += buf;
  std::snprintf(buf, sizeof buf, "uncertainty_coefficient %.6f%s\n",
                uncertainty_coefficient, degenerate_uncertainty ? " (degenerate)" : "");
  out += buf;
  std::snprintf(buf, sizeof buf, "pearson_correlation     %.6f%s\n",
                pearson_correlation, degenerate_correlation ? " (degenerate)" : "");
  out += buf;
  out += "confusion (rows = true, cols = predicted):\n";
  for (const auto& row : confusion) {
    std::string line = " ";
    for (long c : row) {
      std::snprintf(buf, sizeof buf, " %6ld", c);
      line += buf;
    }
    out += line + "\n";
  }
  return out;
}

std::string MetricsReport::record_line() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "acc=%.6f uc=%.6f corr=%.6f degenerate=%d%d",
                accuracy, uncertainty_coefficient, pearson_correlation,
                degenerate_uncertainty ? 1 : 0, degenerate_correlation ? 1 : 0);
  return buf;
}

}  // namespace mborders
