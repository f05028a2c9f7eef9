#include "mborders/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace mborders {

namespace {

bool is_strict_integer(const std::string& tok) {
  if (tok.empty()) return false;
  std::size_t i = (tok[0] == '+' || tok[0] == '-') ? 1 : 0;
  if (i == tok.size()) return false;
  for (; i < tok.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(tok[i]))) return false;
  return true;
}

}  // namespace

Dataset read_data(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for reading");

  Dataset data;
  std::string line;
  int line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;

    std::istringstream row(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (row >> tok) tokens.push_back(tok);

    if (tokens.size() < 2)
      throw Error(ErrorCode::RaggedRow,
                  "need at least one feature and a label", line_no);
    if (width == 0) width = tokens.size();
    if (tokens.size() != width)
      throw Error(ErrorCode::RaggedRow,
                  "row has " + std::to_string(tokens.size()) +
                      " columns, expected " + std::to_string(width),
                  line_no);

    std::vector<double> x(width - 1);
    for (std::size_t i = 0; i + 1 < width; ++i) {
      try {
        std::size_t used = 0;
        x[i] = std::stod(tokens[i], &used);
        if (used != tokens[i].size()) throw std::invalid_argument(tokens[i]);
      } catch (const std::exception&) {
        throw Error(ErrorCode::RaggedRow,
                    "feature column " + std::to_string(i + 1) + " ('" + tokens[i] +
                        "') is not a real number",
                    line_no);
      }
    }
    const std::string& label_tok = tokens.back();
    if (!is_strict_integer(label_tok))
      throw Error(ErrorCode::NonIntegerLabel,
                  "label '" + label_tok + "' is not an integer", line_no);
    const int label = std::stoi(label_tok);
    if (label < 0)
      throw Error(ErrorCode::NonIntegerLabel,
                  "label " + label_tok + " is negative", line_no);

    data.features.push_back(std::move(x));
    data.labels.push_back(label);
    data.n_classes = std::max(data.n_classes, label + 1);
  }
  if (data.features.empty())
    throw Error(ErrorCode::EmptyFile, "'" + path + "' holds no samples");
  return data;
}

void write_data(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  char buf[64];
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::string line;
    for (double v : data.features[i]) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      line += buf;
      line += ' ';
    }
    line += std::to_string(data.labels[i]);
    line += '\n';
    out << line;
  }
  if (!out) throw Error(ErrorCode::IoError, "short write to '" + path + "'");
}

std::vector<double> geometric_thresholds(const ThresholdSpec& spec) {
  if (!(spec.lo > 0.0) || !(spec.lo < spec.hi) || spec.count < 1)
    throw Error(ErrorCode::ThresholdSpecInvalid,
                "need 0 < lo < hi and count >= 1");
  std::vector<double> cuts(static_cast<std::size_t>(spec.count));
  const double ratio = spec.hi / spec.lo;
  for (int k = 1; k <= spec.count; ++k)
    cuts[static_cast<std::size_t>(k - 1)] =
        spec.lo * std::pow(ratio, static_cast<double>(k) / spec.count);
  return cuts;
}

double latent_field(const std::vector<double>& x, const ThresholdSpec& spec) {
  double u = 0.0;
  for (double v : x) u += v;
  u /= static_cast<double>(x.size());
  // Exponent runs to (count+1)/count so values beyond the last cut occur.
  const double s = u * (spec.count + 1) / static_cast<double>(spec.count);
  return spec.lo * std::pow(spec.hi / spec.lo, s);
}

namespace {

int classify_latent(double z, const std::vector<double>& cuts) {
  int cls = 0;
  for (double c : cuts)
    if (c < z) ++cls;
  return cls;
}

}  // namespace

Dataset synth_continuum(std::size_t n, std::size_t d, int n_classes,
                        const ThresholdSpec& thresholds, double sigma,
                        std::uint64_t seed) {
  if (n == 0 || d == 0 || n_classes < 2)
    throw Error(ErrorCode::ThresholdSpecInvalid,
                "need n >= 1, d >= 1, n_classes >= 2");
  if (thresholds.count != n_classes - 1)
    throw Error(ErrorCode::ThresholdSpecInvalid,
                "threshold count " + std::to_string(thresholds.count) +
                    " must equal n_classes - 1 = " + std::to_string(n_classes - 1));
  const std::vector<double> cuts = geometric_thresholds(thresholds);

  const bool require_all = n >= 50 * static_cast<std::size_t>(n_classes);
  constexpr int kMaxAttempts = 32;

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(attempt));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Dataset data;
    data.n_classes = n_classes;
    data.features.reserve(n);
    data.labels.reserve(n);
    std::vector<int> counts(static_cast<std::size_t>(n_classes), 0);

    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> x(d);
      for (double& v : x) v = uniform(rng);
      double z = latent_field(x, thresholds);
      if (sigma > 0.0) z *= std::exp(sigma * gauss(rng));
      const int cls = classify_latent(z, cuts);
      ++counts[static_cast<std::size_t>(cls)];
      data.features.push_back(std::move(x));
      data.labels.push_back(cls);
    }

    const bool starved =
        std::any_of(counts.begin(), counts.end(), [](int c) { return c == 0; });
    if (!starved || !require_all) return data;
  }
  throw Error(ErrorCode::ClassStarvation,
              "a class stayed empty after " + std::to_string(kMaxAttempts) +
                  " attempts");
}

}  // namespace mborders
