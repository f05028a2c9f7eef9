#ifndef MBORDERS_BINARY_MODEL_HPP
#define MBORDERS_BINARY_MODEL_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mborders/errors.hpp"

namespace mborders {

// One training point for a binary discriminator; y = -1 places it on side 1
// of the partition, +1 on side 2.
struct BinarySample {
  std::vector<double> x;
  int y = 0;
};

enum class BinaryModelKind : std::uint32_t { Logistic = 0, Kde = 1 };

// Trained two-class discriminator. evaluate() returns
// r = P(side 2 | x) - P(side 1 | x), always inside [-1, +1].
struct BinaryModel {
  BinaryModelKind kind = BinaryModelKind::Logistic;
  std::size_t dim = 0;

  // Logistic
  std::vector<double> weights;
  double bias = 0.0;

  // Kde
  std::vector<std::vector<double>> side1;
  std::vector<std::vector<double>> side2;
  double bandwidth = 1.0;

  double evaluate(const std::vector<double>& x) const;
};

struct TrainOptions {
  BinaryModelKind model = BinaryModelKind::Logistic;
  double ridge = 1e-3;         // -r, logistic
  int iterations = 500;        // -n, logistic
  double learning_rate = 0.1;  // -e, logistic
  std::optional<double> bandwidth;    // -h, kde; defaults from the data
  std::optional<std::uint64_t> seed;  // -S, kde subsampling
};

// Parses the quoted option string of a training control file. The empty
// string selects all defaults. Throws Error{UnknownFlag, MalformedValue}.
TrainOptions parse_options(const std::string& text);

// Trains a model on relabeled samples. Logistic: full-batch gradient descent
// on the ridge-regularized mean logistic loss, n iterations from zero
// weights. Kde: stores the samples; when -h is absent the bandwidth is half
// the median pairwise distance of a seeded subsample of at most 256 points.
// Throws Error{SingleClassInput, DimensionMismatch}.
BinaryModel train(const std::vector<BinarySample>& samples, const TrainOptions& opts);

// Regularized mean logistic loss and its analytic gradient; the pieces the
// trainer iterates, exposed so the gradient can be checked externally.
double logistic_loss(const std::vector<BinarySample>& samples,
                     const std::vector<double>& w, double b, double ridge);
void logistic_gradient(const std::vector<BinarySample>& samples,
                       const std::vector<double>& w, double b, double ridge,
                       std::vector<double>& grad_w, double& grad_b);

// Self-describing binary model format: magic, version, kind, dimension,
// parameters; all reals as 64-bit IEEE little-endian.
// Throws Error{CorruptModel, TruncatedStream, IoError}.
void save_model(const BinaryModel& model, std::ostream& out);
BinaryModel load_model(std::istream& in);
std::vector<std::uint8_t> save_model_bytes(const BinaryModel& model);
BinaryModel load_model_bytes(const std::vector<std::uint8_t>& bytes);
void save_model_file(const BinaryModel& model, const std::string& path);
BinaryModel load_model_file(const std::string& path);

}  // namespace mborders

#endif
