#include "mborders/binary_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace mborders {

// ---------------------------------------------------------------------------
// Option string
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_ws(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_real(const std::string& flag, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::MalformedValue,
                "flag " + flag + " needs a numeric value, got '" + value + "'");
  }
}

long parse_int(const std::string& flag, const std::string& value) {
  try {
    std::size_t used = 0;
    long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::MalformedValue,
                "flag " + flag + " needs an integer value, got '" + value + "'");
  }
}

}  // namespace

TrainOptions parse_options(const std::string& text) {
  TrainOptions opts;
  const std::vector<std::string> tokens = split_ws(text);
  std::size_t i = 0;
  auto next_value = [&](const std::string& flag) -> const std::string& {
    if (i >= tokens.size())
      throw Error(ErrorCode::MalformedValue, "flag " + flag + " is missing its value");
    return tokens[i++];
  };

  while (i < tokens.size()) {
    const std::string flag = tokens[i++];
    if (flag == "-m") {
      const std::string& v = next_value(flag);
      if (v == "logistic") opts.model = BinaryModelKind::Logistic;
      else if (v == "kde") opts.model = BinaryModelKind::Kde;
      else
        throw Error(ErrorCode::MalformedValue,
                    "-m expects 'logistic' or 'kde', got '" + v + "'");
    } else if (flag == "-r") {
      double v = parse_real(flag, next_value(flag));
      if (v < 0)
        throw Error(ErrorCode::MalformedValue, "-r must be >= 0");
      opts.ridge = v;
    } else if (flag == "-n") {
      long v = parse_int(flag, next_value(flag));
      if (v <= 0)
        throw Error(ErrorCode::MalformedValue, "-n must be > 0");
      opts.iterations = static_cast<int>(v);
    } else if (flag == "-e") {
      double v = parse_real(flag, next_value(flag));
      if (v <= 0)
        throw Error(ErrorCode::MalformedValue, "-e must be > 0");
      opts.learning_rate = v;
    } else if (flag == "-h") {
      double v = parse_real(flag, next_value(flag));
      if (v <= 0)
        throw Error(ErrorCode::MalformedValue, "-h must be > 0");
      opts.bandwidth = v;
    } else if (flag == "-S") {
      long v = parse_int(flag, next_value(flag));
      if (v < 0)
        throw Error(ErrorCode::MalformedValue, "-S must be >= 0");
      opts.seed = static_cast<std::uint64_t>(v);
    } else {
      throw Error(ErrorCode::UnknownFlag,
                  "unknown training flag '" + flag +
                      "' (AGF-style flags such as -s/-W/-k are not supported; "
                      "available: -m -r -n -e -h -S)");
    }
  }
  return opts;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double kernel_mean(const std::vector<std::vector<double>>& points,
                   const std::vector<double>& x, double h) {
  double sum = 0.0;
  const double inv = 1.0 / (2.0 * h * h);
  for (const auto& p : points) sum += std::exp(-squared_distance(p, x) * inv);
  return sum / static_cast<double>(points.size());
}

}  // namespace

double BinaryModel::evaluate(const std::vector<double>& x) const {
  if (x.size() != dim)
    throw Error(ErrorCode::DimensionMismatch,
                "point has " + std::to_string(x.size()) + " features, model expects " +
                    std::to_string(dim));
  double r = 0.0;
  if (kind == BinaryModelKind::Logistic) {
    double z = bias;
    for (std::size_t i = 0; i < dim; ++i) z += weights[i] * x[i];
    r = 2.0 * sigmoid(z) - 1.0;
  } else {
    const double f1 = kernel_mean(side1, x, bandwidth);
    const double f2 = kernel_mean(side2, x, bandwidth);
    const double denom = f1 + f2;
    r = denom > 0.0 ? (f2 - f1) / denom : 0.0;
  }
  return std::clamp(r, -1.0, 1.0);
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

double logistic_loss(const std::vector<BinarySample>& samples,
                     const std::vector<double>& w, double b, double ridge) {
  double loss = 0.0;
  for (const BinarySample& s : samples) {
    double z = b;
    for (std::size_t i = 0; i < w.size(); ++i) z += w[i] * s.x[i];
    const double u = -static_cast<double>(s.y) * z;
    loss += u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
  }
  loss /= static_cast<double>(samples.size());
  double wsq = 0.0;
  for (double wi : w) wsq += wi * wi;
  return loss + 0.5 * ridge * wsq;
}

void logistic_gradient(const std::vector<BinarySample>& samples,
                       const std::vector<double>& w, double b, double ridge,
                       std::vector<double>& grad_w, double& grad_b) {
  grad_w.assign(w.size(), 0.0);
  grad_b = 0.0;
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  for (const BinarySample& s : samples) {
    double z = b;
    for (std::size_t i = 0; i < w.size(); ++i) z += w[i] * s.x[i];
    const double target = s.y > 0 ? 1.0 : 0.0;
    const double factor = (sigmoid(z) - target) * inv_n;
    for (std::size_t i = 0; i < w.size(); ++i) grad_w[i] += factor * s.x[i];
    grad_b += factor;
  }
  for (std::size_t i = 0; i < w.size(); ++i) grad_w[i] += ridge * w[i];
}

namespace {

BinaryModel train_logistic(const std::vector<BinarySample>& samples,
                           const TrainOptions& opts, std::size_t dim) {
  BinaryModel model;
  model.kind = BinaryModelKind::Logistic;
  model.dim = dim;
  model.weights.assign(dim, 0.0);
  model.bias = 0.0;

  std::vector<double> grad_w;
  double grad_b = 0.0;
  for (int iter = 0; iter < opts.iterations; ++iter) {
    logistic_gradient(samples, model.weights, model.bias, opts.ridge, grad_w, grad_b);
    for (std::size_t i = 0; i < dim; ++i)
      model.weights[i] -= opts.learning_rate * grad_w[i];
    model.bias -= opts.learning_rate * grad_b;
  }
  return model;
}

// Half the median pairwise distance of a seeded subsample of at most 256
// points. The subsample ignores labels so that relabeling the same data
// reproduces the same bandwidth.
double default_bandwidth(const std::vector<BinarySample>& samples,
                         std::uint64_t seed) {
  const std::size_t n = samples.size();
  const std::size_t m = std::min<std::size_t>(n, 256);

  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(n - i));
    std::swap(idx[i], idx[j]);
  }

  std::vector<double> dists;
  dists.reserve(m * (m - 1) / 2);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      dists.push_back(
          std::sqrt(squared_distance(samples[idx[a]].x, samples[idx[b]].x)));
  std::sort(dists.begin(), dists.end());
  const std::size_t k = dists.size();
  const double median = (dists[(k - 1) / 2] + dists[k / 2]) / 2.0;
  const double h = median / 2.0;
  return h > 0.0 ? h : 1.0;  // coincident points carry no scale
}

BinaryModel train_kde(const std::vector<BinarySample>& samples,
                      const TrainOptions& opts, std::size_t dim) {
  BinaryModel model;
  model.kind = BinaryModelKind::Kde;
  model.dim = dim;
  for (const BinarySample& s : samples)
    (s.y > 0 ? model.side2 : model.side1).push_back(s.x);
  model.bandwidth = opts.bandwidth
                        ? *opts.bandwidth
                        : default_bandwidth(samples, opts.seed.value_or(0));
  return model;
}

}  // namespace

BinaryModel train(const std::vector<BinarySample>& samples, const TrainOptions& opts) {
  if (samples.empty())
    throw Error(ErrorCode::SingleClassInput, "no training samples");
  const std::size_t dim = samples.front().x.size();
  if (dim == 0)
    throw Error(ErrorCode::DimensionMismatch, "samples have zero features");
  bool has_pos = false, has_neg = false;
  for (const BinarySample& s : samples) {
    if (s.x.size() != dim)
      throw Error(ErrorCode::DimensionMismatch,
                  "inconsistent feature dimensions (" + std::to_string(s.x.size()) +
                      " vs " + std::to_string(dim) + ")");
    (s.y > 0 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg)
    throw Error(ErrorCode::SingleClassInput,
                "training set contains only one side of the partition");

  return opts.model == BinaryModelKind::Logistic ? train_logistic(samples, opts, dim)
                                                 : train_kde(samples, opts, dim);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'M', 'B', 'O', 'R', 'D', 'E', 'R', '1'};
constexpr std::uint32_t kVersion = 1;

void write_bytes(std::ostream& out, const void* data, std::size_t size) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) throw Error(ErrorCode::IoError, "short write while saving model");
}

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  write_bytes(out, buf, 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  write_bytes(out, buf, 8);
}

void write_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  write_u64(out, bits);
}

void read_bytes(std::istream& in, void* data, std::size_t size) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
  if (static_cast<std::size_t>(in.gcount()) != size)
    throw Error(ErrorCode::TruncatedStream, "model stream ends prematurely");
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char buf[4];
  read_bytes(in, buf, 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
  return v;
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char buf[8];
  read_bytes(in, buf, 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

double read_f64(std::istream& in) {
  const std::uint64_t bits = read_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

constexpr std::uint64_t kMaxDim = 1u << 20;
constexpr std::uint64_t kMaxSamples = 1u << 28;

std::vector<std::vector<double>> read_points(std::istream& in, std::uint64_t count,
                                             std::size_t dim) {
  std::vector<std::vector<double>> points;
  points.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::vector<double> p(dim);
    for (std::size_t j = 0; j < dim; ++j) p[j] = read_f64(in);
    points.push_back(std::move(p));
  }
  return points;
}

}  // namespace

void save_model(const BinaryModel& model, std::ostream& out) {
  write_bytes(out, kMagic, 8);
  write_u32(out, kVersion);
  write_u32(out, static_cast<std::uint32_t>(model.kind));
  write_u32(out, static_cast<std::uint32_t>(model.dim));
  if (model.kind == BinaryModelKind::Logistic) {
    for (double w : model.weights) write_f64(out, w);
    write_f64(out, model.bias);
  } else {
    write_f64(out, model.bandwidth);
    write_u64(out, model.side1.size());
    write_u64(out, model.side2.size());
    for (const auto& p : model.side1)
      for (double v : p) write_f64(out, v);
    for (const auto& p : model.side2)
      for (double v : p) write_f64(out, v);
  }
}

BinaryModel load_model(std::istream& in) {
  char magic[8];
  read_bytes(in, magic, 8);
  if (std::memcmp(magic, kMagic, 8) != 0)
    throw Error(ErrorCode::CorruptModel, "bad magic");
  const std::uint32_t version = read_u32(in);
  if (version != kVersion)
    throw Error(ErrorCode::CorruptModel,
                "unsupported format version " + std::to_string(version));
  const std::uint32_t kind = read_u32(in);
  if (kind > 1)
    throw Error(ErrorCode::CorruptModel, "unknown model kind " + std::to_string(kind));
  const std::uint32_t dim = read_u32(in);
  if (dim == 0 || dim > kMaxDim)
    throw Error(ErrorCode::CorruptModel, "implausible dimension " + std::to_string(dim));

  BinaryModel model;
  model.kind = static_cast<BinaryModelKind>(kind);
  model.dim = dim;
  if (model.kind == BinaryModelKind::Logistic) {
    model.weights.resize(dim);
    for (std::uint32_t i = 0; i < dim; ++i) model.weights[i] = read_f64(in);
    model.bias = read_f64(in);
  } else {
    model.bandwidth = read_f64(in);
    if (!(model.bandwidth > 0.0))
      throw Error(ErrorCode::CorruptModel, "non-positive bandwidth");
    const std::uint64_t n1 = read_u64(in);
    const std::uint64_t n2 = read_u64(in);
    if (n1 == 0 || n2 == 0 || n1 > kMaxSamples || n2 > kMaxSamples)
      throw Error(ErrorCode::CorruptModel, "implausible sample counts");
    model.side1 = read_points(in, n1, dim);
    model.side2 = read_points(in, n2, dim);
  }
  return model;
}

std::vector<std::uint8_t> save_model_bytes(const BinaryModel& model) {
  std::ostringstream out(std::ios::binary);
  save_model(model, out);
  const std::string s = out.str();
  return std::vector<std::uint8_t>(s.begin(), s.end());
}

BinaryModel load_model_bytes(const std::vector<std::uint8_t>& bytes) {
  std::istringstream in(std::string(bytes.begin(), bytes.end()), std::ios::binary);
  return load_model(in);
}

void save_model_file(const BinaryModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  save_model(model, out);
}

BinaryModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for reading");
  return load_model(in);
}

}  // namespace mborders
