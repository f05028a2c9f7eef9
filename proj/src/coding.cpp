#include "mborders/coding.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace mborders {

CodingMatrix build_coding_matrix(const std::vector<Partition>& partitions,
                                 int n_classes) {
  CodingMatrix m;
  m.n_classes = n_classes;
  m.n_partitions = static_cast<int>(partitions.size());
  m.entries.assign(static_cast<std::size_t>(m.rows()) * n_classes, 0.0);
  for (int j = 0; j < n_classes; ++j) m.at(0, j) = 1.0;

  for (int i = 0; i < m.n_partitions; ++i) {
    const Partition& part = partitions[static_cast<std::size_t>(i)];
    if (part.side1.empty() || part.side2.empty())
      throw Error(ErrorCode::EmptySide,
                  "partition " + std::to_string(i) + " has an empty side");
    for (int c : part.side1) {
      if (c < 0 || c >= n_classes)
        throw Error(ErrorCode::IndexOutOfRange,
                    "class " + std::to_string(c) + " outside [0, " +
                        std::to_string(n_classes) + ") in partition " +
                        std::to_string(i));
      m.at(i + 1, c) = -1.0;
    }
    for (int c : part.side2) {
      if (c < 0 || c >= n_classes)
        throw Error(ErrorCode::IndexOutOfRange,
                    "class " + std::to_string(c) + " outside [0, " +
                        std::to_string(n_classes) + ") in partition " +
                        std::to_string(i));
      m.at(i + 1, c) = 1.0;
    }
  }
  return m;
}

namespace {

// Dense symmetric helpers sized for coding systems (a handful of classes).

// A^T A and A^T b of the augmented system.
void normal_equations(const CodingMatrix& A, const std::vector<double>& b,
                      std::vector<double>& ata, std::vector<double>& atb) {
  const int n = A.n_classes;
  const int rows = A.rows();
  ata.assign(static_cast<std::size_t>(n) * n, 0.0);
  atb.assign(static_cast<std::size_t>(n), 0.0);
  for (int r = 0; r < rows; ++r) {
    for (int i = 0; i < n; ++i) {
      const double ari = A.at(r, i);
      if (ari == 0.0) continue;
      atb[i] += ari * b[static_cast<std::size_t>(r)];
      for (int j = 0; j < n; ++j)
        ata[static_cast<std::size_t>(i) * n + j] += ari * A.at(r, j);
    }
  }
}

// In-place Cholesky solve of M x = y for symmetric positive definite M.
// Returns false when a pivot falls below tolerance (rank deficiency).
bool cholesky_solve(std::vector<double> m, int n, std::vector<double> y,
                    std::vector<double>& x) {
  double max_diag = 0.0;
  for (int i = 0; i < n; ++i)
    max_diag = std::max(max_diag, std::abs(m[static_cast<std::size_t>(i) * n + i]));
  const double tol = 1e-12 * std::max(max_diag, 1.0);

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = m[static_cast<std::size_t>(i) * n + j];
      for (int k = 0; k < j; ++k)
        sum -= m[static_cast<std::size_t>(i) * n + k] *
               m[static_cast<std::size_t>(j) * n + k];
      if (i == j) {
        if (sum <= tol) return false;
        m[static_cast<std::size_t>(i) * n + i] = std::sqrt(sum);
      } else {
        m[static_cast<std::size_t>(i) * n + j] =
            sum / m[static_cast<std::size_t>(j) * n + j];
      }
    }
  }
  // forward substitution L z = y
  for (int i = 0; i < n; ++i) {
    double sum = y[static_cast<std::size_t>(i)];
    for (int k = 0; k < i; ++k)
      sum -= m[static_cast<std::size_t>(i) * n + k] * y[static_cast<std::size_t>(k)];
    y[static_cast<std::size_t>(i)] = sum / m[static_cast<std::size_t>(i) * n + i];
  }
  // back substitution L^T x = z
  x.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = n - 1; i >= 0; --i) {
    double sum = y[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < n; ++k)
      sum -= m[static_cast<std::size_t>(k) * n + i] * x[static_cast<std::size_t>(k)];
    x[static_cast<std::size_t>(i)] = sum / m[static_cast<std::size_t>(i) * n + i];
  }
  return true;
}

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Eigenvalues land
// on the diagonal of `m`; eigenvectors are the columns of `v`.
void jacobi_eigen(std::vector<double>& m, int n, std::vector<double>& v) {
  v.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;
  auto at = [n](std::vector<double>& a, int i, int j) -> double& {
    return a[static_cast<std::size_t>(i) * n + j];
  };

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += at(m, p, q) * at(m, p, q);
    if (off < 1e-30) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(m, p, q);
        if (apq == 0.0) continue;
        const double tau = (at(m, q, q) - at(m, p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double mkp = at(m, k, p), mkq = at(m, k, q);
          at(m, k, p) = c * mkp - s * mkq;
          at(m, k, q) = s * mkp + c * mkq;
        }
        for (int k = 0; k < n; ++k) {
          const double mpk = at(m, p, k), mqk = at(m, q, k);
          at(m, p, k) = c * mpk - s * mqk;
          at(m, q, k) = s * mpk + c * mqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = at(v, k, p), vkq = at(v, k, q);
          at(v, k, p) = c * vkp - s * vkq;
          at(v, k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
}

// Eigenvalue cutoff separating numerical rank from round-off, relative to
// the largest eigenvalue of A^T A.
constexpr double kRankTolerance = 1e-10;

int eigen_rank(const std::vector<double>& eigvals) {
  double max_ev = 0.0;
  for (double e : eigvals) max_ev = std::max(max_ev, e);
  if (max_ev <= 0.0) return 0;
  int rank = 0;
  for (double e : eigvals)
    if (e > kRankTolerance * max_ev) ++rank;
  return rank;
}

// Minimum-norm least-squares solution through the pseudo-inverse of A^T A.
std::vector<double> min_norm_solve(std::vector<double> ata, int n,
                                   const std::vector<double>& atb, int* rank_out) {
  std::vector<double> v;
  jacobi_eigen(ata, n, v);
  std::vector<double> eigvals(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    eigvals[static_cast<std::size_t>(i)] = ata[static_cast<std::size_t>(i) * n + i];
  double max_ev = 0.0;
  for (double e : eigvals) max_ev = std::max(max_ev, e);
  const double cutoff = kRankTolerance * max_ev;

  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  int rank = 0;
  for (int i = 0; i < n; ++i) {
    const double ev = eigvals[static_cast<std::size_t>(i)];
    if (ev <= cutoff || max_ev <= 0.0) continue;
    ++rank;
    double proj = 0.0;
    for (int k = 0; k < n; ++k)
      proj += v[static_cast<std::size_t>(k) * n + i] * atb[static_cast<std::size_t>(k)];
    proj /= ev;
    for (int k = 0; k < n; ++k)
      x[static_cast<std::size_t>(k)] += proj * v[static_cast<std::size_t>(k) * n + i];
  }
  if (rank_out) *rank_out = rank;
  return x;
}

}  // namespace

SolveResult solve_probabilities(const CodingMatrix& A, const std::vector<double>& r,
                                const SolveOptions& opts) {
  const int n = A.n_classes;
  if (static_cast<int>(r.size()) != A.n_partitions)
    throw Error(ErrorCode::DimensionMismatch,
                "response vector has " + std::to_string(r.size()) +
                    " entries for " + std::to_string(A.n_partitions) +
                    " partitions");

  std::vector<double> b(static_cast<std::size_t>(A.rows()));
  b[0] = 1.0;
  for (int i = 0; i < A.n_partitions; ++i)
    b[static_cast<std::size_t>(i) + 1] = r[static_cast<std::size_t>(i)];

  std::vector<double> ata, atb;
  normal_equations(A, b, ata, atb);
  if (opts.method == SolveMethod::LsqRidge) {
    for (int i = 0; i < n; ++i)
      ata[static_cast<std::size_t>(i) * n + i] += opts.lambda;
  }

  SolveResult result;
  if (!cholesky_solve(ata, n, atb, result.p)) {
    result.rank_deficient = true;
    result.p = min_norm_solve(ata, n, atb, nullptr);
  }

  // Feasibility repair: clip negatives, renormalize.
  double sum = 0.0;
  for (double& x : result.p) {
    if (x < 0.0) x = 0.0;
    sum += x;
  }
  if (sum <= 0.0) {
    result.degenerate = true;
    const double u = 1.0 / n;
    for (double& x : result.p) x = u;
  } else {
    for (double& x : result.p) x /= sum;
  }
  return result;
}

ConditionReport condition_report(const CodingMatrix& A) {
  const int n = A.n_classes;
  std::vector<double> ata, atb;
  std::vector<double> b(static_cast<std::size_t>(A.rows()), 0.0);
  normal_equations(A, b, ata, atb);
  std::vector<double> v;
  jacobi_eigen(ata, n, v);
  std::vector<double> eigvals(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    eigvals[static_cast<std::size_t>(i)] = ata[static_cast<std::size_t>(i) * n + i];

  ConditionReport report;
  report.rank = eigen_rank(eigvals);
  report.over_determined = A.rows() > n;
  return report;
}

}  // namespace mborders
