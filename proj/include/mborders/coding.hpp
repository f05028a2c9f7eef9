#ifndef MBORDERS_CODING_HPP
#define MBORDERS_CODING_HPP

#include <vector>

#include "mborders/control_lang.hpp"
#include "mborders/errors.hpp"

namespace mborders {

// Linear system relating class conditional probabilities to binary partition
// responses. Row 0 is the normalization equation (all ones); row i >= 1
// carries +1 for classes on side 2 of partition i, -1 for side 1, 0 for
// classes the partition omits.
struct CodingMatrix {
  int n_classes = 0;
  int n_partitions = 0;
  std::vector<double> entries;  // (n_partitions + 1) x n_classes, row-major

  double at(int row, int col) const {
    return entries[static_cast<std::size_t>(row) * n_classes + col];
  }
  double& at(int row, int col) {
    return entries[static_cast<std::size_t>(row) * n_classes + col];
  }
  int rows() const { return n_partitions + 1; }
};

// Throws Error{IndexOutOfRange, EmptySide}.
CodingMatrix build_coding_matrix(const std::vector<Partition>& partitions,
                                 int n_classes);

enum class SolveMethod { Lsq, LsqRidge };

struct SolveOptions {
  SolveMethod method = SolveMethod::Lsq;
  double lambda = 0.0;  // ridge strength, LsqRidge only
};

struct SolveResult {
  std::vector<double> p;      // non-negative, sums to 1
  bool rank_deficient = false;  // minimum-norm solution was substituted
  bool degenerate = false;      // every raw component clipped; uniform returned
};

// Least-squares solve of A p = [1, r...] followed by feasibility repair
// (negative components clipped, vector renormalized). Normal equations with
// a Cholesky factorization; a symmetric eigendecomposition provides the
// minimum-norm solution when the columns are dependent.
// Throws Error{DimensionMismatch}.
SolveResult solve_probabilities(const CodingMatrix& A, const std::vector<double>& r,
                                const SolveOptions& opts = {});

struct ConditionReport {
  int rank = 0;
  bool over_determined = false;
};

ConditionReport condition_report(const CodingMatrix& A);

}  // namespace mborders

#endif
