#include "hetsize/linalg.hpp"

#include <algorithm>
#include <iterator>
#include <limits>

namespace hetsize::linalg {

double rank_tolerance(Index rows, Index cols, double sigma_max) {
  return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() *
         sigma_max;
}

Matrix orthonormal_columns(const Matrix& A, double rel_tol) {
  if (A.cols() == 0 || A.rows() == 0) return Matrix(A.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return Matrix(A.rows(), 0);
  const double cut = rel_tol > 0.0 ? rel_tol * s(0) : rank_tolerance(A.rows(), A.cols(), s(0));
  Index rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;
  return svd.matrixU().leftCols(rank);
}

Matrix null_space(const Matrix& A, double rel_floor) {
  const Index n = A.cols();
  if (A.rows() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  Index rank = 0;
  if (s.size() > 0 && s(0) > 0.0) {
    const double cut = std::max(rank_tolerance(A.rows(), A.cols(), s(0)), rel_floor * s(0));
    while (rank < s.size() && s(rank) > cut) ++rank;
  }
  return svd.matrixV().rightCols(n - rank);
}

Vector unit(Index n, Index i) {
  Vector e = Vector::Zero(n);
  e(i) = 1.0;
  return e;
}

IndexList complement(const IndexList& set, Index n) {
  IndexList out;
  std::size_t pos = 0;
  for (Index i = 0; i < n; ++i) {
    if (pos < set.size() && set[pos] == i) {
      ++pos;
      continue;
    }
    out.push_back(i);
  }
  return out;
}

bool is_subset(const IndexList& a, const IndexList& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

IndexList intersect(const IndexList& a, const IndexList& b) {
  IndexList out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace hetsize::linalg
