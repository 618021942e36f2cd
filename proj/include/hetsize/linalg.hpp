#pragma once

#include <Eigen/Dense>

#include "hetsize/problem.hpp"

namespace hetsize::linalg {

/// Rank-revealing threshold max(rows, cols) * eps * sigma_max.
double rank_tolerance(Index rows, Index cols, double sigma_max);

/// Orthonormal basis of the column space of A. Singular directions with
/// sigma <= rel_tol * sigma_max are dropped; rel_tol <= 0 selects the
/// rank_tolerance() threshold.
Matrix orthonormal_columns(const Matrix& A, double rel_tol = 0.0);

/// Orthonormal basis of {x : A x = 0}, from the right singular vectors of A
/// with sigma <= rank_tolerance(). A with zero rows yields the identity.
// Singular values up to max(rank_tolerance, rel_floor * sigma_max) count as zero.
Matrix null_space(const Matrix& A, double rel_floor = 0.0);

/// Unit vector e_i in R^n.
Vector unit(Index n, Index i);

IndexList complement(const IndexList& set, Index n);
bool is_subset(const IndexList& a, const IndexList& b);
IndexList intersect(const IndexList& a, const IndexList& b);

}  // namespace hetsize::linalg
