#pragma once

#include <string>

#include "hetsize/problem.hpp"

namespace hetsize {

/// Orthonormal basis of a linear subspace of R^n.
struct SubspaceBasis {
  Matrix Q;  // n x dim, orthonormal columns
  std::string label;

  Index dim() const { return Q.cols(); }
  Index ambient() const { return Q.rows(); }

  /// ||x - QQ'x|| <= tol::member * ||x||. Every verdict-bearing membership
  /// test goes through here.
  bool contains(const Eigen::Ref<const Vector>& x) const;
  bool contains_unit(Index i) const;
  /// {i : e_i in this space}.
  IndexList unit_members() const;
};

struct IndexSets {
  IndexList i_sharp;  // R (X'X)^{-1} x_i' = 0
  IndexList i0_m0lin, i1_m0lin;
  IndexList i0_lsharp, i1_lsharp;
};

/// Result of the orthogonal split B = span(X) (+) {u_hat(y) : y in B}.
struct Decomposition {
  SubspaceBasis residual_part;
  Index dim_b = 0;
  Index k = 0;
  double max_cross = 0.0;    // max |<span(X) basis, residual basis>|
  double max_outside = 0.0;  // residual-part mass outside the I_# coordinates
};

/// Everything the condition checker and statistic need, computed once.
struct SubspaceAnalysis {
  Vector v;
  HatDiagnostics hat;
  SubspaceBasis span_x;
  SubspaceBasis m0lin;
  SubspaceBasis b;
  SubspaceBasis v_sharp;
  SubspaceBasis l_sharp;
  IndexSets sets;
  Decomposition decomposition;
};

/// v_i = R (X'X)^{-1} x_i', i.e. the entries of X (X'X)^{-1} R'.
Vector compute_v_weights(const TestProblem& problem);

/// {i : |v_i| <= tol::zero * ||v||_inf}.
IndexList sharp_indices(const Vector& v);

/// span(X) from a Householder QR of X.
SubspaceBasis basis_span_x(const TestProblem& problem);

/// X ker(R), dimension k - 1.
SubspaceBasis basis_M0lin(const TestProblem& problem);

/// Null space of the rows e_i'(I - H), i outside I_#.
SubspaceBasis basis_B(const TestProblem& problem, const IndexList& i_sharp);

/// span{e_i : i in I_#, e_i in B}; {0} for an empty generating set.
SubspaceBasis basis_V_sharp(Index n, const IndexList& i_sharp, const SubspaceBasis& b);

/// span(M_0^lin u V_#).
SubspaceBasis basis_L_sharp(const SubspaceBasis& m0lin, const SubspaceBasis& v_sharp);

IndexSets index_sets(const IndexList& i_sharp, const SubspaceBasis& m0lin,
                     const SubspaceBasis& l_sharp);

/// Throws DecompositionFailure when dim(B) != k + dim(residual part) or the
/// parts are not orthogonal.
Decomposition orthogonal_decomposition_check(const TestProblem& problem, const SubspaceBasis& b,
                                             const IndexList& i_sharp);

SubspaceAnalysis analyze(const TestProblem& problem);

}  // namespace hetsize
