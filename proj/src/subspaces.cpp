#include "hetsize/subspaces.hpp"

#include <algorithm>
#include <cmath>

#include "hetsize/linalg.hpp"

namespace hetsize {

namespace {

// Columns with unit scale: drop directions with sigma <= abs_tol.
Matrix orthonormal_unit_scale(const Matrix& A, double abs_tol) {
  if (A.cols() == 0) return Matrix(A.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  Index rank = 0;
  while (rank < s.size() && s(rank) > abs_tol) ++rank;
  return svd.matrixU().leftCols(rank);
}

}  // namespace

bool SubspaceBasis::contains(const Eigen::Ref<const Vector>& x) const {
  const double norm = x.norm();
  if (norm == 0.0) return true;
  if (dim() == 0) return false;
  const Vector resid = x - Q * (Q.transpose() * x);
  return resid.norm() <= tol::member * norm;
}

bool SubspaceBasis::contains_unit(Index i) const {
  if (dim() == 0) return false;
  Vector resid = -Q * Q.row(i).transpose();
  resid(i) += 1.0;
  return resid.norm() <= tol::member;
}

IndexList SubspaceBasis::unit_members() const {
  IndexList out;
  for (Index i = 0; i < ambient(); ++i) {
    if (contains_unit(i)) out.push_back(i);
  }
  return out;
}

Vector compute_v_weights(const TestProblem& problem) {
  const Vector& s = problem.singular_values();
  const Vector coeffs = (problem.right_vectors().transpose() * problem.R().transpose()).cwiseQuotient(s);
  return problem.span_basis() * coeffs;
}

IndexList sharp_indices(const Vector& v) {
  const double scale = v.cwiseAbs().maxCoeff();
  IndexList out;
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) <= tol::zero * scale) out.push_back(i);
  }
  return out;
}

SubspaceBasis basis_span_x(const TestProblem& problem) {
  Eigen::HouseholderQR<Matrix> qr(problem.X());
  Matrix Q = qr.householderQ() * Matrix::Identity(problem.n(), problem.k());
  return {std::move(Q), "span(X)"};
}

SubspaceBasis basis_M0lin(const TestProblem& problem) {
  const Matrix kernel = linalg::null_space(Matrix(problem.R()));
  return {linalg::orthonormal_columns(problem.X() * kernel), "M0lin"};
}

SubspaceBasis basis_B(const TestProblem& problem, const IndexList& i_sharp) {
  const Index n = problem.n();
  const Matrix& U = problem.span_basis();
  const IndexList rows = linalg::complement(i_sharp, n);
  Matrix stacked(static_cast<Index>(rows.size()), n);
  Index used = 0;
  for (Index i : rows) {
    // Rows of leverage-one observations vanish identically.
    if (1.0 - U.row(i).squaredNorm() <= tol::span) continue;
    stacked.row(used) = -U.row(i) * U.transpose();
    stacked(used, i) += 1.0;
    ++used;
  }
  return {linalg::null_space(stacked.topRows(used), tol::span), "B"};
}

SubspaceBasis basis_V_sharp(Index n, const IndexList& i_sharp, const SubspaceBasis& b) {
  IndexList gens;
  for (Index i : i_sharp) {
    if (b.contains_unit(i)) gens.push_back(i);
  }
  Matrix Q = Matrix::Zero(n, static_cast<Index>(gens.size()));
  for (std::size_t c = 0; c < gens.size(); ++c) Q(gens[c], static_cast<Index>(c)) = 1.0;
  return {std::move(Q), "V#"};
}

SubspaceBasis basis_L_sharp(const SubspaceBasis& m0lin, const SubspaceBasis& v_sharp) {
  Matrix joined(m0lin.ambient(), m0lin.dim() + v_sharp.dim());
  joined << m0lin.Q, v_sharp.Q;
  return {orthonormal_unit_scale(joined, tol::member), "L#"};
}

IndexSets index_sets(const IndexList& i_sharp, const SubspaceBasis& m0lin,
                     const SubspaceBasis& l_sharp) {
  const Index n = m0lin.ambient();
  IndexSets s;
  s.i_sharp = i_sharp;
  s.i0_m0lin = m0lin.unit_members();
  s.i1_m0lin = linalg::complement(s.i0_m0lin, n);
  s.i0_lsharp = l_sharp.unit_members();
  s.i1_lsharp = linalg::complement(s.i0_lsharp, n);
  return s;
}

Decomposition orthogonal_decomposition_check(const TestProblem& problem, const SubspaceBasis& b,
                                             const IndexList& i_sharp) {
  const Matrix& U = problem.span_basis();
  const Matrix resid = b.Q - U * (U.transpose() * b.Q);
  Decomposition out;
  out.residual_part = {orthonormal_unit_scale(resid, tol::member), "residual part of B"};
  out.dim_b = b.dim();
  out.k = problem.k();

  const Matrix& P = out.residual_part.Q;
  if (P.cols() > 0) {
    out.max_cross = (U.transpose() * P).cwiseAbs().maxCoeff();
    const IndexList outside = linalg::complement(i_sharp, problem.n());
    for (Index i : outside) out.max_outside = std::max(out.max_outside, P.row(i).cwiseAbs().maxCoeff());
  }

  if (out.dim_b != out.k + P.cols())
    throw Error(ErrorCode::DecompositionFailure,
                "dim(B) = " + std::to_string(out.dim_b) + " but k + dim(residual part) = " +
                    std::to_string(out.k + P.cols()));
  if (out.max_cross > tol::member || out.max_outside > tol::member)
    throw Error(ErrorCode::DecompositionFailure, "residual part of B is not orthogonal to span(X)");
  return out;
}

SubspaceAnalysis analyze(const TestProblem& problem) {
  SubspaceAnalysis a;
  a.v = compute_v_weights(problem);
  a.hat = hat_diagnostics(problem);
  a.span_x = basis_span_x(problem);
  a.m0lin = basis_M0lin(problem);
  const IndexList i_sharp = sharp_indices(a.v);
  a.b = basis_B(problem, i_sharp);
  a.v_sharp = basis_V_sharp(problem.n(), i_sharp, a.b);
  a.l_sharp = basis_L_sharp(a.m0lin, a.v_sharp);
  a.sets = index_sets(i_sharp, a.m0lin, a.l_sharp);
  a.decomposition = orthogonal_decomposition_check(problem, a.b, i_sharp);
  return a;
}

}  // namespace hetsize
