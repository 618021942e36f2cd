#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "hetsize/error.hpp"

namespace hetsize {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

// Sorted, 0-based observation indices. Reports render them 1-based.
using IndexList = std::vector<Index>;

// Numerical thresholds. Every verdict-bearing comparison uses one of these.
namespace tol {
// e_i is in span(X) when 1 - h_i <= span.
inline constexpr double span = 1e-10;
// v_i counts as zero when |v_i| <= zero * max_j |v_j|.
inline constexpr double zero = 1e-9;
// Relative projection residual for subspace membership.
inline constexpr double member = 1e-9;
// Omega <= omega * max(d) ||v||^2 ||y||^2 takes the T = 0 branch.
inline constexpr double omega = 1e-20;
}  // namespace tol

/// A validated testing problem for the single restriction R beta = r in
/// Y = X beta + U. Construct through validate_problem(); the object is
/// immutable and carries the thin SVD of X used by every downstream module.
class TestProblem {
 public:
  const Matrix& X() const { return X_; }
  const RowVector& R() const { return R_; }
  double r() const { return r_; }
  Index n() const { return X_.rows(); }
  Index k() const { return X_.cols(); }

  /// Orthonormal basis of span(X) (left singular vectors), n x k.
  const Matrix& span_basis() const { return U_; }
  /// Orthonormal basis of span(X)^perp, n x (n - k).
  const Matrix& complement_basis() const { return U_perp_; }
  const Vector& singular_values() const { return sv_; }
  /// Right singular vectors, k x k.
  const Matrix& right_vectors() const { return V_; }

  /// R (X'X)^{-1}, as a row of length k.
  RowVector restriction_times_inverse_gram() const;

 private:
  friend TestProblem validate_problem(Matrix X, RowVector R, double r);
  TestProblem() = default;

  Matrix X_;
  RowVector R_;
  double r_ = 0.0;
  Matrix U_;
  Matrix U_perp_;
  Vector sv_;
  Matrix V_;
};

/// Checks dimensions, finiteness, 1 <= k < n, rank(X) = k and R != 0.
/// Rank uses the threshold max(n, k) * eps * sigma_max.
TestProblem validate_problem(Matrix X, RowVector R, double r);

/// Leverages and the indices whose standard basis vector lies in span(X).
struct HatDiagnostics {
  Vector h;
  IndexList in_span;
};

HatDiagnostics hat_diagnostics(const TestProblem& problem);

/// ||(I - H) e_i||, the second route to span membership of e_i.
double residual_norm_of_unit(const TestProblem& problem, Index i);

/// (I - H) y.
Vector residual(const TestProblem& problem, const Eigen::Ref<const Vector>& y);

/// Weights d_i entering Omega_Het.
struct WeightScheme {
  enum class Kind { HC0, HC1, HC2, HC3, HC4, Custom };

  Kind kind = Kind::HC0;
  std::optional<Vector> custom_d;

  static WeightScheme hc(Kind kind) { return WeightScheme{kind, std::nullopt}; }
  static WeightScheme custom(Vector d) { return WeightScheme{Kind::Custom, std::move(d)}; }
};

const char* to_string(WeightScheme::Kind kind);

struct ResolvedWeights {
  Vector d;
  // Leverage-one observations whose weight was set to 1. Their residual is
  // identically zero, so the value never reaches Omega.
  IndexList unit_leverage;
};

ResolvedWeights resolve_weights(const WeightScheme& scheme, const TestProblem& problem);

}  // namespace hetsize
