#include "hetsize/problem.hpp"

#include <cmath>
#include <string>

#include "hetsize/linalg.hpp"

namespace hetsize {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::ZeroRestriction: return "ZeroRestriction";
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::NonpositiveWeight: return "NonpositiveWeight";
    case ErrorCode::BadPartition: return "BadPartition";
    case ErrorCode::BadSimplexPoint: return "BadSimplexPoint";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::PreconditionUnverified: return "PreconditionUnverified";
    case ErrorCode::DecompositionFailure: return "DecompositionFailure";
    case ErrorCode::EquivalenceBreach: return "EquivalenceBreach";
    case ErrorCode::InvarianceBreach: return "InvarianceBreach";
    case ErrorCode::AssumptionViolated: return "AssumptionViolated";
    case ErrorCode::NotControllable: return "NotControllable";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::UnknownFixture: return "UnknownFixture";
  }
  return "Unknown";
}

RowVector TestProblem::restriction_times_inverse_gram() const {
  // (X'X)^{-1} = V S^{-2} V'
  const Vector inv_sq = sv_.array().square().inverse();
  return ((R_ * V_).array() * inv_sq.transpose().array()).matrix() * V_.transpose();
}

TestProblem validate_problem(Matrix X, RowVector R, double r) {
  const Index n = X.rows();
  const Index k = X.cols();
  if (n == 0 || k == 0) throw Error(ErrorCode::DimensionMismatch, "design matrix is empty");
  if (R.size() != k)
    throw Error(ErrorCode::DimensionMismatch, "restriction has length " + std::to_string(R.size()) +
                                                  " but X has " + std::to_string(k) + " columns");
  if (!X.allFinite() || !R.allFinite() || !std::isfinite(r))
    throw Error(ErrorCode::NonFiniteInput, "design, restriction and target must be finite");
  if (k >= n)
    throw Error(ErrorCode::TooFewObservations,
                "need k < n, got k = " + std::to_string(k) + ", n = " + std::to_string(n));
  if ((R.array() == 0.0).all()) throw Error(ErrorCode::ZeroRestriction, "R must be nonzero");

  Eigen::JacobiSVD<Matrix> svd(X, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double cut = linalg::rank_tolerance(n, k, s(0));
  Index rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;
  if (rank < k)
    throw Error(ErrorCode::RankDeficient,
                "rank(X) = " + std::to_string(rank) + " < k = " + std::to_string(k));

  TestProblem p;
  p.X_ = std::move(X);
  p.R_ = std::move(R);
  p.r_ = r;
  p.U_ = svd.matrixU().leftCols(k);
  p.U_perp_ = svd.matrixU().rightCols(n - k);
  p.sv_ = s;
  p.V_ = svd.matrixV();
  return p;
}

HatDiagnostics hat_diagnostics(const TestProblem& problem) {
  HatDiagnostics out;
  out.h = problem.span_basis().rowwise().squaredNorm();
  for (Index i = 0; i < problem.n(); ++i) {
    if (1.0 - out.h(i) <= tol::span) out.in_span.push_back(i);
  }
  return out;
}

double residual_norm_of_unit(const TestProblem& problem, Index i) {
  const Matrix& U = problem.span_basis();
  Vector e = linalg::unit(problem.n(), i);
  return (e - U * U.row(i).transpose()).norm();
}

Vector residual(const TestProblem& problem, const Eigen::Ref<const Vector>& y) {
  if (y.size() != problem.n())
    throw Error(ErrorCode::DimensionMismatch, "y has length " + std::to_string(y.size()));
  using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  const Matrix& U = problem.span_basis();
  const Matrix& V = problem.right_vectors();
  const Vector s = problem.singular_values().head(problem.k());
  const auto X = problem.X().cast<long double>();
  const VecL yl = y.cast<long double>();

  // least squares coefficients, refined once against the extended residual
  VecL beta = (V * (U.transpose() * y).cwiseQuotient(s)).cast<long double>();
  VecL u = yl - X * beta;
  beta += (V * (U.transpose() * u.cast<double>()).cwiseQuotient(s)).cast<long double>();
  u = yl - X * beta;
  return u.cast<double>();
}

const char* to_string(WeightScheme::Kind kind) {
  switch (kind) {
    case WeightScheme::Kind::HC0: return "hc0";
    case WeightScheme::Kind::HC1: return "hc1";
    case WeightScheme::Kind::HC2: return "hc2";
    case WeightScheme::Kind::HC3: return "hc3";
    case WeightScheme::Kind::HC4: return "hc4";
    case WeightScheme::Kind::Custom: return "custom";
  }
  return "?";
}

ResolvedWeights resolve_weights(const WeightScheme& scheme, const TestProblem& problem) {
  using Kind = WeightScheme::Kind;
  const Index n = problem.n();
  const double k = static_cast<double>(problem.k());
  ResolvedWeights out;

  if (scheme.kind == Kind::Custom) {
    if (!scheme.custom_d || scheme.custom_d->size() != n)
      throw Error(ErrorCode::DimensionMismatch, "custom weights need length n = " + std::to_string(n));
    const Vector& d = *scheme.custom_d;
    for (Index i = 0; i < n; ++i) {
      if (!(d(i) > 0.0) || !std::isfinite(d(i)))
        throw Error(ErrorCode::NonpositiveWeight,
                    "custom weight d_" + std::to_string(i + 1) + " must be positive and finite");
    }
    out.d = d;
    return out;
  }

  const HatDiagnostics hat = hat_diagnostics(problem);
  out.d = Vector::Ones(n);
  for (Index i = 0; i < n; ++i) {
    const double h = hat.h(i);
    const double one_minus_h = 1.0 - h;
    if (scheme.kind != Kind::HC0 && scheme.kind != Kind::HC1 && one_minus_h <= tol::span) {
      out.unit_leverage.push_back(i);
      continue;
    }
    switch (scheme.kind) {
      case Kind::HC0: break;
      case Kind::HC1: out.d(i) = static_cast<double>(n) / (static_cast<double>(n) - k); break;
      case Kind::HC2: out.d(i) = 1.0 / one_minus_h; break;
      case Kind::HC3: out.d(i) = 1.0 / (one_minus_h * one_minus_h); break;
      case Kind::HC4: {
        const double delta = std::min(4.0, static_cast<double>(n) * h / k);
        out.d(i) = std::pow(one_minus_h, -delta);
        break;
      }
      case Kind::Custom: break;
    }
  }
  return out;
}

}  // namespace hetsize
