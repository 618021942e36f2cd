#include "catch_amalgamated.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "hetsize/fixtures.hpp"
#include "hetsize/random_problem.hpp"
#include "oracles.hpp"

using namespace hetsize;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::ParseError;
}

Matrix a1_design() { return find_fixture("A1").X; }

}  // namespace

TEST_CASE("validate_problem rejects malformed input") {
  const Matrix X = a1_design();
  CHECK(code_of([&] { validate_problem(Matrix(0, 0), RowVector(0), 0.0); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([&] { validate_problem(X, RowVector::Ones(3), 0.0); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([&] { validate_problem(X, RowVector::Zero(2), 0.0); }) == ErrorCode::ZeroRestriction);
  CHECK(code_of([&] { validate_problem(Matrix::Ones(2, 2), RowVector::Ones(2), 0.0); }) ==
        ErrorCode::TooFewObservations);

  Matrix bad = X;
  bad(2, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK(code_of([&] { validate_problem(bad, RowVector::Ones(2), 0.0); }) == ErrorCode::NonFiniteInput);
  CHECK(code_of([&] { validate_problem(X, RowVector::Ones(2), INFINITY); }) == ErrorCode::NonFiniteInput);

  Matrix dup(4, 2);
  dup.col(0) = X.col(0);
  dup.col(1) = 3.0 * X.col(0);
  CHECK(code_of([&] { validate_problem(dup, RowVector::Ones(2), 0.0); }) == ErrorCode::RankDeficient);
}

TEST_CASE("error messages carry the code name") {
  try {
    validate_problem(a1_design(), RowVector::Zero(2), 0.0);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("ZeroRestriction", 0) == 0);
  }
}

TEST_CASE("hat diagnostics on the A designs") {
  const auto a1 = hat_diagnostics(find_fixture("A1").problem());
  for (Index i = 0; i < 4; ++i) CHECK_THAT(a1.h(i), WithinAbs(0.5, 1e-14));
  CHECK(a1.in_span.empty());

  const auto p2 = find_fixture("A2", 0).problem();
  const auto a2 = hat_diagnostics(p2);
  CHECK_THAT(a2.h(4), WithinAbs(1.0, 1e-14));
  CHECK(a2.in_span == IndexList{4});
  CHECK(residual_norm_of_unit(p2, 4) < 1e-12);
  CHECK_THAT(residual_norm_of_unit(p2, 0), WithinAbs(std::sqrt(0.5), 1e-14));
}

TEST_CASE("leverages match the normal-equation oracle on random designs") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const TestProblem p = random_problem(rng);
    const auto hat = hat_diagnostics(p);
    const Vector h = oracle::leverages(p.X());
    CHECK((hat.h - h).cwiseAbs().maxCoeff() < 1e-9);
    CHECK_THAT(hat.h.sum(), WithinAbs(static_cast<double>(p.k()), 1e-9));
    CHECK(hat.h.minCoeff() >= -1e-12);
    CHECK(hat.h.maxCoeff() <= 1.0 + 1e-12);
    for (Index i = 0; i < p.n(); ++i) {
      const bool listed = std::binary_search(hat.in_span.begin(), hat.in_span.end(), i);
      CHECK(listed == oracle::unit_in_span(p.X(), i));
      CHECK(listed == (residual_norm_of_unit(p, i) < 1e-7));
    }
    const RowVector w = p.R() * oracle::inverse_gram(p.X());
    CHECK((p.restriction_times_inverse_gram() - w).cwiseAbs().maxCoeff() < 1e-8 * (1.0 + w.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("residual annihilates span(X)") {
  const TestProblem p = find_fixture("A1").problem();
  const Vector e1 = Vector::Unit(4, 0);
  const Vector u = residual(p, e1);
  CHECK_THAT(u(0), WithinAbs(0.5, 1e-14));
  CHECK_THAT(u(2), WithinAbs(-0.5, 1e-14));
  CHECK(std::abs(u(1)) < 1e-14);
  CHECK(residual(p, p.X().col(1)).norm() < 1e-13);
}

TEST_CASE("HC weights match their closed forms") {
  using Kind = WeightScheme::Kind;
  const std::pair<Kind, oracle::Hc> kinds[] = {{Kind::HC0, oracle::Hc::HC0},
                                                {Kind::HC1, oracle::Hc::HC1},
                                                {Kind::HC2, oracle::Hc::HC2},
                                                {Kind::HC3, oracle::Hc::HC3},
                                                {Kind::HC4, oracle::Hc::HC4}};
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const TestProblem p = random_problem(rng);
    for (const auto& [kind, ok] : kinds) {
      const Vector d = resolve_weights(WeightScheme::hc(kind), p).d;
      const Vector ref = oracle::hc_weights(p.X(), ok);
      CHECK((d - ref).cwiseAbs().maxCoeff() <= 1e-6 * ref.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("HC weights on A1 and leverage-one rows") {
  using Kind = WeightScheme::Kind;
  const TestProblem a1 = find_fixture("A1").problem();
  CHECK_THAT(resolve_weights(WeightScheme::hc(Kind::HC1), a1).d(0), WithinRel(2.0, 1e-14));
  CHECK_THAT(resolve_weights(WeightScheme::hc(Kind::HC2), a1).d(0), WithinRel(2.0, 1e-14));
  CHECK_THAT(resolve_weights(WeightScheme::hc(Kind::HC3), a1).d(0), WithinRel(4.0, 1e-14));
  // delta = min(4, 4 * 0.5 / 2) = 1
  CHECK_THAT(resolve_weights(WeightScheme::hc(Kind::HC4), a1).d(0), WithinRel(2.0, 1e-14));

  const TestProblem a2 = find_fixture("A2", 1).problem();
  const ResolvedWeights w = resolve_weights(WeightScheme::hc(Kind::HC3), a2);
  CHECK(w.unit_leverage == IndexList{4});
  CHECK(w.d(4) == 1.0);
  CHECK(std::isfinite(w.d.sum()));
}

TEST_CASE("custom weights are validated") {
  const TestProblem p = find_fixture("A1").problem();
  CHECK(code_of([&] { resolve_weights(WeightScheme::custom(Vector::Ones(3)), p); }) ==
        ErrorCode::DimensionMismatch);
  Vector d = Vector::Ones(4);
  d(2) = 0.0;
  CHECK(code_of([&] { resolve_weights(WeightScheme::custom(d), p); }) == ErrorCode::NonpositiveWeight);
  d(2) = 3.0;
  CHECK(resolve_weights(WeightScheme::custom(d), p).d == d);
}

TEST_CASE("weight scheme names") {
  CHECK(std::string(to_string(WeightScheme::Kind::HC3)) == "hc3");
  CHECK(std::string(to_string(WeightScheme::Kind::Custom)) == "custom");
}
