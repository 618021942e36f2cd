#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hetsize/conditions.hpp"
#include "hetsize/problem.hpp"

namespace hetsize {

/// Diagnostics documented for a fixture design. Index lists are 0-based.
struct FixtureExpectation {
  IndexList i_sharp;
  IndexList i1_m0lin;
  IndexList in_span;
  Index dim_b = 0;
  IndexList b_members;      // e_i listed as lying in B
  IndexList b_non_members;  // e_i listed as lying outside B
  bool assumption_ok = true;
  bool cond_uncorr = true;
  bool cond_het = true;
  IndexList het_witnesses;
  IndexList uncorr_witnesses;
  Controllability controllable = Controllability::Controllable;
};

struct Fixture {
  std::string design;   // "A1", "A2", ...
  std::string variant;  // "" or "r3=0" / "r3=1"
  std::string description;
  Matrix X;
  RowVector R;
  double r = 0.0;
  std::vector<Index> partition;  // empty: all-ones
  FixtureExpectation expected;

  std::string key() const { return variant.empty() ? design : design + ":" + variant; }
  TestProblem problem() const { return validate_problem(X, R, r); }
  HetModel model() const;
};

/// Every fixture, both r3 regimes included.
const std::vector<Fixture>& fixtures();

/// Distinct design names, in corpus order.
std::vector<std::string> fixture_designs();

/// Lookup by design name (case-insensitive). r3 selects the variant for
/// designs that have one and defaults to 1. Throws UnknownFixture.
const Fixture& find_fixture(const std::string& design, std::optional<int> r3 = std::nullopt);

}  // namespace hetsize
