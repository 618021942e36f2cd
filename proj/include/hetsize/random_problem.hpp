#pragma once

#include <random>

#include "hetsize/conditions.hpp"
#include "hetsize/problem.hpp"

namespace hetsize {

struct RandomProblemOptions {
  Index min_n = 3;
  Index max_n = 25;
  double dummy_share = 0.4;      // probability a column is a group dummy
  double unit_column_rate = 0.3; // probability of injecting leverage-one columns
  double integer_r_rate = 0.8;   // R entries from {-1, 0, 1}
  double zero_rhs_rate = 0.5;
};

/// Random full-rank design with mixed continuous, dummy and +-1 columns,
/// optionally with e_i columns (leverage-one rows) and zero rows.
TestProblem random_problem(std::mt19937_64& rng, const RandomProblemOptions& opt = {});

/// Only problems satisfying the regressor assumption.
TestProblem random_assumption_problem(std::mt19937_64& rng, const RandomProblemOptions& opt = {});

/// (XA, RA) for a random well-conditioned invertible A.
TestProblem reparametrize(const TestProblem& p, std::mt19937_64& rng);

/// Random consecutive partition of n observations.
HetModel random_partition(std::mt19937_64& rng, Index n);

}  // namespace hetsize
