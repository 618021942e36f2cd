#include "hetsize/random_problem.hpp"

#include <algorithm>


namespace hetsize {

namespace {

Index uniform_index(std::mt19937_64& rng, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

Vector random_column(std::mt19937_64& rng, Index n, const RandomProblemOptions& opt) {
  std::normal_distribution<double> normal;
  Vector c(n);
  const double u = std::uniform_real_distribution<double>()(rng);
  if (u < opt.dummy_share) {
    // group dummy on a random consecutive or scattered set
    c.setZero();
    const Index size = uniform_index(rng, 1, std::max<Index>(1, n / 2));
    if (coin(rng, 0.5)) {
      const Index start = uniform_index(rng, 0, n - size);
      c.segment(start, size).setOnes();
    } else {
      for (Index t = 0; t < size; ++t) c(uniform_index(rng, 0, n - 1)) = 1.0;
    }
  } else if (u < opt.dummy_share + 0.15) {
    for (Index i = 0; i < n; ++i) c(i) = (i % 2 == 0) ? 1.0 : -1.0;
    if (coin(rng, 0.5)) c(uniform_index(rng, 0, n - 1)) = 0.0;
  } else if (u < opt.dummy_share + 0.25) {
    c.setOnes();
  } else {
    for (Index i = 0; i < n; ++i) c(i) = normal(rng);
  }
  return c;
}

RowVector random_restriction(std::mt19937_64& rng, Index k, const RandomProblemOptions& opt) {
  std::normal_distribution<double> normal;
  RowVector R(k);
  do {
    for (Index j = 0; j < k; ++j)
      R(j) = coin(rng, opt.integer_r_rate) ? static_cast<double>(uniform_index(rng, -1, 1)) : normal(rng);
  } while (R.cwiseAbs().maxCoeff() == 0.0);
  return R;
}

}  // namespace

TestProblem random_problem(std::mt19937_64& rng, const RandomProblemOptions& opt) {
  std::normal_distribution<double> normal;
  for (;;) {
    const Index n = uniform_index(rng, opt.min_n, opt.max_n);
    const Index k_cap = coin(rng, 0.85) ? std::min<Index>(n - 1, 6) : n - 1;
    const Index k = uniform_index(rng, 1, k_cap);

    Matrix X(n, k);
    Index next = 0;
    if (k >= 2 && coin(rng, opt.unit_column_rate)) {
      const Index units = uniform_index(rng, 1, std::min<Index>(k - 1, 3));
      for (Index t = 0; t < units; ++t) X.col(next++) = Vector::Unit(n, uniform_index(rng, 0, n - 1));
    }
    for (; next < k; ++next) X.col(next) = random_column(rng, n, opt);

    // zero rows make v_i = 0
    if (coin(rng, 0.2)) X.row(uniform_index(rng, 0, n - 1)).setZero();

    if (coin(rng, 0.5)) {
      Eigen::PermutationMatrix<Eigen::Dynamic> perm(k);
      perm.setIdentity();
      std::shuffle(perm.indices().data(), perm.indices().data() + k, rng);
      X = X * perm;
    }

    const RowVector R = random_restriction(rng, k, opt);
    const double r = coin(rng, opt.zero_rhs_rate) ? 0.0 : normal(rng);
    try {
      return validate_problem(X, R, r);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::RankDeficient) throw;
    }
  }
}

TestProblem random_assumption_problem(std::mt19937_64& rng, const RandomProblemOptions& opt) {
  for (;;) {
    TestProblem p = random_problem(rng, opt);
    if (check_assumption(p, hat_diagnostics(p))) return p;
  }
}

TestProblem reparametrize(const TestProblem& p, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> spread(0.5, 2.0);
  const Index k = p.k();
  auto orthogonal = [&] {
    Matrix G(k, k);
    for (Index i = 0; i < k; ++i)
      for (Index j = 0; j < k; ++j) G(i, j) = normal(rng);
    return Matrix(G.householderQr().householderQ());
  };
  Vector s(k);
  for (Index i = 0; i < k; ++i) s(i) = spread(rng);
  const Matrix A = orthogonal() * s.asDiagonal() * orthogonal();
  return validate_problem(p.X() * A, p.R() * A, p.r());
}

HetModel random_partition(std::mt19937_64& rng, Index n) {
  std::vector<Index> sizes;
  const double style = std::uniform_real_distribution<double>()(rng);
  if (style < 0.15) return HetModel::het(n);
  if (style < 0.25) return HetModel::from_sizes({n}, n);
  Index left = n;
  while (left > 0) {
    const Index s = uniform_index(rng, 1, std::max<Index>(1, std::min<Index>(left, n / 2)));
    sizes.push_back(s);
    left -= s;
  }
  return HetModel::from_sizes(sizes, n);
}

}  // namespace hetsize
