#include "hetsize/size_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <thread>

namespace hetsize {

namespace {

constexpr Index kChunk = 2048;
constexpr double kSoftmaxClamp = 200.0;
constexpr double kInitialStep = 1.0;
constexpr double kXtol = 1e-3;

double binomial_se(double p, Index n) { return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n)); }

// Softmax of (theta, 0): the last block is the reference coordinate.
Vector softmax_mass(const Vector& theta) {
  const Index m = theta.size() + 1;
  Vector z(m);
  z.head(m - 1) = theta.cwiseMax(-kSoftmaxClamp).cwiseMin(kSoftmaxClamp);
  z(m - 1) = 0.0;
  z.array() -= z.maxCoeff();
  z = z.array().exp();
  return z / z.sum();
}

Vector logit_of(const Vector& mass) {
  const Index m = mass.size();
  return (mass.head(m - 1).array().log() - std::log(mass(m - 1))).matrix();
}

struct NmResult {
  Vector x;
  double f = 0.0;
  int evaluations = 0;
};

// Nelder-Mead maximization with standard coefficients (1, 2, 1/2, 1/2).
NmResult nelder_mead_max(const std::function<double(const Vector&)>& f, const Vector& x0,
                         int max_iter) {
  const Index dim = x0.size();
  std::vector<Vector> pts(static_cast<std::size_t>(dim + 1), x0);
  std::vector<double> vals(pts.size());
  int evals = 0;
  auto eval = [&](const Vector& x) {
    ++evals;
    return f(x);
  };
  for (Index j = 0; j < dim; ++j) pts[static_cast<std::size_t>(j + 1)](j) += kInitialStep;
  for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = eval(pts[i]);

  std::vector<std::size_t> order(pts.size());
  for (int iter = 0; iter < max_iter; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[order.size() - 2];

    double diameter = 0.0;
    for (const Vector& p : pts) diameter = std::max(diameter, (p - pts[best]).cwiseAbs().maxCoeff());
    if (diameter <= kXtol) break;

    Vector centroid = Vector::Zero(dim);
    for (std::size_t i = 0; i + 1 < order.size(); ++i) centroid += pts[order[i]];
    centroid /= static_cast<double>(dim);

    const Vector xr = centroid + (centroid - pts[worst]);
    const double fr = eval(xr);
    if (fr > vals[best]) {
      const Vector xe = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = eval(xe);
      if (fe > fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr > vals[second_worst]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    bool accepted = false;
    if (fr > vals[worst]) {
      const Vector xc = centroid + 0.5 * (xr - centroid);
      const double fc = eval(xc);
      if (fc >= fr) {
        pts[worst] = xc;
        vals[worst] = fc;
        accepted = true;
      }
    } else {
      const Vector xc = centroid + 0.5 * (pts[worst] - centroid);
      const double fc = eval(xc);
      if (fc > vals[worst]) {
        pts[worst] = xc;
        vals[worst] = fc;
        accepted = true;
      }
    }
    if (!accepted) {
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i == best) continue;
        pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
        vals[i] = eval(pts[i]);
      }
    }
  }
  const auto it = std::max_element(vals.begin(), vals.end());
  const std::size_t b = static_cast<std::size_t>(it - vals.begin());
  return {pts[b], vals[b], evals};
}

void check_simplex_point(const Vector& mass, Index m) {
  if (mass.size() != m)
    throw Error(ErrorCode::BadSimplexPoint, "simplex point needs " + std::to_string(m) + " entries");
  if (!mass.allFinite() || (mass.array() <= 0.0).any())
    throw Error(ErrorCode::BadSimplexPoint, "simplex entries must be positive");
  if (std::abs(mass.sum() - 1.0) > 1e-10)
    throw Error(ErrorCode::BadSimplexPoint, "simplex entries must sum to 1");
}

}  // namespace

void McConfig::validate() const {
  if (n_samples < 1000) throw Error(ErrorCode::BadConfig, "n_samples must be at least 1000");
  if (n_restarts < 0) throw Error(ErrorCode::BadConfig, "n_restarts must be nonnegative");
  if (max_optimizer_iterations < 1) throw Error(ErrorCode::BadConfig, "max_optimizer_iterations must be positive");
  if (!(concentration_eps > 0.0 && concentration_eps < 1.0))
    throw Error(ErrorCode::BadConfig, "concentration_eps must lie in (0, 1)");
  if (!(eps_alpha > 0.0)) throw Error(ErrorCode::BadConfig, "eps_alpha must be positive");
  if (threads < 0) throw Error(ErrorCode::BadConfig, "threads must be nonnegative");
}

int resolve_threads(const McConfig& mc) {
  if (mc.threads > 0) return mc.threads;
  if (const char* env = std::getenv("HETSIZE_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

class SizeOracle::Engine {
 public:
  Engine(const StatContext& ctx, Index n_samples, std::uint64_t seed) : n_samples_(n_samples) {
    const TestProblem& p = ctx.problem();
    const Index n = p.n();
    const Vector& v = ctx.v();
    const Vector& d = ctx.d();
    const Matrix& U = p.span_basis();

    IndexList involved;
    for (Index i = 0; i < n; ++i) {
      if (v(i) != 0.0) involved.push_back(i);
    }
    omega_rows_ = static_cast<Index>(involved.size());
    G_.resize(1 + omega_rows_ + n, n);
    G_.row(0) = v.transpose();
    for (Index r = 0; r < omega_rows_; ++r) {
      const Index i = involved[static_cast<std::size_t>(r)];
      RowVector row = -U.row(i) * U.transpose();
      row(i) += 1.0;
      G_.row(1 + r) = std::sqrt(d(i)) * v(i) * row;
    }
    G_.bottomRows(n).setIdentity();
    offset_ = G_ * ctx.mu0();
    offset_(0) -= p.r();
    scale_factor_ = d.maxCoeff() * v.squaredNorm();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Z_.resize(n, n_samples);
    for (Index j = 0; j < n_samples; ++j)
      for (Index i = 0; i < n; ++i) Z_(i, j) = normal(rng);
  }

  Index n_samples() const { return n_samples_; }

  Index count(const Vector& tau_sq, double C) const {
    const Matrix Gt = G_ * tau_sq.cwiseSqrt().asDiagonal();
    const Index rows = G_.rows();
    Matrix A(rows, std::min(kChunk, n_samples_));
    Index hits = 0;
    for (Index start = 0; start < n_samples_; start += kChunk) {
      const Index cols = std::min(kChunk, n_samples_ - start);
      A.leftCols(cols).noalias() = Gt * Z_.middleCols(start, cols);
      A.leftCols(cols).colwise() += offset_;
      for (Index j = 0; j < cols; ++j) {
        const auto col = A.col(j);
        const double num = col(0) * col(0);
        const double omega = col.segment(1, omega_rows_).squaredNorm();
        const double yy = col.tail(rows - 1 - omega_rows_).squaredNorm();
        if (t_from_parts(num, omega, scale_factor_ * yy) >= C) ++hits;
      }
    }
    return hits;
  }

 private:
  Index n_samples_;
  Index omega_rows_ = 0;
  Matrix G_;  // [v'; sqrt(d_i) v_i (e_i - H e_i)'; I]
  Vector offset_;
  double scale_factor_ = 0.0;
  Matrix Z_;
};

SizeOracle::SizeOracle(const StatContext& ctx, HetModel model, McConfig mc)
    : model_(std::move(model)), mc_(mc) {
  mc_.validate();
  if (model_.n() != ctx.problem().n())
    throw Error(ErrorCode::BadPartition, "partition does not match the number of observations");
  engine_ = std::make_unique<Engine>(ctx, mc_.n_samples, mc_.seed);
}

SizeOracle::~SizeOracle() = default;
SizeOracle::SizeOracle(SizeOracle&&) noexcept = default;
SizeOracle& SizeOracle::operator=(SizeOracle&&) noexcept = default;

ProbabilityEstimate SizeOracle::rejection_probability(const Vector& block_mass, double C) const {
  check_simplex_point(block_mass, model_.blocks());
  const Index hits = engine_->count(model_.expand(block_mass), C);
  ProbabilityEstimate out;
  out.n_samples = engine_->n_samples();
  out.value = static_cast<double>(hits) / static_cast<double>(out.n_samples);
  out.std_error = binomial_se(out.value, out.n_samples);
  return out;
}

SizeEstimate SizeOracle::worst_case_size(double C) const {
  const Index m = model_.blocks();
  const double N = static_cast<double>(engine_->n_samples());

  struct Start {
    std::string label;
    Vector mass;
  };
  std::vector<Start> starts;
  starts.push_back({"barycenter", Vector::Constant(m, 1.0 / static_cast<double>(m))});
  if (m > 1) {
    const double rest = mc_.concentration_eps / static_cast<double>(m - 1);
    for (Index j = 0; j < m; ++j) {
      Vector mass = Vector::Constant(m, rest);
      mass(j) = 1.0 - mc_.concentration_eps;
      starts.push_back({"vertex:" + std::to_string(j + 1), std::move(mass)});
    }
    for (int i = 0; i < mc_.n_restarts; ++i) {
      std::seed_seq seq{static_cast<std::uint32_t>(mc_.seed), static_cast<std::uint32_t>(mc_.seed >> 32),
                        static_cast<std::uint32_t>(i), 0xD1u};
      std::mt19937_64 rng(seq);
      std::gamma_distribution<double> gamma(1.0, 1.0);
      Vector mass(m);
      for (Index j = 0; j < m; ++j) mass(j) = std::max(gamma(rng), 1e-300);
      mass /= mass.sum();
      starts.push_back({"dirichlet:" + std::to_string(i + 1), std::move(mass)});
    }
  }

  auto objective = [&](const Vector& theta) {
    return static_cast<double>(engine_->count(model_.expand(softmax_mass(theta)), C)) / N;
  };

  struct Outcome {
    Vector mass;
    double value = -1.0;
    int evaluations = 0;
  };
  std::vector<Outcome> outcomes(starts.size());
  auto run = [&](std::size_t s) {
    if (m == 1) {
      outcomes[s] = {starts[s].mass, objective(Vector(0)), 1};
      return;
    }
    const NmResult r = nelder_mead_max(objective, logit_of(starts[s].mass), mc_.max_optimizer_iterations);
    outcomes[s] = {softmax_mass(r.x), r.f, r.evaluations};
  };

  const int threads = std::min<int>(resolve_threads(mc_), static_cast<int>(starts.size()));
  if (threads <= 1) {
    for (std::size_t s = 0; s < starts.size(); ++s) run(s);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t s = next++; s < starts.size(); s = next++) {
          try {
            run(s);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  SizeEstimate est;
  est.critical_value = C;
  est.n_samples = engine_->n_samples();
  est.n_restarts = static_cast<int>(starts.size());
  std::size_t best = 0;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    est.trace.push_back({starts[s].label, outcomes[s].value, outcomes[s].evaluations});
    if (outcomes[s].value > outcomes[best].value) best = s;
  }
  est.value = outcomes[best].value;
  est.std_error = binomial_se(est.value, est.n_samples);
  est.block_mass = outcomes[best].mass;
  est.tau_sq = model_.expand(est.block_mass);
  return est;
}

ProbabilityEstimate rejection_probability(const StatContext& ctx, const HetModel& model,
                                          const Vector& block_mass, double C, const McConfig& mc) {
  return SizeOracle(ctx, model, mc).rejection_probability(block_mass, C);
}

SizeEstimate worst_case_size(const StatContext& ctx, const HetModel& model, double C,
                             const McConfig& mc) {
  return SizeOracle(ctx, model, mc).worst_case_size(C);
}

AlphaStar alpha_star(const StatContext& ctx, const McConfig& mc) {
  AlphaStar out;
  out.c_star = c_star(ctx).value;
  out.eps_alpha = mc.eps_alpha;
  out.c_evaluated = out.c_star > 0.0 ? out.c_star * (1.0 + mc.eps_alpha) : mc.eps_alpha;
  out.estimate = worst_case_size(ctx, HetModel::het(ctx.problem().n()), out.c_evaluated, mc);
  out.value = out.estimate.value;
  out.std_error = out.estimate.std_error;
  return out;
}

}  // namespace hetsize
