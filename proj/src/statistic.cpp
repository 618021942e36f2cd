#include "hetsize/statistic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hetsize/conditions.hpp"
#include "hetsize/linalg.hpp"

namespace hetsize {

namespace {

constexpr double kInvarianceTol = 1e-8;

Vector canonical_beta0(const TestProblem& p) {
  return p.R().transpose() * (p.r() / p.R().squaredNorm());
}

double rel_diff(double a, double b) {
  const double denom = std::max(std::abs(a), std::abs(b));
  return denom == 0.0 ? 0.0 : std::abs(a - b) / denom;
}

}  // namespace

StatContext::StatContext(TestProblem problem, const WeightScheme& scheme)
    : StatContext(problem, scheme, canonical_beta0(problem)) {}

StatContext::StatContext(TestProblem problem, const WeightScheme& scheme, Vector beta0)
    : problem_(std::move(problem)), scheme_(scheme.kind), weights_(resolve_weights(scheme, problem_)) {
  if (beta0.size() != problem_.k())
    throw Error(ErrorCode::DimensionMismatch, "beta0 must have length k");
  const double lhs = problem_.R().dot(beta0);
  const double scale = std::max(1.0, problem_.R().cwiseAbs().dot(beta0.cwiseAbs()));
  if (std::abs(lhs - problem_.r()) > 1e-10 * scale)
    throw Error(ErrorCode::BadConfig, "beta0 does not satisfy R beta0 = r");
  beta0_ = std::move(beta0);
  mu0_ = problem_.X() * beta0_;
  analysis_ = std::make_shared<const SubspaceAnalysis>(analyze(problem_));
}

RowVector b_map(const StatContext& ctx, const Eigen::Ref<const Vector>& y) {
  return ctx.v().cwiseProduct(residual(ctx.problem(), y)).transpose();
}

double omega_het(const StatContext& ctx, const Eigen::Ref<const Vector>& y) {
  const RowVector b = b_map(ctx, y);
  return b.cwiseAbs2().dot(ctx.d().transpose());
}

double t_het(const StatContext& ctx, const Eigen::Ref<const Vector>& y) {
  const Vector u = residual(ctx.problem(), y);
  const Vector& v = ctx.v();
  const double omega = (v.cwiseProduct(u)).cwiseAbs2().dot(ctx.d());
  const double num = std::pow(v.dot(y) - ctx.problem().r(), 2);
  const double scale_sq = ctx.d().maxCoeff() * v.squaredNorm() * y.squaredNorm();
  return t_from_parts(num, omega, scale_sq);
}

namespace {

CStar max_over_units(const StatContext& ctx, const IndexList& indices) {
  CStar out;
  out.searched = indices;
  const Index n = ctx.problem().n();
  for (Index i : indices) {
    const double t = t_het(ctx, ctx.mu0() + linalg::unit(n, i));
    out.values.push_back(t);
    if (out.argmax < 0 || t > out.value) {
      out.value = t;
      out.argmax = i;
    }
  }
  return out;
}

}  // namespace

CStar c_star(const StatContext& ctx) { return max_over_units(ctx, ctx.analysis().sets.i1_m0lin); }

CStar c_star_reduced(const StatContext& ctx) {
  if (!check_condition_uncorr(ctx.analysis()).holds)
    throw Error(ErrorCode::PreconditionUnverified,
                "reduced C* form requires e_i not in span(X) for all i in I_1(M0lin)");
  return max_over_units(ctx, ctx.analysis().sets.i1_lsharp);
}

void InvarianceReport::ensure() const {
  if (!passed()) throw Error(ErrorCode::InvarianceBreach, breaches.front());
}

InvarianceReport invariance_audit(const StatContext& ctx, const Eigen::Ref<const Vector>& y,
                                  int trials, std::uint64_t seed) {
  const TestProblem& p = ctx.problem();
  const Matrix kernel = linalg::null_space(Matrix(p.R()));
  const Matrix& lq = ctx.analysis().l_sharp.Q;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> log_mag(std::log(0.1), std::log(10.0));

  InvarianceReport rep;
  rep.trials = trials;
  const double t0 = t_het(ctx, y);
  const RowVector b0 = b_map(ctx, y);
  const double y_norm = std::max(y.norm(), 1.0);

  for (int t = 0; t < trials; ++t) {
    double delta = std::exp(log_mag(rng));
    if (normal(rng) < 0.0) delta = -delta;
    Vector g(kernel.cols());
    for (Index j = 0; j < g.size(); ++j) g(j) = normal(rng);
    const Vector mu_star = p.X() * (ctx.beta0() + kernel * g);
    const double tg = t_het(ctx, delta * (y - ctx.mu0()) + mu_star);
    const double dg = rel_diff(t0, tg);
    rep.max_group_rel = std::max(rep.max_group_rel, dg);
    if (dg > kInvarianceTol) {
      std::ostringstream os;
      os << "G(M0) transform delta=" << delta << " changed T from " << t0 << " to " << tg;
      rep.breaches.push_back(os.str());
    }

    if (lq.cols() == 0) continue;
    Vector c(lq.cols());
    for (Index j = 0; j < c.size(); ++j) c(j) = normal(rng);
    const Vector z = lq * c * (y_norm / c.norm());
    const Vector shifted = y + z;
    const double ts = t_het(ctx, shifted);
    const double ds = rel_diff(t0, ts);
    rep.max_shift_rel = std::max(rep.max_shift_rel, ds);
    if (ds > kInvarianceTol) {
      std::ostringstream os;
      os << "L# shift changed T from " << t0 << " to " << ts;
      rep.breaches.push_back(os.str());
    }
    const RowVector bs = b_map(ctx, shifted);
    const double floor = 1e-12 * ctx.v().norm() * (y_norm + z.norm());
    const double db = (bs - b0).norm() / std::max({b0.norm(), bs.norm(), floor});
    rep.max_bmap_rel = std::max(rep.max_bmap_rel, db);
    if (db > kInvarianceTol) rep.breaches.push_back("L# shift changed B(y)");
  }
  return rep;
}

}  // namespace hetsize
