#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hetsize/problem.hpp"
#include "hetsize/subspaces.hpp"

namespace hetsize {

/// Everything needed to evaluate T_Het for one problem and weight scheme.
/// Immutable and safe to share across threads.
class StatContext {
 public:
  /// Uses the particular solution beta0 = R'(RR')^{-1} r.
  StatContext(TestProblem problem, const WeightScheme& scheme);
  /// Uses the supplied beta0; throws BadConfig unless R beta0 = r.
  StatContext(TestProblem problem, const WeightScheme& scheme, Vector beta0);

  const TestProblem& problem() const { return problem_; }
  const ResolvedWeights& weights() const { return weights_; }
  const Vector& d() const { return weights_.d; }
  const Vector& beta0() const { return beta0_; }
  const Vector& mu0() const { return mu0_; }
  const Vector& v() const { return analysis_->v; }
  const SubspaceAnalysis& analysis() const { return *analysis_; }
  WeightScheme::Kind scheme() const { return scheme_; }

 private:
  TestProblem problem_;
  WeightScheme::Kind scheme_;
  ResolvedWeights weights_;
  Vector beta0_;
  Vector mu0_;
  std::shared_ptr<const SubspaceAnalysis> analysis_;
};

/// T from its parts: num / omega, or 0 on the degenerate branch
/// omega <= tol::omega * scale_sq. scale_sq = max(d) ||v||^2 ||y||^2.
inline double t_from_parts(double num, double omega, double scale_sq) {
  return omega > tol::omega * scale_sq ? num / omega : 0.0;
}

/// B(y): entries v_i * u_hat_i(y).
RowVector b_map(const StatContext& ctx, const Eigen::Ref<const Vector>& y);
/// sum_i d_i (v_i u_hat_i(y))^2.
double omega_het(const StatContext& ctx, const Eigen::Ref<const Vector>& y);
double t_het(const StatContext& ctx, const Eigen::Ref<const Vector>& y);

struct CStar {
  double value = 0.0;
  Index argmax = -1;
  IndexList searched;
  std::vector<double> values;  // T(mu0 + e_i) for i in searched
};

/// max T(mu0 + e_i) over I_1(M0lin).
CStar c_star(const StatContext& ctx);
/// The same maximum over I_1(L#). Only valid when the uncorrelated
/// condition holds; throws PreconditionUnverified otherwise.
CStar c_star_reduced(const StatContext& ctx);

struct InvarianceReport {
  int trials = 0;
  double max_group_rel = 0.0;  // T(delta (y - mu0) + mu0*) vs T(y)
  double max_shift_rel = 0.0;  // T(y + z), z in L#
  double max_bmap_rel = 0.0;   // B(y + z) vs B(y)
  std::vector<std::string> breaches;

  bool passed() const { return breaches.empty(); }
  void ensure() const;
};

/// Checks G(M0) invariance and invariance under addition of elements of L#
/// on random transforms, at 1e-8 relative.
InvarianceReport invariance_audit(const StatContext& ctx, const Eigen::Ref<const Vector>& y,
                                  int trials, std::uint64_t seed);

}  // namespace hetsize
