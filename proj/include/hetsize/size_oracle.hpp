#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hetsize/conditions.hpp"
#include "hetsize/statistic.hpp"

namespace hetsize {

struct McConfig {
  Index n_samples = 100000;
  int n_restarts = 4;  // random Dirichlet starts on top of the structured ones
  std::uint64_t seed = 42;
  int max_optimizer_iterations = 150;
  double concentration_eps = 1e-6;  // mass left off the block of a near-vertex start
  double eps_alpha = 1e-6;          // alpha* is evaluated at C* (1 + eps_alpha)
  int threads = 0;                  // 0: HETSIZE_THREADS or hardware concurrency

  /// Throws BadConfig.
  void validate() const;
};

/// Worker count for a config: explicit, else HETSIZE_THREADS, else hardware.
int resolve_threads(const McConfig& mc);

struct ProbabilityEstimate {
  double value = 0.0;
  double std_error = 0.0;
  Index n_samples = 0;
};

struct RestartTrace {
  std::string start;  // "barycenter", "vertex:<j>", "dirichlet:<i>"
  double value = 0.0;
  int evaluations = 0;
};

/// Monte Carlo lower bound on sup over the model of P(T >= C).
struct SizeEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double critical_value = 0.0;
  Vector block_mass;  // argmax on the m-simplex
  Vector tau_sq;      // the same point per observation
  Index n_samples = 0;
  int n_restarts = 0;
  std::vector<RestartTrace> trace;
};

/// Common-random-numbers rejection-frequency evaluator. One standard normal
/// batch z is drawn from the seed; P(T(mu0 + diag(tau) z) >= C) is then a
/// deterministic function of (tau, C). sigma is fixed to 1: T is invariant
/// under y -> delta (y - mu0) + mu0, so the scale drops out exactly.
class SizeOracle {
 public:
  SizeOracle(const StatContext& ctx, HetModel model, McConfig mc);
  ~SizeOracle();
  SizeOracle(SizeOracle&&) noexcept;
  SizeOracle& operator=(SizeOracle&&) noexcept;

  const HetModel& model() const { return model_; }
  const McConfig& config() const { return mc_; }

  /// Throws BadSimplexPoint unless block_mass has m positive entries summing
  /// to 1 within 1e-10.
  ProbabilityEstimate rejection_probability(const Vector& block_mass, double C) const;

  /// Multistart Nelder-Mead over a softmax parametrization of the simplex,
  /// from the barycenter, one near-vertex start per block and n_restarts
  /// Dirichlet draws. Restarts run concurrently; results do not depend on
  /// the thread count.
  SizeEstimate worst_case_size(double C) const;

 private:
  class Engine;
  HetModel model_;
  McConfig mc_;
  std::unique_ptr<Engine> engine_;
};

ProbabilityEstimate rejection_probability(const StatContext& ctx, const HetModel& model,
                                          const Vector& block_mass, double C, const McConfig& mc);

SizeEstimate worst_case_size(const StatContext& ctx, const HetModel& model, double C,
                             const McConfig& mc);

struct AlphaStar {
  double value = 0.0;
  double std_error = 0.0;
  double c_star = 0.0;
  double c_evaluated = 0.0;
  double eps_alpha = 0.0;
  SizeEstimate estimate;
};

/// Worst-case size just above C* under C_Het: evaluated at C* (1 + eps_alpha),
/// or at eps_alpha when C* = 0.
AlphaStar alpha_star(const StatContext& ctx, const McConfig& mc);

}  // namespace hetsize
