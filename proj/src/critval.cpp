#include "hetsize/critval.hpp"

#include <algorithm>
#include <string>

namespace hetsize {

namespace {

bool controls(const SizeEstimate& est, double alpha) { return est.value + 3.0 * est.std_error <= alpha; }

}  // namespace

std::uint64_t verification_seed(std::uint64_t seed) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CriticalValueResult smallest_critical_value(const StatContext& ctx, const HetModel& model,
                                            double alpha, const McConfig& mc,
                                            const CritvalConfig& cfg) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::BadConfig, "alpha must lie in (0, 1)");
  if (!(cfg.tol_c > 0.0)) throw Error(ErrorCode::BadConfig, "tol_c must be positive");

  const ConditionReport report = decide_size_controllability(ctx.problem(), ctx.analysis(), model);
  if (report.size_controllable == Controllability::NotApplicable)
    throw Error(ErrorCode::AssumptionViolated, "size-control theory does not apply to this problem");
  if (report.size_controllable == Controllability::NotControllable)
    throw Error(ErrorCode::NotControllable, "no finite critical value controls the size");

  const SizeOracle oracle(ctx, model, mc);
  CriticalValueResult res;
  res.alpha = alpha;
  res.model = model;
  double lower = 0.0;
  if (model.is_het()) {
    lower = c_star(ctx).value;
    res.c_star = lower;
  }

  double lo = lower;
  double hi = std::max(1.0, 2.0 * lower);
  SizeEstimate at_hi = oracle.worst_case_size(hi);
  ++res.iterations;
  while (!controls(at_hi, alpha)) {
    lo = hi;
    hi *= 2.0;
    if (hi > cfg.overflow_guard)
      throw Error(ErrorCode::BracketFailure,
                  "no size-controlling critical value below " + std::to_string(cfg.overflow_guard));
    at_hi = oracle.worst_case_size(hi);
    ++res.iterations;
  }

  const double width = cfg.tol_c * std::max(1.0, lower);
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    SizeEstimate est = oracle.worst_case_size(mid);
    ++res.iterations;
    if (controls(est, alpha)) {
      hi = mid;
      at_hi = std::move(est);
    } else {
      lo = mid;
    }
  }

  res.c_diamond = hi;
  res.bracket_low = lo;
  res.bracket_high = hi;
  res.achieved_size = std::move(at_hi);
  return res;
}

SizeControlCheck verify_size_control(const StatContext& ctx, const HetModel& model, double C,
                                     double alpha, const McConfig& mc) {
  McConfig fresh = mc;
  fresh.seed = verification_seed(mc.seed);
  fresh.n_samples = 2 * mc.n_samples;
  SizeControlCheck out;
  out.alpha = alpha;
  out.seed = fresh.seed;
  out.estimate = worst_case_size(ctx, model, C, fresh);
  out.controlled = out.estimate.value <= alpha + 3.0 * out.estimate.std_error;
  return out;
}

}  // namespace hetsize
