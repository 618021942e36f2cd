#pragma once

#include <cstdint>
#include <optional>

#include "hetsize/size_oracle.hpp"

namespace hetsize {

struct CritvalConfig {
  double tol_c = 1e-3;  // bracket width relative to max(1, C*)
  double overflow_guard = 1e12;
};

struct CriticalValueResult {
  double c_diamond = 0.0;
  double alpha = 0.0;
  // C* bounds the bracket from below for C_Het only; coarser partitions
  // start from 0.
  std::optional<double> c_star;
  SizeEstimate achieved_size;
  double bracket_low = 0.0;
  double bracket_high = 0.0;
  int iterations = 0;
  HetModel model;
};

/// Smallest critical value whose worst-case size stays at or below alpha,
/// by doubling then bisection on C -> worst_case_size(C). A candidate C
/// counts as size-controlling when estimate + 3 SE <= alpha, and the upper
/// bracket end is returned.
/// Throws NotControllable, AssumptionViolated, BadConfig or BracketFailure.
CriticalValueResult smallest_critical_value(const StatContext& ctx, const HetModel& model,
                                            double alpha, const McConfig& mc,
                                            const CritvalConfig& cfg = {});

struct SizeControlCheck {
  bool controlled = false;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  SizeEstimate estimate;
};

/// Independent re-run at twice the sample budget and a seed derived from
/// mc.seed; controlled iff estimate <= alpha + 3 SE.
SizeControlCheck verify_size_control(const StatContext& ctx, const HetModel& model, double C,
                                     double alpha, const McConfig& mc);

/// Seed used by verify_size_control for a given base seed.
std::uint64_t verification_seed(std::uint64_t seed);

}  // namespace hetsize
